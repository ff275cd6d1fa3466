//! Quadratic residues modulo an odd prime `p`, the sets
//!
//! - `A = { a in [1, p) : a and 4 - a are both non-residues }`
//! - `B = { b in [0, p) : b and 4 - b are both squares (0 included) }`
//!
//! and the map `{n, 4 - n} -> n(4 - n)` from unordered pairs of `A ∪ B`
//! onto `B`. The product of the elements of `A` is always 2 mod `p`.
//!
//! All arithmetic identifies integers with `{0, .., p - 1}`, so `4 - a` is
//! reduced mod `p` (for `p = 3`, `4` is `1`).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::exactmath::{is_prime, PrimeField, PrimeFieldElement};
use crate::Error;

/// Partition of `{1, .., p - 1}` into nonzero squares and non-squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueClassification {
    pub p: u64,
    pub residues: BTreeSet<u64>,
    pub nonresidues: BTreeSet<u64>,
}

impl ResidueClassification {
    pub fn is_residue(&self, x: u64) -> bool {
        self.residues.contains(&(x % self.p))
    }

    pub fn is_nonresidue(&self, x: u64) -> bool {
        self.nonresidues.contains(&(x % self.p))
    }

    /// Squares of the field, counting `0 = 0^2`.
    pub fn is_square(&self, x: u64) -> bool {
        x.is_multiple_of(self.p) || self.is_residue(x)
    }
}

pub fn classify_residues(p: u64) -> Result<ResidueClassification, Error> {
    let field = PrimeField::new(p)?;
    let residues: BTreeSet<u64> = field.elements().skip(1).map(|t| (t * t).value()).collect();
    let nonresidues = (1..p).filter(|x| !residues.contains(x)).collect();
    Ok(ResidueClassification { p, residues, nonresidues })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SetAB {
    pub p: u64,
    #[serde(rename = "A")]
    pub a: BTreeSet<u64>,
    #[serde(rename = "B")]
    pub b: BTreeSet<u64>,
}

impl SetAB {
    fn four_minus(&self, x: u64) -> u64 {
        (4 + self.p - x % self.p) % self.p
    }

    /// Product of `A` mod `p`. An empty `A` gives the empty product 1;
    /// [`ProductOfA::a_was_empty`] flags that case.
    pub fn product_of_a(&self) -> ProductOfA {
        let field = PrimeField::new(self.p).expect("SetAB always carries an odd prime");
        let product = self.a.iter().fold(field.one(), |acc, &x| acc * field.element(x as i64));
        ProductOfA { product, a_was_empty: self.a.is_empty() }
    }
}

pub fn compute_sets_ab(p: u64) -> Result<SetAB, Error> {
    let cls = classify_residues(p)?;
    let mut sets = SetAB { p, a: BTreeSet::new(), b: BTreeSet::new() };
    for x in 0..p {
        let y = sets.four_minus(x);
        if cls.is_nonresidue(x) && cls.is_nonresidue(y) {
            sets.a.insert(x);
        }
        if cls.is_square(x) && cls.is_square(y) {
            sets.b.insert(x);
        }
    }
    Ok(sets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProductOfA {
    pub product: PrimeFieldElement,
    pub a_was_empty: bool,
}

pub fn product_of_a(p: u64) -> Result<ProductOfA, Error> {
    Ok(compute_sets_ab(p)?.product_of_a())
}

/// One unordered pair `{n, 4 - n}` with its image `n(4 - n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairImage {
    pub pair: (u64, u64),
    pub image: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub p: u64,
    pub pairs: Vec<PairImage>,
    /// Every image lies in `B`.
    pub images_in_b: bool,
    /// Distinct pairs have distinct images.
    pub injective: bool,
    /// Every element of `B` is hit.
    pub surjective: bool,
    /// `{0, 4}` maps to `0`.
    pub zero_witness: bool,
    /// `{2, 2}` maps to `4`.
    pub four_witness: bool,
    pub holds: bool,
}

/// Exhaustively checks that `{n, 4 - n} -> n(4 - n)` is a bijection from the
/// unordered pairs of `A ∪ B` onto `B`. Requires `p >= 5`.
pub fn verify_pair_bijection(p: u64) -> Result<BijectionReport, Error> {
    if p < 5 {
        return Err(Error::precondition(format!("pair bijection needs p >= 5, got {p}")));
    }
    let sets = compute_sets_ab(p)?;
    let union: BTreeSet<u64> = sets.a.union(&sets.b).copied().collect();

    let pairs: BTreeSet<(u64, u64)> = union
        .iter()
        .map(|&n| {
            let m = sets.four_minus(n);
            (n.min(m), n.max(m))
        })
        .collect();

    let pairs: Vec<PairImage> =
        pairs.into_iter().map(|(n, m)| PairImage { pair: (n, m), image: (n * m) % p }).collect();

    let mut preimages: BTreeMap<u64, usize> = BTreeMap::new();
    for pi in &pairs {
        *preimages.entry(pi.image).or_default() += 1;
    }
    let images_in_b = pairs.iter().all(|pi| sets.b.contains(&pi.image));
    let injective = preimages.values().all(|&c| c == 1);
    let surjective = sets.b.iter().all(|b| preimages.contains_key(b));
    let lookup = |pair: (u64, u64)| pairs.iter().find(|pi| pi.pair == pair).map(|pi| pi.image);
    let four = 4 % p;
    let zero_witness = lookup((0, four)) == Some(0);
    let four_witness = lookup((2, 2)) == Some(four);

    Ok(BijectionReport {
        p,
        holds: images_in_b && injective && surjective && zero_witness && four_witness,
        pairs,
        images_in_b,
        injective,
        surjective,
        zero_witness,
        four_witness,
    })
}

/// Exhaustively checks the multiplicative behaviour of the residue
/// character: residue * residue and non-residue * non-residue are
/// residues, residue * non-residue is a non-residue.
pub fn check_character_multiplicativity(p: u64) -> Result<bool, Error> {
    let cls = classify_residues(p)?;
    let field = PrimeField::new(p)?;
    for x in 1..p {
        for y in x..p {
            let prod = (field.element(x as i64) * field.element(y as i64)).value();
            let expect_residue = cls.is_residue(x) == cls.is_residue(y);
            if cls.is_residue(prod) != expect_residue {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every `n ∈ A ∪ B` has `n(4 - n) mod p ∈ B`.
pub fn check_image_closure(p: u64) -> Result<bool, Error> {
    let sets = compute_sets_ab(p)?;
    Ok(sets.a.iter().chain(&sets.b).all(|&n| sets.b.contains(&((n * sets.four_minus(n)) % p))))
}

/// Odd primes `p <= max`, ascending.
pub fn odd_primes_up_to(max: u64) -> Vec<u64> {
    (3..=max).step_by(2).filter(|&p| is_prime(p)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepEntry {
    pub p: u64,
    pub product_mod_p: u64,
    pub a_size: usize,
    pub a_was_empty: bool,
}

/// Product of `A` for every odd prime up to `max`.
pub fn sweep(max: u64) -> Vec<SweepEntry> {
    odd_primes_up_to(max)
        .into_iter()
        .map(|p| {
            let sets = compute_sets_ab(p).expect("sweep only visits odd primes");
            let prod = sets.product_of_a();
            SweepEntry { p, product_mod_p: prod.product.value(), a_size: sets.a.len(), a_was_empty: prod.a_was_empty }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    /// Direct reading of the definition: `x` is a non-residue when no `t`
    /// has `p | x - t^2`.
    fn oracle_nonresidue(x: i64, p: i64) -> bool {
        (0..p).all(|t| (x - t * t).rem_euclid(p) != 0)
    }

    fn oracle_a(p: i64) -> BTreeSet<u64> {
        (1..p).filter(|&a| oracle_nonresidue(a, p) && oracle_nonresidue(4 - a, p)).map(|a| a as u64).collect()
    }

    #[test]
    fn classification_examples() {
        let c3 = classify_residues(3).unwrap();
        assert_eq!((c3.residues, c3.nonresidues), (set(&[1]), set(&[2])));
        let c5 = classify_residues(5).unwrap();
        assert_eq!((c5.residues, c5.nonresidues), (set(&[1, 4]), set(&[2, 3])));
        let c7 = classify_residues(7).unwrap();
        assert_eq!((c7.residues, c7.nonresidues), (set(&[1, 2, 4]), set(&[3, 5, 6])));
    }

    #[test]
    fn classification_rejects_bad_input() {
        assert_eq!(classify_residues(2), Err(Error::NotOddPrime(2)));
        assert_eq!(classify_residues(9), Err(Error::NotOddPrime(9)));
        assert!(compute_sets_ab(1).is_err());
        assert!(product_of_a(15).is_err());
    }

    #[test]
    fn classification_invariants() {
        for p in odd_primes_up_to(300) {
            let c = classify_residues(p).unwrap();
            assert_eq!(c.residues.len() as u64, (p - 1) / 2);
            assert_eq!(c.nonresidues.len() as u64, (p - 1) / 2);
            assert!(c.residues.is_disjoint(&c.nonresidues));
            let field = PrimeField::new(p).unwrap();
            for x in 1..p {
                assert_eq!(field.element(x as i64).euler_criterion(), Some(c.is_residue(x)));
            }
        }
    }

    #[test]
    fn sets_a_examples() {
        assert_eq!(compute_sets_ab(3).unwrap().a, set(&[2]));
        assert_eq!(compute_sets_ab(5).unwrap().a, set(&[2]));
        assert_eq!(compute_sets_ab(7).unwrap().a, set(&[5, 6]));
        for p in odd_primes_up_to(200) {
            assert_eq!(compute_sets_ab(p).unwrap().a, oracle_a(p as i64), "p = {p}");
        }
    }

    #[test]
    fn set_b_structure() {
        assert_eq!(compute_sets_ab(3).unwrap().b, set(&[0, 1]));
        for p in odd_primes_up_to(200) {
            let s = compute_sets_ab(p).unwrap();
            assert!(s.b.contains(&0));
            assert!(s.b.contains(&(4 % p)));
            assert!(s.a.iter().all(|&a| (1..p).contains(&a)));
            if p >= 5 {
                assert!(s.a.contains(&2) ^ s.b.contains(&2), "p = {p}");
            }
        }
    }

    #[test]
    fn products() {
        for (p, expected) in [(3, 2), (7, 2), (11, 2)] {
            let r = product_of_a(p).unwrap();
            assert_eq!(r.product.value(), expected);
            assert!(!r.a_was_empty);
        }
        // 5 * 6 = 30 = 2 mod 7
        assert_eq!(30 % 7, 2);
        let oracle: i64 = oracle_a(11).iter().map(|&a| a as i64).product::<i64>() % 11;
        assert_eq!(oracle, 2);
    }

    #[test]
    fn empty_a_is_flagged() {
        let sets = SetAB { p: 5, a: BTreeSet::new(), b: set(&[0, 4]) };
        let r = sets.product_of_a();
        assert_eq!(r.product.value(), 1);
        assert!(r.a_was_empty);
    }

    #[test]
    fn bijection_small_primes() {
        let r5 = verify_pair_bijection(5).unwrap();
        assert!(r5.holds);
        assert_eq!(r5.pairs.len(), compute_sets_ab(5).unwrap().b.len());
        assert!(verify_pair_bijection(7).unwrap().holds);
        let r13 = verify_pair_bijection(13).unwrap();
        assert!(r13.zero_witness && r13.four_witness);
        assert!(r13.pairs.contains(&PairImage { pair: (0, 4), image: 0 }));
        assert!(r13.pairs.contains(&PairImage { pair: (2, 2), image: 4 }));
    }

    #[test]
    fn bijection_needs_p_at_least_five() {
        assert!(matches!(verify_pair_bijection(3), Err(Error::Precondition(_))));
        assert!(matches!(verify_pair_bijection(9), Err(Error::NotOddPrime(9))));
    }

    #[test]
    fn character_facts_and_closure() {
        for p in odd_primes_up_to(150) {
            assert!(check_character_multiplicativity(p).unwrap(), "p = {p}");
            assert!(check_image_closure(p).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn sweep_counts_primes() {
        let s = sweep(997);
        assert_eq!(s.len(), 167);
        assert!(s.iter().all(|e| e.product_mod_p == 2 && !e.a_was_empty));
    }
}
