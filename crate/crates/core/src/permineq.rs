//! The rearrangement gap bound.
//!
//! For non-increasing `x, y` in `R^n` with zero sums and unit sums of
//! squares, `Σ x_i y_i - Σ x_i y_{n+1-i} >= 2 / sqrt(n - 1)`.
//!
//! With `f(σ) = Σ x_i y_σ(i)`, the identity permutation maximises `f` and
//! the reversal minimises it; over all of `S_n`, `Σ f = 0` and
//! `Σ f² = n (n-2)!`. Together with the spread bound
//! `a_1 - a_k >= 2 sqrt(A / k)` for zero-sum sequences these give the
//! inequality.
//!
//! Floating-point checks (sampling, the bound itself) run on [`AdmissiblePair`];
//! the permutation-sum identities are checked exactly on [`ExactPair`].

use itertools::Itertools;
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::exactmath::{factorial, Rational};
use crate::Error;

/// Tolerance on the zero-sum and unit-norm constraints of an
/// [`AdmissiblePair`].
pub const ADMISSIBLE_TOL: f64 = 1e-12;
/// Slack allowed below `2 / sqrt(n - 1)` for floating-point drift.
pub const BOUND_TOL: f64 = 1e-9;
/// Largest `n` for which permutations are enumerated.
pub const MAX_ENUMERATION: usize = 7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    x: Vec<f64>,
    y: Vec<f64>,
}

fn check_vector(name: &str, v: &[f64]) -> Result<(), Error> {
    if v.iter().any(|t| !t.is_finite()) {
        return Err(Error::precondition(format!("{name} has a non-finite entry")));
    }
    if let Some(i) = (1..v.len()).find(|&i| v[i] > v[i - 1]) {
        return Err(Error::precondition(format!("{name} is not non-increasing at position {}", i + 1)));
    }
    let sum: f64 = v.iter().sum();
    if sum.abs() > ADMISSIBLE_TOL {
        return Err(Error::precondition(format!("sum of {name} is {sum:e}, not 0")));
    }
    let sq: f64 = v.iter().map(|t| t * t).sum();
    if (sq - 1.0).abs() > ADMISSIBLE_TOL {
        return Err(Error::precondition(format!("sum of squares of {name} is {sq}, not 1")));
    }
    Ok(())
}

impl AdmissiblePair {
    /// Validates all constraints, naming the first one violated.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, Error> {
        if x.len() != y.len() {
            return Err(Error::precondition(format!("x has {} entries, y has {}", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::precondition("need n >= 2"));
        }
        check_vector("x", &x)?;
        check_vector("y", &y)?;
        Ok(AdmissiblePair { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// `f(σ) = Σ x_i y_σ(i)` with `σ` given as a 0-based permutation.
    pub fn f(&self, sigma: &[usize]) -> f64 {
        self.x.iter().zip(sigma).map(|(xi, &j)| xi * self.y[j]).sum()
    }
}

/// `Σ x_i y_i - Σ x_i y_{n+1-i}`.
pub fn rearrangement_gap(pair: &AdmissiblePair) -> f64 {
    let n = pair.n();
    (0..n).map(|i| pair.x[i] * (pair.y[i] - pair.y[n - 1 - i])).sum()
}

/// `2 / sqrt(n - 1)`.
pub fn lower_bound(n: usize) -> f64 {
    2.0 / ((n - 1) as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub gap: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn check_bound(pair: &AdmissiblePair) -> BoundCheck {
    let gap = rearrangement_gap(pair);
    let bound = lower_bound(pair.n());
    BoundCheck { gap, bound, pass: gap >= bound - BOUND_TOL }
}

/// Draws a standard normal vector, removes its mean, normalises, and sorts
/// descending. Degenerate draws are redrawn.
fn draw_unit_zero_sum(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|t| *t -= mean);
        let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        v.iter_mut().for_each(|t| *t /= norm);
        v.sort_by(|a, b| b.total_cmp(a));
        // Rounding can leave the sum a few ulps off zero; recentre once.
        let drift = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|t| *t -= drift);
        if check_vector("sample", &v).is_ok() {
            return v;
        }
    }
}

/// Deterministic stream of admissible pairs. Trial `i` uses its own ChaCha
/// stream derived from `(seed, i)`, so any trial can be regenerated alone
/// and trials may be processed in any order.
pub fn sample_admissible(n: usize, trials: usize, seed: u64) -> Result<impl Iterator<Item = AdmissiblePair>, Error> {
    if n < 2 {
        return Err(Error::invalid(format!("need n >= 2, got {n}")));
    }
    Ok((0..trials).map(move |trial| sample_trial(n, seed, trial as u64)))
}

/// The pair emitted as trial `trial` of [`sample_admissible`].
pub fn sample_trial(n: usize, seed: u64, trial: u64) -> AdmissiblePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let x = draw_unit_zero_sum(n, &mut rng);
    let y = draw_unit_zero_sum(n, &mut rng);
    AdmissiblePair::new(x, y).expect("sampler emits admissible pairs")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSummary {
    pub n: usize,
    pub trials: usize,
    pub violations: usize,
    pub bound: f64,
    pub min_gap: f64,
    pub min_margin: f64,
    /// Pairs where enumeration was run and the identity/reversal failed to
    /// attain max/min. Only counted for `n <= MAX_ENUMERATION`.
    pub extreme_failures: usize,
    pub extremes_checked: bool,
}

/// Runs [`check_bound`] (and, for small `n`, [`verify_extremes`]) over a
/// sampled stream.
pub fn sample_and_check(n: usize, trials: usize, seed: u64) -> Result<SampleSummary, Error> {
    let bound = lower_bound(n.max(2));
    let extremes_checked = n <= MAX_ENUMERATION;
    let perms = extremes_checked.then(|| all_permutations(n));
    let mut summary = SampleSummary {
        n,
        trials,
        violations: 0,
        bound,
        min_gap: f64::INFINITY,
        min_margin: f64::INFINITY,
        extreme_failures: 0,
        extremes_checked,
    };
    for pair in sample_admissible(n, trials, seed)? {
        let check = check_bound(&pair);
        summary.violations += usize::from(!check.pass);
        summary.min_gap = summary.min_gap.min(check.gap);
        summary.min_margin = summary.min_margin.min(check.gap - check.bound);
        if let Some(perms) = &perms {
            summary.extreme_failures += usize::from(!extremes_with(&pair, perms));
        }
    }
    Ok(summary)
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    (0..n).permutations(n).collect()
}

fn extremes_with(pair: &AdmissiblePair, perms: &[Vec<usize>]) -> bool {
    let n = pair.n();
    let identity: Vec<usize> = (0..n).collect();
    let reverse: Vec<usize> = (0..n).rev().collect();
    let (f_id, f_rev) = (pair.f(&identity), pair.f(&reverse));
    perms.iter().all(|s| {
        let v = pair.f(s);
        v <= f_id + 1e-12 && v >= f_rev - 1e-12
    })
}

/// Whether the identity attains `max f` and the reversal attains `min f`
/// over all of `S_n`, within `1e-12`.
pub fn verify_extremes(pair: &AdmissiblePair) -> Result<bool, Error> {
    if pair.n() > MAX_ENUMERATION {
        return Err(Error::ResourceExceeded(format!("permutation enumeration is capped at n = {MAX_ENUMERATION}")));
    }
    Ok(extremes_with(pair, &all_permutations(pair.n())))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LemmaCheck {
    pub spread: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `a_1 - a_k >= 2 sqrt(A / k)` for `a` with `a_1` maximal, `a_k` minimal,
/// `Σ a = 0` and `Σ a² = A`.
///
/// The sum constraints are checked to `1e-10` scaled by `max(1, A)`, since
/// long sequences of O(1) terms accumulate rounding in proportion to `A`.
pub fn lemma_gap_bound(a: &[f64], big_a: f64) -> Result<LemmaCheck, Error> {
    let k = a.len();
    if k == 0 {
        return Err(Error::precondition("empty sequence"));
    }
    let (first, last) = (a[0], a[k - 1]);
    if let Some(i) = a.iter().position(|&t| t > first || t < last) {
        return Err(Error::precondition(format!("a_1 >= a_i >= a_k fails at i = {}", i + 1)));
    }
    let tol = 1e-10 * big_a.abs().max(1.0);
    let sum: f64 = a.iter().sum();
    if sum.abs() > tol {
        return Err(Error::precondition(format!("sum is {sum:e}, not 0")));
    }
    let sq: f64 = a.iter().map(|t| t * t).sum();
    if (sq - big_a).abs() > tol {
        return Err(Error::precondition(format!("sum of squares is {sq}, not A = {big_a}")));
    }
    let spread = first - last;
    let bound = 2.0 * (big_a / k as f64).sqrt();
    Ok(LemmaCheck { spread, bound, pass: spread >= bound - BOUND_TOL })
}

/// Applies the spread bound to `a_σ = f(σ)` over all of `S_n`, ordered so
/// the identity comes first and the reversal last, with `A = n (n-2)!`.
pub fn lemma_on_permutation_values(pair: &AdmissiblePair) -> Result<LemmaCheck, Error> {
    let n = pair.n();
    if n > MAX_ENUMERATION {
        return Err(Error::ResourceExceeded(format!("permutation enumeration is capped at n = {MAX_ENUMERATION}")));
    }
    let identity: Vec<usize> = (0..n).collect();
    let reverse: Vec<usize> = (0..n).rev().collect();
    let mut values = vec![pair.f(&identity)];
    values.extend(all_permutations(n).iter().filter(|s| **s != identity && **s != reverse).map(|s| pair.f(s)));
    if n > 1 {
        values.push(pair.f(&reverse));
    }
    let big_a = (n * (1..=n.saturating_sub(2)).product::<usize>()) as f64;
    lemma_gap_bound(&values, big_a)
}

/// Non-increasing rational vectors with zero sums. Their squared norms need
/// not be 1: the unit-norm pair is `x / |x|, y / |y|`, and identities are
/// checked in the scale-free form `Σ f² / (|x|² |y|²)`, which keeps
/// everything rational.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactPair {
    x: Vec<Rational>,
    y: Vec<Rational>,
}

fn check_exact(name: &str, v: &[Rational]) -> Result<(), Error> {
    if let Some(i) = (1..v.len()).find(|&i| v[i] > v[i - 1]) {
        return Err(Error::precondition(format!("{name} is not non-increasing at position {}", i + 1)));
    }
    let sum: Rational = v.iter().sum();
    if !sum.is_zero() {
        return Err(Error::precondition(format!("sum of {name} is {sum}, not exactly 0")));
    }
    if v.iter().all(Rational::is_zero) {
        return Err(Error::precondition(format!("{name} is the zero vector")));
    }
    Ok(())
}

impl ExactPair {
    pub fn new(x: Vec<Rational>, y: Vec<Rational>) -> Result<Self, Error> {
        if x.len() != y.len() {
            return Err(Error::precondition(format!("x has {} entries, y has {}", x.len(), y.len())));
        }
        if x.len() < 2 {
            return Err(Error::precondition("need n >= 2"));
        }
        check_exact("x", &x)?;
        check_exact("y", &y)?;
        Ok(ExactPair { x, y })
    }

    /// Like [`ExactPair::new`] but additionally requires `Σx² = Σy² = 1`
    /// exactly.
    pub fn new_unit(x: Vec<Rational>, y: Vec<Rational>) -> Result<Self, Error> {
        let pair = Self::new(x, y)?;
        for (name, v) in [("x", &pair.x), ("y", &pair.y)] {
            let sq: Rational = v.iter().map(Rational::square).sum();
            if sq != Rational::one() {
                return Err(Error::precondition(format!("sum of squares of {name} is {sq}, not exactly 1")));
            }
        }
        Ok(pair)
    }

    pub fn from_integers(x: &[i64], y: &[i64]) -> Result<Self, Error> {
        Self::new(x.iter().map(|&t| t.into()).collect(), y.iter().map(|&t| t.into()).collect())
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    pub fn y(&self) -> &[Rational] {
        &self.y
    }

    pub fn x_norm_sq(&self) -> Rational {
        self.x.iter().map(Rational::square).sum()
    }

    pub fn y_norm_sq(&self) -> Rational {
        self.y.iter().map(Rational::square).sum()
    }

    /// A canonical pair for each `n >= 2`:
    /// `x = (n-1, -1, .., -1)` and `y = (1, .., 1, -(n-1))`.
    pub fn canonical(n: usize) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {n}")));
        }
        let m = n as i64 - 1;
        let x: Vec<i64> = std::iter::once(m).chain(std::iter::repeat_n(-1, n - 1)).collect();
        let y: Vec<i64> = std::iter::repeat_n(1, n - 1).chain(std::iter::once(-m)).collect();
        Self::from_integers(&x, &y)
    }
    /// Reference pairs with `x = y` for `2 <= n <= 6`:
    /// `(1,-1)`, `(1,0,-1)`, `(1/2,1/2,-1/2,-1/2)`, `(2,1,0,-1,-2)` and
    /// `(1/2,1/2,0,0,-1/2,-1/2)`. Other `n` fall back to [`ExactPair::canonical`].
    pub fn reference(n: usize) -> Result<Self, Error> {
        let v: &[&str] = match n {
            2 => &["1", "-1"],
            3 => &["1", "0", "-1"],
            4 => &["1/2", "1/2", "-1/2", "-1/2"],
            5 => &["2", "1", "0", "-1", "-2"],
            6 => &["1/2", "1/2", "0", "0", "-1/2", "-1/2"],
            _ => return Self::canonical(n),
        };
        let v: Vec<Rational> = v.iter().map(|t| t.parse().expect("literal rationals")).collect();
        Self::new(v.clone(), v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PermutationStatistics {
    pub n: usize,
    /// `Σ_σ f(σ)` on the stored vectors. Scaling by `1/(|x||y|)` preserves
    /// whether this vanishes.
    pub sum_f: Rational,
    /// `Σ_σ f(σ)²` normalised to unit vectors: `Σ f² / (|x|² |y|²)`.
    pub sum_f_squared: Rational,
    /// `n (n-2)!`.
    pub expected_sum_f_squared: Rational,
}

impl PermutationStatistics {
    pub fn identities_hold(&self) -> bool {
        self.sum_f.is_zero() && self.sum_f_squared == self.expected_sum_f_squared
    }
}

/// Exact `Σ f` and `Σ f²` over all `n!` permutations.
pub fn permutation_sums(pair: &ExactPair) -> Result<PermutationStatistics, Error> {
    let n = pair.n();
    if n > MAX_ENUMERATION {
        return Err(Error::ResourceExceeded(format!("permutation enumeration is capped at n = {MAX_ENUMERATION}")));
    }
    let mut sum_f = Rational::zero();
    let mut sum_f_sq = Rational::zero();
    for sigma in (0..n).permutations(n) {
        let f: Rational = pair.x.iter().zip(&sigma).map(|(xi, &j)| xi * &pair.y[j]).sum();
        sum_f_sq = sum_f_sq + f.square();
        sum_f = sum_f + f;
    }
    let scale = pair.x_norm_sq() * pair.y_norm_sq();
    let expected = Rational::from(BigInt::from(n) * BigInt::from(factorial(n as u32 - 2)));
    Ok(PermutationStatistics { n, sum_f, sum_f_squared: sum_f_sq / scale, expected_sum_f_squared: expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rv(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| r(s)).collect()
    }

    #[test]
    fn n2_equality() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = AdmissiblePair::new(vec![h, -h], vec![h, -h]).unwrap();
        let c = check_bound(&pair);
        assert!((c.gap - 2.0).abs() < 1e-12);
        assert_eq!(c.bound, 2.0);
        assert!((c.gap - c.bound).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn n3_example() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = AdmissiblePair::new(vec![h, 0.0, -h], vec![h, 0.0, -h]).unwrap();
        let c = check_bound(&pair);
        assert!((c.gap - 2.0).abs() < 1e-12);
        assert!((c.bound - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equal_vectors_gap_formula() {
        for n in 2..=10 {
            for pair in sample_admissible(n, 50, 9).unwrap() {
                let x = pair.x().to_vec();
                let same = AdmissiblePair::new(x.clone(), x.clone()).unwrap();
                let cross: f64 = (0..n).map(|i| x[i] * x[n - 1 - i]).sum();
                assert!((rearrangement_gap(&same) - (1.0 - cross)).abs() < 1e-12);
                assert!(check_bound(&same).pass);
            }
        }
    }

    #[test]
    fn constraint_violations_are_named() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let e = AdmissiblePair::new(vec![-h, h], vec![h, -h]).unwrap_err().to_string();
        assert!(e.contains("x is not non-increasing"), "{e}");
        let e = AdmissiblePair::new(vec![h, -h], vec![1.0, -0.5]).unwrap_err().to_string();
        assert!(e.contains("sum of y"), "{e}");
        let e = AdmissiblePair::new(vec![1.0, -1.0], vec![h, -h]).unwrap_err().to_string();
        assert!(e.contains("sum of squares of x"), "{e}");
        assert!(AdmissiblePair::new(vec![h, -h], vec![h, 0.0, -h]).is_err());
        assert!(AdmissiblePair::new(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_admissible() {
        let a: Vec<_> = sample_admissible(5, 20, 42).unwrap().collect();
        let b: Vec<_> = sample_admissible(5, 20, 42).unwrap().collect();
        assert_eq!(a, b);
        assert_eq!(a[7], sample_trial(5, 42, 7));
        let c: Vec<_> = sample_admissible(5, 20, 43).unwrap().collect();
        assert_ne!(a, c);
        assert!(sample_admissible(1, 1, 0).is_err());
    }

    #[test]
    fn sampler_n2_is_forced() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for pair in sample_admissible(2, 100, 5).unwrap() {
            assert!((pair.x()[0] - h).abs() < 1e-12 && (pair.x()[1] + h).abs() < 1e-12);
            assert!((pair.y()[0] - h).abs() < 1e-12 && (pair.y()[1] + h).abs() < 1e-12);
        }
    }

    #[test]
    fn bound_holds_on_samples() {
        for n in 2..=12 {
            let s = sample_and_check(n, 500, 11).unwrap();
            assert_eq!(s.violations, 0, "{s:?}");
            assert_eq!(s.extreme_failures, 0, "{s:?}");
        }
    }

    /// Minimises the gap by random local search over admissible pairs and
    /// checks the bound still holds near its minimum.
    #[test]
    fn adversarial_local_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [3usize, 4, 5] {
            let project = |v: &mut Vec<f64>| -> bool {
                let mean = v.iter().sum::<f64>() / n as f64;
                v.iter_mut().for_each(|t| *t -= mean);
                let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                if norm < 1e-9 {
                    return false;
                }
                v.iter_mut().for_each(|t| *t /= norm);
                v.sort_by(|a, b| b.total_cmp(a));
                let d = v.iter().sum::<f64>() / n as f64;
                v.iter_mut().for_each(|t| *t -= d);
                true
            };
            let mut best = sample_trial(n, 3, 0);
            let mut best_gap = rearrangement_gap(&best);
            let mut step = 0.3;
            for _ in 0..20_000 {
                let mut x = best.x().to_vec();
                let mut y = best.y().to_vec();
                x.iter_mut().chain(y.iter_mut()).for_each(|t| *t += rng.gen_range(-step..step));
                if !project(&mut x) || !project(&mut y) {
                    continue;
                }
                if let Ok(p) = AdmissiblePair::new(x, y) {
                    let g = rearrangement_gap(&p);
                    if g < best_gap {
                        best = p;
                        best_gap = g;
                    }
                }
                step = (step * 0.9995f64).max(1e-4);
            }
            let c = check_bound(&best);
            assert!(c.pass, "n = {n}: {c:?}");
            assert!(c.gap - c.bound < 0.5, "search should get reasonably close: {c:?}");
        }
    }

    #[test]
    fn extremes_with_ties() {
        let q = 0.5;
        // Repeated values: several permutations attain the max.
        let pair = AdmissiblePair::new(vec![q, q, -q, -q], vec![q, q, -q, -q]).unwrap();
        assert!(verify_extremes(&pair).unwrap());
        for pair in sample_admissible(3, 50, 1).unwrap().chain(sample_admissible(5, 100, 1).unwrap()) {
            assert!(verify_extremes(&pair).unwrap());
        }
        let big = sample_trial(8, 0, 0);
        assert!(verify_extremes(&big).unwrap_err().is_resource_exceeded());
    }

    #[test]
    fn lemma_examples() {
        let c = lemma_gap_bound(&[1.0, -1.0], 2.0).unwrap();
        assert_eq!((c.spread, c.bound), (2.0, 2.0));
        assert!(c.pass);
        let c = lemma_gap_bound(&[1.0, 0.0, -1.0], 2.0).unwrap();
        assert!((c.bound - 2.0 * (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((c.bound - 1.632_993_161_855_452).abs() < 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn lemma_preconditions() {
        assert!(lemma_gap_bound(&[0.0, 1.0, -1.0], 2.0).unwrap_err().to_string().contains("i = 2"));
        assert!(lemma_gap_bound(&[1.0, -0.5], 1.25).unwrap_err().to_string().contains("sum is"));
        assert!(lemma_gap_bound(&[1.0, -1.0], 3.0).unwrap_err().to_string().contains("squares"));
        assert!(lemma_gap_bound(&[], 0.0).is_err());
    }

    #[test]
    fn lemma_on_random_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10_000 {
            let k = rng.gen_range(2..12);
            let mut a: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let mean = a.iter().sum::<f64>() / k as f64;
            a.iter_mut().for_each(|t| *t -= mean);
            a.sort_by(|p, q| q.total_cmp(p));
            let big_a: f64 = a.iter().map(|t| t * t).sum();
            // Any order with the extremes at the ends is allowed.
            a[1..k - 1].reverse();
            let c = lemma_gap_bound(&a, big_a).unwrap();
            assert!(c.pass, "{a:?}");
        }
    }

    #[test]
    fn lemma_on_permutation_values_passes() {
        for n in 2..=7 {
            for pair in sample_admissible(n, 20, 8).unwrap() {
                let c = lemma_on_permutation_values(&pair).unwrap();
                assert!(c.pass, "n = {n}: {c:?}");
                assert!((c.bound - lower_bound(n)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_examples() {
        // x = y = (a, -a) with 2a^2 = 1, written unnormalised.
        let s2 = permutation_sums(&ExactPair::from_integers(&[1, -1], &[1, -1]).unwrap()).unwrap();
        assert!(s2.sum_f.is_zero());
        assert_eq!(s2.sum_f_squared, r("2"));
        // x = y = (a, 0, -a).
        let s3 = permutation_sums(&ExactPair::from_integers(&[1, 0, -1], &[1, 0, -1]).unwrap()).unwrap();
        assert_eq!(s3.sum_f_squared, r("3"));
        // Exactly unit vectors, no rescaling needed.
        let half = rv(&["1/2", "1/2", "-1/2", "-1/2"]);
        let p4 = ExactPair::new_unit(half.clone(), half).unwrap();
        let s4 = permutation_sums(&p4).unwrap();
        assert!(s4.sum_f.is_zero());
        assert_eq!(s4.sum_f_squared, r("8"));
        assert!(s4.identities_hold());
    }

    /// Brute-force oracle for n = 4, x = y = (1/2, 1/2, -1/2, -1/2): f(σ)
    /// depends only on how many of the first two positions map into {0, 1}.
    #[test]
    fn n4_oracle() {
        let mut sum_sq = 0.0;
        for sigma in (0..4).permutations(4) {
            let v = [0.5, 0.5, -0.5, -0.5];
            let f: f64 = (0..4).map(|i| v[i] * v[sigma[i]]).sum();
            sum_sq += f * f;
        }
        assert_eq!(sum_sq, 8.0);
    }

    #[test]
    fn exact_identities_for_documented_pairs() {
        let pairs = [
            ExactPair::from_integers(&[1, -1], &[1, -1]).unwrap(),
            ExactPair::from_integers(&[1, 0, -1], &[2, -1, -1]).unwrap(),
            ExactPair::new_unit(rv(&["1/2", "1/2", "-1/2", "-1/2"]), rv(&["1/2", "1/2", "-1/2", "-1/2"])).unwrap(),
            ExactPair::from_integers(&[2, 1, 0, -1, -2], &[4, -1, -1, -1, -1]).unwrap(),
            ExactPair::new_unit(
                rv(&["1/2", "1/2", "0", "0", "-1/2", "-1/2"]),
                rv(&["1/2", "1/2", "0", "0", "-1/2", "-1/2"]),
            )
            .unwrap(),
        ];
        for p in &pairs {
            let s = permutation_sums(p).unwrap();
            assert!(s.identities_hold(), "{s:?}");
        }
        for n in 2..=7 {
            assert!(permutation_sums(&ExactPair::canonical(n).unwrap()).unwrap().identities_hold());
        }
    }

    #[test]
    fn exact_rejections() {
        assert!(ExactPair::from_integers(&[1, 1], &[1, -1]).is_err());
        assert!(ExactPair::from_integers(&[-1, 1], &[1, -1]).is_err());
        assert!(ExactPair::from_integers(&[0, 0], &[1, -1]).is_err());
        assert!(ExactPair::new_unit(rv(&["1", "-1"]), rv(&["1", "-1"])).is_err());
        let big = ExactPair::canonical(8).unwrap();
        assert!(permutation_sums(&big).unwrap_err().is_resource_exceeded());
    }

    fn arb_exact(n: usize) -> impl Strategy<Value = ExactPair> {
        let vec = move || {
            prop::collection::vec((-20i64..20, 1i64..5), n).prop_filter_map("zero vector", move |v| {
                let mut v: Vec<Rational> = v.into_iter().map(|(p, q)| Rational::new(p, q).unwrap()).collect();
                let mean: Rational = v.iter().sum::<Rational>() / Rational::from(n as i64);
                v.iter_mut().for_each(|t| *t = &*t - &mean);
                v.sort_by(|a, b| b.cmp(a));
                (!v.iter().all(Rational::is_zero)).then_some(v)
            })
        };
        (vec(), vec()).prop_map(|(x, y)| ExactPair::new(x, y).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn exact_identities_random(p in (2usize..=6).prop_flat_map(arb_exact)) {
            let s = permutation_sums(&p).unwrap();
            prop_assert!(s.identities_hold(), "{:?}", s);
        }
    }
}
