//! Lattice point sets with many "enchanted" pairs, i.e. pairs of points
//! `P, Q` with `|a_P b_Q - a_Q b_P| = 1`, plus the Farey-sequence view of
//! the same condition.
//!
//! For `n >= 2` distinct points with nonnegative coordinates there are at
//! most `2n - 3` such pairs, attained by `(0,1), (1,2), .., (1,n)`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::{Budget, Error};

pub type LatticePoint = (u64, u64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPoints")]
pub struct LatticePointSet {
    points: Vec<LatticePoint>,
}

#[derive(Deserialize)]
struct RawPoints {
    points: Vec<LatticePoint>,
}

impl TryFrom<RawPoints> for LatticePointSet {
    type Error = Error;
    fn try_from(raw: RawPoints) -> Result<Self, Error> {
        LatticePointSet::new(raw.points)
    }
}

impl LatticePointSet {
    pub fn new(points: Vec<LatticePoint>) -> Result<Self, Error> {
        let mut seen = HashSet::with_capacity(points.len());
        if let Some(dup) = points.iter().find(|p| !seen.insert(**p)) {
            return Err(Error::invalid(format!("duplicate point {dup:?}")));
        }
        Ok(LatticePointSet { points })
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `|a_P b_Q - a_Q b_P|`, twice the area of the triangle `O P Q`.
pub fn shoelace_area_doubled(p: LatticePoint, q: LatticePoint) -> u128 {
    let lhs = p.0 as u128 * q.1 as u128;
    let rhs = q.0 as u128 * p.1 as u128;
    lhs.abs_diff(rhs)
}

fn enchanted(p: LatticePoint, q: LatticePoint) -> bool {
    shoelace_area_doubled(p, q) == 1
}

/// Number of index pairs `i < j` whose points are enchanted.
pub fn count_enchanted(set: &LatticePointSet) -> usize {
    count_points(&set.points)
}

fn count_points(points: &[LatticePoint]) -> usize {
    points.iter().enumerate().map(|(i, &p)| points[i + 1..].iter().filter(|&&q| enchanted(p, q)).count()).sum()
}

/// `{(0,1)} ∪ {(1,k) : 2 <= k <= n}`, which has `2n - 3` enchanted pairs.
pub fn construct_extremal(n: u64) -> Result<LatticePointSet, Error> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    let points = std::iter::once((0, 1)).chain((2..=n).map(|k| (1, k))).collect();
    LatticePointSet::new(points)
}

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(u64, u64)", into = "(u64, u64)")]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        if num.gcd(&den) != 1 {
            return Err(Error::invalid(format!("{num}/{den} is not reduced")));
        }
        Ok(Fraction { num, den })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// `num' * den - num * den'` for `self = num/den`, `other = num'/den'`;
    /// positive when `other` is the larger fraction.
    pub fn cross(&self, other: &Fraction) -> i128 {
        other.num as i128 * self.den as i128 - self.num as i128 * other.den as i128
    }

    pub fn mediant(&self, other: &Fraction) -> Fraction {
        // The mediant of two Farey neighbours is already reduced; reduce anyway
        // so the invariant holds for arbitrary inputs.
        let (num, den) = (self.num + other.num, self.den + other.den);
        let g = num.gcd(&den);
        Fraction { num: num / g, den: den / g }
    }
}

impl TryFrom<(u64, u64)> for Fraction {
    type Error = Error;
    fn try_from((num, den): (u64, u64)) -> Result<Self, Error> {
        Fraction::new(num, den)
    }
}

impl From<Fraction> for (u64, u64) {
    fn from(f: Fraction) -> Self {
        (f.num, f.den)
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        0.cmp(&self.cross(other))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Inserts the mediant between `seq[position]` and `seq[position + 1]`,
/// which must be Farey neighbours.
pub fn mediant_insert(seq: &[Fraction], position: usize) -> Result<Vec<Fraction>, Error> {
    let (left, right) = match (seq.get(position), seq.get(position + 1)) {
        (Some(l), Some(r)) => (l, r),
        _ => {
            return Err(Error::invalid(format!(
                "position {position} has no right neighbour in a sequence of length {}",
                seq.len()
            )))
        }
    };
    if left.cross(right).abs() != 1 {
        return Err(Error::precondition(format!("{left} and {right} are not Farey neighbours")));
    }
    let mut out = Vec::with_capacity(seq.len() + 1);
    out.extend_from_slice(&seq[..=position]);
    out.push(left.mediant(right));
    out.extend_from_slice(&seq[position + 1..]);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FareySequence {
    pub order: u64,
    pub terms: Vec<Fraction>,
}

/// Reduced fractions in `[0, 1]` with denominator at most `m`, ascending.
/// Built by enumerating, reducing and sorting, which keeps the neighbour
/// recurrence free to serve as an independent check.
pub fn farey_sequence(m: u64) -> Result<FareySequence, Error> {
    if m == 0 {
        return Err(Error::invalid("Farey order must be positive"));
    }
    let mut terms: Vec<Fraction> = (1..=m)
        .flat_map(|b| (0..=b).filter(move |a| a.gcd(&b) == 1).map(move |a| Fraction { num: a, den: b }))
        .collect();
    terms.sort();
    Ok(FareySequence { order: m, terms })
}

/// `|a' b - a b'| = 1` for reduced fractions in `[0, 1]`.
pub fn are_farey_neighbors(x: Fraction, y: Fraction) -> Result<bool, Error> {
    for f in [x, y] {
        if f.num > f.den {
            return Err(Error::invalid(format!("{f} lies outside [0, 1]")));
        }
    }
    Ok(x.cross(&y).abs() == 1)
}

/// Like [`are_farey_neighbors`] but takes raw numerator/denominator pairs
/// and rejects unreduced input.
pub fn are_farey_neighbors_raw(x: (u64, u64), y: (u64, u64)) -> Result<bool, Error> {
    are_farey_neighbors(Fraction::try_from(x)?, Fraction::try_from(y)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BruteForceResult {
    pub n: usize,
    pub coord_bound: u64,
    pub max_count: usize,
    pub witness: LatticePointSet,
    pub subsets_examined: u64,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Maximum enchanted-pair count over all `n`-subsets of `[0, bound]^2`.
/// Subsets are visited in lexicographic order of grid index (row-major in
/// `(a, b)`), and the first maximiser is kept.
pub fn brute_force_max(n: usize, coord_bound: u64, budget: &mut Budget) -> Result<BruteForceResult, Error> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    let side = coord_bound.checked_add(1).ok_or_else(|| Error::invalid("bound too large"))?;
    let grid_len = side.checked_mul(side).ok_or_else(|| Error::invalid("bound too large"))?;
    if (n as u64) > grid_len {
        return Err(Error::invalid(format!("grid has only {grid_len} points, cannot pick {n}")));
    }
    budget.reserve(binomial(grid_len as u128, n as u128))?;
    let grid: Vec<LatticePoint> = (0..side).flat_map(|a| (0..side).map(move |b| (a, b))).collect();

    // Incremental count: adding point `g` contributes its enchanted partners
    // among those already chosen.
    fn recurse(
        grid: &[LatticePoint],
        n: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        count: usize,
        best: &mut (usize, Vec<usize>, u64),
        budget: &mut Budget,
    ) -> Result<(), Error> {
        if chosen.len() == n {
            budget.tick()?;
            best.2 += 1;
            if count > best.0 || best.1.is_empty() {
                best.0 = count;
                best.1 = chosen.clone();
            }
            return Ok(());
        }
        for i in start..=grid.len() - (n - chosen.len()) {
            let gain = chosen.iter().filter(|&&j| enchanted(grid[i], grid[j])).count();
            chosen.push(i);
            recurse(grid, n, i + 1, chosen, count + gain, best, budget)?;
            chosen.pop();
        }
        Ok(())
    }

    let mut best = (0, Vec::new(), 0);
    recurse(&grid, n, 0, &mut Vec::with_capacity(n), 0, &mut best, budget)?;
    let witness = LatticePointSet::new(best.1.iter().map(|&i| grid[i]).collect())?;
    Ok(BruteForceResult { n, coord_bound, max_count: best.0, witness, subsets_examined: best.2 })
}
