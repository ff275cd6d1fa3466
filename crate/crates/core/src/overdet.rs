//! Exact interpolation and overdetermined point sets.
//!
//! A set `S` is overdetermined when `|S| >= 2` and some nonzero polynomial
//! of degree at most `|S| - 2` passes through every point. With distinct
//! x-coordinates that is the same as the interpolating polynomial `f_S`
//! being nonzero with degree at most `|S| - 2`. Points sharing an
//! x-coordinate have no interpolating polynomial, and a set whose points
//! all have `y = 0` is not overdetermined: the only polynomial through it
//! of low enough degree is the zero polynomial.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::exactmath::{Degree, Polynomial, Rational};
use crate::{Budget, Error};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(Rational, Rational)", into = "(Rational, Rational)")]
pub struct PlanePoint {
    pub x: Rational,
    pub y: Rational,
}

impl PlanePoint {
    pub fn new(x: impl Into<Rational>, y: impl Into<Rational>) -> Self {
        PlanePoint { x: x.into(), y: y.into() }
    }
}

impl From<(Rational, Rational)> for PlanePoint {
    fn from((x, y): (Rational, Rational)) -> Self {
        PlanePoint { x, y }
    }
}

impl From<PlanePoint> for (Rational, Rational) {
    fn from(p: PlanePoint) -> Self {
        (p.x, p.y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawPointSet", into = "RawPointSet")]
pub struct PlanePointSet {
    points: Vec<PlanePoint>,
}

#[derive(Serialize, Deserialize)]
struct RawPointSet {
    points: Vec<PlanePoint>,
}

impl TryFrom<RawPointSet> for PlanePointSet {
    type Error = Error;
    fn try_from(raw: RawPointSet) -> Result<Self, Error> {
        PlanePointSet::new(raw.points)
    }
}

impl From<PlanePointSet> for RawPointSet {
    fn from(s: PlanePointSet) -> Self {
        RawPointSet { points: s.points }
    }
}

impl PlanePointSet {
    pub fn new(points: Vec<PlanePoint>) -> Result<Self, Error> {
        let mut seen = HashSet::with_capacity(points.len());
        if let Some(dup) = points.iter().find(|p| !seen.insert(*p)) {
            return Err(Error::invalid(format!("duplicate point ({}, {})", dup.x, dup.y)));
        }
        Ok(PlanePointSet { points })
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_integers(points: &[(i64, i64)]) -> Result<Self, Error> {
        Self::new(points.iter().map(|&(x, y)| PlanePoint::new(x, y)).collect())
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn has_distinct_x(&self) -> bool {
        distinct_x(self.points.iter())
    }

    /// The points selected by the set bits of `mask`.
    pub fn subset(&self, mask: u64) -> PlanePointSet {
        PlanePointSet {
            points: self
                .points
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect(),
        }
    }
}

fn distinct_x<'a>(points: impl Iterator<Item = &'a PlanePoint>) -> bool {
    let mut seen = HashSet::new();
    points.into_iter().all(|p| seen.insert(&p.x))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Interpolation {
    Exists {
        polynomial: Polynomial,
        degree: Degree,
    },
    /// Two points share an x-coordinate.
    SharedX,
}

impl Serialize for Interpolation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            exists: bool,
            polynomial: Option<&'a Polynomial>,
            degree: Option<Degree>,
        }
        match self {
            Interpolation::Exists { polynomial, degree } => {
                Repr { exists: true, polynomial: Some(polynomial), degree: Some(*degree) }
            }
            Interpolation::SharedX => Repr { exists: false, polynomial: None, degree: None },
        }
        .serialize(serializer)
    }
}

impl Interpolation {
    pub fn exists(&self) -> bool {
        matches!(self, Interpolation::Exists { .. })
    }

    pub fn polynomial(&self) -> Option<&Polynomial> {
        match self {
            Interpolation::Exists { polynomial, .. } => Some(polynomial),
            Interpolation::SharedX => None,
        }
    }
}

/// Newton divided-difference coefficients `c_0, .., c_{m-1}` for points with
/// distinct x-coordinates, so that
/// `f(x) = sum_k c_k (x - x_0) .. (x - x_{k-1})`.
fn newton_coefficients(points: &[&PlanePoint]) -> Vec<Rational> {
    let mut table: Vec<Rational> = points.iter().map(|p| p.y.clone()).collect();
    let m = table.len();
    for level in 1..m {
        for i in (level..m).rev() {
            let num = &table[i] - &table[i - 1];
            let den = &points[i].x - &points[i - level].x;
            table[i] = num / den;
        }
    }
    table
}

/// The unique polynomial of degree at most `|S| - 1` through every point,
/// in exact rational arithmetic.
pub fn interpolate(set: &PlanePointSet) -> Result<Interpolation, Error> {
    if set.is_empty() {
        return Err(Error::invalid("cannot interpolate an empty point set"));
    }
    if !set.has_distinct_x() {
        return Ok(Interpolation::SharedX);
    }
    let pts: Vec<&PlanePoint> = set.points.iter().collect();
    let coeffs = newton_coefficients(&pts);
    // Expand the Newton form with Horner's scheme on polynomials.
    let mut poly = Polynomial::zero();
    for k in (0..coeffs.len()).rev() {
        poly = &(&poly * &Polynomial::linear_factor(&pts[k].x)) + &Polynomial::constant(coeffs[k].clone());
    }
    let degree = poly.degree();
    Ok(Interpolation::Exists { polynomial: poly, degree })
}

fn overdetermined_points(points: &[&PlanePoint]) -> bool {
    let m = points.len();
    if m < 2 || !distinct_x(points.iter().copied()) {
        return false;
    }
    // Each Newton basis polynomial has exact degree k, so deg f_S <= m - 2
    // iff the top coefficient vanishes, and f_S = 0 iff all of them do.
    let coeffs = newton_coefficients(points);
    coeffs[m - 1].is_zero() && coeffs.iter().any(|c| !c.is_zero())
}

pub fn is_overdetermined(set: &PlanePointSet) -> bool {
    let pts: Vec<&PlanePoint> = set.points.iter().collect();
    overdetermined_points(&pts)
}

/// Largest set size [`count_overdetermined_subsets`] accepts.
pub const MAX_COUNT_SIZE: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubsetCounts {
    pub total: u64,
    /// `per_size[m]` is the number of overdetermined `m`-subsets.
    pub per_size: Vec<u64>,
}

/// Counts overdetermined subsets by enumerating bit masks in increasing
/// order.
pub fn count_overdetermined_subsets(set: &PlanePointSet) -> Result<SubsetCounts, Error> {
    let n = set.len();
    if n > MAX_COUNT_SIZE {
        return Err(Error::ResourceExceeded(format!(
            "subset enumeration is capped at {MAX_COUNT_SIZE} points, got {n}"
        )));
    }
    let mut per_size = vec![0u64; n + 1];
    let mut buf = Vec::with_capacity(n);
    for mask in 0u64..1 << n {
        buf.clear();
        buf.extend((0..n).filter(|i| mask >> i & 1 == 1).map(|i| &set.points[i]));
        if overdetermined_points(&buf) {
            per_size[buf.len()] += 1;
        }
    }
    Ok(SubsetCounts { total: per_size.iter().sum(), per_size })
}

/// `{(1,2)} ∪ {(2,1), (3,1), .., (n,1)}`: not overdetermined, with
/// `2^(n-1) - n` overdetermined subsets.
pub fn construct_extremal(n: usize) -> Result<PlanePointSet, Error> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    let points = std::iter::once(PlanePoint::new(1, 2)).chain((2..=n as i64).map(|x| PlanePoint::new(x, 1))).collect();
    PlanePointSet::new(points)
}

/// `2^(n-1) - n`.
pub fn extremal_count(n: u32) -> u64 {
    (1u64 << (n - 1)) - n as u64
}

/// Checks the monotone strengthening of the bound on `set`: whenever the
/// number of overdetermined `m`-subsets exceeds `C(n-1, m)` for some
/// `2 <= m <= n-1`, every subset of size at least `m` is overdetermined.
/// Returns the sizes `m` where the hypothesis fired, or `None` if some
/// such `m` has a non-overdetermined subset of size `>= m`.
pub fn check_monotone_strengthening(set: &PlanePointSet) -> Result<Option<Vec<usize>>, Error> {
    let n = set.len();
    let counts = count_overdetermined_subsets(set)?;
    let mut fired = Vec::new();
    for m in 2..n {
        if counts.per_size[m] as u128 > binomial(n - 1, m) {
            fired.push(m);
            for size in m..=n {
                if counts.per_size[size] as u128 != binomial(n, size) {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(fired))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExhaustiveMax {
    pub n: usize,
    pub max_count: u64,
    pub witness: PlanePointSet,
    pub candidates: u64,
}

/// Over all `n`-point subsets of the integer grid `x_range × y_range` with
/// distinct x-coordinates that are not themselves overdetermined, the most
/// overdetermined subsets any one of them has. Candidates are visited with
/// increasing x-tuples, and for each x-tuple with y-tuples in lexicographic
/// order; the first maximiser is kept.
pub fn exhaustive_max(
    n: usize,
    x_range: std::ops::RangeInclusive<i64>,
    y_range: std::ops::RangeInclusive<i64>,
    budget: &mut Budget,
) -> Result<Option<ExhaustiveMax>, Error> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 points, got {n}")));
    }
    if n > MAX_COUNT_SIZE {
        return Err(Error::ResourceExceeded(format!("n = {n} exceeds {MAX_COUNT_SIZE}")));
    }
    let xs: Vec<i64> = x_range.collect();
    let ys: Vec<i64> = y_range.collect();
    if xs.len() < n || ys.is_empty() {
        return Err(Error::invalid(format!("grid {}x{} cannot host {n} points with distinct x", xs.len(), ys.len())));
    }
    let per_x = (ys.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    budget.reserve(binomial(xs.len(), n).saturating_mul(per_x))?;

    let mut best: Option<ExhaustiveMax> = None;
    let mut candidates = 0u64;
    for xsel in itertools::Itertools::combinations(xs.iter().copied(), n) {
        for ysel in itertools::Itertools::multi_cartesian_product((0..n).map(|_| ys.iter().copied())) {
            budget.tick()?;
            let points = xsel.iter().zip(&ysel).map(|(&x, &y)| PlanePoint::new(x, y)).collect();
            let set = PlanePointSet::new(points)?;
            if is_overdetermined(&set) {
                continue;
            }
            candidates += 1;
            let total = count_overdetermined_subsets(&set)?.total;
            if best.as_ref().is_none_or(|b| total > b.max_count) {
                best = Some(ExhaustiveMax { n, max_count: total, witness: set, candidates: 0 });
            }
        }
    }
    Ok(best.map(|b| ExhaustiveMax { candidates, ..b }))
}
