//! Beams in an `n x n x n` cube.
//!
//! Cells are labelled by their corner furthest from the origin, so each
//! coordinate runs over `1..=n`. A beam of type `x` at `(a, b)` is the row of
//! cells `(t, a, b)`, type `y` is `(a, t, b)` and type `z` is `(a, b, t)`.
//!
//! A configuration is valid when it is nonempty, no two beams share a cell,
//! and every one of the four long side faces of every beam either lies on
//! the cube boundary or shares at least one unit square with a side face of
//! another beam.
//!
//! Validity is decided structurally from beam coordinates, so very large
//! cubes (n = 2020) never materialise cell sets. [`cells_of`] exists for
//! small-scale cross-checks.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Budget, Error};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        self as usize
    }

    /// The two axes perpendicular to `self`, in `x < y < z` order.
    pub fn others(self) -> [Axis; 2] {
        match self {
            Axis::X => [Axis::Y, Axis::Z],
            Axis::Y => [Axis::X, Axis::Z],
            Axis::Z => [Axis::X, Axis::Y],
        }
    }

    /// The axis different from both `self` and `other` (which must differ).
    fn third(self, other: Axis) -> Axis {
        debug_assert_ne!(self, other);
        Axis::ALL.into_iter().find(|&c| c != self && c != other).unwrap()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// A beam position. Ordering is `(axis, a, b)`, the witness order used by
/// the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Beam {
    pub axis: Axis,
    pub a: u32,
    pub b: u32,
}

pub type Cell = [u32; 3];

impl Beam {
    pub fn new(axis: Axis, a: u32, b: u32) -> Self {
        Beam { axis, a, b }
    }

    pub fn x(a: u32, b: u32) -> Self {
        Beam::new(Axis::X, a, b)
    }

    pub fn y(a: u32, b: u32) -> Self {
        Beam::new(Axis::Y, a, b)
    }

    pub fn z(a: u32, b: u32) -> Self {
        Beam::new(Axis::Z, a, b)
    }

    pub fn in_bounds(&self, n: u32) -> bool {
        (1..=n).contains(&self.a) && (1..=n).contains(&self.b)
    }

    /// The beam's constant coordinate along `along`; `None` for its own axis.
    pub fn fixed(&self, along: Axis) -> Option<u32> {
        let [first, second] = self.axis.others();
        if along == first {
            Some(self.a)
        } else if along == second {
            Some(self.b)
        } else {
            None
        }
    }

    fn with_fixed(&self, along: Axis, value: u32) -> Beam {
        let mut out = *self;
        if along == self.axis.others()[0] {
            out.a = value;
        } else {
            out.b = value;
        }
        out
    }

    /// Whether two beam positions share a cell.
    pub fn intersects(&self, other: &Beam) -> bool {
        if self.axis == other.axis {
            return self == other;
        }
        let t = self.axis.third(other.axis);
        self.fixed(t) == other.fixed(t)
    }

    fn cell(&self, t: u32) -> Cell {
        match self.axis {
            Axis::X => [t, self.a, self.b],
            Axis::Y => [self.a, t, self.b],
            Axis::Z => [self.a, self.b, t],
        }
    }
}

impl fmt::Display for Beam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{}({},{})", self.axis, self.a, self.b)
    }
}

/// The `n` cells occupied by `beam`, in increasing `t`.
pub fn cells_of(beam: &Beam, n: u32) -> Result<Vec<Cell>, Error> {
    if !beam.in_bounds(n) {
        return Err(Error::invalid(format!("{beam} lies outside a cube of side {n}")));
    }
    Ok((1..=n).map(|t| beam.cell(t)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Low,
    High,
}

/// One of the four long faces of a beam: the face perpendicular to
/// `normal` on the `side` nearer to or further from the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Face {
    pub normal: Axis,
    pub side: Side,
}

impl Face {
    pub fn all_of(beam: &Beam) -> [Face; 4] {
        let [p, q] = beam.axis.others();
        [
            Face { normal: p, side: Side::Low },
            Face { normal: p, side: Side::High },
            Face { normal: q, side: Side::Low },
            Face { normal: q, side: Side::High },
        ]
    }

    /// The beam position on the other side of this face, or `None` when the
    /// face lies on the cube boundary.
    pub fn neighbor(&self, beam: &Beam, n: u32) -> Option<Beam> {
        let c = beam.fixed(self.normal).expect("face normal is perpendicular to the beam");
        match self.side {
            Side::Low if c > 1 => Some(beam.with_fixed(self.normal, c - 1)),
            Side::High if c < n => Some(beam.with_fixed(self.normal, c + 1)),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct BeamConfig {
    n: u32,
    beams: BTreeSet<Beam>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct RawConfig {
    n: u32,
    beams: Vec<Beam>,
}

impl TryFrom<RawConfig> for BeamConfig {
    type Error = Error;
    fn try_from(raw: RawConfig) -> Result<Self, Error> {
        BeamConfig::new(raw.n, raw.beams)
    }
}

impl From<BeamConfig> for RawConfig {
    fn from(cfg: BeamConfig) -> Self {
        RawConfig { n: cfg.n, beams: cfg.beams.into_iter().collect() }
    }
}

fn check_side(n: u32) -> Result<(), Error> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("cube side must be a positive even integer, got {n}")));
    }
    Ok(())
}

impl BeamConfig {
    /// Rejects odd sides, out-of-bounds beams and duplicates.
    pub fn new(n: u32, beams: impl IntoIterator<Item = Beam>) -> Result<Self, Error> {
        check_side(n)?;
        let mut set = BTreeSet::new();
        for beam in beams {
            if !beam.in_bounds(n) {
                return Err(Error::invalid(format!("{beam} lies outside a cube of side {n}")));
            }
            if !set.insert(beam) {
                return Err(Error::invalid(format!("duplicate beam {beam}")));
            }
        }
        Ok(BeamConfig { n, beams: set })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn beams(&self) -> impl ExactSizeIterator<Item = &Beam> + '_ {
        self.beams.iter()
    }

    pub fn len(&self) -> usize {
        self.beams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beams.is_empty()
    }

    pub fn contains(&self, beam: &Beam) -> bool {
        self.beams.contains(beam)
    }
}

/// Lookup of beams by `(beam axis, coordinate axis, coordinate value)`.
struct SlotIndex<'a> {
    positions: &'a BTreeSet<Beam>,
    slots: HashMap<(Axis, Axis, u32), Vec<Beam>>,
}

impl<'a> SlotIndex<'a> {
    fn build(beams: &'a BTreeSet<Beam>) -> Self {
        let mut slots: HashMap<_, Vec<Beam>> = HashMap::new();
        for beam in beams {
            for along in beam.axis.others() {
                let key = (beam.axis, along, beam.fixed(along).unwrap());
                slots.entry(key).or_default().push(*beam);
            }
        }
        SlotIndex { positions: beams, slots }
    }

    /// Beams of axis `axis` that share a cell with the position `line`.
    fn crossing(&self, line: &Beam, axis: Axis) -> &[Beam] {
        let t = line.axis.third(axis);
        self.slots.get(&(axis, t, line.fixed(t).unwrap())).map_or(&[], Vec::as_slice)
    }

    /// Some beam other than those along `exclude` meets the position `line`.
    fn meets(&self, line: &Beam, exclude: Axis) -> bool {
        self.positions.contains(line)
            || line.axis.others().into_iter().filter(|&ax| ax != exclude).any(|ax| !self.crossing(line, ax).is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub n: u32,
    pub beam_count: usize,
    /// At least one beam is placed.
    pub positive: bool,
    /// Every beam spans the cube between unit cells on opposite faces.
    pub spans_cube: bool,
    /// No two beams share a cell.
    pub disjoint: bool,
    /// Every long face touches the boundary or another beam's face.
    pub faces_supported: bool,
    pub valid: bool,
    /// First overlapping pair found, if any.
    pub overlap: Option<(Beam, Beam)>,
    pub unsupported_faces: Vec<(Beam, Face)>,
}

pub fn check_config(cfg: &BeamConfig) -> ValidityReport {
    let n = cfg.n;
    let index = SlotIndex::build(&cfg.beams);
    let spans_cube = cfg.beams.iter().all(|b| b.in_bounds(n));

    let overlap = cfg.beams.iter().find_map(|beam| {
        beam.axis
            .others()
            .into_iter()
            .find_map(|ax| index.crossing(beam, ax).first())
            .map(|other| (*beam.min(other), *beam.max(other)))
    });

    let mut unsupported_faces = Vec::new();
    for beam in &cfg.beams {
        for face in Face::all_of(beam) {
            let supported = match face.neighbor(beam, n) {
                None => true,
                Some(line) => index.meets(&line, face.normal),
            };
            if !supported {
                unsupported_faces.push((*beam, face));
            }
        }
    }

    let positive = !cfg.beams.is_empty();
    let disjoint = overlap.is_none();
    let faces_supported = unsupported_faces.is_empty();
    ValidityReport {
        n,
        beam_count: cfg.beams.len(),
        positive,
        spans_cube,
        disjoint,
        faces_supported,
        valid: positive && spans_cube && disjoint && faces_supported,
        overlap,
        unsupported_faces,
    }
}

/// The `3n/2`-beam configuration: for `i = 1..=n/2`, the beams
/// `B_x(2i-1, 2i-1)`, `B_y(2i-1, n-2i+2)` and `B_z(2i, 2i)`.
pub fn construct_extremal(n: u32) -> Result<BeamConfig, Error> {
    check_side(n)?;
    let beams = (1..=n / 2)
        .flat_map(|i| [Beam::x(2 * i - 1, 2 * i - 1), Beam::y(2 * i - 1, n - 2 * i + 2), Beam::z(2 * i, 2 * i)]);
    BeamConfig::new(n, beams)
}

/// Type x beams sit at odd `(a, b)`, type y at odd `a` and even `b`, type z
/// at even `(a, b)`. Three such classes can never share a cell.
pub fn parity_structure_holds(cfg: &BeamConfig) -> bool {
    cfg.beams.iter().all(|beam| {
        let (a_odd, b_odd) = (beam.a % 2 == 1, beam.b % 2 == 1);
        match beam.axis {
            Axis::X => a_odd && b_odd,
            Axis::Y => a_odd && !b_odd,
            Axis::Z => !a_odd && !b_odd,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DirectionalCounts {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub xy_at_least_n: bool,
    pub yz_at_least_n: bool,
    pub zx_at_least_n: bool,
}

impl DirectionalCounts {
    pub fn all_pair_sums_at_least_n(&self) -> bool {
        self.xy_at_least_n && self.yz_at_least_n && self.zx_at_least_n
    }
}

pub fn directional_counts(cfg: &BeamConfig) -> DirectionalCounts {
    let mut counts = [0usize; 3];
    for beam in &cfg.beams {
        counts[beam.axis.index()] += 1;
    }
    let [nx, ny, nz] = counts;
    let n = cfg.n as usize;
    DirectionalCounts {
        nx,
        ny,
        nz,
        xy_at_least_n: nx + ny >= n,
        yz_at_least_n: ny + nz >= n,
        zx_at_least_n: nz + nx >= n,
    }
}

/// Largest side the exhaustive search supports: cells must fit in a `u64`.
pub const SEARCH_MAX_SIDE: u32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub minimum: usize,
    pub witness: BeamConfig,
    pub counts: DirectionalCounts,
}

/// Precomputed bitmask form of every beam position in a small cube.
struct SmallCube {
    n: u32,
    beams: Vec<Beam>,
    cells: Vec<u64>,
    /// Cell masks across each long face; `None` on the boundary.
    faces: Vec<[Option<u64>; 4]>,
}

impl SmallCube {
    fn new(n: u32) -> Self {
        let mut beams: Vec<Beam> = Axis::ALL
            .into_iter()
            .flat_map(|ax| (1..=n).flat_map(move |a| (1..=n).map(move |b| Beam::new(ax, a, b))))
            .collect();
        beams.sort();
        let cells = beams.iter().map(|b| Self::mask(b, n)).collect();
        let faces =
            beams.iter().map(|b| Face::all_of(b).map(|f| f.neighbor(b, n).map(|l| Self::mask(&l, n)))).collect();
        SmallCube { n, beams, cells, faces }
    }

    fn cell_bit(c: Cell, n: u32) -> u64 {
        1u64 << ((c[0] - 1) * n * n + (c[1] - 1) * n + (c[2] - 1))
    }

    fn mask(beam: &Beam, n: u32) -> u64 {
        (1..=n).fold(0, |m, t| m | Self::cell_bit(beam.cell(t), n))
    }

    /// Face condition for a set of pairwise disjoint beams with union `occupied`.
    fn faces_ok(&self, chosen: &[usize], occupied: u64) -> bool {
        chosen.iter().all(|&i| self.faces[i].iter().all(|f| f.is_none_or(|m| m & occupied != 0)))
    }

    /// Permutation of beam indices induced by each of the 48 symmetries of
    /// the cube.
    fn symmetries(&self) -> Vec<Vec<usize>> {
        let n = self.n;
        let by_mask: HashMap<u64, usize> = self.cells.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut out = Vec::with_capacity(48);
        for perm in perms {
            for flips in 0..8u32 {
                let map_cell = |c: Cell| -> Cell {
                    let mut d = [0; 3];
                    for k in 0..3 {
                        let v = c[perm[k]];
                        d[k] = if flips >> k & 1 == 1 { n + 1 - v } else { v };
                    }
                    d
                };
                let image = self
                    .beams
                    .iter()
                    .map(|b| {
                        let m = (1..=n).fold(0, |m, t| m | Self::cell_bit(map_cell(b.cell(t)), n));
                        by_mask[&m]
                    })
                    .collect();
                out.push(image);
            }
        }
        out
    }

    /// Smallest beam index in each orbit of the symmetry group.
    fn orbit_representatives(&self) -> Vec<usize> {
        let syms = self.symmetries();
        (0..self.beams.len()).filter(|&i| syms.iter().all(|g| g[i] >= i)).collect()
    }

    /// Lexicographically first valid `k`-subset whose beams all come from
    /// `start..` and which contains every index in `prefix`.
    fn first_valid(
        &self,
        k: usize,
        chosen: &mut Vec<usize>,
        occupied: u64,
        start: usize,
        skip: Option<usize>,
        budget: &mut Budget,
    ) -> Result<bool, Error> {
        budget.tick()?;
        if chosen.len() == k {
            return Ok(self.faces_ok(chosen, occupied));
        }
        let remaining = k - chosen.len();
        for i in start..self.beams.len() {
            if self.beams.len() - i < remaining {
                break;
            }
            if Some(i) == skip || self.cells[i] & occupied != 0 {
                continue;
            }
            chosen.push(i);
            if self.first_valid(k, chosen, occupied | self.cells[i], i + 1, skip, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    /// Whether any valid `k`-subset exists. Every configuration is
    /// equivalent under the cube's symmetries to one containing an orbit
    /// representative, so only those subsets are explored.
    fn exists(&self, k: usize, reps: &[usize], budget: &mut Budget) -> Result<bool, Error> {
        for &r in reps {
            let mut chosen = vec![r];
            if self.first_valid(k, &mut chosen, self.cells[r], 0, Some(r), budget)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Smallest `k <= max_size` admitting a valid configuration, with the
/// lexicographically least witness under `(axis, a, b)` order. `Ok(None)`
/// means no valid configuration of size at most `max_size` exists;
/// running out of `budget` is an error.
pub fn search_minimum(n: u32, max_size: usize, budget: &mut Budget) -> Result<Option<SearchOutcome>, Error> {
    check_side(n)?;
    if n > SEARCH_MAX_SIDE {
        return Err(Error::ResourceExceeded(format!(
            "exhaustive beam search supports n <= {SEARCH_MAX_SIDE}, got {n}"
        )));
    }
    let cube = SmallCube::new(n);
    let reps = cube.orbit_representatives();
    for k in 1..=max_size.min(cube.beams.len()) {
        if !cube.exists(k, &reps, budget)? {
            continue;
        }
        let mut chosen = Vec::with_capacity(k);
        let found = cube.first_valid(k, &mut chosen, 0, 0, None, budget)?;
        assert!(found, "symmetric search found a size-{k} configuration the plain search missed");
        let witness = BeamConfig::new(n, chosen.iter().map(|&i| cube.beams[i]))?;
        let counts = directional_counts(&witness);
        return Ok(Some(SearchOutcome { minimum: k, witness, counts }));
    }
    Ok(None)
}

/// Orbit representatives of beam positions under the cube's symmetry group.
pub fn beam_orbit_representatives(n: u32) -> Result<Vec<Beam>, Error> {
    check_side(n)?;
    if n > SEARCH_MAX_SIDE {
        return Err(Error::invalid(format!("symmetry tables support n <= {SEARCH_MAX_SIDE}")));
    }
    let cube = SmallCube::new(n);
    Ok(cube.orbit_representatives().into_iter().map(|i| cube.beams[i]).collect())
}

/// Images of `cfg` under all 48 symmetries of the cube (small cubes only).
pub fn symmetric_images(cfg: &BeamConfig) -> Result<Vec<BeamConfig>, Error> {
    if cfg.n > SEARCH_MAX_SIDE {
        return Err(Error::invalid(format!("symmetry tables support n <= {SEARCH_MAX_SIDE}")));
    }
    let cube = SmallCube::new(cfg.n);
    let pos: HashMap<Beam, usize> = cube.beams.iter().enumerate().map(|(i, b)| (*b, i)).collect();
    let images: HashSet<Vec<Beam>> = cube
        .symmetries()
        .iter()
        .map(|g| {
            let mut v: Vec<Beam> = cfg.beams.iter().map(|b| cube.beams[g[pos[b]]]).collect();
            v.sort();
            v
        })
        .collect();
    let mut images: Vec<Vec<Beam>> = images.into_iter().collect();
    images.sort();
    images.into_iter().map(|v| BeamConfig::new(cfg.n, v)).collect()
}
