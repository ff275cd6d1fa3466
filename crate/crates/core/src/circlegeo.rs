//! An acute triangle `ABC` inscribed in a circle with center `O`, a point
//! `X` on the minor arc `AB`, `D = CX ∩ AB`, and the circumcenters `O1`,
//! `O2` of `ADX` and `BDX`.
//!
//! The area of `O O1 O2` equals `AB * CD / (8 sin(∠ADC))` and is smallest
//! when `CX ⊥ AB`. This module computes both sides of that identity
//! independently in double precision and locates the minimiser numerically.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Sub};

use serde::Serialize;

use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn midpoint(self, o: Point) -> Point {
        Point::new((self.x + o.x) / 2.0, (self.y + o.y) / 2.0)
    }

    fn perp(self) -> Point {
        Point::new(-self.y, self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Intersection of the lines `p + s*u` and `q + t*v`.
fn line_intersection(p: Point, u: Point, q: Point, v: Point) -> Option<Point> {
    let den = u.cross(v);
    let scale = u.norm() * v.norm();
    if den.abs() <= 1e-14 * scale {
        return None;
    }
    let s = (q - p).cross(v) / den;
    Some(p + u * s)
}

/// Circumcenter as the intersection of the perpendicular bisectors of
/// `PQ` and `QR`.
pub fn circumcenter(p: Point, q: Point, r: Point) -> Option<Point> {
    line_intersection(p.midpoint(q), (q - p).perp(), q.midpoint(r), (r - q).perp())
}

/// Area by the shoelace formula.
pub fn triangle_area(p: Point, q: Point, r: Point) -> f64 {
    ((q - p).cross(r - p) / 2.0).abs()
}

/// Margin, in radians, kept between `X` and the endpoints of the arc.
pub const ARC_MARGIN: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleScene {
    pub a: Point,
    pub b: Point,
    pub c: Point,
    pub o: Point,
    pub radius: f64,
    /// Polar angle (about `O`) where the minor arc `AB` starts; the arc runs
    /// counterclockwise for `arc_span` radians.
    pub arc_start: f64,
    pub arc_span: f64,
}

pub fn build_scene(a: Point, b: Point, c: Point) -> Result<TriangleScene, Error> {
    let scale = a.dist(b).max(b.dist(c)).max(c.dist(a));
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid("triangle vertices must be finite and distinct"));
    }
    if ((b - a).cross(c - a)).abs() <= 1e-12 * scale * scale {
        return Err(Error::invalid("triangle vertices are collinear"));
    }
    for (name, v, p, q) in [("A", a, b, c), ("B", b, c, a), ("C", c, a, b)] {
        let cos_num = (p - v).dot(q - v);
        if cos_num <= 1e-12 * scale * scale {
            return Err(Error::invalid(format!("triangle is not acute: angle at {name} is at least 90 degrees")));
        }
    }
    let o = circumcenter(a, b, c).ok_or_else(|| Error::Numerical("circumcenter undefined".into()))?;
    let radius = o.dist(a);
    for v in [b, c] {
        if (o.dist(v) - radius).abs() > 1e-9 * radius {
            return Err(Error::Numerical("circumcenter is not equidistant from the vertices".into()));
        }
    }

    let angle = |p: Point| (p.y - o.y).atan2(p.x - o.x);
    let ccw = |from: f64, to: f64| (to - from).rem_euclid(TAU);
    let (ta, tb, tc) = (angle(a), angle(b), angle(c));
    // Start from whichever endpoint makes the counterclockwise sweep avoid C.
    let (arc_start, arc_span) = if ccw(ta, tc) < ccw(ta, tb) { (tb, ccw(tb, ta)) } else { (ta, ccw(ta, tb)) };
    debug_assert!(arc_span < PI);
    Ok(TriangleScene { a, b, c, o, radius, arc_start, arc_span })
}

impl TriangleScene {
    pub fn point_at(&self, theta: f64) -> Point {
        self.o + Point::new(theta.cos(), theta.sin()) * self.radius
    }

    /// Position of `theta` along the arc, in `[0, 2π)` from `arc_start`.
    pub fn arc_offset(&self, theta: f64) -> f64 {
        (theta - self.arc_start).rem_euclid(TAU)
    }

    /// Admissible parameter interval for `X`, endpoints trimmed by
    /// [`ARC_MARGIN`].
    pub fn arc_interval(&self) -> (f64, f64) {
        (self.arc_start + ARC_MARGIN, self.arc_start + self.arc_span - ARC_MARGIN)
    }

    pub fn ab(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Second intersection of the altitude from `C` with the circle: the
    /// point `X` with `CX ⊥ AB`. Returned as an arc parameter.
    pub fn altitude_point(&self) -> (f64, Point) {
        let d = (self.b - self.a).perp();
        let t = -2.0 * (self.c - self.o).dot(d) / d.dot(d);
        let x = self.c + d * t;
        let theta = self.arc_start + self.arc_offset((x.y - self.o.y).atan2(x.x - self.o.x));
        (theta, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SceneAtX {
    pub theta: f64,
    pub x: Point,
    pub d: Point,
    pub o1: Point,
    pub o2: Point,
    /// Midpoints of `CX`, `DX`, `AD` and `DB`.
    pub m: Point,
    pub n: Point,
    pub r: Point,
    pub s: Point,
}

pub fn scene_at(scene: &TriangleScene, theta: f64) -> Result<SceneAtX, Error> {
    let offset = scene.arc_offset(theta);
    // Slack so that the endpoints of `arc_interval` survive the round trip.
    let slack = 1e-12;
    if !(ARC_MARGIN - slack..=scene.arc_span - ARC_MARGIN + slack).contains(&offset) {
        return Err(Error::invalid(format!(
            "theta = {theta} is not inside the minor arc AB (offset {offset:.6} of {:.6})",
            scene.arc_span
        )));
    }
    let TriangleScene { a, b, c, .. } = *scene;
    let x = scene.point_at(theta);
    let d = line_intersection(c, x - c, a, b - a).ok_or_else(|| Error::Numerical("CX is parallel to AB".into()))?;
    let o1 = circumcenter(a, d, x).ok_or_else(|| Error::Numerical("A, D, X are collinear".into()))?;
    let o2 = circumcenter(b, d, x).ok_or_else(|| Error::Numerical("B, D, X are collinear".into()))?;
    Ok(SceneAtX { theta, x, d, o1, o2, m: c.midpoint(x), n: d.midpoint(x), r: a.midpoint(d), s: d.midpoint(b) })
}

/// Shoelace area of `O O1 O2`.
pub fn area_oo1o2(scene: &TriangleScene, at: &SceneAtX) -> f64 {
    triangle_area(scene.o, at.o1, at.o2)
}

/// `sin(∠ADC)`.
pub fn sin_adc(scene: &TriangleScene, at: &SceneAtX) -> f64 {
    let (u, v) = (scene.a - at.d, scene.c - at.d);
    (u.cross(v) / (u.norm() * v.norm())).abs()
}

/// `AB * CD / (8 sin(∠ADC))`.
pub fn closed_form_area(scene: &TriangleScene, at: &SceneAtX) -> f64 {
    scene.ab() * scene.c.dist(at.d) / (8.0 * sin_adc(scene, at))
}

/// `|(C - X) · (B - A)| / (|CX| |AB|)`, zero exactly when `CX ⊥ AB`.
pub fn perpendicularity_residual(scene: &TriangleScene, x: Point) -> f64 {
    let (u, v) = (scene.c - x, scene.b - scene.a);
    (u.dot(v) / (u.norm() * v.norm())).abs()
}

/// Metric facts about one configuration, each as a relative (or, for
/// collinearity, normalized) residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub area_vs_closed_form: f64,
    pub o1_n_o2_collinear: f64,
    pub mn_vs_half_cd: f64,
    pub rs_vs_half_ab: f64,
    pub o1o2_vs_formula: f64,
    pub distance_o_to_o1o2_vs_mn: f64,
    pub circumcenter_equidistance: f64,
}

impl IdentityResiduals {
    pub fn max(&self) -> f64 {
        [
            self.area_vs_closed_form,
            self.o1_n_o2_collinear,
            self.mn_vs_half_cd,
            self.rs_vs_half_ab,
            self.o1o2_vs_formula,
            self.distance_o_to_o1o2_vs_mn,
            self.circumcenter_equidistance,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn rel(actual: f64, expected: f64) -> f64 {
    (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
}

pub fn identity_residuals(scene: &TriangleScene, at: &SceneAtX) -> IdentityResiduals {
    let area = area_oo1o2(scene, at);
    let sin = sin_adc(scene, at);
    let cd = scene.c.dist(at.d);
    let o1o2 = at.o1.dist(at.o2);
    let mn = at.m.dist(at.n);
    let dist_o = ((at.o2 - at.o1).cross(scene.o - at.o1)).abs() / o1o2;
    let collinear = ((at.n - at.o1).cross(at.o2 - at.o1)).abs() / (o1o2 * o1o2);
    let equi = [
        rel(at.o1.dist(at.d), at.o1.dist(scene.a)),
        rel(at.o1.dist(at.x), at.o1.dist(scene.a)),
        rel(at.o2.dist(at.d), at.o2.dist(scene.b)),
        rel(at.o2.dist(at.x), at.o2.dist(scene.b)),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    IdentityResiduals {
        area_vs_closed_form: rel(area, closed_form_area(scene, at)),
        o1_n_o2_collinear: collinear,
        mn_vs_half_cd: rel(mn, cd / 2.0),
        rs_vs_half_ab: rel(at.r.dist(at.s), scene.ab() / 2.0),
        o1o2_vs_formula: rel(o1o2, scene.ab() / (2.0 * sin)),
        distance_o_to_o1o2_vs_mn: rel(dist_o, mn),
        circumcenter_equidistance: equi,
    }
}

/// Default coarse-scan resolution for [`minimize_over_arc`].
pub const DEFAULT_SAMPLES: usize = 1024;
/// Golden-section refinement stops once the bracket is this narrow.
pub const REFINE_WIDTH: f64 = 1e-10;
const MAX_REFINE_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcMinimum {
    pub theta: f64,
    pub x: Point,
    pub area: f64,
    pub perpendicularity_residual: f64,
    /// `θ*` minus the arc parameter of the altitude point.
    pub altitude_gap: f64,
    pub iterations: usize,
}

/// Minimises the area over the arc: a uniform scan of `samples` points,
/// then golden-section search on the bracket around the best sample.
pub fn minimize_over_arc(scene: &TriangleScene, samples: usize) -> Result<ArcMinimum, Error> {
    if samples < 3 {
        return Err(Error::invalid(format!("need at least 3 samples, got {samples}")));
    }
    let area_at = |theta: f64| -> Result<f64, Error> {
        let at = scene_at(scene, theta)?;
        Ok(area_oo1o2(scene, &at))
    };
    let (lo, hi) = scene.arc_interval();
    let step = (hi - lo) / (samples - 1) as f64;
    let grid = |i: usize| if i + 1 == samples { hi } else { lo + step * i as f64 };

    // Ties go to the smallest theta.
    let mut best = (0, f64::INFINITY);
    for i in 0..samples {
        let v = area_at(grid(i))?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (mut left, mut right) = (grid(best.0.saturating_sub(1)), grid((best.0 + 1).min(samples - 1)));

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut p = right - inv_phi * (right - left);
    let mut q = left + inv_phi * (right - left);
    let (mut fp, mut fq) = (area_at(p)?, area_at(q)?);
    let mut iterations = 0;
    while right - left > REFINE_WIDTH {
        if iterations >= MAX_REFINE_ITERATIONS {
            return Err(Error::Numerical(format!(
                "golden-section search did not reach width {REFINE_WIDTH} in {MAX_REFINE_ITERATIONS} iterations"
            )));
        }
        iterations += 1;
        if fp <= fq {
            right = q;
            (q, fq) = (p, fp);
            p = right - inv_phi * (right - left);
            fp = area_at(p)?;
        } else {
            left = p;
            (p, fp) = (q, fq);
            q = left + inv_phi * (right - left);
            fq = area_at(q)?;
        }
    }
    let theta = (left + right) / 2.0;
    let area = area_at(theta)?;
    let x = scene.point_at(theta);
    let (alt_theta, _) = scene.altitude_point();
    Ok(ArcMinimum {
        theta,
        x,
        area,
        perpendicularity_residual: perpendicularity_residual(scene, x),
        altitude_gap: theta - alt_theta,
        iterations,
    })
}

/// Random acute triangle on a circle of random radius and center, drawn
/// from `rng`. Rejection-samples vertex angles until all triangle angles are
/// below `π/2 - 0.05` and above `0.05`, so scenes are not near-degenerate.
pub fn random_acute_scene<R: rand::Rng + ?Sized>(rng: &mut R) -> TriangleScene {
    loop {
        let center = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let radius = rng.gen_range(0.5..10.0);
        let angles: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..TAU)).collect();
        let pts: Vec<Point> = angles.iter().map(|t| center + Point::new(t.cos(), t.sin()) * radius).collect();
        let tri_angle = |v: Point, p: Point, q: Point| {
            let (u, w) = (p - v, q - v);
            (u.dot(w) / (u.norm() * w.norm())).clamp(-1.0, 1.0).acos()
        };
        let inner =
            [tri_angle(pts[0], pts[1], pts[2]), tri_angle(pts[1], pts[2], pts[0]), tri_angle(pts[2], pts[0], pts[1])];
        if inner.iter().all(|&t| t > 0.05 && t < PI / 2.0 - 0.05) {
            if let Ok(scene) = build_scene(pts[0], pts[1], pts[2]) {
                return scene;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn equilateral() -> TriangleScene {
        let v = |deg: f64| Point::new(deg.to_radians().cos(), deg.to_radians().sin());
        build_scene(v(210.0), v(330.0), v(90.0)).unwrap()
    }

    #[test]
    fn equilateral_scene() {
        let s = equilateral();
        assert!(s.o.norm() < 1e-12);
        assert!((s.radius - 1.0).abs() < 1e-12);
        // Minor arc AB is the bottom arc from 210 to 330 degrees.
        assert!((s.arc_span - 2.0 * PI / 3.0).abs() < 1e-12);
        let mid = s.arc_start + s.arc_span / 2.0;
        assert!((s.point_at(mid) - Point::new(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn scene_from_bisectors() {
        // Bisector of AB: x = 2. |O - A| = |O - C| with O = (2, k):
        // 4 + k^2 = 1 + (k - 3)^2  =>  k = 1, radius sqrt(5).
        let s = build_scene(Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(1.0, 3.0)).unwrap();
        assert!((s.o - Point::new(2.0, 1.0)).norm() < 1e-12);
        assert!((s.radius - 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_triangles() {
        let right = build_scene(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0));
        assert!(right.unwrap_err().to_string().contains("not acute"));
        let obtuse = build_scene(Point::new(0.0, 0.0), Point::new(4.0, 0.0), Point::new(1.0, 0.5));
        assert!(obtuse.is_err());
        let flat = build_scene(Point::new(0.0, 0.0), Point::new(1.0, 1.0), Point::new(2.0, 2.0));
        assert!(flat.unwrap_err().to_string().contains("collinear"));
    }

    #[test]
    fn symmetric_x_gives_perpendicular_cx() {
        let s = equilateral();
        let at = scene_at(&s, s.arc_start + s.arc_span / 2.0).unwrap();
        assert!(perpendicularity_residual(&s, at.x) < 1e-12);
        assert!(((at.d - s.a).cross(s.b - s.a)).abs() < 1e-12);
    }

    #[test]
    fn explicit_intersection() {
        let s = build_scene(Point::new(-3.0, -4.0), Point::new(3.0, -4.0), Point::new(0.0, 5.0)).unwrap();
        assert!(s.o.norm() < 1e-12 && (s.radius - 5.0).abs() < 1e-12);
        let at = scene_at(&s, -PI / 2.0).unwrap();
        assert!((at.x - Point::new(0.0, -5.0)).norm() < 1e-12);
        assert!((at.d - Point::new(0.0, -4.0)).norm() < 1e-12);
        // CX ⊥ AB: area is AB * CD / 8 = 6 * 9 / 8.
        assert!((area_oo1o2(&s, &at) - 6.75).abs() < 1e-9);
    }

    #[test]
    fn d_lies_on_segment_ab() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let s = random_acute_scene(&mut rng);
            let (lo, hi) = s.arc_interval();
            let at = scene_at(&s, rng.gen_range(lo..hi)).unwrap();
            let t = (at.d - s.a).dot(s.b - s.a) / (s.b - s.a).dot(s.b - s.a);
            assert!(t > 0.0 && t < 1.0);
            assert!(((at.d - s.a).cross(s.b - s.a)).abs() < 1e-9 * s.ab() * s.ab());
        }
    }

    #[test]
    fn rejects_points_off_the_arc() {
        let s = equilateral();
        assert!(scene_at(&s, s.arc_start).is_err());
        assert!(scene_at(&s, s.arc_start + s.arc_span).is_err());
        assert!(scene_at(&s, PI / 2.0).is_err());
        assert!(scene_at(&s, s.arc_start + s.arc_span / 3.0 + TAU).is_ok());
    }

    #[test]
    fn identities_hold_on_random_scenes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..30 {
            let s = random_acute_scene(&mut rng);
            let (lo, hi) = s.arc_interval();
            for _ in 0..30 {
                let at = scene_at(&s, rng.gen_range(lo..hi)).unwrap();
                let r = identity_residuals(&s, &at);
                assert!(r.area_vs_closed_form < 1e-9, "{r:?}");
                assert!(r.o1_n_o2_collinear < 1e-8, "{r:?}");
                assert!(r.max() < 1e-8, "{r:?}");
            }
        }
    }

    #[test]
    fn area_grows_toward_endpoints() {
        let s = build_scene(Point::new(-3.0, -4.0), Point::new(3.0, -4.0), Point::new(1.0, 24f64.sqrt())).unwrap();
        let (alt, _) = s.altitude_point();
        let (lo, hi) = s.arc_interval();
        let area = |t: f64| area_oo1o2(&s, &scene_at(&s, t).unwrap());
        let mut prev = area(alt);
        for k in 1..=20 {
            let t = alt + (hi - alt) * k as f64 / 20.0;
            let v = area(t);
            assert!(v > prev);
            prev = v;
        }
        let mut prev = area(alt);
        for k in 1..=20 {
            let v = area(alt - (alt - lo) * k as f64 / 20.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn minimizer_equilateral() {
        let s = equilateral();
        let m = minimize_over_arc(&s, DEFAULT_SAMPLES).unwrap();
        assert!((m.theta - (s.arc_start + s.arc_span / 2.0)).abs() < 1e-6);
        assert!((m.x - Point::new(0.0, -1.0)).norm() < 1e-6);
    }

    #[test]
    fn minimizer_matches_altitude_point() {
        let s = build_scene(Point::new(-3.0, -4.0), Point::new(3.0, -4.0), Point::new(1.0, 24f64.sqrt())).unwrap();
        let m = minimize_over_arc(&s, DEFAULT_SAMPLES).unwrap();
        let (_, alt) = s.altitude_point();
        // Altitude from C = (1, √24) is x = 1; second intersection (1, -√24).
        assert!((alt - Point::new(1.0, -(24f64.sqrt()))).norm() < 1e-12);
        assert!(m.altitude_gap.abs() < 1e-6, "{m:?}");
        assert!(m.perpendicularity_residual < 1e-6);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let s = random_acute_scene(&mut rng);
            let m = minimize_over_arc(&s, 256).unwrap();
            assert!(m.perpendicularity_residual < 1e-6, "{m:?}");
            assert!(m.altitude_gap.abs() < 1e-6, "{m:?}");
        }
    }

    #[test]
    fn minimizer_needs_three_samples() {
        assert!(minimize_over_arc(&equilateral(), 2).is_err());
    }
}
