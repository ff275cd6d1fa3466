//! One handler per subcommand. Each returns a [`RunReport`]; errors from the
//! library propagate and are mapped to exit codes in `main`.

use std::path::Path;
use std::time::Duration;

use anyhow::Result;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use verikit::beams::{self, check_config, directional_counts, parity_structure_holds, search_minimum, BeamConfig};
use verikit::circlegeo::{
    build_scene, identity_residuals, minimize_over_arc, scene_at, IdentityResiduals, Point, TriangleScene,
};
use verikit::exactmath::Rational;
use verikit::latticepairs::{
    self, are_farey_neighbors, brute_force_max, count_enchanted, farey_sequence, LatticePointSet,
};
use verikit::overdet::{
    self, check_monotone_strengthening, count_overdetermined_subsets, exhaustive_max, extremal_count, interpolate,
    is_overdetermined, PlanePointSet,
};
use verikit::permineq::{
    self, lemma_on_permutation_values, permutation_sums, sample_and_check, verify_extremes, AdmissiblePair, ExactPair,
    MAX_ENUMERATION,
};
use verikit::residues::{compute_sets_ab, sweep, verify_pair_bijection};
use verikit::{Budget, Error};

use crate::report::{RunReport, Verdict};

/// Settings shared by every subcommand.
#[derive(Clone, Copy, Debug, Default)]
pub struct Context {
    pub seed: Option<u64>,
    pub time_limit: Option<Duration>,
}

impl Context {
    pub fn budget(&self) -> Budget {
        self.time_limit.map_or_else(Budget::default, Budget::with_time_limit)
    }
}

/// Input-file problems are usage errors, so they are reported as
/// [`Error::InvalidArgument`].
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    Ok(value)
}

pub fn residues(prime: u64, sweep_max: Option<u64>) -> Result<RunReport> {
    let sets = compute_sets_ab(prime)?;
    let product = sets.product_of_a();
    let bijection_ok = if prime >= 5 { Some(verify_pair_bijection(prime)?.holds) } else { None };
    let mut ok = product.product.value() == 2 && !product.a_was_empty && bijection_ok != Some(false);
    let mut details = json!({
        "p": prime,
        "A": sets.a,
        "B": sets.b,
        "product_mod_p": product.product.value(),
        "a_was_empty": product.a_was_empty,
        "bijection_ok": bijection_ok,
    });
    if let Some(max) = sweep_max {
        let entries = sweep(max);
        let failures: Vec<_> = entries.iter().filter(|e| e.product_mod_p != 2 || e.a_was_empty).collect();
        ok &= failures.is_empty();
        details["sweep"] = json!({
            "max": max,
            "prime_count": entries.len(),
            "primes": entries.iter().map(|e| e.p).collect::<Vec<_>>(),
            "all_product_two": failures.is_empty(),
            "failures": failures,
        });
    }
    let mut report = RunReport::new("residues", Verdict::from_bool(ok), details).param("prime", prime);
    if let Some(max) = sweep_max {
        report = report.param("sweep_max", max);
    }
    Ok(report)
}

fn beam_summary(cfg: &BeamConfig) -> (bool, Value) {
    let validity = check_config(cfg);
    let counts = directional_counts(cfg);
    let expected = 3 * cfg.n() as usize / 2;
    let ok = validity.valid && cfg.len() >= expected && counts.all_pair_sums_at_least_n();
    let details = json!({
        "n": cfg.n(),
        "beam_count": cfg.len(),
        "lower_bound": expected,
        "validity": validity,
        "counts": counts,
        "parity_structure": parity_structure_holds(cfg),
        "beams": cfg.beams().collect::<Vec<_>>(),
    });
    (ok, details)
}

pub fn beams_construct(n: u32) -> Result<RunReport> {
    let cfg = beams::construct_extremal(n)?;
    let (ok, details) = beam_summary(&cfg);
    let ok = ok && cfg.len() == 3 * n as usize / 2 && parity_structure_holds(&cfg);
    Ok(RunReport::new("beams construct", Verdict::from_bool(ok), details).param("n", n))
}

pub fn beams_check(file: &Path) -> Result<RunReport> {
    let cfg: BeamConfig = read_json(file)?;
    let (ok, details) = beam_summary(&cfg);
    Ok(RunReport::new("beams check", Verdict::from_bool(ok), details).param("file", file.display().to_string()))
}

pub fn beams_search(ctx: &Context, n: u32, max: usize) -> Result<RunReport> {
    let found = search_minimum(n, max, &mut ctx.budget())?;
    let (ok, details) = match &found {
        Some(out) => {
            let valid = check_config(&out.witness).valid;
            let ok = valid && out.counts.all_pair_sums_at_least_n();
            (
                ok,
                json!({"n": n, "minimum": out.minimum, "witness_valid": valid, "witness": out.witness, "counts": out.counts}),
            )
        }
        None => (true, json!({"n": n, "minimum": null, "witness": null})),
    };
    Ok(RunReport::new("beams search", Verdict::from_bool(ok), details).param("n", n).param("max", max))
}

fn lattice_bound(n: usize) -> usize {
    (2 * n).saturating_sub(3)
}

pub fn pairs_count(file: &Path) -> Result<RunReport> {
    let set: LatticePointSet = read_json(file)?;
    let count = count_enchanted(&set);
    let bound = lattice_bound(set.len());
    let details = json!({"n": set.len(), "count": count, "bound": bound, "attains_bound": count == bound});
    Ok(RunReport::new("pairs count", Verdict::from_bool(count <= bound), details)
        .param("file", file.display().to_string()))
}

pub fn pairs_construct(n: u64) -> Result<RunReport> {
    let set = latticepairs::construct_extremal(n)?;
    let count = count_enchanted(&set);
    let bound = lattice_bound(n as usize);
    let details = json!({"n": n, "count": count, "bound": bound, "points": set.points()});
    Ok(RunReport::new("pairs construct", Verdict::from_bool(count == bound), details).param("n", n))
}

pub fn pairs_brute(ctx: &Context, n: usize, bound: u64) -> Result<RunReport> {
    let res = brute_force_max(n, bound, &mut ctx.budget())?;
    let limit = lattice_bound(n);
    let ok = res.max_count <= limit;
    let details = json!({
        "n": n,
        "coord_bound": bound,
        "max_count": res.max_count,
        "upper_bound": limit,
        "witness": res.witness.points(),
        "subsets_examined": res.subsets_examined,
    });
    Ok(RunReport::new("pairs brute", Verdict::from_bool(ok), details).param("n", n).param("bound", bound))
}

/// Largest order for which every pair of terms is compared against adjacency.
const NEIGHBOR_CHECK_MAX_ORDER: u64 = 40;

/// Whether `are_farey_neighbors` agrees, for every pair of distinct terms of
/// the order-`m` sequence, with adjacency in the sequence of order
/// `max(den)`.
pub fn farey_neighbor_agreement(m: u64) -> Result<bool> {
    let seqs: Vec<_> = (1..=m).map(farey_sequence).collect::<Result<_, _>>()?;
    let terms = &seqs[m as usize - 1].terms;
    for (i, x) in terms.iter().enumerate() {
        for y in &terms[i + 1..] {
            let local = &seqs[x.den().max(y.den()) as usize - 1].terms;
            let (pi, pj) = (local.binary_search(x).unwrap(), local.binary_search(y).unwrap());
            if (pi.abs_diff(pj) == 1) != are_farey_neighbors(*x, *y)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn pairs_farey(order: u64) -> Result<RunReport> {
    let seq = farey_sequence(order)?;
    let determinants_ok = seq.terms.windows(2).all(|w| w[0].cross(&w[1]) == 1);
    let agreement = if order <= NEIGHBOR_CHECK_MAX_ORDER { Some(farey_neighbor_agreement(order)?) } else { None };
    let ok = determinants_ok && agreement != Some(false);
    let details = json!({
        "order": order,
        "length": seq.terms.len(),
        "terms": seq.terms.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "adjacent_determinants_one": determinants_ok,
        "neighbors_match_adjacency": agreement,
    });
    Ok(RunReport::new("pairs farey", Verdict::from_bool(ok), details).param("order", order))
}

pub fn overdet_check(file: &Path) -> Result<RunReport> {
    let set: PlanePointSet = read_json(file)?;
    let interp = interpolate(&set)?;
    let through_all = interp.polynomial().is_none_or(|f| set.points().iter().all(|p| f.eval(&p.x) == p.y));
    let details = json!({
        "n": set.len(),
        "distinct_x": set.has_distinct_x(),
        "interpolation": interp,
        "overdetermined": is_overdetermined(&set),
        "interpolant_matches_points": through_all,
    });
    Ok(RunReport::new("overdet check", Verdict::from_bool(through_all), details)
        .param("file", file.display().to_string()))
}

pub fn overdet_count(file: &Path) -> Result<RunReport> {
    let set: PlanePointSet = read_json(file)?;
    let n = set.len();
    let counts = count_overdetermined_subsets(&set)?;
    let hypothesis = n >= 2 && set.has_distinct_x() && !is_overdetermined(&set);
    let bound = if n >= 2 { Some(extremal_count(n as u32)) } else { None };
    let within = !hypothesis || bound.is_none_or(|b| counts.total <= b);
    let monotone = check_monotone_strengthening(&set)?;
    let ok = within && monotone.is_some();
    let details = json!({
        "n": n,
        "total": counts.total,
        "per_size": counts.per_size,
        "set_overdetermined": is_overdetermined(&set),
        "bound_applies": hypothesis,
        "upper_bound": bound,
        "within_bound": within,
        "monotone_sizes_fired": monotone,
    });
    Ok(RunReport::new("overdet count", Verdict::from_bool(ok), details).param("file", file.display().to_string()))
}

pub fn overdet_construct(n: usize) -> Result<RunReport> {
    let set = overdet::construct_extremal(n)?;
    let counts = count_overdetermined_subsets(&set)?;
    let expected = extremal_count(n as u32);
    let self_overdetermined = is_overdetermined(&set);
    let ok = !self_overdetermined && counts.total == expected;
    let details = json!({
        "n": n,
        "points": set,
        "set_overdetermined": self_overdetermined,
        "total": counts.total,
        "expected": expected,
        "per_size": counts.per_size,
    });
    Ok(RunReport::new("overdet construct", Verdict::from_bool(ok), details).param("n", n))
}

pub fn overdet_brute(ctx: &Context, n: usize, xmax: i64, ymax: i64) -> Result<RunReport> {
    let res = exhaustive_max(n, 1..=xmax, 1..=ymax, &mut ctx.budget())?
        .ok_or_else(|| Error::InvalidArgument("the grid contains no non-overdetermined candidate set".into()))?;
    let bound = extremal_count(n as u32);
    let details = json!({
        "n": n,
        "max_count": res.max_count,
        "upper_bound": bound,
        "witness": res.witness,
        "candidates": res.candidates,
    });
    Ok(RunReport::new("overdet brute", Verdict::from_bool(res.max_count <= bound), details)
        .param("n", n)
        .param("xmax", xmax)
        .param("ymax", ymax))
}

/// Parses `"ax,ay,bx,by,cx,cy"`.
pub fn parse_triangle(s: &str) -> Result<[Point; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::InvalidArgument(format!("triangle coordinates: {e}")))?;
    if v.len() != 6 || v.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("expected 6 finite coordinates, got {s:?}")).into());
    }
    Ok([Point::new(v[0], v[1]), Point::new(v[2], v[3]), Point::new(v[4], v[5])])
}

/// Worst residuals over `thetas` evenly spaced interior arc points.
pub fn worst_residuals(scene: &TriangleScene, thetas: usize) -> Result<IdentityResiduals> {
    let (lo, hi) = scene.arc_interval();
    let mut worst: Option<IdentityResiduals> = None;
    for k in 0..thetas {
        let theta = lo + (hi - lo) * (k as f64 + 0.5) / thetas as f64;
        let r = identity_residuals(scene, &scene_at(scene, theta)?);
        worst = Some(match worst {
            None => r,
            Some(w) => IdentityResiduals {
                area_vs_closed_form: w.area_vs_closed_form.max(r.area_vs_closed_form),
                o1_n_o2_collinear: w.o1_n_o2_collinear.max(r.o1_n_o2_collinear),
                mn_vs_half_cd: w.mn_vs_half_cd.max(r.mn_vs_half_cd),
                rs_vs_half_ab: w.rs_vs_half_ab.max(r.rs_vs_half_ab),
                o1o2_vs_formula: w.o1o2_vs_formula.max(r.o1o2_vs_formula),
                distance_o_to_o1o2_vs_mn: w.distance_o_to_o1o2_vs_mn.max(r.distance_o_to_o1o2_vs_mn),
                circumcenter_equidistance: w.circumcenter_equidistance.max(r.circumcenter_equidistance),
            },
        });
    }
    Ok(worst.expect("at least one sample"))
}

pub const AREA_TOL: f64 = 1e-9;
pub const IDENTITY_TOL: f64 = 1e-6;
pub const MINIMIZER_TOL: f64 = 1e-6;

/// Runs the arc scan on one scene; returns whether every check passed.
pub fn geo_scene(scene: &TriangleScene, samples: usize, thetas: usize) -> Result<(bool, Value)> {
    let min = minimize_over_arc(scene, samples)?;
    let residuals = worst_residuals(scene, thetas)?;
    let (alt_theta, alt_point) = scene.altitude_point();
    let ok = residuals.area_vs_closed_form < AREA_TOL
        && residuals.max() < IDENTITY_TOL
        && min.perpendicularity_residual < MINIMIZER_TOL
        && min.altitude_gap.abs() < MINIMIZER_TOL;
    let details = json!({
        "scene": {"a": scene.a, "b": scene.b, "c": scene.c, "o": scene.o, "radius": scene.radius},
        "theta_star": min.theta,
        "x_star": min.x,
        "min_area": min.area,
        "perpendicularity_residual": min.perpendicularity_residual,
        "altitude_theta": alt_theta,
        "altitude_point": alt_point,
        "altitude_gap": min.altitude_gap,
        "refine_iterations": min.iterations,
        "identity_residuals": residuals,
    });
    Ok((ok, details))
}

pub fn geo_scan(triangle: &str, samples: usize) -> Result<RunReport> {
    let [a, b, c] = parse_triangle(triangle)?;
    let scene = build_scene(a, b, c)?;
    let (ok, details) = geo_scene(&scene, samples, 100)?;
    Ok(RunReport::new("geo scan", Verdict::from_bool(ok), details)
        .param("triangle", triangle)
        .param("samples", samples))
}

pub fn ineq_sample(n: usize, trials: usize, seed: u64) -> Result<RunReport> {
    let s = sample_and_check(n, trials, seed)?;
    let ok = s.violations == 0 && s.extreme_failures == 0;
    Ok(RunReport::new("ineq sample", Verdict::from_bool(ok), &s)
        .param("n", n)
        .param("trials", trials)
        .param("seed", seed))
}

pub fn ineq_permsums(n: usize) -> Result<RunReport> {
    let mut checks = Vec::new();
    let mut ok = true;
    for (label, pair) in [("reference", ExactPair::reference(n)?), ("canonical", ExactPair::canonical(n)?)] {
        let stats = permutation_sums(&pair)?;
        ok &= stats.identities_hold();
        checks.push(json!({
            "pair": label,
            "x": pair.x(),
            "y": pair.y(),
            "sum_f": stats.sum_f,
            "sum_f_squared": stats.sum_f_squared,
            "expected_sum_f_squared": stats.expected_sum_f_squared,
            "holds": stats.identities_hold(),
        }));
    }
    Ok(RunReport::new("ineq permsums", Verdict::from_bool(ok), json!({"n": n, "pairs": checks})).param("n", n))
}

/// Entries may be JSON strings or numbers.
#[derive(Deserialize)]
struct PairFile {
    x: Vec<Value>,
    y: Vec<Value>,
}

fn entry_text(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(Error::InvalidArgument(format!("expected a number or string, got {other}")).into()),
    }
}

fn parse_floats(v: &[Value]) -> Result<Vec<f64>> {
    v.iter()
        .map(|t| {
            let s = entry_text(t)?;
            s.trim().parse::<f64>().map_err(|e| Error::InvalidArgument(format!("{s:?}: {e}")).into())
        })
        .collect()
}

fn parse_rationals(v: &[Value]) -> Result<Vec<Rational>> {
    v.iter().map(|t| Ok(entry_text(t)?.trim().parse::<Rational>()?)).collect()
}

fn float_checks(pair: &AdmissiblePair) -> Result<(bool, Value)> {
    let bound = permineq::check_bound(pair);
    let small = pair.n() <= MAX_ENUMERATION;
    let extremes = if small { Some(verify_extremes(pair)?) } else { None };
    let lemma = if small { Some(lemma_on_permutation_values(pair)?) } else { None };
    let ok = bound.pass && extremes != Some(false) && lemma.is_none_or(|l| l.pass);
    Ok((ok, json!({"bound": bound, "extremes_ok": extremes, "lemma": lemma})))
}

pub fn ineq_check(file: &Path, exact: bool) -> Result<RunReport> {
    let raw: PairFile = read_json(file)?;
    let (ok, details) = if exact {
        let pair = ExactPair::new(parse_rationals(&raw.x)?, parse_rationals(&raw.y)?)?;
        let stats = if pair.n() <= MAX_ENUMERATION { Some(permutation_sums(&pair)?) } else { None };
        let normalise = |v: &[Rational], sq: Rational| {
            let norm = sq.to_f64().sqrt();
            let mut out: Vec<f64> = v.iter().map(|t| t.to_f64() / norm).collect();
            let drift = out.iter().sum::<f64>() / out.len() as f64;
            out.iter_mut().for_each(|t| *t -= drift);
            out
        };
        let unit = AdmissiblePair::new(normalise(pair.x(), pair.x_norm_sq()), normalise(pair.y(), pair.y_norm_sq()))?;
        let (float_ok, float_details) = float_checks(&unit)?;
        let ok = float_ok && stats.as_ref().is_none_or(|s| s.identities_hold());
        (ok, json!({"n": pair.n(), "exact": stats, "normalised": float_details}))
    } else {
        let pair = AdmissiblePair::new(parse_floats(&raw.x)?, parse_floats(&raw.y)?)?;
        let (ok, d) = float_checks(&pair)?;
        (ok, json!({"n": pair.n(), "float": d}))
    };
    Ok(RunReport::new("ineq check", Verdict::from_bool(ok), details)
        .param("file", file.display().to_string())
        .param("exact", exact))
}
