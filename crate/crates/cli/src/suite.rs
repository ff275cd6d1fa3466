//! The `all` runner: every section of the acceptance suite, configured by an
//! optional JSON file.

use std::time::Duration;

use anyhow::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use verikit::beams::{self, check_config, directional_counts, parity_structure_holds, search_minimum};
use verikit::circlegeo::random_acute_scene;
use verikit::latticepairs::{self, brute_force_max, count_enchanted, farey_sequence};
use verikit::overdet::{self, count_overdetermined_subsets, exhaustive_max, extremal_count, is_overdetermined};
use verikit::permineq::{permutation_sums, sample_and_check, ExactPair};
use verikit::residues::{odd_primes_up_to, sweep, verify_pair_bijection};
use verikit::{Budget, Error};

use crate::commands::{farey_neighbor_agreement, geo_scene, Context};
use crate::report::{RunReport, Verdict};

const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: Option<u64>,
    pub geo: GeoConfig,
    pub beams: BeamsConfig,
    pub residues: ResiduesConfig,
    pub pairs: PairsConfig,
    pub overdet: OverdetConfig,
    pub ineq: IneqConfig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeoConfig {
    pub enabled: bool,
    pub scenes: usize,
    pub thetas: usize,
    pub samples: usize,
}

impl Default for GeoConfig {
    fn default() -> Self {
        GeoConfig { enabled: true, scenes: 20, thetas: 100, samples: 1024 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamsConfig {
    pub enabled: bool,
    pub construct_max: u32,
    pub large_n: Option<u32>,
    pub search_n2: bool,
    /// The n = 4 search; skippable, and its running out of budget does
    /// not fail the suite.
    pub search_n4: bool,
    pub search_n4_time_limit_secs: f64,
}

impl Default for BeamsConfig {
    fn default() -> Self {
        BeamsConfig {
            enabled: true,
            construct_max: 50,
            large_n: Some(2020),
            search_n2: true,
            search_n4: true,
            search_n4_time_limit_secs: 600.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResiduesConfig {
    pub enabled: bool,
    pub sweep_max: u64,
    pub bijection_max: u64,
}

impl Default for ResiduesConfig {
    fn default() -> Self {
        ResiduesConfig { enabled: true, sweep_max: 997, bijection_max: 200 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairsConfig {
    pub enabled: bool,
    pub construct_max: u64,
    /// `(n, coord_bound, expected maximum)`.
    pub brute: Vec<(usize, u64, usize)>,
    pub farey_max: u64,
    pub neighbor_max: u64,
}

impl Default for PairsConfig {
    fn default() -> Self {
        PairsConfig {
            enabled: true,
            construct_max: 200,
            brute: vec![(3, 3, 3), (4, 3, 5)],
            farey_max: 50,
            neighbor_max: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCase {
    pub n: usize,
    pub xmax: i64,
    pub ymax: i64,
    pub expected: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OverdetConfig {
    pub enabled: bool,
    pub construct_max: usize,
    pub brute: Vec<GridCase>,
}

impl Default for OverdetConfig {
    fn default() -> Self {
        OverdetConfig {
            enabled: true,
            construct_max: 15,
            brute: vec![
                GridCase { n: 3, xmax: 3, ymax: 2, expected: Some(1) },
                GridCase { n: 4, xmax: 4, ymax: 2, expected: Some(4) },
            ],
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IneqConfig {
    pub enabled: bool,
    pub n_min: usize,
    pub n_max: usize,
    pub trials: usize,
    pub permsums_max: usize,
}

impl Default for IneqConfig {
    fn default() -> Self {
        IneqConfig { enabled: true, n_min: 2, n_max: 12, trials: 10_000, permsums_max: 6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    /// Optional checks only affect the aggregate when they fail outright.
    pub required: bool,
    pub details: Value,
}

impl Check {
    fn new(name: &str, ok: bool, details: Value) -> Self {
        Check { name: name.into(), verdict: Verdict::from_bool(ok), required: true, details }
    }

    fn skipped(name: &str) -> Self {
        Check { name: name.into(), verdict: Verdict::Skipped, required: true, details: Value::Null }
    }

    fn optional(mut self) -> Self {
        self.required = false;
        self
    }
}

/// Runs `f`, turning a resource overrun into an indeterminate check and
/// any other library error into a failed one.
fn guarded(name: &str, f: impl FnOnce() -> Result<Check>) -> Check {
    match f() {
        Ok(c) => c,
        Err(e) => {
            let exceeded = e.downcast_ref::<Error>().is_some_and(Error::is_resource_exceeded);
            Check {
                name: name.into(),
                verdict: if exceeded { Verdict::Indeterminate } else { Verdict::Fail },
                required: true,
                details: json!({"error": e.to_string()}),
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Section {
    pub name: &'static str,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
}

fn aggregate(checks: &[Check]) -> Verdict {
    Verdict::combine(checks.iter().map(|c| match (c.required, c.verdict) {
        (false, Verdict::Fail) => Verdict::Fail,
        (false, _) => Verdict::Skipped,
        (true, v) => v,
    }))
}

fn section(name: &'static str, enabled: bool, run: impl FnOnce() -> Vec<Check>) -> Section {
    if !enabled {
        return Section { name, verdict: Verdict::Skipped, checks: Vec::new() };
    }
    let checks = run();
    Section { name, verdict: aggregate(&checks), checks }
}

fn geo_section(cfg: &GeoConfig, seed: u64) -> Vec<Check> {
    vec![guarded("random acute scenes", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ok = true;
        let mut failures = Vec::new();
        let (mut worst_area, mut worst_perp, mut worst_gap) = (0f64, 0f64, 0f64);
        for i in 0..cfg.scenes {
            let scene = random_acute_scene(&mut rng);
            let (scene_ok, d) = geo_scene(&scene, cfg.samples, cfg.thetas)?;
            worst_area = worst_area.max(d["identity_residuals"]["area_vs_closed_form"].as_f64().unwrap_or(f64::NAN));
            worst_perp = worst_perp.max(d["perpendicularity_residual"].as_f64().unwrap_or(f64::NAN));
            worst_gap = worst_gap.max(d["altitude_gap"].as_f64().unwrap_or(f64::NAN).abs());
            if !scene_ok {
                ok = false;
                failures.push(json!({"scene": i, "details": d}));
            }
        }
        Ok(Check::new(
            "random acute scenes",
            ok,
            json!({
                "scenes": cfg.scenes,
                "thetas_per_scene": cfg.thetas,
                "worst_area_residual": worst_area,
                "worst_perpendicularity_residual": worst_perp,
                "worst_altitude_gap": worst_gap,
                "failures": failures,
            }),
        ))
    })]
}

fn beams_section(cfg: &BeamsConfig, ctx: &Context) -> Vec<Check> {
    let mut checks = vec![guarded("construction for even n", || {
        let bad: Vec<u32> = (2..=cfg.construct_max)
            .step_by(2)
            .filter(|&n| {
                let c = beams::construct_extremal(n).expect("even n >= 2");
                !(check_config(&c).valid
                    && c.len() == 3 * n as usize / 2
                    && parity_structure_holds(&c)
                    && directional_counts(&c).all_pair_sums_at_least_n())
            })
            .collect();
        Ok(Check::new("construction for even n", bad.is_empty(), json!({"max_n": cfg.construct_max, "failures": bad})))
    })];
    checks.push(match cfg.large_n {
        Some(n) => guarded("large construction", || {
            let c = beams::construct_extremal(n)?;
            let report = check_config(&c);
            let ok = report.valid && c.len() == 3 * n as usize / 2;
            Ok(Check::new("large construction", ok, json!({"n": n, "beam_count": c.len(), "valid": report.valid})))
        }),
        None => Check::skipped("large construction"),
    });
    checks.push(if cfg.search_n2 {
        guarded("search n = 2", || {
            let found = search_minimum(2, 12, &mut ctx.budget())?;
            let none_at_two = search_minimum(2, 2, &mut ctx.budget())?.is_none();
            let minimum = found.as_ref().map(|o| o.minimum);
            let ok = minimum == Some(3) && none_at_two;
            Ok(Check::new("search n = 2", ok, json!({"minimum": minimum, "none_with_at_most_2": none_at_two})))
        })
    } else {
        Check::skipped("search n = 2")
    });
    checks.push(if cfg.search_n4 {
        let limit = Duration::from_secs_f64(cfg.search_n4_time_limit_secs);
        let limit = ctx.time_limit.map_or(limit, |t| t.min(limit));
        guarded("search n = 4", || {
            let found = search_minimum(4, 6, &mut Budget::with_time_limit(limit))?;
            let minimum = found.as_ref().map(|o| o.minimum);
            let pair_sums = found.as_ref().map(|o| o.counts.all_pair_sums_at_least_n());
            let ok = minimum == Some(6) && pair_sums == Some(true);
            Ok(Check::new("search n = 4", ok, json!({"minimum": minimum, "witness": found.map(|o| o.witness)})))
        })
        .optional()
    } else {
        Check::skipped("search n = 4").optional()
    });
    checks
}

fn residues_section(cfg: &ResiduesConfig) -> Vec<Check> {
    let entries = sweep(cfg.sweep_max);
    let bad: Vec<u64> = entries.iter().filter(|e| e.product_mod_p != 2 || e.a_was_empty).map(|e| e.p).collect();
    let sweep_check = Check::new(
        "product of A",
        bad.is_empty(),
        json!({
            "max": cfg.sweep_max,
            "prime_count": entries.len(),
            "primes": entries.iter().map(|e| e.p).collect::<Vec<_>>(),
            "failures": bad,
        }),
    );
    let bijection = guarded("pair bijection", || {
        let primes: Vec<u64> = odd_primes_up_to(cfg.bijection_max).into_iter().filter(|&p| p >= 5).collect();
        let mut bad = Vec::new();
        for &p in &primes {
            if !verify_pair_bijection(p)?.holds {
                bad.push(p);
            }
        }
        Ok(Check::new("pair bijection", bad.is_empty(), json!({"primes_checked": primes.len(), "failures": bad})))
    });
    vec![sweep_check, bijection]
}

fn pairs_section(cfg: &PairsConfig, ctx: &Context) -> Vec<Check> {
    let mut checks = vec![guarded("construction", || {
        let bad: Vec<u64> = (2..=cfg.construct_max)
            .filter(|&n| {
                let set = latticepairs::construct_extremal(n).expect("n >= 2");
                count_enchanted(&set) as u64 != 2 * n - 3
            })
            .collect();
        Ok(Check::new("construction", bad.is_empty(), json!({"max_n": cfg.construct_max, "failures": bad})))
    })];
    for &(n, bound, expected) in &cfg.brute {
        let name = format!("brute force n = {n}, bound = {bound}");
        checks.push(guarded(&name, || {
            let res = brute_force_max(n, bound, &mut ctx.budget())?;
            let ok = res.max_count == expected && res.max_count <= (2 * n).saturating_sub(3);
            Ok(Check::new(&name, ok, json!({"max_count": res.max_count, "expected": expected})))
        }));
    }
    checks.push(guarded("Farey determinants", || {
        let mut bad = Vec::new();
        for m in 1..=cfg.farey_max {
            if !farey_sequence(m)?.terms.windows(2).all(|w| w[0].cross(&w[1]) == 1) {
                bad.push(m);
            }
        }
        Ok(Check::new("Farey determinants", bad.is_empty(), json!({"max_order": cfg.farey_max, "failures": bad})))
    }));
    checks.push(guarded("Farey neighbours", || {
        let mut bad = Vec::new();
        for m in 1..=cfg.neighbor_max {
            if !farey_neighbor_agreement(m)? {
                bad.push(m);
            }
        }
        Ok(Check::new("Farey neighbours", bad.is_empty(), json!({"max_order": cfg.neighbor_max, "failures": bad})))
    }));
    checks
}

fn overdet_section(cfg: &OverdetConfig, ctx: &Context) -> Vec<Check> {
    let mut checks = vec![guarded("construction", || {
        let mut bad = Vec::new();
        for n in 2..=cfg.construct_max {
            let set = overdet::construct_extremal(n)?;
            let total = count_overdetermined_subsets(&set)?.total;
            if is_overdetermined(&set) || total != extremal_count(n as u32) {
                bad.push(n);
            }
        }
        Ok(Check::new("construction", bad.is_empty(), json!({"max_n": cfg.construct_max, "failures": bad})))
    })];
    for case in &cfg.brute {
        let name = format!("exhaustive n = {}, grid {}x{}", case.n, case.xmax, case.ymax);
        checks.push(guarded(&name, || {
            let res = exhaustive_max(case.n, 1..=case.xmax, 1..=case.ymax, &mut ctx.budget())?;
            let max = res.map(|r| r.max_count);
            let bound = extremal_count(case.n as u32);
            let ok = max.is_some_and(|m| m <= bound) && (case.expected.is_none() || max == case.expected);
            Ok(Check::new(&name, ok, json!({"max_count": max, "upper_bound": bound, "expected": case.expected})))
        }));
    }
    checks
}

fn ineq_section(cfg: &IneqConfig, seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.push(guarded("sampled bound", || {
        let mut ok = true;
        let mut per_n = Vec::new();
        for n in cfg.n_min..=cfg.n_max {
            let s = sample_and_check(n, cfg.trials, seed)?;
            ok &= s.violations == 0 && s.extreme_failures == 0;
            per_n.push(s);
        }
        Ok(Check::new("sampled bound", ok, json!({"trials": cfg.trials, "per_n": per_n})))
    }));
    checks.push(guarded("permutation sums", || {
        let mut ok = true;
        let mut rows = Vec::new();
        for n in 2..=cfg.permsums_max {
            let stats = permutation_sums(&ExactPair::reference(n)?)?;
            ok &= stats.identities_hold();
            rows.push(json!({"n": n, "sum_f": stats.sum_f, "sum_f_squared": stats.sum_f_squared}));
        }
        Ok(Check::new("permutation sums", ok, json!(rows)))
    }));
    checks.push(guarded("equality at n = 2", || {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let pair = verikit::permineq::AdmissiblePair::new(vec![h, -h], vec![h, -h])?;
        let c = verikit::permineq::check_bound(&pair);
        Ok(Check::new("equality at n = 2", (c.gap - c.bound).abs() < 1e-12, json!(c)))
    }));
    checks
}

pub fn run_all(cfg: &SuiteConfig, ctx: &Context) -> RunReport {
    let seed = cfg.seed.or(ctx.seed).unwrap_or(DEFAULT_SEED);
    // Sections are independent; run them concurrently and report in fixed order.
    let sections: Vec<Section> = std::thread::scope(|s| {
        let handles = [
            s.spawn(|| section("geo", cfg.geo.enabled, || geo_section(&cfg.geo, seed))),
            s.spawn(|| section("beams", cfg.beams.enabled, || beams_section(&cfg.beams, ctx))),
            s.spawn(|| section("residues", cfg.residues.enabled, || residues_section(&cfg.residues))),
            s.spawn(|| section("pairs", cfg.pairs.enabled, || pairs_section(&cfg.pairs, ctx))),
            s.spawn(|| section("overdet", cfg.overdet.enabled, || overdet_section(&cfg.overdet, ctx))),
            s.spawn(|| section("ineq", cfg.ineq.enabled, || ineq_section(&cfg.ineq, seed))),
        ];
        handles.into_iter().map(|h| h.join().expect("suite section panicked")).collect()
    });
    let verdict = Verdict::combine(sections.iter().map(|s| s.verdict));
    RunReport::new("all", verdict, json!({"sections": sections})).param("seed", seed)
}

/// One row per check for the human-readable `all` output.
pub fn summary_table(report: &RunReport) -> String {
    let mut rows = vec![("section".to_string(), "check".to_string(), "verdict".to_string())];
    for sec in report.details["sections"].as_array().into_iter().flatten() {
        let name = sec["name"].as_str().unwrap_or_default();
        let checks = sec["checks"].as_array().filter(|c| !c.is_empty());
        match checks {
            None => rows.push((name.into(), "-".into(), "skipped".into())),
            Some(checks) => {
                for c in checks {
                    let mut verdict = c["verdict"].as_str().unwrap_or_default().to_string();
                    if c["required"] == Value::Bool(false) {
                        verdict.push_str(" (optional)");
                    }
                    rows.push((name.into(), c["name"].as_str().unwrap_or_default().into(), verdict));
                }
            }
        }
    }
    let w0 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let w1 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0);
    let mut out: String = rows.iter().map(|(a, b, c)| format!("{a:<w0$}  {b:<w1$}  {c}\n")).collect();
    out.push_str(&format!("overall: {}\n", report.verdict.as_str().to_uppercase()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_overrides() {
        let cfg: SuiteConfig = serde_json::from_str(r#"{"beams": {"search_n4": false}}"#).unwrap();
        assert!(!cfg.beams.search_n4);
        assert!(cfg.beams.search_n2);
        assert_eq!(cfg.residues.sweep_max, 997);
        assert!(serde_json::from_str::<SuiteConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn optional_checks_only_fail() {
        let c = |v, required| Check { name: String::new(), verdict: v, required, details: Value::Null };
        assert_eq!(aggregate(&[c(Verdict::Pass, true), c(Verdict::Indeterminate, false)]), Verdict::Pass);
        assert_eq!(aggregate(&[c(Verdict::Pass, true), c(Verdict::Fail, false)]), Verdict::Fail);
        assert_eq!(aggregate(&[c(Verdict::Pass, true), c(Verdict::Skipped, false)]), Verdict::Pass);
    }

    #[test]
    fn disabled_section_is_skipped() {
        let s = section("x", false, || panic!("must not run"));
        assert_eq!(s.verdict, Verdict::Skipped);
        assert!(s.checks.is_empty());
    }
}
