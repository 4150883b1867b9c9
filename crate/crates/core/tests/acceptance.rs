//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{E, LN_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use entire_dynamics::dynamics::fast_escaping_test;
use entire_dynamics::harness::config::EXP_FIXED_POINT;
use entire_dynamics::harness::specfun::{derivative_gap, derivative_variants, specfun_check, SpecfunParams};
use entire_dynamics::harness::{self, Config, ExperimentReport, Verdict};
use entire_dynamics::measures::{characteristic_sandwich_check, nevanlinna_t, spherical_area, GridSpec, Region};
use entire_dynamics::FunctionDescriptor;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn row_holds(rep: &ExperimentReport, check: &str) -> bool {
    let rows: Vec<_> = rep.rows.iter().filter(|r| r.check == check).collect();
    !rows.is_empty() && rows.iter().all(|r| r.holds)
}

fn specfun() -> Outcome {
    let rep = specfun_check(&SpecfunParams::default(), 1).unwrap();
    let names = ["e1_at_one_is_e", "e2_is_cosh_sqrt", "series_vs_expansion", "decay_bound_ten_over_x"];
    let failed: Vec<_> = names.iter().filter(|n| !row_holds(&rep, n)).collect();
    let worst = rep.rows.iter().find(|r| r.check == "series_vs_expansion").map(|r| r.lhs_tower.to_f64()).unwrap_or(f64::NAN);
    ok(failed.is_empty(), format!("failed {failed:?}; series/expansion worst rel {worst:.2e}"))
}

fn derivatives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for f in derivative_variants() {
        let (gap, _) = derivative_gap(&f, 100, &mut rng).unwrap();
        worst = worst.max(gap);
        if gap > 1e-6 {
            bad.push(f.name());
        }
    }
    ok(bad.is_empty(), format!("worst rel {worst:.2e}; failing {bad:?}"))
}

fn sandwich() -> Outcome {
    let f = FunctionDescriptor::exp();
    let grid = GridSpec::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for r in [E, E * E, 10.0] {
        let s = characteristic_sandwich_check(&f, r, &grid).unwrap();
        let id_ok = s.identity_gap.abs() <= 0.5 * LN_2 + 1e-2;
        let t = nevanlinna_t(&f, r).unwrap();
        let cls = ((t - r / PI) / (r / PI)).abs();
        pass &= id_ok && s.sandwich_ok && cls <= 1e-4;
        parts.push(format!("r={r:.3}: gap {:.4} sandwich {} T rel {cls:.1e}", s.identity_gap, s.sandwich_ok));
    }
    ok(pass, parts.join("; "))
}

fn polynomial_area() -> Outcome {
    let f = FunctionDescriptor::monomial(2);
    let big = spherical_area(&f, &Region::disk(Complex64::new(0.0, 0.0), 1e6).unwrap(), 1, &GridSpec::default()).unwrap();
    let whole = (big.value - 2.0).abs() <= 1e-2;
    let u = Region::square(Complex64::new(1.0, 0.0), 0.5).unwrap();
    let grid = GridSpec { base_resolution: 64, ..GridSpec::default() };
    let logs: Vec<f64> = (6..=11).map(|n| spherical_area(&f, &u, n, &grid).unwrap().log_value).collect();
    let diffs: Vec<f64> = logs.windows(2).map(|w| w[1] - w[0]).collect();
    let rate = diffs.iter().all(|d| (d - LN_2).abs() <= 0.1);
    ok(whole && rate, format!("S(D(0,1e6)) = {:.5}; log-ratios n=6..10 {:?}", big.value, diffs.iter().map(|d| format!("{d:.4}")).collect::<Vec<_>>()))
}

fn growth_bounds_desk_scale(c: &Config) -> Outcome {
    let dir = std::env::temp_dir().join("ed-acceptance-thm");
    let t7 = harness::run_experiment("thm7", c, &dir).unwrap();
    let t56 = harness::run_experiment("thm56", c, &dir).unwrap();
    let mu = row_holds(&t7, "mu_lower");
    let s_low = row_holds(&t56, "area_lower");
    let s_up = row_holds(&t56, "area_upper") && t56.parameters["R_upper_doublings"].as_u64().unwrap() <= 20;
    let margins = |r: &ExperimentReport, k: &str| r.rows.iter().filter(|x| x.check == k).map(|x| format!("{:.2}", x.margin_log)).collect::<Vec<_>>();
    ok(
        mu && s_low && s_up,
        format!(
            "mu lower {mu} (log margins {:?}, smallest working m {}); area lower {s_low} (log margins {:?}, smallest working m {}); area upper {s_up}",
            margins(&t7, "mu_lower"),
            t7.parameters["smallest_working_m"],
            margins(&t56, "area_lower"),
            t56.parameters["smallest_working_m"],
        ),
    )
}

fn slow_escape(c: &Config) -> Outcome {
    let rep = harness::run_experiment("thm3", c, &std::env::temp_dir()).unwrap();
    let tier_a = rep.parameters["tier_a_slope"].as_f64().unwrap_or(f64::NAN);
    let tier_b = rep.parameters.get("tier_b_slope").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    let a_ok = (tier_a - LN_2).abs() <= 1e-3;
    let b_ok = row_holds(&rep, "re_f_within_4pi") && tier_b >= LN_2 - 0.15;
    ok(a_ok && b_ok && rep.verdict == Verdict::Pass, format!("tier a slope {tier_a:.6} at n=1e4; tier b slope {tier_b:.4} at n=7; verdict {:?}", rep.verdict))
}

fn upper_scan(c: &Config) -> Outcome {
    let rep = harness::run_experiment("thm4scan", c, &std::env::temp_dir()).unwrap();
    let p = &rep.parameters;
    ok(
        rep.verdict == Verdict::Pass && row_holds(&rep, "partial_sum_induction"),
        format!("retained {} of {}, events {}, max slope {}, C {:.4}", p["retained"], c.thm4scan.starts, p["events"], p["max_slope"], p["C"].as_f64().unwrap()),
    )
}

fn fast_escape() -> Outcome {
    let f = FunctionDescriptor::exp();
    let a = fast_escaping_test(&f, Complex64::new(10.0, 0.0), 5.0, 5, 6).unwrap();
    let b = fast_escaping_test(&f, EXP_FIXED_POINT, 5.0, 5, 8).unwrap();
    let c = fast_escaping_test(&f, Complex64::new(0.1, 0.0), 5.0, 5, 8).unwrap();
    ok(a.l == Some(0) && !b.member && c.l == Some(3), format!("z=10 l={:?}; fixed point member={}; z=0.1 l={:?}", a.l, b.member, c.l))
}

fn classical(c: &Config) -> Outcome {
    let rep = harness::run_experiment("classical", c, &std::env::temp_dir()).unwrap();
    ok(rep.verdict == Verdict::Pass, format!("{} checks, {} violated", rep.rows.len(), rep.violations().count()))
}

fn determinism(c: &Config) -> Outcome {
    let base = std::env::temp_dir().join(format!("ed-acceptance-{}", std::process::id()));
    let (a, b) = (base.join("a"), base.join("b"));
    harness::run_suite(c, &a).unwrap();
    harness::run_suite(c, &b).unwrap();
    let ja = std::fs::read(a.join("report.json")).unwrap();
    let jb = std::fs::read(b.join("report.json")).unwrap();
    let _ = std::fs::remove_dir_all(&base);
    ok(ja == jb, format!("{} bytes, identical: {}", ja.len(), ja == jb))
}

fn main() {
    let c = Config::default();
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 special functions", Duration::from_secs(10), Box::new(specfun)),
        ("2 derivative oracle", Duration::from_secs(5), Box::new(derivatives)),
        ("3 characteristic sandwich", Duration::from_secs(30), Box::new(sandwich)),
        ("4 polynomial area law", Duration::from_secs(120), Box::new(polynomial_area)),
        ("5 growth bounds at desk scale", Duration::from_secs(180), Box::new(|| growth_bounds_desk_scale(&c))),
        ("6 slow escape, derivative growth", Duration::from_secs(120), Box::new(|| slow_escape(&c))),
        ("7 upper growth scan", Duration::from_secs(120), Box::new(|| upper_scan(&c))),
        ("8 fast escaping", Duration::from_secs(1), Box::new(fast_escape)),
        ("9 classical suite", Duration::from_secs(30), Box::new(|| classical(&c))),
        ("10 determinism", Duration::from_secs(600), Box::new(|| determinism(&c))),
    ];
    let mut failed = 0;
    for (name, limit, run) in &criteria {
        let t = Instant::now();
        let o = run();
        let dt = t.elapsed();
        let pass = o.pass && dt <= *limit;
        failed += usize::from(!pass);
        println!("criterion {name}: {} [{:.2}s / {}s] {}", if pass { "PASS" } else { "FAIL" }, dt.as_secs_f64(), limit.as_secs(), o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
