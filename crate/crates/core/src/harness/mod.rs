//! Experiments over the library, each producing an [`ExperimentReport`],
//! and the suite runner behind the command-line tool.

pub mod classical;
pub mod config;
pub mod render;
pub mod report;
pub mod specfun;
pub mod thm1;
pub mod thm3;
pub mod thm4;
pub mod thm56;
pub mod thm7;

use std::path::Path;

pub use config::Config;
pub use report::{ExperimentReport, Row, Verdict};

use crate::error::Result;

pub const EXPERIMENTS: [&str; 8] = ["specfun", "classical", "thm7", "thm56", "thm1scan", "thm3", "thm4scan", "render"];

/// Runs one experiment. `out` receives any side files (the render image).
pub fn run_experiment(id: &str, c: &Config, out: &Path) -> Result<ExperimentReport> {
    let n = |a: usize, b: usize| a..=b;
    match id {
        "specfun" => specfun::specfun_check(&c.specfun, c.seed),
        "classical" => classical::classical_suite(&c.classical, c.seed),
        "thm7" => {
            let t = &c.thm7;
            let region = config::recenter(&t.function, &t.region, t.center_on_periodic)?;
            thm7::run_thm7(&t.function, &region, t.r, t.m, n(t.n_min, t.n_max), &c.grid)
        }
        "thm56" => {
            let t = &c.thm56;
            let region = config::recenter(&t.function, &t.region, t.center_on_periodic)?;
            thm56::run_thm5_thm6(&t.function, &region, t.r_lower, t.r_upper, t.m, n(t.n_min, t.n_max), &c.grid, t.control.as_ref())
        }
        "thm1scan" => {
            let t = &c.thm1scan;
            thm1::run_thm1_growth_scan(&t.function, &t.region, t.horizon, t.starts, c.seed, &c.grid)
        }
        "thm3" => thm3::run_thm3(&c.thm3),
        "thm4scan" => thm4::run_thm4_scan(&c.thm4scan, c.seed),
        "render" => render_report(c, out),
        other => Err(crate::error::Error::InvalidArgument(format!("unknown experiment {other:?}; expected one of {EXPERIMENTS:?}"))),
    }
}

fn render_report(c: &Config, out: &Path) -> Result<ExperimentReport> {
    let r = &c.render;
    std::fs::create_dir_all(out)?;
    let stats = render::render_escape(&r.function, &r.params, &out.join(&r.file))?;
    let mut rep = ExperimentReport::new("render", Some(&r.function));
    rep.param("params", &r.params).param("file", &r.file).param("stats", &stats);
    rep.rows.push(Row::real_at_most(0, "fast_escaping_fraction_at_least_0.01", 0.01, stats.fast_fraction()));
    rep.settle();
    Ok(rep)
}

/// Runs every experiment in order, writing `<out>/<id>/report.json`,
/// `<out>/<id>/rows.csv` and the combined `<out>/report.json`.
pub fn run_suite(c: &Config, out: &Path) -> Result<Vec<ExperimentReport>> {
    let mut reports = Vec::new();
    for id in EXPERIMENTS {
        let dir = out.join(id);
        let rep = run_experiment(id, c, &dir)?;
        rep.write_to(&dir)?;
        reports.push(rep);
    }
    let combined = serde_json::json!({
        "seed": c.seed,
        "config": c,
        "verdicts": reports.iter().map(|r| (r.experiment_id.clone(), r.verdict)).collect::<std::collections::BTreeMap<_, _>>(),
        "reports": reports,
    });
    std::fs::write(out.join("report.json"), serde_json::to_string_pretty(&combined)? + "\n")?;
    Ok(reports)
}
