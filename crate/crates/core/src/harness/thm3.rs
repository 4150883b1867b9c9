//! Slowly escaping orbits of `λe^z` with fast-growing spherical derivative.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Row, Verdict};
use crate::error::{Error, Result};
use crate::logplane::schedule::log_96pi;
use crate::logplane::{log_sph_deriv_from_logplane, schedule_build, schedule_sph_bound, slow_orbit_construct, LogTract};
use crate::tower::TowerReal;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm3Params {
    pub lambda: Complex64,
    /// Start of the constructed orbit's schedule.
    pub x0: f64,
    pub n_max: usize,
    pub precision_bits: u32,
    /// First `n` of the tail on which the growth slope is required.
    pub tail_start: Option<usize>,
    pub slope_tolerance: f64,
    pub tier_a_x0: f64,
    pub tier_a_n: usize,
    pub tier_a_tolerance: f64,
}

impl Default for Thm3Params {
    fn default() -> Self {
        Thm3Params {
            lambda: Complex64::new(1.0, 0.0),
            x0: 30.0,
            n_max: 7,
            precision_bits: 256,
            tail_start: None,
            slope_tolerance: 0.15,
            tier_a_x0: 1e6,
            tier_a_n: 10_000,
            tier_a_tolerance: 1e-3,
        }
    }
}

/// Tower `exp(exp(n·s))`: the level `(1/n) log log X = s`.
fn slope_tower(n: usize, s: f64) -> TowerReal {
    TowerReal::from_log(n as f64 * s).exp()
}

pub fn run_thm3(p: &Thm3Params) -> Result<ExperimentReport> {
    let tract = LogTract::new(p.lambda)?;
    let f = tract.function();
    let mut rep = ExperimentReport::new("thm3", Some(&f));
    rep.param("params", p);
    rep.tol("slope_tolerance", p.slope_tolerance).tol("tier_a_tolerance", p.tier_a_tolerance).tol("re_f_tolerance", 4.0 * PI);
    let lambda_lower = 1.0;
    let target = (1.0_f64 + lambda_lower).ln();
    rep.param("target_slope", target);

    // tier b: constructed point
    match schedule_build(&tract, p.x0, p.n_max) {
        Err(Error::Precondition(msg)) => {
            rep.note(format!("tier b: {msg}"));
            rep.rows.push(Row::real_at_most(0, "x0_precondition", 8.0 * PI, p.x0));
            rep.rows.last_mut().unwrap().holds = false;
        }
        Err(e) => return Err(e),
        Ok(sched) => {
            let fails: Vec<usize> = (1..sched.len()).filter(|&n| !sched.partial_sum_holds[n]).collect();
            rep.param("partial_sum_failures", &fails);
            match slow_orbit_construct(&tract, &sched, p.precision_bits) {
                Err(Error::PrecisionExhausted { bits, max_n }) => {
                    rep.note(format!("tier b: {bits} bits resolve at most n = {max_n}"));
                    rep.param("max_resolved_n", max_n);
                    rep.verdict = Verdict::Inconclusive;
                    return Ok(rep);
                }
                Err(e) => return Err(e),
                Ok(trace) => {
                    rep.param("u_re", &trace.u_re).param("u_im", &trace.u_im).param("working_bits", trace.working_bits);
                    let tail = p.tail_start.unwrap_or(p.n_max.div_ceil(2)).max(1);
                    for st in &trace.steps {
                        let n = st.n;
                        rep.rows.push(Row::real_at_most(n, "re_f_within_4pi", (st.re_f_n - st.x_target).abs(), 4.0 * PI));
                        let b = log_sph_deriv_from_logplane(&trace, n)?;
                        let sb = schedule_sph_bound(&tract, &sched, n);
                        rep.rows.push(Row::real_at_most(n, "trace_vs_schedule", (b - sb).abs(), n as f64 * (4.0 * PI + log_96pi()) + 1e-9));
                        if n >= tail {
                            let lhs = if b > 0.0 { TowerReal::from_log(b) } else { TowerReal::from_value(0.0) };
                            rep.rows.push(Row::at_least(n, "tier_b_slope", lhs, slope_tower(n, target - p.slope_tolerance)));
                        }
                    }
                    if let Some(last) = trace.steps.last() {
                        let b = log_sph_deriv_from_logplane(&trace, last.n)?;
                        rep.param("tier_b_slope", if b > 0.0 { b.ln() / last.n as f64 } else { f64::NAN });
                    }
                }
            }
        }
    }

    // tier a: schedule arithmetic only
    let sa = schedule_build(&tract, p.tier_a_x0, p.tier_a_n)?;
    let mut checkpoints: Vec<usize> = (0..).map(|k| 10usize.pow(k)).take_while(|&n| n < p.tier_a_n).collect();
    checkpoints.push(p.tier_a_n);
    let mut worst = f64::INFINITY;
    for n in 1..=p.tier_a_n {
        if let Some(s) = sa.growth_slope(n) {
            let floor = target - 3.0 * (n as f64).ln() / n as f64;
            worst = worst.min(s - floor);
            if checkpoints.contains(&n) || s < floor {
                rep.rows.push(Row::at_least(n, "tier_a_slope_floor", slope_tower(n, s), slope_tower(n, floor)));
            }
        }
    }
    rep.param("tier_a_worst_margin", worst);
    let s_end = sa.growth_slope(p.tier_a_n);
    rep.param("tier_a_slope", s_end);
    let n = p.tier_a_n;
    match s_end {
        Some(s) => rep.rows.push(Row::real_at_most(n, "tier_a_slope_near_target", (s - target).abs(), p.tier_a_tolerance)),
        None => rep.rows.push(Row { holds: false, ..Row::real_at_most(n, "tier_a_slope_near_target", f64::INFINITY, p.tier_a_tolerance) }),
    }
    rep.param("log2", LN_2);
    rep.settle();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let p = Thm3Params { tier_a_n: 2000, tier_a_tolerance: 0.01, ..Thm3Params::default() };
        let rep = run_thm3(&p).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:#?}", rep.violations().collect::<Vec<_>>());
    }

    #[test]
    fn small_start_is_reported() {
        let rep = run_thm3(&Thm3Params { x0: 10.0, tier_a_n: 100, ..Thm3Params::default() }).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.notes[0].contains("8π"));
    }
}
