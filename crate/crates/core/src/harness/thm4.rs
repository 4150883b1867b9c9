//! Upper growth of `(fⁿ)^#` for scaled Mittag-Leffler functions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Row};
use crate::dynamics::iterate_orbit;
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;
use crate::tower::TowerReal;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm4Params {
    pub alpha: f64,
    pub eta: Option<f64>,
    pub horizon: usize,
    pub starts: usize,
    /// Start box `[re_min, re_max] × [im_min, im_max]`.
    pub start_box: [f64; 4],
    pub margin: f64,
    pub induction_rel_tol: f64,
}

impl Default for Thm4Params {
    fn default() -> Self {
        Thm4Params {
            alpha: 1.0,
            eta: Some(0.1),
            horizon: 25,
            starts: 1000,
            start_box: [0.0, 8.0, -PI, PI],
            margin: 0.1,
            induction_rel_tol: 1e-12,
        }
    }
}

/// Per-orbit findings.
#[derive(Debug, Clone, Default)]
struct OrbitCheck {
    /// Last index with a computed point.
    usable: usize,
    entered_disk: Option<usize>,
    disk_monotone: bool,
    n0: usize,
    /// `(n, log (fⁿ)^#)` over the usable range.
    log_sph: Vec<(usize, f64)>,
    /// `(n, log (fⁿ)^# − n log C)` at each event `t_n > ρ Σ_{j<n} t_j`.
    events: Vec<(usize, f64)>,
    /// `(n, Σ_{j≤n} t_j / (c₀(1+ρ)ⁿ))` for `n ≥ n₀ − 1`.
    induction: Vec<(usize, f64)>,
}

fn check_orbit(f: &FunctionDescriptor, z0: Complex64, horizon: usize, rho: f64, log_c: f64) -> OrbitCheck {
    let orbit = iterate_orbit(f, z0, horizon);
    let usable = orbit.len() - 1;
    let mut out = OrbitCheck { usable, disk_monotone: true, ..Default::default() };
    let t: Vec<f64> = (0..=usable).map(|n| orbit.log_modulus(n).unwrap()).collect();
    out.entered_disk = t.iter().position(|&tn| tn <= 0.0);
    if let Some(nd) = out.entered_disk {
        let pre = &orbit.log_deriv_prefix[nd..];
        out.disk_monotone = pre.windows(2).all(|w| w[1] <= w[0]);
        return out;
    }
    for n in 1..=usable {
        out.log_sph.push((n, orbit.log_spherical_derivative(n).unwrap()));
    }
    let mut partial = vec![0.0; usable + 2];
    for j in 0..=usable {
        partial[j + 1] = partial[j] + t[j];
    }
    let event = |n: usize| t[n] > rho * partial[n];
    for n in 1..=usable {
        if event(n) {
            out.events.push((n, out.log_sph[n - 1].1 - n as f64 * log_c));
        }
    }
    out.n0 = (1..=usable + 1).find(|&n0| (n0..=usable).all(|n| !event(n))).unwrap();
    let n0 = out.n0;
    let c0 = (1.0 + rho).powi(1 - n0 as i32) * partial[n0];
    for n in n0.saturating_sub(1)..=usable {
        let bound = c0 * (1.0 + rho).powi(n as i32);
        let ratio = if bound > 0.0 { partial[n + 1] / bound } else if partial[n + 1] <= 0.0 { 0.0 } else { f64::INFINITY };
        out.induction.push((n, ratio));
    }
    out
}

/// `max(|f|, |f'|)` on the unit circle.
fn unit_disk_peak(f: &FunctionDescriptor) -> Result<f64> {
    let mut peak: f64 = 0.0;
    for i in 0..4096 {
        let z = Complex64::from_polar(1.0, TAU * i as f64 / 4096.0);
        peak = peak.max(f.eval(z)?.norm()).max(f.derivative(z)?.norm());
    }
    Ok(peak)
}

pub fn run_thm4_scan(p: &Thm4Params, seed: u64) -> Result<ExperimentReport> {
    if !(p.alpha > 0.0 && p.alpha <= 2.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 2], got {}", p.alpha)));
    }
    let f = FunctionDescriptor::scaled_mittag_leffler(p.alpha, p.eta)?;
    let rho = 1.0 / p.alpha;
    let c = f.c_bound().unwrap();
    let log_c = c.ln();
    let mut rep = ExperimentReport::new("thm4scan", Some(&f));
    rep.param("params", p).param("seed", seed).param("rho", rho).param("C", c);
    rep.tol("margin", p.margin).tol("induction_rel_tol", p.induction_rel_tol);
    let peak = unit_disk_peak(&f)?;
    rep.param("unit_disk_peak", peak);
    rep.rows.push(Row::real_at_most(0, "unit_disk_contraction", peak, 1.0));

    let [a, b, cmin, cmax] = p.start_box;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Complex64> =
        (0..p.starts).map(|_| Complex64::new(a + (b - a) * rng.random::<f64>(), cmin + (cmax - cmin) * rng.random::<f64>())).collect();
    let checks: Vec<OrbitCheck> = starts.par_iter().map(|&z| check_orbit(&f, z, p.horizon, rho, log_c)).collect();

    let disk = checks.iter().filter(|o| o.entered_disk.is_some()).count();
    let disk_bad = checks.iter().filter(|o| !o.disk_monotone).count();
    let retained = checks.len() - disk;
    let short = checks.iter().filter(|o| o.usable < p.horizon).count();
    let events: usize = checks.iter().map(|o| o.events.len()).sum();
    rep.param("retained", retained).param("entered_unit_disk", disk).param("truncated_by_overflow", short).param("events", events);
    rep.param("max_n0", checks.iter().filter(|o| o.entered_disk.is_none()).map(|o| o.n0).max());
    rep.rows.push(Row::real_at_most(0, "disk_prefix_nonincreasing", disk_bad as f64, 0.0));

    let target = (1.0 + rho).ln() + p.margin;
    let mut max_slope = f64::NEG_INFINITY;
    for n in 1..=p.horizon {
        let sph = checks.iter().flat_map(|o| o.log_sph.iter()).filter(|(k, _)| *k == n).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        if sph > 0.0 {
            max_slope = max_slope.max(sph.ln() / n as f64);
            let rhs = TowerReal::from_log(n as f64 * target).exp();
            rep.rows.push(Row::at_most(n, "log_sph_slope", TowerReal::from_log(sph), rhs));
        }
        let ev = checks.iter().flat_map(|o| o.events.iter()).filter(|(k, _)| *k == n).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        if ev > f64::NEG_INFINITY {
            rep.rows.push(Row::real_at_most(n, "event_bound_c_pow_n", ev, 0.0));
        }
        let ind = checks.iter().flat_map(|o| o.induction.iter()).filter(|(k, _)| *k == n).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
        if ind > f64::NEG_INFINITY {
            rep.rows.push(Row::real_at_most(n, "partial_sum_induction", ind, 1.0 + p.induction_rel_tol));
        }
    }
    rep.param("max_slope", if max_slope.is_finite() { Some(max_slope) } else { None });
    rep.settle();
    Ok(rep)
}
