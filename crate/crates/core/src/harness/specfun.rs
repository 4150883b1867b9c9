//! Regression checks of the special-function layer: Mittag-Leffler closed
//! forms, series/expansion agreement, decay, and analytic derivatives.

use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Row};
use crate::error::Result;
use crate::function::FunctionDescriptor;
use crate::special::{ml_asymptotic, ml_eval, ml_series, ml_series_extended, switch_radius};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpecfunParams {
    pub points: usize,
    pub e1_tol: f64,
    pub e2_tol: f64,
    pub expansion_tol: f64,
    /// Above this series condition number the reference value is summed in
    /// extended precision.
    pub max_condition: f64,
    pub derivative_tol: f64,
}

impl Default for SpecfunParams {
    fn default() -> Self {
        SpecfunParams { points: 100, e1_tol: 1e-12, e2_tol: 1e-10, expansion_tol: 1e-4, max_condition: 1e6, derivative_tol: 1e-6 }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// The functions whose derivatives are checked.
pub fn derivative_variants() -> Vec<FunctionDescriptor> {
    let c = |re, im| Complex64::new(re, im);
    vec![
        FunctionDescriptor::polynomial(vec![c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.25, 0.1)]).unwrap(),
        FunctionDescriptor::monomial(2),
        FunctionDescriptor::exp(),
        FunctionDescriptor::exp_affine(c(0.5, 0.5)),
        FunctionDescriptor::mittag_leffler(0.5).unwrap(),
        FunctionDescriptor::mittag_leffler(0.75).unwrap(),
        FunctionDescriptor::mittag_leffler(1.5).unwrap(),
        FunctionDescriptor::mittag_leffler(2.0).unwrap(),
        FunctionDescriptor::CoshSqrt,
        FunctionDescriptor::scaled_mittag_leffler(1.0, Some(0.1)).unwrap(),
    ]
}

fn ml_alpha(f: &FunctionDescriptor) -> Option<f64> {
    match f {
        FunctionDescriptor::MittagLeffler { alpha } | FunctionDescriptor::ScaledMittagLeffler { alpha, .. } => Some(*alpha),
        _ => None,
    }
}

/// Series evaluations above this condition number carry too much rounding
/// for a difference quotient to resolve the derivative.
pub const DIFFERENCE_MAX_CONDITION: f64 = 1e5;

/// Worst relative gap between `f'` and a five-point difference quotient over
/// `points` samples of `|z| ≤ 5`, with the step scaled to `|f/f'|`. Returns
/// the gap and the number of rejected ill-conditioned samples.
pub fn derivative_gap(f: &FunctionDescriptor, points: usize, rng: &mut ChaCha8Rng) -> Result<(f64, usize)> {
    let alpha = ml_alpha(f);
    let mut worst: f64 = 0.0;
    let (mut done, mut rejected) = (0, 0);
    while done < points {
        let z = Complex64::from_polar(5.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
        if let Some(a) = alpha {
            let s = switch_radius(a);
            if (z.norm() - s).abs() < 0.05 || (z.norm() < s && ml_series(a, z).condition > DIFFERENCE_MAX_CONDITION) {
                rejected += 1;
                continue;
            }
        }
        let d = f.derivative(z)?;
        let v = f.eval(z)?;
        let scale = if d.norm() > 0.0 { (v.norm() / d.norm()).min(z.norm().max(1.0)) } else { z.norm().max(1.0) };
        let h = 2e-3 * scale;
        let g = |k: f64| f.eval(z + k * h);
        let fd = (-g(2.0)? + 8.0 * g(1.0)? - 8.0 * g(-1.0)? + g(-2.0)?) / (12.0 * h);
        worst = worst.max(rel(fd, d));
        done += 1;
    }
    Ok((worst, rejected))
}

pub fn specfun_check(p: &SpecfunParams, seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("specfun", None);
    rep.param("params", p).param("seed", seed);
    rep.tol("e1", p.e1_tol).tol("e2", p.e2_tol).tol("expansion", p.expansion_tol).tol("derivative", p.derivative_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let e1 = ml_eval(1.0, Complex64::new(1.0, 0.0)).0.value();
    rep.rows.push(Row::real_at_most(0, "e1_at_one_is_e", (e1 - E).norm(), p.e1_tol));

    let mut worst: f64 = 0.0;
    for _ in 0..p.points {
        let z = Complex64::from_polar(10.0 * rng.random::<f64>().sqrt(), TAU * rng.random::<f64>());
        let c = z.sqrt().cosh();
        worst = worst.max((ml_eval(2.0, z).0.value() - c).norm() / c.norm().max(1.0));
    }
    rep.rows.push(Row::real_at_most(0, "e2_is_cosh_sqrt", worst, p.e2_tol));

    // E_{3/4} on |z| = 20 across the growth sector
    let alpha = 0.75;
    let (mut worst, mut extended) = (0.0f64, 0);
    for i in -32..=32 {
        let th = i as f64 / 32.0 * alpha * PI / 2.0;
        let z = Complex64::from_polar(20.0, th);
        let s = ml_series(alpha, z);
        let reference = if s.condition > p.max_condition {
            extended += 1;
            ml_series_extended(alpha, z, 128 + s.condition.log2().ceil() as u32)
        } else {
            s.value
        };
        worst = worst.max(rel(ml_asymptotic(alpha, z).0.value(), reference));
    }
    rep.param("expansion_points", 65).param("expansion_extended_reference", extended);
    rep.rows.push(Row::real_at_most(0, "series_vs_expansion", worst, p.expansion_tol));

    let mut excess = f64::NEG_INFINITY;
    for k in 0..p.points {
        let x = 50.0 * 1e4f64.powf(k as f64 / p.points as f64);
        let v = ml_eval(alpha, Complex64::new(-x, 0.0)).0.value().norm();
        excess = excess.max(v * x / 10.0);
    }
    rep.rows.push(Row::real_at_most(0, "decay_bound_ten_over_x", excess, 1.0));

    for (i, f) in derivative_variants().iter().enumerate() {
        let (gap, rejected) = derivative_gap(f, p.points, &mut rng)?;
        if rejected > 0 {
            rep.param(&format!("derivative_rejected:{}", f.name()), rejected);
        }
        rep.rows.push(Row::real_at_most(i, &format!("derivative:{}", f.name()), gap, p.derivative_tol));
    }
    rep.settle();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Verdict;

    #[test]
    fn default_check_passes() {
        let rep = specfun_check(&SpecfunParams::default(), 3).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:#?}", rep.violations().collect::<Vec<_>>());
        assert!(rep.parameters["expansion_extended_reference"].as_u64().unwrap() > 0);
    }
}
