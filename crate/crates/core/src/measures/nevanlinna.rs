//! Nevanlinna and Ahlfors–Shimizu characteristics.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::area::spherical_area;
use super::region::{GridSpec, Region};
use crate::error::{Error, LogPolar, Result};
use crate::function::FunctionDescriptor;

const TRAPEZOID_NODES: usize = 4096;

fn log_abs_on_circle(f: &FunctionDescriptor, log_r: f64, theta: f64) -> Result<f64> {
    Ok(f.log_eval(LogPolar::new(log_r, theta))?.log_mag)
}

/// `T(r, f) = (1/2π) ∫ log⁺|f(re^{iθ})| dθ`. Panels where `log|f|` changes
/// sign are split at the root, located by bisection to 1e-12 in `θ`.
pub fn nevanlinna_t(f: &FunctionDescriptor, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let lr = r.ln();
    let h = 2.0 * PI / TRAPEZOID_NODES as f64;
    let g: Vec<f64> = (0..=TRAPEZOID_NODES)
        .map(|k| log_abs_on_circle(f, lr, -PI + k as f64 * h))
        .collect::<Result<_>>()?;
    let mut sum = 0.0;
    for k in 0..TRAPEZOID_NODES {
        let (a, b) = (-PI + k as f64 * h, -PI + (k + 1) as f64 * h);
        let (ga, gb) = (g[k], g[k + 1]);
        if (ga > 0.0) == (gb > 0.0) {
            sum += 0.5 * h * (ga.max(0.0) + gb.max(0.0));
            continue;
        }
        let (mut lo, mut hi) = (a, b);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if (log_abs_on_circle(f, lr, mid)? > 0.0) == (ga > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        sum += 0.5 * (root - a) * ga.max(0.0) + 0.5 * (b - root) * gb.max(0.0);
    }
    Ok(sum / (2.0 * PI))
}

#[derive(Debug, Clone, Serialize)]
pub struct T0Estimate {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

const GL_NODES: [f64; 4] = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
const GL_WEIGHTS: [f64; 4] = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
const T0_PANELS: usize = 16;

fn disk_area(f: &FunctionDescriptor, t: f64, grid: &GridSpec) -> Result<(f64, f64, bool)> {
    let a = spherical_area(f, &Region::disk(Complex64::new(0.0, 0.0), t)?, 1, grid)?;
    Ok((a.value, a.error_estimate, a.converged))
}

/// `T₀(r, f) = ∫₀^r S(t, f)/t dt`: Gauss–Legendre in `log t` on
/// `[10⁻⁶r, r]` and `S(a)/2` for the piece below `a`, where `S(t) ≈ c t²`.
pub fn ahlfors_shimizu_t0(f: &FunctionDescriptor, r: f64, grid: &GridSpec) -> Result<T0Estimate> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let a = r * 1e-6;
    let (ua, ub) = (a.ln(), r.ln());
    let w = (ub - ua) / T0_PANELS as f64;
    let (s_a, e_a, mut converged) = disk_area(f, a, grid)?;
    let mut value = 0.5 * s_a;
    let mut err = 0.5 * e_a;
    for p in 0..T0_PANELS {
        let mid = ua + (p as f64 + 0.5) * w;
        for (x, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let (s, e, ok) = disk_area(f, (mid + 0.5 * w * x).exp(), grid)?;
            value += 0.5 * w * wt * s;
            err += 0.5 * w * wt * e;
            converged &= ok;
        }
    }
    Ok(T0Estimate { value, error_estimate: err, converged })
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub r: f64,
    pub t: f64,
    pub t0: f64,
    pub log_plus_f0: f64,
    /// `T − T₀ − log⁺|f(0)|`, bounded by `½ log 2` in modulus.
    pub identity_gap: f64,
    pub identity_ok: bool,
    /// `(T₀(r) − T₀(1))/log r`.
    pub lower: f64,
    pub area: f64,
    /// `T₀(r²)/log r`.
    pub upper: f64,
    pub sandwich_ok: bool,
    /// Combined quadrature allowance applied to both checks.
    pub tolerance: f64,
}

pub fn characteristic_sandwich_check(f: &FunctionDescriptor, r: f64, grid: &GridSpec) -> Result<SandwichReport> {
    if r < 1.0 {
        return Err(Error::InvalidArgument(format!("sandwich needs r >= 1, got {r}")));
    }
    let t = nevanlinna_t(f, r)?;
    let t0 = ahlfors_shimizu_t0(f, r, grid)?;
    let t0_1 = ahlfors_shimizu_t0(f, 1.0, grid)?;
    let t0_sq = ahlfors_shimizu_t0(f, r * r, grid)?;
    let (area, area_err, _) = disk_area(f, r, grid)?;
    let f0 = f.eval(Complex64::new(0.0, 0.0))?.norm();
    let log_plus_f0 = f0.ln().max(0.0);
    let identity_gap = t - t0.value - log_plus_f0;
    let lr = r.ln();
    let (lower, upper) = if lr > 0.0 {
        ((t0.value - t0_1.value) / lr, t0_sq.value / lr)
    } else {
        (0.0, f64::INFINITY)
    };
    let quad = t0.error_estimate + t0_1.error_estimate + t0_sq.error_estimate + area_err;
    let tolerance = 1e-2f64.max(4.0 * quad + grid.rel_tol * (area + t0.value));
    let slack = if lr > 0.0 { tolerance / lr.min(1.0) } else { tolerance };
    Ok(SandwichReport {
        r,
        t,
        t0: t0.value,
        log_plus_f0,
        identity_gap,
        identity_ok: identity_gap.abs() <= 0.5 * LN_2 + tolerance,
        lower,
        area,
        upper,
        sandwich_ok: lower <= area + slack && area <= upper + slack,
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_characteristic_is_r_over_pi() {
        let t = nevanlinna_t(&FunctionDescriptor::exp(), PI).unwrap();
        assert!((t - 1.0).abs() < 1e-6, "{t}");
        let t = nevanlinna_t(&FunctionDescriptor::exp(), 10.0).unwrap();
        assert!((t - 10.0 / PI).abs() < 1e-6 * 10.0, "{t}");
    }

    #[test]
    fn square_characteristic() {
        let t = nevanlinna_t(&FunctionDescriptor::monomial(2), 10.0).unwrap();
        assert!((t - 2.0 * 10f64.ln()).abs() < 1e-12);
        assert_eq!(nevanlinna_t(&FunctionDescriptor::monomial(2), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn t0_small_radius_vanishes() {
        let g = GridSpec { rel_tol: 1e-3, ..GridSpec::default() };
        let t0 = ahlfors_shimizu_t0(&FunctionDescriptor::exp(), 1e-3, &g).unwrap();
        // ≈ r²/8 since f^#(0) = 1/2
        assert!((t0.value - 1e-6 / 8.0).abs() < 1e-8, "{}", t0.value);
    }
}
