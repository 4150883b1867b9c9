//! Periodic points by Newton's method on `f^p(z) − z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;

const MAX_STEPS: usize = 200;
const RING_SEEDS: usize = 20;
const RING_RADIUS: f64 = 0.3;

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicPoint {
    pub location: Complex64,
    pub period: usize,
    /// `(f^p)'(location)`, the product of `f'` along the cycle.
    pub multiplier: Complex64,
    /// `log|multiplier| / p`.
    pub lyapunov: f64,
}

/// `(f^p(z), (f^p)'(z))` in rectangular arithmetic.
fn iterate_with_derivative(f: &FunctionDescriptor, z: Complex64, p: usize) -> Option<(Complex64, Complex64)> {
    let mut w = z;
    let mut d = Complex64::new(1.0, 0.0);
    for _ in 0..p {
        d *= f.derivative(w).ok()?;
        w = f.eval(w).ok()?;
    }
    (w.is_finite() && d.is_finite()).then_some((w, d))
}

enum Attempt {
    Found(Complex64),
    Singular(Complex64),
    Failed,
}

fn newton(f: &FunctionDescriptor, p: usize, seed: Complex64) -> Attempt {
    let mut z = seed;
    for _ in 0..MAX_STEPS {
        let Some((w, d)) = iterate_with_derivative(f, z, p) else {
            return Attempt::Failed;
        };
        let g = w - z;
        let dg = d - 1.0;
        if dg.norm() < 1e-300 {
            return Attempt::Singular(z);
        }
        let mut step = g / dg;
        // keep wild early steps on the scale of the current point
        let cap = 1.0 + z.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        z -= step;
        if step.norm() <= 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    match iterate_with_derivative(f, z, p) {
        Some((w, _)) if (w - z).norm() <= 1e-10 * (1.0 + z.norm()) => Attempt::Found(z),
        _ => Attempt::Failed,
    }
}

/// Exact period of a point known to satisfy `f^p(z) ≈ z`.
fn exact_period(f: &FunctionDescriptor, z: Complex64, p: usize) -> usize {
    (1..=p)
        .filter(|q| p.is_multiple_of(*q))
        .find(|&q| matches!(iterate_with_derivative(f, z, q), Some((w, _)) if (w - z).norm() <= 1e-8 * (1.0 + z.norm())))
        .unwrap_or(p)
}

/// Finds a point of exact period `p` near `seed`. Newton runs from the
/// seed and then from 20 points on a circle of radius 0.3 around it.
pub fn find_periodic_point(f: &FunctionDescriptor, p: usize, seed: Complex64) -> Result<PeriodicPoint> {
    if !(1..=8).contains(&p) {
        return Err(Error::InvalidArgument(format!("period must lie in 1..=8, got {p}")));
    }
    let seeds = std::iter::once(seed)
        .chain((0..RING_SEEDS).map(|k| seed + Complex64::from_polar(RING_RADIUS, 2.0 * PI * k as f64 / RING_SEEDS as f64)));
    let mut first_err: Option<Error> = None;
    for s in seeds {
        match newton(f, p, s) {
            Attempt::Found(z) => {
                let q = exact_period(f, z, p);
                if q < p {
                    first_err.get_or_insert(Error::WrongPeriod { re: z.re, im: z.im, true_period: q, requested: p });
                    continue;
                }
                let (_, mult) = iterate_with_derivative(f, z, p).expect("converged point iterates");
                return Ok(PeriodicPoint { location: z, period: p, multiplier: mult, lyapunov: mult.norm().ln() / p as f64 });
            }
            Attempt::Singular(z) => {
                first_err.get_or_insert(Error::DerivativeSingular { re: z.re, im: z.im });
            }
            Attempt::Failed => {}
        }
    }
    Err(first_err.unwrap_or(Error::NoConvergence { period: p }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_fixed_point() {
        let pp = find_periodic_point(&FunctionDescriptor::monomial(2), 1, c(0.9, 0.1)).unwrap();
        assert!((pp.location - c(1.0, 0.0)).norm() < 1e-12);
        assert!((pp.multiplier - c(2.0, 0.0)).norm() < 1e-12);
        assert!((pp.lyapunov - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn square_two_cycle() {
        let pp = find_periodic_point(&FunctionDescriptor::monomial(2), 2, c(-0.4, 0.8)).unwrap();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((pp.location - w).norm() < 1e-12 || (pp.location - w.conj()).norm() < 1e-12);
        assert!((pp.multiplier - c(4.0, 0.0)).norm() < 1e-10);
        assert!((pp.lyapunov - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn exp_fixed_point() {
        let pp = find_periodic_point(&FunctionDescriptor::exp(), 1, c(0.3, 1.3)).unwrap();
        // mpmath: 0.318131505204764 + 1.33723570143069i
        assert!((pp.location - c(0.318_131_505_204_764_1, 1.337_235_701_430_689)).norm() < 1e-12);
        assert!((pp.multiplier.norm() - pp.location.norm()).abs() < 1e-12);
        assert!(pp.multiplier.norm() > 1.0);
    }

    #[test]
    fn divisor_period_is_rejected() {
        // every root of z⁴ = z near 1 has exact period 1
        match find_periodic_point(&FunctionDescriptor::monomial(2), 2, c(1.02, 0.0)) {
            Ok(pp) => assert!((pp.location - c(1.0, 0.0)).norm() > 1e-3),
            Err(Error::WrongPeriod { true_period, .. }) => assert_eq!(true_period, 1),
            Err(e) => panic!("{e}"),
        }
        assert!(find_periodic_point(&FunctionDescriptor::exp(), 9, c(0.0, 0.0)).is_err());
    }
}
