//! Logarithmic change of variable for `f(z) = λe^z`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;

/// `F(w) = e^w + log λ`, so that `exp F(w) = f(e^w)`. The tract over the
/// right half-plane is the union of the strips around `Im w = 2πk` where
/// `e^{Re w} cos(Im w) > −log|λ|`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LogTract {
    pub lambda: Complex64,
    pub log_lambda: Complex64,
    /// Stand-in for `inf Re W`, which is `−∞` for this family.
    pub alpha_cutoff: f64,
}

impl LogTract {
    pub fn new(lambda: Complex64) -> Result<Self> {
        if !(lambda.is_finite() && lambda.norm() > 0.0) {
            return Err(Error::InvalidArgument(format!("λ must be finite and non-zero, got {lambda}")));
        }
        Ok(LogTract { lambda, log_lambda: lambda.ln(), alpha_cutoff: 0.0 })
    }

    pub fn function(&self) -> FunctionDescriptor {
        FunctionDescriptor::exp_affine(self.lambda)
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        w.exp() + self.log_lambda
    }

    /// `F'(w) = e^w`.
    pub fn derivative(&self, w: Complex64) -> Complex64 {
        w.exp()
    }

    /// Branch `k` of `F⁻¹`: `Log(ζ − log λ) + 2πik`.
    pub fn inverse(&self, zeta: Complex64, k: i64) -> Complex64 {
        (zeta - self.log_lambda).ln() + Complex64::new(0.0, TAU * k as f64)
    }

    /// Index `k` of the strip `|Im w − 2πk| <= π` holding `w`.
    pub fn strip_of(&self, w: Complex64) -> i64 {
        (w.im / TAU).round() as i64
    }

    /// `h(x) = max_{Re w = x} Re F(w) = e^x + log|λ|`.
    pub fn h(&self, x: f64) -> f64 {
        x.exp() + self.log_lambda.re
    }

    /// `log h(x)`, finite for `x` beyond f64 exponent range.
    pub fn log_h(&self, x: f64) -> f64 {
        let a = self.log_lambda.re;
        if x > 700.0 || a == 0.0 {
            x
        } else {
            x + (a * (-x).exp()).ln_1p()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ElReport {
    pub samples: usize,
    /// Samples with `Re F(w) > 0`.
    pub tested: usize,
    /// `min 4π|F'(w)| / Re F(w)` over tested samples.
    pub min_ratio: f64,
    pub holds: bool,
}

/// Checks `|F'(w)| >= Re F(w) / 4π` at random `w` in the strip
/// `|Im w| < π/2` with `Re w ∈ [−5, 30]`.
pub fn el_inequality_check(tract: &LogTract, samples: usize, seed: u64) -> Result<ElReport> {
    if samples < 100 {
        return Err(Error::InvalidArgument(format!("need at least 100 samples, got {samples}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tested = 0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..samples {
        let w = Complex64::new(-5.0 + 35.0 * rng.random::<f64>(), PI * (rng.random::<f64>() - 0.5));
        let re_f = tract.eval(w).re;
        if re_f > 0.0 {
            tested += 1;
            min_ratio = min_ratio.min(4.0 * PI * tract.derivative(w).norm() / re_f);
        }
    }
    Ok(ElReport { samples, tested, min_ratio, holds: min_ratio >= 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn periodic_and_conjugating() {
        let t = LogTract::new(c(0.7, 0.2)).unwrap();
        let f = t.function();
        for w in [c(0.3, 0.1), c(2.0, -1.2), c(-1.0, 3.0)] {
            let a = t.eval(w);
            assert!((t.eval(w + c(0.0, TAU)) - a).norm() <= 1e-13 * a.norm());
            let fz = f.eval(w.exp()).unwrap();
            assert!((a.exp() - fz).norm() <= 1e-12 * fz.norm());
        }
    }

    #[test]
    fn inverse_is_exact_on_base_strip() {
        let t = LogTract::new(c(1.0, 0.0)).unwrap();
        for w in [c(1.0, 0.5), c(10.0, -1.4), c(30.0, 1.0)] {
            let back = t.inverse(t.eval(w), 0);
            assert!((back - w).norm() < 1e-12, "{back} {w}");
        }
        assert_eq!(t.strip_of(c(0.0, 7.0)), 1);
    }

    #[test]
    fn el_examples() {
        let t = LogTract::new(c(1.0, 0.0)).unwrap();
        // at w = 1: 4π e / e
        let w = c(1.0, 0.0);
        assert!((4.0 * PI * t.derivative(w).norm() / t.eval(w).re - 4.0 * PI).abs() < 1e-12);
        let w = c(1.0, 1.5);
        assert!((t.eval(w).re - 1f64.exp() * 1.5f64.cos()).abs() < 1e-15);
        assert!(el_inequality_check(&t, 1000, 1).unwrap().holds);
        let t = LogTract::new(c(0.1, 0.0)).unwrap();
        let r = el_inequality_check(&t, 1000, 2).unwrap();
        assert!(r.holds && r.tested > 500);
        assert!(el_inequality_check(&t, 10, 2).is_err());
    }
}
