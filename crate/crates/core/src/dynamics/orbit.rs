//! Forward orbits with log-polar continuation and chain-rule bookkeeping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, LogPolar, Result};
use crate::function::FunctionDescriptor;

/// Points with `|z|` above this are carried in log-polar form.
pub const ESCALATE_RADIUS: f64 = 1e100;
pub(crate) const LOG_ESCALATE: f64 = 230.258_509_299_404_57;

/// An orbit point, rectangular while moderate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Rect(Complex64),
    Log(LogPolar),
}

impl Point {
    pub fn log_mag(&self) -> f64 {
        match self {
            Point::Rect(z) => z.norm().ln(),
            Point::Log(lp) => lp.log_mag,
        }
    }

    pub fn log_polar(&self) -> LogPolar {
        match self {
            Point::Rect(z) => LogPolar { log_mag: z.norm().ln(), arg: z.arg() },
            Point::Log(lp) => *lp,
        }
    }

    pub fn rect(&self) -> Option<Complex64> {
        match self {
            Point::Rect(z) => Some(*z),
            Point::Log(_) => None,
        }
    }
}

/// `(f(p), log|f'(p)|)`. Errors mean the next point is not representable.
pub fn step(f: &FunctionDescriptor, p: Point) -> Result<(Point, f64)> {
    match p {
        Point::Rect(z) => {
            let (v, d) = f.eval_scaled(z);
            let lv = v.log_abs();
            let next = if lv > LOG_ESCALATE {
                Point::Log(LogPolar::new(lv, v.arg()))
            } else {
                Point::Rect(v.value())
            };
            Ok((next, d.log_abs()))
        }
        Point::Log(lp) => {
            if let FunctionDescriptor::ExpAffine { .. } = f {
                // f' = f for λe^z
                let next = f.log_eval(lp)?;
                return Ok((Point::Log(next), next.log_mag));
            }
            let (v, d) = f.log_eval_pair(lp)?;
            Ok((Point::Log(v), d.log_mag))
        }
    }
}

/// `ln(1 + e^x)` without overflow.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    /// All requested points computed in rectangular form.
    Complete,
    /// All requested points computed; log-polar from this index on.
    EscalatedAt(usize),
    /// The point with this index could not be represented.
    OverflowAt(usize),
}

/// `z_n = fⁿ(z₀)` with `log_deriv_prefix[n] = Σ_{j<n} log|f'(z_j)|`.
#[derive(Debug, Clone)]
pub struct OrbitRecord {
    pub start: Complex64,
    /// Rectangular prefix `z_0 ..`.
    pub points: Vec<Complex64>,
    /// Points after escalation, continuing the index sequence of `points`.
    pub log_points: Vec<LogPolar>,
    pub log_deriv_prefix: Vec<f64>,
    pub status: OrbitStatus,
    pub escalated_at: Option<usize>,
}

impl OrbitRecord {
    /// Number of computed points.
    pub fn len(&self) -> usize {
        self.points.len() + self.log_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, n: usize) -> Option<Point> {
        if n < self.points.len() {
            Some(Point::Rect(self.points[n]))
        } else {
            self.log_points.get(n - self.points.len()).map(|lp| Point::Log(*lp))
        }
    }

    pub fn log_modulus(&self, n: usize) -> Option<f64> {
        self.point(n).map(|p| p.log_mag())
    }

    /// `log (fⁿ)^#(z₀) = prefix[n] − log(1 + |z_n|²)`.
    pub fn log_spherical_derivative(&self, n: usize) -> Result<f64> {
        let p = self.point(n).ok_or_else(|| Error::InvalidArgument(format!("orbit has no point {n} (length {})", self.len())))?;
        Ok(self.log_deriv_prefix[n] - softplus(2.0 * p.log_mag()))
    }

    /// Chordal variant: adds `log(1 + |z₀|²)`.
    pub fn log_chordal_derivative(&self, n: usize) -> Result<f64> {
        Ok(self.log_spherical_derivative(n)? + softplus(2.0 * self.start.norm().ln()))
    }
}

/// Iterates `f` from `z0` for up to `n_max` steps.
pub fn iterate_orbit(f: &FunctionDescriptor, z0: Complex64, n_max: usize) -> OrbitRecord {
    let mut rec = OrbitRecord {
        start: z0,
        points: vec![z0],
        log_points: Vec::new(),
        log_deriv_prefix: vec![0.0],
        status: OrbitStatus::Complete,
        escalated_at: None,
    };
    let mut p = if z0.norm() > ESCALATE_RADIUS {
        rec.points.clear();
        rec.log_points.push(LogPolar { log_mag: z0.norm().ln(), arg: z0.arg() });
        rec.escalated_at = Some(0);
        Point::Log(rec.log_points[0])
    } else {
        Point::Rect(z0)
    };
    for n in 1..=n_max {
        match step(f, p) {
            Ok((next, ld)) => {
                let prev = *rec.log_deriv_prefix.last().unwrap();
                rec.log_deriv_prefix.push(prev + ld);
                match next {
                    Point::Rect(z) if rec.escalated_at.is_none() => rec.points.push(z),
                    other => {
                        rec.escalated_at.get_or_insert(n);
                        rec.log_points.push(other.log_polar());
                    }
                }
                p = next;
            }
            Err(_) => {
                rec.status = OrbitStatus::OverflowAt(n);
                return rec;
            }
        }
    }
    rec.status = match rec.escalated_at {
        Some(e) => OrbitStatus::EscalatedAt(e),
        None => OrbitStatus::Complete,
    };
    rec
}

/// `(log (fⁿ)^#(z), log ‖(fⁿ)'(z)‖)` without storing the orbit; `None`
/// when the orbit cannot be followed for `n` steps.
pub fn log_sph_deriv_at(f: &FunctionDescriptor, z: Complex64, n: usize) -> Option<(f64, f64)> {
    let mut p = Point::Rect(z);
    let mut acc = 0.0;
    for _ in 0..n {
        let (next, ld) = step(f, p).ok()?;
        acc += ld;
        p = next;
    }
    let s = acc - softplus(2.0 * p.log_mag());
    if s.is_nan() {
        return None;
    }
    Some((s, s + softplus(2.0 * z.norm().ln())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_orbit_from_zero() {
        let o = iterate_orbit(&FunctionDescriptor::exp(), c(0.0, 0.0), 3);
        assert_eq!(o.status, OrbitStatus::Complete);
        let expect = [0.0, 1.0, E, E.exp()];
        for (n, v) in expect.iter().enumerate() {
            assert!((o.points[n].re - v).abs() < 1e-12 * (1.0 + v));
        }
        let pre = [0.0, 0.0, 1.0, 1.0 + E];
        for (n, v) in pre.iter().enumerate() {
            assert!((o.log_deriv_prefix[n] - v).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn squaring_escalates_exactly() {
        let o = iterate_orbit(&FunctionDescriptor::monomial(2), c(2.0, 0.0), 50);
        assert!(matches!(o.status, OrbitStatus::EscalatedAt(_)));
        let l50 = o.log_modulus(50).unwrap();
        let exact = 2f64.powi(50) * 2f64.ln();
        assert!((l50 - exact).abs() <= 1e-12 * exact, "{l50} {exact}");
    }

    #[test]
    fn attracting_orbit_converges() {
        let f = FunctionDescriptor::exp_affine(c(0.1, 0.0));
        let o = iterate_orbit(&f, c(0.0, 0.0), 60);
        assert_eq!(o.status, OrbitStatus::Complete);
        assert!((o.points[1].re - 0.1).abs() < 1e-15);
        // fixed point of 0.1 e^x = x
        let fp = 0.111_832_559_158_962_9;
        assert!((o.points[60].re - fp).abs() < 1e-12);
    }

    #[test]
    fn spherical_examples() {
        let o = iterate_orbit(&FunctionDescriptor::monomial(2), c(1.0, 0.0), 1);
        assert!(o.log_spherical_derivative(1).unwrap().abs() < 1e-15);
        let e = FunctionDescriptor::exp();
        let o = iterate_orbit(&e, c(0.0, 0.0), 3);
        assert!((o.log_spherical_derivative(1).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        // (1 + e) − log(1 + e^{2e}); mpmath: -1.72262679627498669
        let v = o.log_spherical_derivative(3).unwrap();
        assert!((v - (-1.722_626_796_274_986_7)).abs() < 1e-12, "{v}");
        assert!(o.log_spherical_derivative(4).is_err());
    }

    #[test]
    fn exp_log_mode_tracks_real_part() {
        // 0 → 1 → e → e^e → e^{e^e} ≈ 3.8e6 → z_5 beyond 1e100, held in log form
        let o = iterate_orbit(&FunctionDescriptor::exp(), c(0.0, 0.0), 5);
        assert_eq!(o.status, OrbitStatus::EscalatedAt(5));
        let l5 = o.log_modulus(5).unwrap();
        assert!((l5 - E.exp().exp()).abs() < 1e-6 * l5);
        let pre = 1.0 + E + E.exp() + E.exp().exp();
        assert!((o.log_deriv_prefix[5] - pre).abs() < 1e-9 * pre);
        // z_6 needs Re z_5 ~ e^{3.8e6}: not representable
        let o = iterate_orbit(&FunctionDescriptor::exp(), c(0.0, 0.0), 8);
        assert_eq!(o.status, OrbitStatus::OverflowAt(6));
        assert_eq!(o.len(), 6);
    }
}
