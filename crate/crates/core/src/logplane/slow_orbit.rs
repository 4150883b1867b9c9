//! Points whose `F`-orbit follows a schedule, built by exact pullback in
//! fixed-point arithmetic and checked by forward iteration.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::Serialize;

use super::schedule::{log_96pi, SlowEscapeSchedule};
use super::tract::LogTract;
use crate::bigfix::{self, CFix, Fix};
use crate::error::{Error, Result};

const GUARD_BITS: u32 = 64;

#[derive(Debug, Clone, Serialize)]
pub struct SlowOrbitStep {
    pub n: usize,
    pub x_target: f64,
    /// `Re Fⁿ(u)` from forward iteration.
    pub re_f_n: f64,
    /// `k` with `|Im Fⁿ(u) − 2πk| <= π`, in decimal.
    pub strip: String,
    /// `log(π/2 − |Im Fⁿ(u) − 2πk|)`; `NaN` outside the strip `|·| < π/2`.
    pub angular_offset_log: f64,
    /// `Σ_{j<n} Re Fʲ(u) = log|(Fⁿ)'(u)|`.
    pub log_deriv_sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowOrbitTrace {
    pub u_re: String,
    pub u_im: String,
    /// `u` rounded to f64.
    pub u: Complex64,
    pub steps: Vec<SlowOrbitStep>,
    /// `log|(F^N)'(u)|` at the last step.
    pub log_f_deriv_sum: f64,
    pub precision_bits: u32,
    pub working_bits: u32,
    /// Every step satisfies `|Re Fⁿ(u) − x_n| <= 4π`.
    pub verified: bool,
}

/// Bits needed to reduce `Im Fʲ(u)` modulo 2π for `j <= n − 1`; those
/// imaginary parts are of size `e^{x_{j−1}}`.
pub fn required_bits(schedule: &SlowEscapeSchedule, n: usize) -> u32 {
    if n < 2 {
        return GUARD_BITS;
    }
    let m = (0..=n - 2).map(|j| schedule.x(j)).fold(0.0, f64::max);
    (1.5 * m).ceil() as u32 + GUARD_BITS
}

fn fix_c(z: Complex64, p: u32) -> CFix {
    CFix::new(Fix::from_f64(z.re, p), Fix::from_f64(z.im, p))
}

/// `Im c + sqrt(e^{2x_prev} − (x − Re c)²)`: imaginary part that puts a
/// point with real part `x` at distance `e^{x_prev}` from `c`.
fn target_im(c: &CFix, x: f64, x_prev: f64, p: u32, level: usize) -> Result<Fix> {
    let e = bigfix::exp(&Fix::from_f64(2.0 * x_prev, p));
    let d = Fix::from_f64(x, p).sub(&c.re);
    let rad = e.sub(&d.mul(&d));
    if rad.is_negative() {
        return Err(Error::ScheduleInfeasible(level));
    }
    Ok(c.im.add(&rad.sqrt()))
}

pub fn slow_orbit_construct(tract: &LogTract, schedule: &SlowEscapeSchedule, precision_bits: u32) -> Result<SlowOrbitTrace> {
    let n = schedule.n_max();
    if precision_bits < required_bits(schedule, n) {
        let max_n = (0..=n).rev().find(|&m| precision_bits >= required_bits(schedule, m)).unwrap_or(0);
        return Err(Error::PrecisionExhausted { bits: precision_bits, max_n });
    }
    let amplification: f64 = (0..n).map(|j| schedule.x(j)).sum::<f64>() / LN_2;
    let wp = precision_bits + amplification.ceil() as u32 + GUARD_BITS;
    let c = fix_c(tract.log_lambda, wp);
    let two_pi = bigfix::pi(wp).mul_i64(2);

    let u = if n == 0 {
        CFix::new(Fix::from_f64(schedule.x(0), wp), Fix::zero(wp))
    } else {
        let mut w = CFix::new(Fix::from_f64(schedule.x(n), wp), target_im(&c, schedule.x(n), schedule.x(n - 1), wp, n)?);
        for j in (0..n).rev() {
            let l = w.sub(&c).ln();
            let k = if j == 0 {
                BigInt::from(0)
            } else {
                target_im(&c, schedule.x(j), schedule.x(j - 1), wp, j)?.sub(&l.im).div(&two_pi).round()
            };
            w = CFix::new(l.re, l.im.add(&two_pi.mul_big(&k)));
        }
        w
    };

    let half_pi = bigfix::pi(wp).ldexp(-1);
    let mut steps = Vec::with_capacity(n);
    let mut w = u.clone();
    let mut sum = 0.0;
    let mut verified = true;
    for m in 1..=n {
        sum += w.re.to_f64();
        w = w.exp().add(&c);
        let k = w.im.div(&two_pi).round();
        let theta = w.im.sub(&two_pi.mul_big(&k));
        let off = half_pi.sub(&theta.abs());
        let re = w.re.to_f64();
        let x = schedule.x(m);
        verified &= (re - x).abs() <= 4.0 * PI;
        steps.push(SlowOrbitStep {
            n: m,
            x_target: x,
            re_f_n: re,
            strip: k.to_string(),
            angular_offset_log: if off.is_negative() { f64::NAN } else { off.ln_abs_f64() },
            log_deriv_sum: sum,
        });
    }
    let digits = (precision_bits as f64 * 2f64.log10()).ceil() as usize;
    Ok(SlowOrbitTrace {
        u_re: signed_decimal(&u.re, digits),
        u_im: signed_decimal(&u.im, digits),
        u: Complex64::new(u.re.to_f64(), u.im.to_f64()),
        steps,
        log_f_deriv_sum: sum,
        precision_bits,
        working_bits: wp,
        verified,
    })
}

fn signed_decimal(x: &Fix, digits: usize) -> String {
    let s = x.to_decimal(digits);
    if x.is_negative() && !s.starts_with('-') { format!("-{s}") } else { s }
}

/// Certified lower bound for `log (fⁿ)^#(e^u)`:
/// `log|(Fⁿ)'(u)| − log 2 − Re u − Re Fⁿ(u)`.
pub fn log_sph_deriv_from_logplane(trace: &SlowOrbitTrace, n: usize) -> Result<f64> {
    if n == 0 || n > trace.steps.len() {
        return Err(Error::InvalidArgument(format!("step {n} outside trace of length {}", trace.steps.len())));
    }
    let s = &trace.steps[n - 1];
    Ok(s.log_deriv_sum - LN_2 - trace.u.re - s.re_f_n)
}

/// The same bound from the schedule alone, using `log|(Fⁿ)'(u)| >=
/// Σ_{j<n} log h(x_j) − n log 96π`, `Re u = x₀` and `Re Fⁿ(u) <= x_n + 4π`.
pub fn schedule_sph_bound(tract: &LogTract, schedule: &SlowEscapeSchedule, n: usize) -> f64 {
    let s: f64 = (0..n).map(|j| tract.log_h(schedule.x(j))).sum();
    s - n as f64 * log_96pi() - LN_2 - schedule.x(0) - schedule.x(n) - 4.0 * PI
}

#[cfg(test)]
mod tests {
    use super::super::schedule::schedule_build;
    use super::*;

    fn unit() -> LogTract {
        LogTract::new(Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn degenerate_trace() {
        let s = schedule_build(&unit(), 30.0, 0).unwrap();
        let t = slow_orbit_construct(&unit(), &s, 128).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.u, Complex64::new(30.0, 0.0));
    }

    #[test]
    fn follows_schedule() {
        let s = schedule_build(&unit(), 30.0, 7).unwrap();
        let t = slow_orbit_construct(&unit(), &s, 256).unwrap();
        assert!(t.verified);
        for st in &t.steps {
            assert!((st.re_f_n - st.x_target).abs() < 1e-6, "{st:?}");
        }
        assert!((t.u.re - 30.0).abs() < 1e-6);
        assert!(t.u.im > 0.0 && t.u.im < PI / 2.0);
        let b7 = log_sph_deriv_from_logplane(&t, 7).unwrap();
        assert!(b7.ln() / 7.0 >= LN_2 - 0.15);
        for n in 1..=7 {
            let d = log_sph_deriv_from_logplane(&t, n).unwrap() - schedule_sph_bound(&unit(), &s, n);
            assert!(d.abs() <= n as f64 * (4.0 * PI + log_96pi()) + 1e-9);
        }
    }

    #[test]
    fn general_lambda() {
        let tr = LogTract::new(Complex64::new(0.5, 0.5)).unwrap();
        let s = schedule_build(&tr, 30.0, 4).unwrap();
        let t = slow_orbit_construct(&tr, &s, 256).unwrap();
        assert!(t.verified);
        assert!((t.steps[3].re_f_n - s.x(4)).abs() < 1e-6);
    }

    #[test]
    fn precision_budget() {
        let s = schedule_build(&unit(), 30.0, 7).unwrap();
        match slow_orbit_construct(&unit(), &s, 128) {
            Err(Error::PrecisionExhausted { bits: 128, max_n }) => assert!((2..7).contains(&max_n)),
            other => panic!("{other:?}"),
        }
    }
}
