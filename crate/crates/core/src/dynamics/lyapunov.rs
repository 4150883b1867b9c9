//! Finite-horizon Lyapunov exponents.

use num_complex::Complex64;
use serde::Serialize;

use super::orbit::iterate_orbit;
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;

/// `(1/n) log (fⁿ)^#(z)` over `n = 1..=N` and its extremes over the
/// second half `N/2 <= n <= N` of the usable range.
#[derive(Debug, Clone, Serialize)]
pub struct LyapunovEstimate {
    pub horizon: usize,
    pub upper: f64,
    pub lower: f64,
    /// Entry `k` is `n = k + 1`.
    pub per_n: Vec<f64>,
    /// Same extremes for the chordal derivative; exact at fixed points.
    pub chordal_upper: f64,
    pub chordal_lower: f64,
    /// The orbit overflowed before `N`; extremes use the shorter range.
    pub truncated: bool,
}

pub fn lyapunov_estimate(f: &FunctionDescriptor, z0: Complex64, horizon: usize) -> Result<LyapunovEstimate> {
    if horizon < 4 {
        return Err(Error::InvalidArgument(format!("horizon must be at least 4, got {horizon}")));
    }
    let orbit = iterate_orbit(f, z0, horizon);
    let usable = orbit.len() - 1;
    if usable < 2 {
        return Err(Error::OrbitOverflow { step: usable + 1 });
    }
    let mut per_n = Vec::with_capacity(usable);
    let mut chordal = Vec::with_capacity(usable);
    for n in 1..=usable {
        per_n.push(orbit.log_spherical_derivative(n)? / n as f64);
        chordal.push(orbit.log_chordal_derivative(n)? / n as f64);
    }
    let lo = (horizon / 2).max(1).min(usable);
    let window = lo - 1..usable;
    let max = |v: &[f64]| v[window.clone()].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = |v: &[f64]| v[window.clone()].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(LyapunovEstimate {
        horizon,
        upper: max(&per_n),
        lower: min(&per_n),
        chordal_upper: max(&chordal),
        chordal_lower: min(&chordal),
        per_n,
        truncated: usable < horizon,
    })
}
