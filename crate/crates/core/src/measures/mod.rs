//! Spherical-derivative suprema, spherical areas and characteristics.

pub mod area;
pub mod mu;
pub mod nevanlinna;
pub mod region;

pub use area::{spherical_area, AreaEstimate};
pub use mu::{mu_sup, MuEstimate};
pub use nevanlinna::{ahlfors_shimizu_t0, characteristic_sandwich_check, nevanlinna_t, SandwichReport, T0Estimate};
pub use region::{GridSpec, Region, RegionKind};

/// `log Σ exp(xᵢ)`, `−∞` for an empty or all `−∞` input.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}
