//! Fast-escaping classification against the iterated maximum modulus.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use super::orbit::{iterate_orbit, OrbitStatus};
use crate::error::{Error, Result};
use crate::function::{FunctionDescriptor, MaxModulusTable};
use crate::tower::TowerReal;

#[derive(Debug, Clone, Serialize)]
pub struct FastEscapeResult {
    pub member: bool,
    /// Smallest admissible shift, when `member`.
    pub l: Option<usize>,
    /// For each `l = 0..=l_max`, the first `n` with `|fⁿ(z)| <= M^{n−l}(R)`.
    pub failing_n: Vec<Option<usize>>,
    /// Last index actually compared; below `n_max` when the orbit left
    /// the representable range and could not be continued.
    pub horizon: usize,
}

/// `|fⁿ(z₀)|` as towers for `n = 0..`. Past overflow the orbit is continued
/// on the positive axis by `|z_{k+1}| = M(|z_k|)`, valid when the last point
/// is positive real and `M(r) = f(r)`.
pub fn orbit_moduli(f: &FunctionDescriptor, z0: Complex64, n_max: usize) -> Vec<TowerReal> {
    let orbit = iterate_orbit(f, z0, n_max);
    let mut out: Vec<TowerReal> = (0..orbit.len())
        .map(|n| {
            let lm = orbit.log_modulus(n).unwrap();
            if lm == f64::NEG_INFINITY { TowerReal::from_value(0.0) } else { TowerReal::from_log(lm) }
        })
        .collect();
    if let OrbitStatus::OverflowAt(_) = orbit.status {
        let last = orbit.point(orbit.len() - 1).unwrap().log_polar();
        if f.max_on_positive_axis() && last.arg.abs() < 1e-12 {
            while out.len() <= n_max {
                let next = f.max_modulus_tower(out.last().unwrap());
                out.push(next);
            }
        }
    }
    out
}

pub fn fast_escaping_test(
    f: &FunctionDescriptor,
    z0: Complex64,
    r: f64,
    l_max: usize,
    n_max: usize,
) -> Result<FastEscapeResult> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let table = f.iterated_max_modulus(r, n_max)?;
    Ok(fast_escaping_with_table(f, z0, &table, l_max, n_max))
}

/// As [`fast_escaping_test`] with a precomputed `Mᵏ(R)` table of at least
/// `n_max + 1` levels.
pub fn fast_escaping_with_table(
    f: &FunctionDescriptor,
    z0: Complex64,
    table: &MaxModulusTable,
    l_max: usize,
    n_max: usize,
) -> FastEscapeResult {
    assert!(table.levels.len() > n_max, "table too short for n_max = {n_max}");
    let moduli = orbit_moduli(f, z0, n_max);
    let horizon = moduli.len() - 1;
    let mut failing_n = Vec::with_capacity(l_max + 1);
    let mut l_found = None;
    for l in 0..=l_max {
        let fail = (l..=horizon).find(|&n| moduli[n].compare(&table.levels[n - l]) != Ordering::Greater);
        if fail.is_none() && l_found.is_none() && l <= horizon {
            l_found = Some(l);
        }
        failing_n.push(fail);
    }
    FastEscapeResult { member: l_found.is_some(), l: l_found, failing_n, horizon }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_from_ten_dominates() {
        let r = fast_escaping_test(&FunctionDescriptor::exp(), c(10.0, 0.0), 5.0, 5, 6).unwrap();
        assert!(r.member);
        assert_eq!(r.l, Some(0));
        assert_eq!(r.horizon, 6);
    }

    #[test]
    fn exp_from_point_one_needs_shift_three() {
        let r = fast_escaping_test(&FunctionDescriptor::exp(), c(0.1, 0.0), 5.0, 5, 8).unwrap();
        assert_eq!(r.l, Some(3));
        assert_eq!(r.failing_n[0], Some(0));
        assert_eq!(r.failing_n[2], Some(2));
        assert_eq!(r.horizon, 8);
    }

    #[test]
    fn fixed_point_is_not_fast_escaping() {
        let z = c(0.318_131_505_204_764_1, 1.337_235_701_430_689);
        let r = fast_escaping_test(&FunctionDescriptor::exp(), z, 5.0, 5, 8).unwrap();
        assert!(!r.member);
        assert!(r.failing_n.iter().all(|x| x.is_some()));
    }

    #[test]
    fn equality_is_not_domination() {
        // the orbit of R itself equals the table levelwise
        let r = fast_escaping_test(&FunctionDescriptor::exp(), c(5.0, 0.0), 5.0, 0, 5).unwrap();
        assert_eq!(r.failing_n[0], Some(0));
        assert!(!r.member);
    }

    #[test]
    fn non_escalating_radius_rejected() {
        let f = FunctionDescriptor::exp_affine(c(0.1, 0.0));
        assert!(matches!(fast_escaping_test(&f, c(1.0, 0.0), 1.0, 2, 4), Err(Error::NonEscalating(_))));
    }
}
