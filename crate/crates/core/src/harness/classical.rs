//! Koebe distortion, the one-quarter theorem and Harnack's inequality on
//! explicit univalent maps and a positive harmonic function of the disk.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Row};
use crate::error::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalParams {
    pub samples: usize,
    pub rays: usize,
    /// Number of sampled maps probed for the quarter theorem.
    pub quarter_maps: usize,
    pub rel_slack: f64,
    pub equality_tol: f64,
}

impl Default for ClassicalParams {
    fn default() -> Self {
        ClassicalParams { samples: 10_000, rays: 360, quarter_maps: 16, rel_slack: 1e-12, equality_tol: 1e-9 }
    }
}

/// Normalized univalent maps of the unit disk (`g(0) = 0`, `g'(0) = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Univalent {
    Identity,
    /// `z/(1 − e^{iθ}z)`
    HalfPlane(f64),
    /// `z/(1 − e^{iθ}z)²`
    Koebe(f64),
    /// `z + cz²`, univalent for `|c| ≤ 1/2`
    Quadratic(Complex64),
}

impl Univalent {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            Univalent::Identity => z,
            Univalent::HalfPlane(t) => z / (1.0 - Complex64::from_polar(1.0, t) * z),
            Univalent::Koebe(t) => {
                let d = 1.0 - Complex64::from_polar(1.0, t) * z;
                z / (d * d)
            }
            Univalent::Quadratic(c) => z + c * z * z,
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match *self {
            Univalent::Identity => Complex64::new(1.0, 0.0),
            Univalent::HalfPlane(t) => {
                let d = 1.0 - Complex64::from_polar(1.0, t) * z;
                1.0 / (d * d)
            }
            Univalent::Koebe(t) => {
                let u = Complex64::from_polar(1.0, t) * z;
                (1.0 + u) / ((1.0 - u) * (1.0 - u) * (1.0 - u))
            }
            Univalent::Quadratic(c) => 1.0 + 2.0 * c * z,
        }
    }

    fn sample(rng: &mut ChaCha8Rng) -> Univalent {
        let t = TAU * rng.random::<f64>();
        match rng.random_range(0..4) {
            0 => Univalent::Identity,
            1 => Univalent::HalfPlane(t),
            2 => Univalent::Koebe(t),
            _ => Univalent::Quadratic(Complex64::from_polar(0.5 * rng.random::<f64>(), t)),
        }
    }
}

/// Distortion ratios `(|g(z)|/|z|, |g'(z)|)` of a normalized map.
fn ratios(g: &Univalent, z: Complex64) -> (f64, f64) {
    (g.eval(z).norm() / z.norm(), g.derivative(z).norm())
}

fn ka_bounds(rho: f64) -> (f64, f64) {
    (1.0 / ((1.0 + rho) * (1.0 + rho)), 1.0 / ((1.0 - rho) * (1.0 - rho)))
}

fn kb_bounds(rho: f64) -> (f64, f64) {
    ((1.0 - rho) / (1.0 + rho).powi(3), (1.0 + rho) / (1.0 - rho).powi(3))
}

/// Harnack test function `Re((1+z)/(1−z))`, positive on the disk, 1 at 0.
pub fn harnack_u(z: Complex64) -> f64 {
    ((1.0 + z) / (1.0 - z)).re
}

fn harn_bounds(rho: f64) -> (f64, f64) {
    ((1.0 - rho) / (1.0 + rho), (1.0 + rho) / (1.0 - rho))
}

/// Follows the preimage of the ray `t·e^{iφ}`, `0 ≤ t ≤ t_max`, from `z = 0`
/// by Newton continuation. Returns the largest `t` reached inside the disk.
pub fn ray_reach(g: &Univalent, phi: f64, t_max: f64) -> f64 {
    let dir = Complex64::from_polar(1.0, phi);
    let mut z = Complex64::new(0.0, 0.0);
    let mut t = 0.0;
    let mut h = t_max / 64.0;
    while t < t_max {
        let t_next = (t + h).min(t_max);
        let w = dir * t_next;
        let mut y = z;
        let mut ok = false;
        for _ in 0..60 {
            let d = g.derivative(y);
            if d.norm() == 0.0 {
                break;
            }
            let step = (g.eval(y) - w) / d;
            y -= step;
            if !(y.norm() < 1.0) {
                break;
            }
            if step.norm() <= 1e-15 * (1.0 + y.norm()) {
                ok = (g.eval(y) - w).norm() <= 1e-12 * (1.0 + w.norm());
                break;
            }
        }
        if ok && (y - z).norm() < 0.5 * (1.0 - z.norm()).max(1e-9) {
            z = y;
            t = t_next;
            h = (h * 2.0).min(t_max / 64.0);
        } else {
            h *= 0.5;
            if h < 1e-14 * t_max {
                return t;
            }
        }
    }
    t
}

/// Largest discrepancy `max(lhs/upper, lower/lhs)` over samples, as a
/// single relative excess (≤ 1 means all bounds held).
#[derive(Default)]
struct Worst {
    lower: f64,
    upper: f64,
}

impl Worst {
    fn add(&mut self, v: f64, (lo, hi): (f64, f64)) {
        self.lower = self.lower.max(lo / v);
        self.upper = self.upper.max(v / hi);
    }
}

pub fn classical_suite(p: &ClassicalParams, seed: u64) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("classical", None);
    rep.param("params", p).param("seed", seed);
    rep.tol("rel_slack", p.rel_slack).tol("equality_tol", p.equality_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lim = 1.0 + p.rel_slack;

    let koebe = Univalent::Koebe(0.0);
    let (mut ka_k, mut kb_k, mut ka_f, mut kb_f, mut harn) = (Worst::default(), Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for _ in 0..p.samples {
        let rho = 0.99 * rng.random::<f64>().max(1e-3);
        let z = Complex64::from_polar(rho * rng.random::<f64>().max(1e-9), TAU * rng.random::<f64>());
        let (a, b) = ratios(&koebe, z);
        ka_k.add(a, ka_bounds(rho));
        kb_k.add(b, kb_bounds(rho));
        let g = Univalent::sample(&mut rng);
        let (a, b) = ratios(&g, z);
        ka_f.add(a, ka_bounds(rho));
        kb_f.add(b, kb_bounds(rho));
        harn.add(harnack_u(z), harn_bounds(rho));
    }
    for (name, w) in [("ka_koebe", &ka_k), ("kb_koebe", &kb_k), ("ka_family", &ka_f), ("kb_family", &kb_f), ("harn", &harn)] {
        rep.rows.push(Row::real_at_most(0, &format!("{name}_lower"), w.lower, lim));
        rep.rows.push(Row::real_at_most(0, &format!("{name}_upper"), w.upper, lim));
    }

    // equality on the real axis
    let mut eq: [f64; 6] = [0.0; 6];
    for i in 1..100 {
        let rho = i as f64 / 100.0;
        let x = Complex64::new(rho, 0.0);
        let (ka, kb, hn) = (ka_bounds(rho), kb_bounds(rho), harn_bounds(rho));
        let rel = |v: f64, b: f64| (v / b - 1.0).abs();
        let (a, b) = ratios(&koebe, x);
        let (a_neg, b_neg) = ratios(&koebe, -x);
        eq[0] = eq[0].max(rel(a, ka.1));
        eq[1] = eq[1].max(rel(a_neg, ka.0));
        eq[2] = eq[2].max(rel(b, kb.1));
        eq[3] = eq[3].max(rel(b_neg, kb.0));
        eq[4] = eq[4].max(rel(harnack_u(x), hn.1));
        eq[5] = eq[5].max(rel(harnack_u(-x), hn.0));
    }
    let names = ["ka_upper_equality", "ka_lower_equality", "kb_upper_equality", "kb_lower_equality", "harn_upper_equality", "harn_lower_equality"];
    for (name, v) in names.iter().zip(eq) {
        rep.rows.push(Row::real_at_most(0, name, v, p.equality_tol));
    }

    // quarter theorem along rays
    let t_max = 0.25 * (1.0 - 1e-6);
    let mut maps = vec![Univalent::Identity, Univalent::HalfPlane(0.0), Univalent::Koebe(0.0), Univalent::Quadratic(Complex64::new(0.5, 0.0))];
    while maps.len() < p.quarter_maps.max(maps.len()) {
        maps.push(Univalent::sample(&mut rng));
    }
    let mut short_rays = 0usize;
    let mut min_reach = f64::INFINITY;
    for g in &maps {
        for k in 0..p.rays {
            let phi = -PI + TAU * k as f64 / p.rays as f64;
            let t = ray_reach(g, phi, t_max);
            min_reach = min_reach.min(t / t_max);
            if t < t_max {
                short_rays += 1;
            }
        }
    }
    rep.param("kc_maps", maps.len()).param("kc_min_reach_fraction", min_reach);
    rep.rows.push(Row::real_at_most(0, "kc_rays_short_of_quarter", short_rays as f64, 0.0));
    rep.settle();
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Verdict;

    #[test]
    fn koebe_quarter_is_sharp() {
        let k = Univalent::Koebe(0.0);
        assert_eq!(ray_reach(&k, PI, 0.25 * (1.0 - 1e-6)), 0.25 * (1.0 - 1e-6));
        // beyond 1/4 on the slit the continuation must stop
        assert!(ray_reach(&k, PI, 0.3) < 0.2501);
    }

    #[test]
    fn closed_forms() {
        let x = Complex64::new(0.3, 0.0);
        let (a, _) = ratios(&Univalent::Koebe(0.0), x);
        assert!((a - 1.0 / 0.49).abs() < 1e-15);
        let (a, b) = ratios(&Univalent::Identity, x);
        assert_eq!((a, b), (1.0, 1.0));
        let (a, _) = ratios(&Univalent::HalfPlane(0.0), x);
        assert!(a < ka_bounds(0.3).1 && a > ka_bounds(0.3).0);
    }

    #[test]
    fn suite_passes() {
        let rep = classical_suite(&ClassicalParams { samples: 2000, quarter_maps: 6, ..Default::default() }, 1).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:#?}", rep.violations().collect::<Vec<_>>());
    }
}
