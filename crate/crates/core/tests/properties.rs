use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use entire_dynamics::dynamics::iterate_orbit;
use entire_dynamics::harness::classical::{harnack_u, ray_reach, Univalent};
use entire_dynamics::logplane::{schedule_build, LogTract};
use entire_dynamics::measures::{logsumexp, Region};
use entire_dynamics::{FunctionDescriptor, TowerReal};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn logplane_inverse_is_exact(x in 1.0f64..30.0, y in -PI * 0.999..PI * 0.999) {
        let t = LogTract::new(Complex64::new(1.0, 0.0)).unwrap();
        let w = Complex64::new(x, y);
        let back = t.inverse(t.eval(w), t.strip_of(w));
        prop_assert!((back - w).norm() <= 1e-12 * (1.0 + w.norm()), "{w} -> {back}");
    }

    #[test]
    fn harnack_bounds(rho in 0.01f64..0.99, s in 0.0f64..1.0, th in -PI..PI) {
        let z = Complex64::from_polar(rho * s, th);
        let u = harnack_u(z);
        prop_assert!(u >= (1.0 - rho) / (1.0 + rho) * (1.0 - 1e-12));
        prop_assert!(u <= (1.0 + rho) / (1.0 - rho) * (1.0 + 1e-12));
    }

    #[test]
    fn koebe_distortion(rho in 0.01f64..0.99, s in 1e-6f64..1.0, th in -PI..PI, rot in 0.0..TAU) {
        let g = Univalent::Koebe(rot);
        let z = Complex64::from_polar(rho * s, th);
        let q = g.eval(z).norm() / z.norm();
        prop_assert!(q <= 1.0 / ((1.0 - rho) * (1.0 - rho)) * (1.0 + 1e-12));
        prop_assert!(q >= 1.0 / ((1.0 + rho) * (1.0 + rho)) * (1.0 - 1e-12));
    }

    #[test]
    fn spherical_derivative_below_chain_product(re in -3.0f64..3.0, im in -3.0f64..3.0, n in 1usize..6) {
        let o = iterate_orbit(&FunctionDescriptor::exp(), Complex64::new(re, im), n);
        if o.len() > n {
            let s = o.log_spherical_derivative(n).unwrap();
            prop_assert!(s <= o.log_deriv_prefix[n] + 1e-12);
            // (fⁿ)^# ≤ |(fⁿ)'| / (2|fⁿ|)
            let bound = o.log_deriv_prefix[n] - std::f64::consts::LN_2 - o.log_modulus(n).unwrap();
            prop_assert!(s <= bound + 1e-9);
        }
    }

    #[test]
    fn tower_order_matches_logs(a in -50.0f64..700.0, b in -50.0f64..700.0) {
        let (ta, tb) = (TowerReal::from_log(a), TowerReal::from_log(b));
        if (a - b).abs() > 1e-9 * (1.0 + a.abs()) {
            prop_assert_eq!(ta < tb, a < b);
        }
    }

    #[test]
    fn schedule_stays_below_h(x0 in 30.0f64..1e4, n in 1usize..200) {
        let t = LogTract::new(Complex64::new(1.0, 0.0)).unwrap();
        let s = schedule_build(&t, x0, n).unwrap();
        prop_assert!(s.verify(&t).is_ok());
        for k in 0..n {
            prop_assert!(s.log_x[k + 1] <= t.log_h(s.x(k)) + 1e-12);
        }
    }

    #[test]
    fn logsumexp_bounds(xs in prop::collection::vec(-700.0f64..700.0, 1..20)) {
        let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let l = logsumexp(&xs);
        prop_assert!(l >= m && l <= m + (xs.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn regions_contain_their_centre(cx in -10.0f64..10.0, cy in -10.0f64..10.0, r in 1e-3f64..5.0) {
        let c = Complex64::new(cx, cy);
        let d = Region::disk(c, r).unwrap();
        let q = Region::square(c, r).unwrap();
        prop_assert!(d.contains(c) && q.contains(c));
        prop_assert!((d.area() - PI * r * r).abs() <= 1e-12 * d.area());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quarter_disk_is_covered(c_abs in 0.0f64..0.5, c_arg in -PI..PI, phi in -PI..PI) {
        let g = Univalent::Quadratic(Complex64::from_polar(c_abs, c_arg));
        let t = 0.25 * (1.0 - 1e-6);
        prop_assert_eq!(ray_reach(&g, phi, t), t);
    }
}
