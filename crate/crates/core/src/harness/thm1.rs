//! Finite-horizon probe for points with infinite Lyapunov exponent:
//! `a_n = (1/n) log μ(U, fⁿ)` should eventually outgrow any level.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{ExperimentReport, Row, Verdict};
use crate::dynamics::lyapunov_estimate;
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;
use crate::measures::{mu_sup, GridSpec, Region, RegionKind};
use crate::tower::TowerReal;

/// Uniform point of the region.
pub(crate) fn sample_region(rng: &mut ChaCha8Rng, region: &Region) -> Complex64 {
    match region.kind {
        RegionKind::Rectangle => {
            region.center
                + Complex64::new(region.half_width * (2.0 * rng.random::<f64>() - 1.0), region.half_height * (2.0 * rng.random::<f64>() - 1.0))
        }
        RegionKind::Disk { radius } => {
            let r = radius * rng.random::<f64>().sqrt();
            region.center + Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
        }
    }
}

pub fn run_thm1_growth_scan(
    f: &FunctionDescriptor,
    region: &Region,
    horizon: usize,
    starts: usize,
    seed: u64,
    grid: &GridSpec,
) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("thm1scan", Some(f));
    rep.param("region", region).param("N", horizon).param("starts", starts).param("seed", seed).param("grid", grid);
    rep.note("evidence-grade probe: density of infinite-exponent points cannot be certified at finite horizon");
    if !f.is_transcendental() {
        rep.note("polynomial control: the sequence is expected to plateau near log d");
    }
    if starts == 0 {
        rep.note("no starts sampled");
        rep.verdict = Verdict::Inconclusive;
        return Ok(rep);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chi_max = f64::NEG_INFINITY;
    for _ in 0..starts {
        let z = sample_region(&mut rng, region);
        if let Ok(est) = lyapunov_estimate(f, z, horizon.max(4)) {
            chi_max = chi_max.max(est.upper);
        }
    }
    rep.param("chi_upper_max", chi_max);

    let mut a = Vec::new();
    for n in 1..=horizon {
        match mu_sup(f, region, n, grid) {
            Ok(mu) => a.push(mu.log_mu / n as f64),
            Err(Error::GridOverflow(_)) => break,
            Err(e) => return Err(e),
        }
    }
    rep.param("a_n", &a);
    if a.len() < 3 {
        rep.note(format!("overflow-dominated: deepest usable n = {}", a.len()));
        rep.verdict = Verdict::Inconclusive;
        return Ok(rep);
    }
    let target = a[1] + a[1].abs();
    // report rows in exp-scale so towers stay non-negative
    let best = (2..a.len()).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
    for (i, &an) in a.iter().enumerate().skip(2) {
        let mut row = Row::at_least(i + 1, "a_n_vs_twice_a_2", TowerReal::from_log(an), TowerReal::from_log(target));
        row.holds = an >= target;
        rep.rows.push(row);
    }
    rep.verdict = if a[best] >= target { Verdict::Pass } else { Verdict::Fail };
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_grows_square_plateaus() {
        let u = Region::disk(Complex64::new(0.318_131_505_204_764, 1.337_235_701_430_689), 0.5).unwrap();
        let g = GridSpec::default();
        let rep = run_thm1_growth_scan(&FunctionDescriptor::exp(), &u, 5, 16, 7, &g).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:?}", rep.parameters["a_n"]);
        let u = Region::disk(Complex64::new(1.0, 0.0), 0.25).unwrap();
        let rep = run_thm1_growth_scan(&FunctionDescriptor::monomial(2), &u, 6, 16, 7, &g).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        let rep = run_thm1_growth_scan(&FunctionDescriptor::exp(), &u, 5, 0, 7, &g).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
    }
}
