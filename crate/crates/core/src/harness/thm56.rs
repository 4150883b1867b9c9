//! `log M^{n−m}(R₁, f) <= S(U, fⁿ) <= log Mⁿ(R₂, f)`.

use std::ops::RangeInclusive;

use super::report::{ExperimentReport, Row, Verdict};
use super::thm7::{log_level, lower_rows, smallest_working_m};
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;
use crate::measures::{spherical_area, GridSpec, Region};
use crate::tower::TowerReal;

const MAX_DOUBLINGS: usize = 20;

/// `(n, S(U, fⁿ))` and whether every quadrature converged; stops at the
/// first `n` whose orbits all overflow.
fn areas(f: &FunctionDescriptor, region: &Region, n_range: RangeInclusive<usize>, grid: &GridSpec) -> Result<(Vec<(usize, TowerReal)>, bool, Option<usize>)> {
    let mut out = Vec::new();
    let mut converged = true;
    for n in n_range {
        match spherical_area(f, region, n, grid) {
            Ok(a) => {
                converged &= a.converged;
                out.push((n, TowerReal::from_log(a.log_value)));
            }
            Err(Error::GridOverflow(_)) => return Ok((out, converged, Some(n))),
            Err(e) => return Err(e),
        }
    }
    Ok((out, converged, None))
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Control {
    pub function: FunctionDescriptor,
    pub region: Region,
    pub r: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn run_thm5_thm6(
    f: &FunctionDescriptor,
    region: &Region,
    r_lower: f64,
    r_upper: f64,
    m: usize,
    n_range: RangeInclusive<usize>,
    grid: &GridSpec,
    control: Option<&Control>,
) -> Result<ExperimentReport> {
    if !f.is_transcendental() {
        return Err(Error::InvalidArgument("the area bounds concern transcendental functions".into()));
    }
    let mut rep = ExperimentReport::new("thm56", Some(f));
    rep.param("region", region).param("R_lower", r_lower).param("R_upper_initial", r_upper).param("m", m);
    rep.param("n_min", n_range.start()).param("n_max", n_range.end()).param("grid", grid);
    rep.tol("grid_rel_tol", grid.rel_tol);
    let n_max = *n_range.end();
    let (values, converged, overflow_at) = areas(f, region, n_range, grid)?;
    if let Some(n) = overflow_at {
        rep.note(format!("all quadrature orbits overflow at n = {n}"));
    }
    let low = f.iterated_max_modulus(r_lower, n_max)?;
    rep.rows = lower_rows(&values, &low, m, "area_lower");
    rep.param("smallest_working_m", smallest_working_m(&values, &low));

    let mut ru = r_upper;
    let mut witnessed = None;
    for k in 0..=MAX_DOUBLINGS {
        let up = f.iterated_max_modulus(ru, n_max)?;
        let rows: Vec<Row> = values.iter().map(|&(n, v)| Row::at_most(n, "area_upper", v, log_level(&up, n))).collect();
        if rows.iter().all(|r| r.holds) || k == MAX_DOUBLINGS {
            witnessed = rows.iter().all(|r| r.holds).then_some(k);
            rep.rows.extend(rows);
            break;
        }
        ru *= 2.0;
    }
    rep.param("R_upper", ru).param("R_upper_doublings", witnessed);

    if let Some(c) = control {
        let (cv, _, _) = areas(&c.function, &c.region, 1..=n_max, grid)?;
        let ct = c.function.iterated_max_modulus(c.r, n_max)?;
        let control_pass = lower_rows(&cv, &ct, m, "").iter().all(|r| r.holds);
        rep.param("control_function", c.function.to_json_value()).param("control_region", c.region);
        rep.param("control_lower_bound_passes", control_pass);
        let flag = if control_pass { 1.0 } else { 0.0 };
        rep.rows.push(Row::real_at_most(0, "control_must_fail", flag, 0.0));
    }
    rep.settle();
    if !converged {
        rep.note("at least one quadrature did not converge");
        rep.verdict = Verdict::Inconclusive;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn upper_bound_is_witnessed() {
        let u = Region::disk(Complex64::new(0.318_131_505_204_764, 1.337_235_701_430_689), 0.5).unwrap();
        let ctl = Control {
            function: FunctionDescriptor::exp_affine(Complex64::new(0.1, 0.0)),
            region: Region::disk(Complex64::new(0.0, 0.0), 0.5).unwrap(),
            r: 5.0,
        };
        let g = GridSpec { rel_tol: 1e-2, ..GridSpec::default() };
        let rep = run_thm5_thm6(&FunctionDescriptor::exp(), &u, 5.0, 1.0, 2, 1..=2, &g, Some(&ctl)).unwrap();
        assert!(rep.rows.iter().filter(|r| r.check == "area_upper").all(|r| r.holds));
        assert_eq!(rep.parameters["control_lower_bound_passes"], false);
        assert!(rep.parameters["R_upper_doublings"].as_u64().unwrap() <= 20);
    }
}
