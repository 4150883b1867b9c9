//! `μ(U, fⁿ) >= log M^{n−m}(R, f)` on a test range of `n`.

use std::ops::RangeInclusive;

use super::report::{ExperimentReport, Row, Verdict};
use crate::error::{Error, Result};
use crate::function::{FunctionDescriptor, MaxModulusTable};
use crate::measures::{mu_sup, GridSpec, Region};
use crate::tower::TowerReal;

/// `log` of a table level, clamped at 0 for levels at most 1.
pub(crate) fn log_level(table: &MaxModulusTable, k: usize) -> TowerReal {
    table.levels[k].ln().unwrap_or_else(|_| TowerReal::from_value(0.0))
}

/// Rows of `lhs_n >= log M^{n−m}(R)`; `n < m` rows are vacuous.
pub(crate) fn lower_rows(values: &[(usize, TowerReal)], table: &MaxModulusTable, m: usize, check: &str) -> Vec<Row> {
    values
        .iter()
        .map(|&(n, v)| if n < m { Row::vacuous(n, check, v) } else { Row::at_least(n, check, v, log_level(table, n - m)) })
        .collect()
}

/// Smallest `m` in `0..=6` for which every row holds.
pub(crate) fn smallest_working_m(values: &[(usize, TowerReal)], table: &MaxModulusTable) -> Option<usize> {
    (0..=6).find(|&m| lower_rows(values, table, m, "").iter().all(|r| r.holds))
}

pub fn run_thm7(
    f: &FunctionDescriptor,
    region: &Region,
    r: f64,
    m: usize,
    n_range: RangeInclusive<usize>,
    grid: &GridSpec,
) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new("thm7", Some(f));
    rep.param("region", region).param("R", r).param("m", m).param("n_min", n_range.start()).param("n_max", n_range.end()).param("grid", grid);
    rep.tol("grid_rel_tol", grid.rel_tol);
    let table = f.iterated_max_modulus(r, *n_range.end())?;
    let mut values = Vec::new();
    for n in n_range {
        match mu_sup(f, region, n, grid) {
            Ok(mu) => values.push((n, TowerReal::from_log(mu.log_mu))),
            Err(Error::GridOverflow(_)) => {
                rep.note(format!("all grid orbits overflow at n = {n}; deepest usable n = {}", n - 1));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    rep.rows = lower_rows(&values, &table, m, "mu_lower");
    rep.param("smallest_working_m", smallest_working_m(&values, &table));
    rep.settle();
    if rep.notes.iter().any(|s| s.contains("overflow")) && rep.verdict == Verdict::Pass {
        rep.verdict = Verdict::Inconclusive;
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn square_near_one_passes() {
        let u = Region::disk(Complex64::new(1.0, 0.0), 0.25).unwrap();
        let rep = run_thm7(&FunctionDescriptor::monomial(2), &u, 2.0, 1, 1..=8, &GridSpec::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Pass, "{:#?}", rep.rows);
        assert_eq!(rep.rows.len(), 8);
    }

    #[test]
    fn m_zero_fails_for_small_n() {
        let u = Region::disk(Complex64::new(1.0, 0.0), 0.25).unwrap();
        let rep = run_thm7(&FunctionDescriptor::monomial(2), &u, 2.0, 0, 1..=4, &GridSpec::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
        assert!(rep.violations().count() >= 1);
    }
}
