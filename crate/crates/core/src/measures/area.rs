//! Normalized spherical area `(1/π) ∬_U ((fⁿ)^#)² dx dy`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::logsumexp;
use super::region::{Chart, GridSpec, Region};
use crate::dynamics::orbit::log_sph_deriv_at;
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;

/// Largest log spread across a cell's samples for which the Richardson
/// error estimate is trusted.
const SPREAD_TRUST: f64 = 4.0;
/// Upper bound on live cells.
const CELL_BUDGET: usize = 600_000;

#[derive(Debug, Clone, Serialize)]
pub struct AreaEstimate {
    pub value: f64,
    pub log_value: f64,
    pub error_estimate: f64,
    pub log_error: f64,
    pub cells: usize,
    /// Deepest bisection level reached.
    pub refinements: usize,
    /// Cells with at least one sample whose orbit left the representable range.
    pub overflow_cells: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    u: (f64, f64),
    v: (f64, f64),
    depth: usize,
    log_int: f64,
    log_err: f64,
    /// Direction preference for the next split: (split u, split v).
    split: (bool, bool),
    overflow: bool,
}

/// Log of the integrand at `(u, v)`; `−∞` where the orbit is lost.
fn log_integrand(f: &FunctionDescriptor, chart: &Chart, n: usize, u: f64, v: f64) -> (f64, bool) {
    let (z, log_jac) = chart.map(u, v);
    match log_sph_deriv_at(f, z, n) {
        Some((s, _)) => (2.0 * s + log_jac, false),
        None => (f64::NEG_INFINITY, true),
    }
}

fn eval_cell(f: &FunctionDescriptor, chart: &Chart, n: usize, u: (f64, f64), v: (f64, f64), depth: usize) -> Cell {
    let (du, dv) = (u.1 - u.0, v.1 - v.0);
    let log_area = (du * dv).ln();
    let (mid, o0) = log_integrand(f, chart, n, u.0 + 0.5 * du, v.0 + 0.5 * dv);
    // quarter points, order (u-,v-), (u+,v-), (u-,v+), (u+,v+)
    let mut q = [0.0; 4];
    let mut overflow = o0;
    for (k, slot) in q.iter_mut().enumerate() {
        let uu = u.0 + du * if k % 2 == 0 { 0.25 } else { 0.75 };
        let vv = v.0 + dv * if k < 2 { 0.25 } else { 0.75 };
        let (val, o) = log_integrand(f, chart, n, uu, vv);
        *slot = val;
        overflow |= o;
    }
    let l1 = log_area + mid;
    let l4 = log_area + logsumexp(&q) - 4f64.ln();
    let samples = [mid, q[0], q[1], q[2], q[3]];
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let (log_int, mut log_err) = if l4 == f64::NEG_INFINITY && l1 == f64::NEG_INFINITY {
        (f64::NEG_INFINITY, f64::NEG_INFINITY)
    } else if l4 == f64::NEG_INFINITY {
        (l4, l1)
    } else {
        // I = I4 + (I4 − I1)/3
        let r = (l1 - l4).exp();
        let corr = 1.0 + (1.0 - r) / 3.0;
        let li = if corr > 0.0 { l4 + corr.ln() } else { l4 };
        (li, l4 + (1.0 - r).abs().ln() - 3f64.ln())
    };
    if hi > f64::NEG_INFINITY && hi - lo > SPREAD_TRUST {
        log_err = log_err.max(log_area + hi);
    }
    let sum = |a: usize, b: usize| logsumexp(&[q[a], q[b]]);
    let var = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() };
    let vu = var(sum(0, 2), sum(1, 3));
    let vv = var(sum(0, 1), sum(2, 3));
    let split = if vu.is_nan() || vv.is_nan() {
        (true, true)
    } else if vu > 2.0 * vv {
        (true, false)
    } else if vv > 2.0 * vu {
        (false, true)
    } else {
        (true, true)
    };
    Cell { u, v, depth, log_int, log_err, split, overflow }
}

fn children(c: &Cell) -> Vec<((f64, f64), (f64, f64))> {
    let halves = |(a, b): (f64, f64), yes: bool| {
        if yes {
            let m = 0.5 * (a + b);
            vec![(a, m), (m, b)]
        } else {
            vec![(a, b)]
        }
    };
    let mut out = Vec::with_capacity(4);
    for v in halves(c.v, c.split.1) {
        for u in halves(c.u, c.split.0) {
            out.push((u, v));
        }
    }
    out
}

#[derive(PartialEq)]
struct Key(f64, usize);
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Key {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

pub fn spherical_area(f: &FunctionDescriptor, region: &Region, n: usize, grid: &GridSpec) -> Result<AreaEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    region.validate()?;
    grid.validate()?;
    let chart = Chart::new(region);
    let m = grid.base_resolution;
    let (du, dv) = ((chart.u.1 - chart.u.0) / m as f64, (chart.v.1 - chart.v.0) / m as f64);
    let mut cells: Vec<Option<Cell>> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % m, k / m);
            let u = (chart.u.0 + i as f64 * du, chart.u.0 + (i + 1) as f64 * du);
            let v = (chart.v.0 + j as f64 * dv, chart.v.0 + (j + 1) as f64 * dv);
            Some(eval_cell(f, &chart, n, u, v, 0))
        })
        .collect();
    let mut heap: BinaryHeap<Key> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| Key(c.unwrap().log_err, i))
        .collect();
    let mut live = cells.len();
    let (mut log_total, mut log_err);
    loop {
        let (li, le): (Vec<f64>, Vec<f64>) = cells.iter().flatten().map(|c| (c.log_int, c.log_err)).unzip();
        log_total = logsumexp(&li);
        log_err = logsumexp(&le);
        if log_total == f64::NEG_INFINITY && cells.iter().flatten().all(|c| c.overflow) {
            return Err(Error::GridOverflow(n));
        }
        if log_err <= log_total + grid.rel_tol.ln() || live >= CELL_BUDGET {
            break;
        }
        let want = (live / 8).max(64);
        let mut batch = Vec::with_capacity(want);
        while batch.len() < want {
            match heap.pop() {
                Some(Key(e, i)) if e > f64::NEG_INFINITY => {
                    if cells[i].unwrap().depth < grid.max_refinements {
                        batch.push(i);
                    }
                }
                _ => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let parents: Vec<Cell> = batch.iter().map(|&i| cells[i].take().unwrap()).collect();
        let kids: Vec<Cell> = parents
            .par_iter()
            .flat_map_iter(|p| {
                children(p).into_iter().map(move |(u, v)| eval_cell(f, &chart, n, u, v, p.depth + 1))
            })
            .collect();
        live -= parents.len();
        for k in kids {
            heap.push(Key(k.log_err, cells.len()));
            cells.push(Some(k));
            live += 1;
        }
    }
    let norm = PI.ln();
    let log_value = log_total - norm;
    let log_error = log_err - norm;
    let live_cells = cells.iter().flatten();
    let refinements = live_cells.clone().map(|c| c.depth).max().unwrap_or(0);
    let overflow_cells = live_cells.clone().filter(|c| c.overflow).count();
    Ok(AreaEstimate {
        value: log_value.exp(),
        log_value,
        error_estimate: log_error.exp(),
        log_error,
        cells: live,
        refinements,
        overflow_cells,
        converged: log_error <= log_value + (10.0 * grid.rel_tol).ln(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_map_covers_sphere_twice() {
        let d = Region::disk(c(0.0, 0.0), 1e6).unwrap();
        let a = spherical_area(&FunctionDescriptor::monomial(2), &d, 1, &GridSpec::default()).unwrap();
        assert!((a.value - 2.0).abs() < 1e-2, "{a:?}");
        assert!(a.converged);
    }

    #[test]
    fn identity_area_of_unit_disk() {
        // (1/π)∬_{|z|<1} 1/(1+|z|²)² = 1/2
        let d = Region::disk(c(0.0, 0.0), 1.0).unwrap();
        let grid = GridSpec { rel_tol: 1e-6, ..GridSpec::default() };
        let a = spherical_area(&FunctionDescriptor::monomial(1), &d, 1, &grid).unwrap();
        assert!((a.value - 0.5).abs() < 1e-5, "{a:?}");
    }

    #[test]
    fn rectangle_constant_integrand() {
        // f = z on a tiny square at 0: integrand ≈ 1
        let r = Region::square(c(0.0, 0.0), 1e-3).unwrap();
        let a = spherical_area(&FunctionDescriptor::monomial(1), &r, 1, &GridSpec::default()).unwrap();
        assert!((a.value * PI / 1e-6 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn overflowing_everywhere_is_an_error() {
        let r = Region::square(c(1e4, 0.0), 1.0).unwrap();
        assert!(matches!(
            spherical_area(&FunctionDescriptor::exp(), &r, 3, &GridSpec::default()),
            Err(Error::GridOverflow(_))
        ));
    }
}
