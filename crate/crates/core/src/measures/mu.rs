//! `μ(U, fⁿ) = sup_U (fⁿ)^#` by branch and bound on a refined grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::region::{Chart, GridSpec, Region};
use crate::dynamics::orbit::log_sph_deriv_at;
use crate::error::{Error, Result};
use crate::function::FunctionDescriptor;

const EVAL_BUDGET: usize = 400_000;

#[derive(Debug, Clone, Serialize)]
pub struct MuEstimate {
    /// `log max (fⁿ)^#` over the sampled points.
    pub log_mu: f64,
    /// Same for the chordal derivative `‖(fⁿ)'‖`.
    pub log_mu_chordal: f64,
    pub argmax: Complex64,
    pub evaluations: usize,
    pub refinements: usize,
}

#[derive(Clone, Copy)]
struct Cell {
    u: (f64, f64),
    v: (f64, f64),
    depth: usize,
    /// Optimistic bound: best sample plus the sample spread.
    bound: f64,
}

struct Sample {
    z: Complex64,
    sph: f64,
    chord: f64,
    /// The orbit left the representable range; the value is unknown.
    overflow: bool,
}

fn sample(f: &FunctionDescriptor, chart: &Chart, n: usize, u: f64, v: f64) -> Sample {
    let (z, _) = chart.map(u, v);
    match log_sph_deriv_at(f, z, n) {
        Some((s, c)) => Sample { z, sph: s, chord: c, overflow: false },
        None => Sample { z, sph: f64::NEG_INFINITY, chord: f64::NEG_INFINITY, overflow: true },
    }
}

/// Corners and center of a cell.
fn probe(f: &FunctionDescriptor, chart: &Chart, n: usize, u: (f64, f64), v: (f64, f64)) -> Vec<Sample> {
    let pts = [(u.0, v.0), (u.1, v.0), (u.0, v.1), (u.1, v.1), (0.5 * (u.0 + u.1), 0.5 * (v.0 + v.1))];
    pts.iter().map(|&(a, b)| sample(f, chart, n, a, b)).collect()
}

fn bound_of(s: &[Sample]) -> f64 {
    if s.iter().any(|x| x.overflow) {
        return f64::INFINITY;
    }
    // zeros of the derivative give −∞ and carry no spread information
    let finite = s.iter().map(|x| x.sph).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi == f64::NEG_INFINITY { hi } else { hi + (hi - lo) }
}

struct Key(f64, usize);
impl PartialEq for Key {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
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

pub fn mu_sup(f: &FunctionDescriptor, region: &Region, n: usize, grid: &GridSpec) -> Result<MuEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    region.validate()?;
    grid.validate()?;
    let chart = Chart::new(region);
    let m = grid.base_resolution;
    let (du, dv) = ((chart.u.1 - chart.u.0) / m as f64, (chart.v.1 - chart.v.0) / m as f64);
    let first: Vec<(Cell, Vec<Sample>)> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let u = (chart.u.0 + (k % m) as f64 * du, chart.u.0 + (k % m + 1) as f64 * du);
            let v = (chart.v.0 + (k / m) as f64 * dv, chart.v.0 + (k / m + 1) as f64 * dv);
            let s = probe(f, &chart, n, u, v);
            (Cell { u, v, depth: 0, bound: bound_of(&s) }, s)
        })
        .collect();
    let mut best = Sample { z: region.center, sph: f64::NEG_INFINITY, chord: f64::NEG_INFINITY, overflow: false };
    let mut best_chord = f64::NEG_INFINITY;
    let mut evaluations = 0;
    let mut cells = Vec::new();
    let mut heap = BinaryHeap::new();
    let absorb = |s: Vec<Sample>, best: &mut Sample, best_chord: &mut f64| {
        for x in s {
            *best_chord = best_chord.max(x.chord);
            if x.sph > best.sph {
                *best = x;
            }
        }
    };
    for (c, s) in first {
        evaluations += s.len();
        absorb(s, &mut best, &mut best_chord);
        heap.push(Key(c.bound, cells.len()));
        cells.push(c);
    }
    let mut refinements = 0;
    while evaluations < EVAL_BUDGET {
        let tol = grid.rel_tol * best.sph.abs().max(1.0);
        let mut batch = Vec::new();
        while batch.len() < 64 {
            match heap.pop() {
                Some(Key(b, i)) if b > best.sph + tol && cells[i].depth < grid.max_refinements => batch.push(i),
                Some(Key(b, _)) if b > best.sph + tol => continue,
                _ => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let kids: Vec<(Cell, Vec<Sample>)> = batch
            .par_iter()
            .flat_map_iter(|&i| {
                let p = cells[i];
                let um = 0.5 * (p.u.0 + p.u.1);
                let vm = 0.5 * (p.v.0 + p.v.1);
                let quads = [((p.u.0, um), (p.v.0, vm)), ((um, p.u.1), (p.v.0, vm)), ((p.u.0, um), (vm, p.v.1)), ((um, p.u.1), (vm, p.v.1))];
                let chart = &chart;
                quads.into_iter().map(move |(u, v)| {
                    let s = probe(f, chart, n, u, v);
                    (Cell { u, v, depth: p.depth + 1, bound: bound_of(&s) }, s)
                })
            })
            .collect();
        for (c, s) in kids {
            evaluations += s.len();
            refinements = refinements.max(c.depth);
            absorb(s, &mut best, &mut best_chord);
            heap.push(Key(c.bound, cells.len()));
            cells.push(c);
        }
    }
    if best.sph == f64::NEG_INFINITY {
        return Err(Error::GridOverflow(n));
    }
    Ok(MuEstimate { log_mu: best.sph, log_mu_chordal: best_chord, argmax: best.z, evaluations, refinements })
}
