//! Data-parallel Lyapunov scans over CSV start lists.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lyapunov::lyapunov_estimate;
use super::orbit::{iterate_orbit, OrbitStatus};
use crate::error::Result;
use crate::function::FunctionDescriptor;

#[derive(Debug, Deserialize)]
struct StartRow {
    re: f64,
    im: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BatchRow {
    pub start: String,
    pub status: String,
    pub horizon: usize,
    pub chi_upper: f64,
    pub chi_lower: f64,
}

pub fn read_starts<R: Read>(input: R) -> Result<Vec<Complex64>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let row: StartRow = row?;
        out.push(Complex64::new(row.re, row.im));
    }
    Ok(out)
}

fn status_label(s: OrbitStatus) -> String {
    match s {
        OrbitStatus::Complete => "complete".into(),
        OrbitStatus::EscalatedAt(n) => format!("escalated@{n}"),
        OrbitStatus::OverflowAt(n) => format!("overflow@{n}"),
    }
}

/// One row per start, in input order regardless of scheduling.
pub fn lyapunov_batch(f: &FunctionDescriptor, starts: &[Complex64], horizon: usize) -> Vec<BatchRow> {
    starts
        .par_iter()
        .map(|&z| {
            let status = status_label(iterate_orbit(f, z, horizon).status);
            let (hi, lo) = match lyapunov_estimate(f, z, horizon) {
                Ok(est) => (est.upper, est.lower),
                Err(_) => (f64::NAN, f64::NAN),
            };
            BatchRow { start: format!("{}{:+}i", z.re, z.im), status, horizon, chi_upper: hi, chi_lower: lo }
        })
        .collect()
}

pub fn write_rows<W: Write>(out: W, rows: &[BatchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
