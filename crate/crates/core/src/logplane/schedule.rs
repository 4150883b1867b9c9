//! Target real parts `x_n` for slowly escaping orbits, held as `ln x_n`.

use std::f64::consts::{LN_2, PI};

use serde::Serialize;

use super::tract::LogTract;
use crate::error::{Error, Result};

/// `log(96π)`, the per-step distortion loss.
pub fn log_96pi() -> f64 {
    (96.0 * PI).ln()
}

#[derive(Debug, Clone, Serialize)]
pub struct SlowEscapeSchedule {
    pub x0: f64,
    /// `ln x_n` for `n = 0..=n_max`.
    pub log_x: Vec<f64>,
    /// `δ(x_n)`.
    pub delta: Vec<f64>,
    /// Lower order of `λe^z`.
    pub lambda_lower: f64,
    /// `η_n = x_n^{1/n} − (1 + λ)`, entry 0 unused.
    pub eta: Vec<f64>,
    /// `ln Σ_{j<n} (λ − δ(x_j)) x_j`, entry 0 is `−∞`.
    pub log_partial: Vec<f64>,
    /// Entry `n >= 1`: `Σ_{j<n}(λ − δ_j)x_j >= (1 + δ_{n−1})x_n`. Its
    /// induction needs `δ(x_1) <= δ(x_0)`, which fails since `x_1 < x_0`;
    /// `n = 2` is then short by `(δ_1 − δ_0)x_1`.
    pub partial_sum_holds: Vec<bool>,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ε(x) = max(0, 1 − log h(x)/x)`, nonincreasing for this family.
fn epsilon(tract: &LogTract, x: f64, log_x: f64) -> f64 {
    if log_x > 6.0 {
        return 0.0f64.max(-(tract.log_h(x) - x) / x);
    }
    (1.0 - tract.log_h(x) / x).max(0.0)
}

/// `δ(x) = max(ε(x), 1/log x)`.
fn delta(tract: &LogTract, log_x: f64) -> f64 {
    let x = log_x.exp();
    epsilon(tract, x, log_x).max(1.0 / log_x)
}

impl SlowEscapeSchedule {
    pub fn len(&self) -> usize {
        self.log_x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_x.is_empty()
    }

    /// `x_n`, infinite once beyond f64 range.
    pub fn x(&self, n: usize) -> f64 {
        if n == 0 {
            return self.x0;
        }
        self.log_x[n].exp()
    }

    pub fn n_max(&self) -> usize {
        self.log_x.len() - 1
    }

    /// Recomputes the recurrence, `x_n <= h(x_{n−1})` and the stored
    /// partial-sum flags; returns the first failing index.
    pub fn verify(&self, tract: &LogTract) -> std::result::Result<(), usize> {
        let l = self.lambda_lower;
        for n in 0..self.len() {
            if (delta(tract, self.log_x[n]) - self.delta[n]).abs() > 1e-14 {
                return Err(n);
            }
            if n == 0 {
                continue;
            }
            let d = self.delta[n - 1];
            let ratio = if n == 1 { (l - d) / (1.0 + d) } else { (1.0 + l) / (1.0 + d) };
            let expect = self.log_x[n - 1] + ratio.ln();
            if (expect - self.log_x[n]).abs() > 1e-12 * expect.abs().max(1.0) {
                return Err(n);
            }
            if partial_sum_ok(self.log_partial[n], d, self.log_x[n]) != self.partial_sum_holds[n] {
                return Err(n);
            }
            // x_n <= h(x_{n−1})
            if self.log_x[n] > tract.log_h(self.x(n - 1)) {
                return Err(n);
            }
        }
        Ok(())
    }

    /// `ln B_n` for the schedule-only lower bound `log (fⁿ)^# >= B_n`,
    /// `B_n = Σ_{j<n}(λ − δ_j)x_j − n log 96π − x_n − 4π − log 2 − x₀`;
    /// `None` when `B_n <= 0`.
    pub fn log_growth_bound(&self, n: usize) -> Option<f64> {
        if n == 0 || n > self.n_max() {
            return None;
        }
        let k = n as f64 * log_96pi() + 4.0 * PI + LN_2 + self.x(0);
        let log_sub = log_add(self.log_x[n], k.ln());
        let ls = self.log_partial[n];
        if log_sub >= ls {
            return None;
        }
        Some(ls + (-(log_sub - ls).exp_m1()).ln())
    }

    /// `(1/n) ln B_n`, the bound on `(1/n) log log (fⁿ)^#`.
    pub fn growth_slope(&self, n: usize) -> Option<f64> {
        self.log_growth_bound(n).map(|lb| lb / n as f64)
    }
}

/// Partial-sum comparison in log space with relative slack `1e-12`.
fn partial_sum_ok(log_partial: f64, delta_prev: f64, log_x: f64) -> bool {
    let rhs = (1.0 + delta_prev).ln() + log_x;
    log_partial >= rhs - 1e-12 * rhs.abs().max(1.0)
}

/// Builds `x₁ = (λ−δ₀)/(1+δ₀)·x₀`, `x_{n+1} = (1+λ)/(1+δ_n)·x_n`.
pub fn schedule_build(tract: &LogTract, x0: f64, n_max: usize) -> Result<SlowEscapeSchedule> {
    let bounds = [("alpha cutoff", tract.alpha_cutoff), ("8π", 8.0 * PI), ("e²", std::f64::consts::E.powi(2))];
    for (name, b) in bounds {
        if !(x0 > b) {
            return Err(Error::Precondition(format!("x0 = {x0} must exceed {name} = {b}")));
        }
    }
    if tract.h(x0) <= 1.0 {
        return Err(Error::Precondition(format!("h(x0) = {} must exceed 1", tract.h(x0))));
    }
    let l = 1.0;
    let mut s = SlowEscapeSchedule {
        x0,
        log_x: vec![x0.ln()],
        delta: vec![delta(tract, x0.ln())],
        lambda_lower: l,
        eta: vec![f64::NAN],
        log_partial: vec![f64::NEG_INFINITY],
        partial_sum_holds: vec![true],
    };
    for n in 0..n_max {
        let d = s.delta[n];
        let ratio = if n == 0 { (l - d) / (1.0 + d) } else { (1.0 + l) / (1.0 + d) };
        let lx = s.log_x[n] + ratio.ln();
        let lp = log_add(s.log_partial[n], (l - d).ln() + s.log_x[n]);
        s.log_x.push(lx);
        s.delta.push(delta(tract, lx));
        s.eta.push((lx / (n + 1) as f64).exp() - (1.0 + l));
        s.log_partial.push(lp);
        s.partial_sum_holds.push(partial_sum_ok(lp, d, lx));
    }
    if let Err(n) = s.verify(tract) {
        return Err(Error::Precondition(format!("schedule invariant fails at n = {n}; choose a larger x0")));
    }
    Ok(s)
}
