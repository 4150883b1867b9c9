//! Closed-form entire functions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, LogPolar, Result};
use crate::special::{ml_asymptotic_polar, ml_eval, switch_radius, Scaled};
use crate::tower::TowerReal;

/// Inputs with `ln|z|` above this cannot be formed as f64 complex numbers.
const LOG_RECT_LIMIT: f64 = 700.0;

/// An entire function given by variant and parameters.
///
/// JSON form: `{"variant": "exp_affine", "lambda": [1.0, 0.0]}`,
/// `{"variant": "polynomial", "coefficients": [[0,0],[0,0],[1,0]]}`
/// (ascending powers), `{"variant": "cosh_sqrt"}`,
/// `{"variant": "mittag_leffler", "alpha": 0.75}`,
/// `{"variant": "scaled_mittag_leffler", "alpha": 1.0, "eta": 0.1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionDescriptor {
    Polynomial {
        coefficients: Vec<Complex64>,
    },
    /// `z ↦ λ e^z`.
    ExpAffine {
        lambda: Complex64,
    },
    /// `z ↦ cosh √z = E₂(z)`.
    CoshSqrt,
    MittagLeffler {
        alpha: f64,
    },
    /// `z ↦ η E_α(z)`. A missing `eta` is replaced by the default from
    /// [`default_eta`]; `c_bound` caches the constant from [`c_bound`].
    ScaledMittagLeffler {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        eta: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_bound: Option<f64>,
    },
}

impl FunctionDescriptor {
    pub fn polynomial(coefficients: Vec<Complex64>) -> Result<Self> {
        let f = FunctionDescriptor::Polynomial { coefficients };
        f.validate()?;
        Ok(f)
    }

    /// `z^d`.
    pub fn monomial(d: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
        c[d] = Complex64::new(1.0, 0.0);
        FunctionDescriptor::Polynomial { coefficients: c }
    }

    pub fn exp_affine(lambda: Complex64) -> Self {
        FunctionDescriptor::ExpAffine { lambda }
    }

    pub fn exp() -> Self {
        Self::exp_affine(Complex64::new(1.0, 0.0))
    }

    pub fn mittag_leffler(alpha: f64) -> Result<Self> {
        let f = FunctionDescriptor::MittagLeffler { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn scaled_mittag_leffler(alpha: f64, eta: Option<f64>) -> Result<Self> {
        let f = FunctionDescriptor::ScaledMittagLeffler { alpha, eta, c_bound: None };
        f.validate()?;
        Ok(f.resolved())
    }

    /// Parses, validates and fills in a default `eta`.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: FunctionDescriptor = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f.resolved())
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("descriptor serializes")
    }

    fn resolved(self) -> Self {
        match self {
            FunctionDescriptor::ScaledMittagLeffler { alpha, eta: None, c_bound } => {
                FunctionDescriptor::ScaledMittagLeffler { alpha, eta: Some(default_eta(alpha)), c_bound }
            }
            f => f,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match self {
            FunctionDescriptor::Polynomial { coefficients } => {
                if coefficients.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return bad("polynomial coefficients must be finite".into());
                }
                let deg = coefficients.iter().rposition(|c| c.norm() != 0.0).unwrap_or(0);
                if deg < 2 {
                    return bad(format!("polynomial degree must be at least 2, got {deg}"));
                }
                if coefficients.len() > deg + 1 {
                    return bad("trailing zero coefficients; the last entry must be the leading coefficient".into());
                }
            }
            FunctionDescriptor::ExpAffine { lambda } => {
                if lambda.norm() == 0.0 || !lambda.norm().is_finite() {
                    return bad("lambda must be finite and non-zero".into());
                }
            }
            FunctionDescriptor::CoshSqrt => {}
            FunctionDescriptor::MittagLeffler { alpha } => check_alpha(*alpha)?,
            FunctionDescriptor::ScaledMittagLeffler { alpha, eta, c_bound } => {
                check_alpha(*alpha)?;
                if let Some(e) = eta {
                    if !(*e > 0.0 && *e < 1.0) {
                        return bad(format!("eta must lie in (0, 1), got {e}"));
                    }
                }
                if let Some(c) = c_bound {
                    if !(*c > 0.0 && c.is_finite()) {
                        return bad(format!("c_bound must be positive, got {c}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        match self {
            FunctionDescriptor::Polynomial { coefficients } => format!("polynomial(deg {})", coefficients.len() - 1),
            FunctionDescriptor::ExpAffine { lambda } => format!("({lambda})·exp(z)"),
            FunctionDescriptor::CoshSqrt => "cosh(sqrt z)".into(),
            FunctionDescriptor::MittagLeffler { alpha } => format!("E_{alpha}"),
            FunctionDescriptor::ScaledMittagLeffler { alpha, eta, .. } => {
                format!("{}·E_{alpha}", eta.unwrap_or_else(|| default_eta(*alpha)))
            }
        }
    }

    pub fn is_transcendental(&self) -> bool {
        !matches!(self, FunctionDescriptor::Polynomial { .. })
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            FunctionDescriptor::Polynomial { coefficients } => Some(coefficients.len() - 1),
            _ => None,
        }
    }

    /// Order ρ(f).
    pub fn order(&self) -> f64 {
        match self {
            FunctionDescriptor::Polynomial { .. } => 0.0,
            FunctionDescriptor::ExpAffine { .. } => 1.0,
            FunctionDescriptor::CoshSqrt => 0.5,
            FunctionDescriptor::MittagLeffler { alpha } | FunctionDescriptor::ScaledMittagLeffler { alpha, .. } => 1.0 / alpha,
        }
    }

    /// Lower order λ(f); equal to the order for every variant here.
    pub fn lower_order(&self) -> f64 {
        self.order()
    }

    /// True when `M(r, f) = |f(r)|`, which holds for nonnegative Taylor
    /// coefficients.
    pub fn max_on_positive_axis(&self) -> bool {
        match self {
            FunctionDescriptor::Polynomial { coefficients } => coefficients.iter().all(|c| c.im == 0.0 && c.re >= 0.0),
            FunctionDescriptor::ExpAffine { lambda } => lambda.im == 0.0 && lambda.re > 0.0,
            _ => true,
        }
    }

    /// Scalar prefactor and Mittag-Leffler index, when the variant is one.
    fn ml_params(&self) -> Option<(f64, f64)> {
        match self {
            FunctionDescriptor::CoshSqrt => Some((2.0, 1.0)),
            FunctionDescriptor::MittagLeffler { alpha } => Some((*alpha, 1.0)),
            FunctionDescriptor::ScaledMittagLeffler { alpha, eta, .. } => {
                Some((*alpha, eta.unwrap_or_else(|| default_eta(*alpha))))
            }
            _ => None,
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match self {
            FunctionDescriptor::ScaledMittagLeffler { .. } => self.ml_params().map(|p| p.1),
            _ => None,
        }
    }

    /// `f(z)` and `f'(z)` with log scaling.
    pub fn eval_scaled(&self, z: Complex64) -> (Scaled, Scaled) {
        match self {
            FunctionDescriptor::Polynomial { coefficients } => poly_scaled(coefficients, z),
            FunctionDescriptor::ExpAffine { lambda } => {
                let m = lambda * Complex64::from_polar(1.0, z.im);
                let s = Scaled { mantissa: m, scale: z.re };
                (s, s)
            }
            _ => {
                let (alpha, eta) = self.ml_params().unwrap();
                let (v, d) = ml_eval(alpha, z);
                (Scaled { mantissa: v.mantissa * eta, scale: v.scale }, Scaled { mantissa: d.mantissa * eta, scale: d.scale })
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        finite_or_overflow(self.eval_scaled(z).0)
    }

    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        finite_or_overflow(self.eval_scaled(z).1)
    }

    /// `f(z)` and `f'(z)` in log-polar form for a log-polar input.
    pub fn log_eval_pair(&self, z: LogPolar) -> Result<(LogPolar, LogPolar)> {
        let to_lp = |s: Scaled| LogPolar::new(s.log_abs(), s.arg());
        if let (FunctionDescriptor::Polynomial { coefficients }, true) = (self, z.log_mag > 0.0) {
            return Ok(poly_log_eval(coefficients, z));
        }
        if z.log_mag <= LOG_RECT_LIMIT {
            let zr = Complex64::from_polar(z.log_mag.exp(), z.arg);
            let (v, d) = self.eval_scaled(zr);
            return Ok((to_lp(v), to_lp(d)));
        }
        match self {
            FunctionDescriptor::Polynomial { .. } => unreachable!(),
            FunctionDescriptor::ExpAffine { .. } => Err(Error::OrbitOverflow { step: 0 }),
            _ => {
                let (alpha, eta) = self.ml_params().unwrap();
                if z.log_mag / alpha > LOG_RECT_LIMIT {
                    return Err(Error::OrbitOverflow { step: 0 });
                }
                let (v, d) = ml_asymptotic_polar(alpha, z.log_mag, z.arg);
                let v = Scaled { mantissa: v.mantissa * eta, scale: v.scale };
                let d = Scaled { mantissa: d.mantissa * eta, scale: d.scale };
                Ok((to_lp(v), to_lp(d)))
            }
        }
    }

    /// `f(z)` in log-polar form.
    pub fn log_eval(&self, z: LogPolar) -> Result<LogPolar> {
        if let FunctionDescriptor::ExpAffine { lambda } = self {
            // exact: log|λe^z| = Re z + log|λ|, arg = Im z + arg λ
            if z.log_mag > LOG_RECT_LIMIT {
                return Err(Error::OrbitOverflow { step: 0 });
            }
            let r = z.log_mag.exp();
            return Ok(LogPolar::new(r * z.arg.cos() + lambda.norm().ln(), r * z.arg.sin() + lambda.arg()));
        }
        self.log_eval_pair(z).map(|p| p.0)
    }

    /// `log M(r, f)`.
    pub fn max_modulus(&self, r: f64) -> f64 {
        assert!(r > 0.0, "max_modulus needs r > 0");
        match self {
            FunctionDescriptor::ExpAffine { lambda } => r + lambda.norm().ln(),
            FunctionDescriptor::Polynomial { coefficients } if !self.max_on_positive_axis() => {
                poly_circle_max(coefficients, r)
            }
            _ => self
                .log_eval_pair(LogPolar::new(r.ln(), 0.0))
                .map(|p| p.0.log_mag)
                .unwrap_or(f64::INFINITY),
        }
    }

    /// `M(r, f)` for a tower-scale radius.
    pub fn max_modulus_tower(&self, r: &TowerReal) -> TowerReal {
        if let FunctionDescriptor::ExpAffine { lambda } = self {
            return r.add_real(lambda.norm().ln()).exp();
        }
        if let Some(lr) = r.log_f64() {
            if lr < 650.0 {
                let lm = self.max_modulus(r.to_f64());
                if lm.is_finite() {
                    return TowerReal::from_log(lm);
                }
            }
        }
        match self {
            FunctionDescriptor::Polynomial { coefficients } => {
                let d = coefficients.len() - 1;
                r.powf(d as f64).scale_by_exp(coefficients[d].norm().ln())
            }
            _ => {
                let (alpha, eta) = self.ml_params().unwrap();
                // M(r) ≈ (η/α) exp(r^{1/α})
                r.powf(1.0 / alpha).add_real((eta / alpha).ln()).exp()
            }
        }
    }

    /// Table of `Mⁿ(R, f)` for `n = 0..=n_max`.
    pub fn iterated_max_modulus(&self, r0: f64, n_max: usize) -> Result<MaxModulusTable> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidArgument(format!("R must be positive, got {r0}")));
        }
        if self.max_modulus(r0) <= r0.ln() {
            return Err(Error::NonEscalating(r0));
        }
        let mut levels = vec![TowerReal::from_value(r0)];
        for _ in 0..n_max {
            let next = self.max_modulus_tower(levels.last().unwrap());
            levels.push(next);
        }
        Ok(MaxModulusTable { r0, levels })
    }

    /// `min over the upper half of the grid of log log M(r) / log r`.
    pub fn lower_order_estimate(&self, r_grid: &[f64]) -> Result<f64> {
        if r_grid.len() < 10 {
            return Err(Error::InvalidArgument(format!("need at least 10 radii, got {}", r_grid.len())));
        }
        if r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid[0] <= 1.0 {
            return Err(Error::InvalidArgument("radii must be increasing and above 1".into()));
        }
        if (r_grid[r_grid.len() - 1] / r_grid[0]).log10() < 6.0 - 1e-9 {
            return Err(Error::InvalidArgument("radii must span at least 6 decades".into()));
        }
        let tail = &r_grid[r_grid.len() / 2..];
        let est = tail
            .iter()
            .map(|&r| {
                let lm = self.max_modulus(r);
                if lm <= 0.0 { f64::NEG_INFINITY } else { lm.ln() / r.ln() }
            })
            .fold(f64::INFINITY, f64::min);
        Ok(est.max(0.0))
    }

    /// `log M(r^c) >= c log M(r)`.
    pub fn hadamard_convexity_check(&self, r: f64, c: f64) -> bool {
        assert!(c > 1.0);
        self.max_modulus(r.powf(c)) >= c * self.max_modulus(r)
    }

    /// Constant `C` with `|f'(z)| <= C |z|^{ρ-1} |f(z)|` on `|z| >= 1, |f| >= 1`.
    pub fn c_bound(&self) -> Option<f64> {
        match self {
            FunctionDescriptor::ScaledMittagLeffler { c_bound: Some(c), .. } => Some(*c),
            FunctionDescriptor::ScaledMittagLeffler { alpha, .. } => Some(c_bound(*alpha, self.eta().unwrap())),
            _ => None,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, 2], got {alpha}")))
    }
}

fn finite_or_overflow(s: Scaled) -> Result<Complex64> {
    let v = s.value();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(LogPolar::new(s.log_abs(), s.arg())))
    }
}

fn poly_scaled(c: &[Complex64], z: Complex64) -> (Scaled, Scaled) {
    let d = c.len() - 1;
    let lr = z.norm().ln();
    if lr * d as f64 <= 600.0 {
        let mut v = c[d];
        let mut dv = Complex64::new(0.0, 0.0);
        for k in (0..d).rev() {
            dv = dv * z + v;
            v = v * z + c[k];
        }
        return (Scaled { mantissa: v, scale: 0.0 }, Scaled { mantissa: dv, scale: 0.0 });
    }
    // p(z) = z^d q(1/z), p'(z) = z^{d-1} r(1/z)
    let w = z.inv();
    let mut q = Complex64::new(0.0, 0.0);
    let mut r = Complex64::new(0.0, 0.0);
    for (j, a) in c.iter().enumerate() {
        q = q * w + a;
        if j >= 1 {
            r = r * w + a * j as f64;
        }
    }
    let th = z.arg();
    let v = Scaled { mantissa: q * Complex64::from_polar(1.0, d as f64 * th), scale: d as f64 * lr };
    let dv = Scaled { mantissa: r * Complex64::from_polar(1.0, (d - 1) as f64 * th), scale: (d - 1) as f64 * lr };
    (v, dv)
}

/// `max_θ log|p(r e^{iθ})|` by a 1024-point scan and golden-section
/// refinement around the three best samples.
fn poly_circle_max(c: &[Complex64], r: f64) -> f64 {
    let g = |th: f64| poly_scaled(c, Complex64::from_polar(r, th)).0.log_abs();
    const N: usize = 1024;
    let h = 2.0 * PI / N as f64;
    let vals: Vec<f64> = (0..N).map(|i| g(i as f64 * h)).collect();
    let mut idx: Vec<usize> = (0..N).collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = vals[idx[0]];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for &i in idx.iter().take(3) {
        let (mut a, mut b) = (i as f64 * h - h, i as f64 * h + h);
        let mut x1 = b - inv_phi * (b - a);
        let mut x2 = a + inv_phi * (b - a);
        let (mut f1, mut f2) = (g(x1), g(x2));
        while b - a > 1e-13 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = g(x2);
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = g(x1);
            }
        }
        best = best.max(f1).max(f2);
    }
    best
}

/// `p(z) = z^d Σ a_k w^{d−k}` with `w = 1/z`, for `|z| > 1` in log-polar form;
/// likewise for `p'`.
fn poly_log_eval(coefficients: &[Complex64], z: LogPolar) -> (LogPolar, LogPolar) {
    let d = coefficients.len() - 1;
    let w = Complex64::from_polar((-z.log_mag).exp(), -z.arg);
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    for (k, a) in coefficients.iter().enumerate() {
        s = s * w + a;
        if k >= 1 {
            ds = ds * w + a * k as f64;
        }
    }
    let v = LogPolar::new(d as f64 * z.log_mag + s.norm().ln(), d as f64 * z.arg + s.arg());
    let dv = if d == 0 {
        LogPolar { log_mag: f64::NEG_INFINITY, arg: 0.0 }
    } else {
        LogPolar::new((d - 1) as f64 * z.log_mag + ds.norm().ln(), (d - 1) as f64 * z.arg + ds.arg())
    };
    (v, dv)
}

/// `Mⁿ(R, f)` for `n = 0..`.
#[derive(Debug, Clone, Serialize)]
pub struct MaxModulusTable {
    pub r0: f64,
    pub levels: Vec<TowerReal>,
}

impl MaxModulusTable {
    pub fn get(&self, n: usize) -> Option<&TowerReal> {
        self.levels.get(n)
    }

    /// Recomputes the first three transitions and checks that the stored
    /// prefix increases strictly.
    pub fn verify(&self, f: &FunctionDescriptor) -> bool {
        if self.levels.first().map(|t| t.to_f64()) != Some(self.r0) {
            return false;
        }
        for n in 0..self.levels.len().saturating_sub(1).min(3) {
            if f.max_modulus_tower(&self.levels[n]) != self.levels[n + 1] {
                return false;
            }
        }
        self.levels.windows(2).all(|w| w[1] > w[0])
    }
}

static ETA_CACHE: Mutex<Option<HashMap<u64, f64>>> = Mutex::new(None);
static C_CACHE: Mutex<Option<HashMap<(u64, u64), f64>>> = Mutex::new(None);

/// Largest `η = 2^-k` with `max |ηE_α|, |ηE_α'| < 0.99` on the unit circle
/// (4096-point scan; the maximum principle makes the boundary sufficient).
pub fn default_eta(alpha: f64) -> f64 {
    if let Some(v) = ETA_CACHE.lock().unwrap().as_ref().and_then(|m| m.get(&alpha.to_bits())) {
        return *v;
    }
    let peak = (0..4096)
        .map(|i| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / 4096.0);
            let (v, d) = ml_eval(alpha, z);
            v.value().norm().max(d.value().norm())
        })
        .fold(0.0, f64::max);
    let mut eta = 0.5;
    while eta * peak >= 0.99 {
        eta *= 0.5;
    }
    ETA_CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(alpha.to_bits(), eta);
    eta
}

/// `1.05 · max |f'| / (|z|^{ρ-1} |f|)` over 10⁶ samples of
/// `{1 <= |z| <= 10⁴, |f(z)| >= 1}` for `f = ηE_α`, log-uniform in `|z|`.
pub fn c_bound(alpha: f64, eta: f64) -> f64 {
    let key = (alpha.to_bits(), eta.to_bits());
    if let Some(v) = C_CACHE.lock().unwrap().as_ref().and_then(|m| m.get(&key)) {
        return *v;
    }
    const SAMPLES: usize = 1_000_000;
    const CHUNK: usize = 10_000;
    let rho = 1.0 / alpha;
    let lmax = 1e4f64.ln();
    let lr_switch = switch_radius(alpha).ln();
    let worst = (0..SAMPLES / CHUNK)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0000 + chunk as u64);
            let mut worst = f64::NEG_INFINITY;
            for _ in 0..CHUNK {
                let lr = rng.random::<f64>() * lmax;
                let th = (rng.random::<f64>() * 2.0 - 1.0) * PI;
                let (v, d) = if lr > lr_switch {
                    ml_asymptotic_polar(alpha, lr, th)
                } else {
                    ml_eval(alpha, Complex64::from_polar(lr.exp(), th))
                };
                let lf = v.log_abs() + eta.ln();
                if lf < 0.0 {
                    continue;
                }
                let ld = d.log_abs() + eta.ln();
                worst = worst.max(ld - (rho - 1.0) * lr - lf);
            }
            worst
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let c = 1.05 * worst.exp();
    C_CACHE.lock().unwrap().get_or_insert_with(HashMap::new).insert(key, c);
    c
}
