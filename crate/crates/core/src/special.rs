//! Log-gamma and the Mittag-Leffler function `E_α(z) = Σ zⁿ / Γ(αn + 1)`.
//!
//! Small `|z|` uses the power series with log-scaled terms. Large `|z|` uses
//! the exponential sum over the sheets of `z^{1/α}` that lie inside the
//! sector `|arg| < απ`, minus the optimally truncated algebraic tail
//! `Σ z^{-k} / Γ(1 - αk)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bigfix::{self, Fix};

/// Series is used while `|z|^{1/α} <= SERIES_LIMIT`.
pub const SERIES_LIMIT: f64 = 20.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn lgamma(x: f64) -> f64 {
    assert!(x > 0.0, "lgamma needs x > 0, got {x}");
    if x >= 15.0 {
        // Stirling with five correction terms
        let x2 = x * x;
        let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2)
            - 1.0 / (1680.0 * x * x2 * x2 * x2)
            + 1.0 / (1188.0 * x * x2 * x2 * x2 * x2);
        return (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + series;
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return (PI / sin_pi(x)).ln() - lgamma(1.0 - x);
    }
    let xm = x - 1.0;
    let mut a = LANCZOS[0];
    let t = xm + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (xm + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + a.ln()
}

/// `sin(πx)` with exact zeros at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == r.floor() {
        return 0.0;
    }
    if r <= 0.5 {
        (PI * r).sin()
    } else if r <= 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `1/Γ(x)` as `(sign, ln|1/Γ(x)|)`; the sign is 0 at the poles.
pub fn rgamma_signed_log(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (1.0, -lgamma(x));
    }
    if x == x.floor() {
        return (0.0, f64::NEG_INFINITY);
    }
    // 1/Γ(x) = sin(πx) Γ(1−x) / π
    let s = sin_pi(x);
    (s.signum(), (s.abs() / PI).ln() + lgamma(1.0 - x))
}

/// Value carried as `mantissa · e^scale`; keeps huge values representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub scale: f64,
}

impl Scaled {
    pub fn value(&self) -> Complex64 {
        if self.scale == 0.0 {
            return self.mantissa;
        }
        self.mantissa * self.scale.exp()
    }

    /// `ln|value|`.
    pub fn log_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.scale
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }
}

/// Series evaluation with its condition number `Σ|tₙ| / |Σ tₙ|`.
pub struct SeriesResult {
    pub value: Complex64,
    pub derivative: Complex64,
    pub condition: f64,
}

/// Power series for `E_α` and `E_α'`, terms built as
/// `exp(n ln|z| − lnΓ(αn+1)) · e^{inθ}`.
pub fn ml_series(alpha: f64, z: Complex64) -> SeriesResult {
    let r = z.norm();
    if r == 0.0 {
        let d = (-lgamma(alpha + 1.0)).exp();
        return SeriesResult { value: Complex64::new(1.0, 0.0), derivative: Complex64::new(d, 0.0), condition: 1.0 };
    }
    let lr = r.ln();
    let th = z.arg();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 1.0;
    let mut peak_passed = false;
    let mut prev_log = 0.0;
    let mut n = 1usize;
    loop {
        let nf = n as f64;
        let lt = nf * lr - lgamma(alpha * nf + 1.0);
        let mag = lt.exp();
        let phase = Complex64::from_polar(1.0, nf * th);
        sum += phase * mag;
        abs_sum += mag;
        // n zⁿ⁻¹/Γ(αn+1) = (n/z) · term
        dsum += phase * (mag * nf / r) * Complex64::from_polar(1.0, -th);
        if lt < prev_log {
            peak_passed = true;
        }
        prev_log = lt;
        if peak_passed && mag < 1e-18 * sum.norm().max(1e-300) && mag * nf / r < 1e-18 * dsum.norm().max(1e-300) {
            break;
        }
        if n > 20_000 {
            break;
        }
        n += 1;
    }
    SeriesResult { value: sum, derivative: dsum, condition: abs_sum / sum.norm().max(f64::MIN_POSITIVE) }
}

/// Exponents `w_m = z^{1/α} e^{2πim/α}` over sheets with `|θ + 2πm| < απ`.
fn sheets(alpha: f64, lr: f64, th: f64) -> Vec<Complex64> {
    let rho = 1.0 / alpha;
    let mut out = Vec::new();
    let mmax = (alpha / 2.0).ceil() as i64 + 1;
    for m in -mmax..=mmax {
        let phi = th + 2.0 * PI * m as f64;
        if phi.abs() < alpha * PI {
            out.push(Complex64::from_polar((rho * lr).exp(), rho * phi));
        }
    }
    out
}

/// Algebraic tail `Σ_{k≥1} z^{-k}/Γ(1−αk)` and its z-derivative
/// `Σ −k z^{-k-1}/Γ(1−αk)`, truncated at the smallest term.
fn algebraic_tail(alpha: f64, lr: f64, th: f64) -> (Complex64, Complex64) {
    let mut s = Complex64::new(0.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let (sg, lg) = rgamma_signed_log(1.0 - alpha * kf);
        if sg == 0.0 {
            continue;
        }
        let lt = -kf * lr + lg;
        if lt > prev {
            break;
        }
        prev = lt;
        let t = Complex64::from_polar(sg * lt.exp(), -kf * th);
        s += t;
        ds += t * (-kf) * Complex64::from_polar((-lr).exp(), -th);
        if lt < -40.0 {
            break;
        }
    }
    (s, ds)
}

/// `B_{2k}` for `k = 1..=15` as `(numerator, denominator)`.
const BERNOULLI: [(i64, i64); 15] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
];

/// `ln Γ(x)` for `x > 0` in fixed point: upward shift to `x ≥ 40`, then
/// Stirling with fifteen correction terms (error below `2^-130`).
pub fn lgamma_fix(x: &Fix) -> Fix {
    let p = x.prec();
    assert!(!x.is_negative() && !x.is_zero());
    let one = Fix::from_i64(1, p);
    let forty = Fix::from_i64(40, p);
    let mut y = x.clone();
    let mut prod = one.clone();
    while y.cmp_val(&forty) == std::cmp::Ordering::Less {
        prod = prod.mul(&y);
        y = y.add(&one);
    }
    let half = one.ldexp(-1);
    let mut out = y.sub(&half).mul(&bigfix::ln(&y)).sub(&y).add(&bigfix::ln(&bigfix::pi(p).ldexp(1)).ldexp(-1));
    let inv = one.div(&y);
    let inv2 = inv.mul(&inv);
    let mut pw = inv;
    for (k, (num, den)) in BERNOULLI.iter().enumerate() {
        let k2 = 2 * (k as i64 + 1);
        out = out.add(&pw.mul_i64(*num).div_i64(den * k2 * (k2 - 1)));
        pw = pw.mul(&inv2);
    }
    out.sub(&bigfix::ln(&prod))
}

/// Power series for `E_α(z)` summed in `bits`-bit fixed point, for values the
/// double-precision series loses to cancellation. Needs `bits` above
/// `log₂(condition) + 60`.
pub fn ml_series_extended(alpha: f64, z: Complex64, bits: u32) -> Complex64 {
    let p = bits;
    if z.norm() == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let a = Fix::from_f64(alpha, p);
    let (x, y) = (Fix::from_f64(z.re, p), Fix::from_f64(z.im, p));
    let lr = bigfix::ln(&x.mul(&x).add(&y.mul(&y))).ldexp(-1);
    let th = bigfix::atan2(&y, &x);
    let one = Fix::from_i64(1, p);
    let (mut re, mut im) = (one.clone(), Fix::zero(p));
    let mut peak = 0.0f64;
    let mut n = 1i64;
    loop {
        let lt = lr.mul_i64(n).sub(&lgamma_fix(&a.mul_i64(n).add(&one)));
        let ltf = lt.to_f64();
        peak = peak.max(ltf);
        if ltf < peak - (p as f64 + 8.0) * std::f64::consts::LN_2 && ltf < 0.0 {
            break;
        }
        let mag = bigfix::exp(&lt);
        let (c, s) = bigfix::cis(&th.mul_i64(n));
        re = re.add(&mag.mul(&c));
        im = im.add(&mag.mul(&s));
        n += 1;
    }
    Complex64::new(re.to_f64(), im.to_f64())
}

/// `E_α(z)` and `E_α'(z)` from the large-|z| expansion, both as
/// `mantissa · e^scale` with a common scale.
pub fn ml_asymptotic(alpha: f64, z: Complex64) -> (Scaled, Scaled) {
    let lr = z.norm().ln();
    let th = z.arg();
    ml_asymptotic_polar(alpha, lr, th)
}

pub fn ml_asymptotic_polar(alpha: f64, lr: f64, th: f64) -> (Scaled, Scaled) {
    let rho = 1.0 / alpha;
    let ws = sheets(alpha, lr, th);
    let scale = ws.iter().map(|w| w.re).fold(0.0f64, f64::max);
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    // z^{-1} in polar form, for the derivative of exp(w): w' = ρ w / z
    let zinv = Complex64::from_polar((-lr).exp(), -th);
    for w in &ws {
        let e = (w - scale).exp();
        v += e * rho;
        d += e * rho * rho * w * zinv;
    }
    let (tail, dtail) = algebraic_tail(alpha, lr, th);
    let damp = (-scale).exp();
    v -= tail * damp;
    d -= dtail * damp;
    (Scaled { mantissa: v, scale }, Scaled { mantissa: d, scale })
}

/// Evaluates `E_α(z)` and `E_α'(z)`, switching from the series to the
/// expansion at `|z|^{1/α} = SERIES_LIMIT`.
pub fn ml_eval(alpha: f64, z: Complex64) -> (Scaled, Scaled) {
    if use_series(alpha, z.norm()) {
        let s = ml_series(alpha, z);
        // series rounding grows like condition·eps, the expansion remainder
        // like exp(−|z|^{1/α}); take whichever is smaller
        if s.condition * 1e-15 > (-z.norm().powf(1.0 / alpha)).exp() {
            return ml_asymptotic(alpha, z);
        }
        (Scaled { mantissa: s.value, scale: 0.0 }, Scaled { mantissa: s.derivative, scale: 0.0 })
    } else {
        ml_asymptotic(alpha, z)
    }
}

pub fn use_series(alpha: f64, r: f64) -> bool {
    r <= switch_radius(alpha)
}

/// `|z|` at which evaluation moves from series to asymptotics.
pub fn switch_radius(alpha: f64) -> f64 {
    SERIES_LIMIT.powf(alpha)
}
