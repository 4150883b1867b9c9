//! Binary fixed-point reals with a per-value fractional bit count.
//!
//! Just enough arithmetic for the log-plane pullback: `exp`, `ln`, `sqrt`,
//! `cis` with explicit reduction modulo 2π, and `atan2`. Values are
//! `m · 2^-p` with `m` an arbitrary-size integer; all binary operations
//! require equal `p`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fix {
    m: BigInt,
    p: u32,
}

const LN2: f64 = std::f64::consts::LN_2;

impl Fix {
    pub fn zero(p: u32) -> Self {
        Fix { m: BigInt::zero(), p }
    }

    pub fn from_i64(v: i64, p: u32) -> Self {
        Fix { m: BigInt::from(v) << p, p }
    }

    pub fn from_bigint(v: BigInt, p: u32) -> Self {
        Fix { m: v << p, p }
    }

    /// Exact conversion of a finite f64 (truncated below `2^-p`).
    pub fn from_f64(v: f64, p: u32) -> Self {
        assert!(v.is_finite());
        if v == 0.0 {
            return Fix::zero(p);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let mant = if exp == 0 { (bits & 0xf_ffff_ffff_ffff) << 1 } else { (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000 };
        let e = exp - 1075;
        let mut m = BigInt::from(mant);
        let shift = e + p as i64;
        if shift >= 0 {
            m <<= shift as usize;
        } else {
            m >>= (-shift) as usize;
        }
        if sign < 0 {
            m = -m;
        }
        Fix { m, p }
    }

    pub fn prec(&self) -> u32 {
        self.p
    }

    /// Same value with `q` fractional bits.
    pub fn with_prec(&self, q: u32) -> Self {
        let m = match q.cmp(&self.p) {
            Ordering::Equal => self.m.clone(),
            Ordering::Greater => &self.m << (q - self.p),
            Ordering::Less => &self.m >> (self.p - q),
        };
        Fix { m, p: q }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.sign() == Sign::Minus
    }

    pub fn abs(&self) -> Self {
        Fix { m: self.m.abs(), p: self.p }
    }

    pub fn neg(&self) -> Self {
        Fix { m: -&self.m, p: self.p }
    }

    pub fn add(&self, o: &Fix) -> Fix {
        debug_assert_eq!(self.p, o.p);
        Fix { m: &self.m + &o.m, p: self.p }
    }

    pub fn sub(&self, o: &Fix) -> Fix {
        debug_assert_eq!(self.p, o.p);
        Fix { m: &self.m - &o.m, p: self.p }
    }

    pub fn mul(&self, o: &Fix) -> Fix {
        debug_assert_eq!(self.p, o.p);
        Fix { m: (&self.m * &o.m) >> self.p, p: self.p }
    }

    pub fn div(&self, o: &Fix) -> Fix {
        debug_assert_eq!(self.p, o.p);
        assert!(!o.is_zero(), "fixed-point division by zero");
        Fix { m: (&self.m << self.p) / &o.m, p: self.p }
    }

    pub fn mul_i64(&self, k: i64) -> Fix {
        Fix { m: &self.m * k, p: self.p }
    }

    pub fn mul_big(&self, k: &BigInt) -> Fix {
        Fix { m: &self.m * k, p: self.p }
    }

    pub fn div_i64(&self, k: i64) -> Fix {
        Fix { m: &self.m / k, p: self.p }
    }

    /// Multiplies by `2^k`.
    pub fn ldexp(&self, k: i64) -> Fix {
        let m = if k >= 0 { &self.m << k as usize } else { &self.m >> (-k) as usize };
        Fix { m, p: self.p }
    }

    /// Nearest integer.
    pub fn round(&self) -> BigInt {
        if self.p == 0 {
            return self.m.clone();
        }
        (&self.m + (BigInt::one() << (self.p - 1))) >> self.p
    }

    pub fn cmp_val(&self, o: &Fix) -> Ordering {
        debug_assert_eq!(self.p, o.p);
        self.m.cmp(&o.m)
    }

    pub fn to_f64(&self) -> f64 {
        if self.m.is_zero() {
            return 0.0;
        }
        let bits = self.m.bits() as i64;
        let drop = (bits - 64).max(0);
        let top = (&self.m >> drop as usize).to_f64().unwrap_or(f64::NAN);
        // two-step scaling avoids spurious under/overflow of 2^(drop - p)
        let e = drop - self.p as i64;
        let half = e / 2;
        top * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// `ln|x|` as an f64, valid for magnitudes outside the f64 range.
    pub fn ln_abs_f64(&self) -> f64 {
        if self.m.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.m.bits() as i64;
        let drop = (bits - 60).max(0);
        let top = (self.m.abs() >> drop as usize).to_f64().unwrap();
        top.ln() + (drop - self.p as i64) as f64 * LN2
    }

    pub fn sqrt(&self) -> Fix {
        assert!(!self.is_negative(), "sqrt of negative fixed-point value");
        Fix { m: (&self.m << self.p).sqrt(), p: self.p }
    }

    /// Decimal rendering with `digits` digits after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scaled = (&self.m.abs() * BigInt::from(10u32).pow(digits as u32) + (BigInt::one() << self.p.saturating_sub(1))) >> self.p;
        let mut s = scaled.to_string();
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if self.is_negative() { "-" } else { "" };
        if digits == 0 { format!("{sign}{int}") } else { format!("{sign}{int}.{frac}") }
    }
}

fn guard(p: u32) -> u32 {
    p + 48 + (p as f64).sqrt() as u32
}

/// `atanh(1/k)` at `p` bits, `k >= 2`.
fn atanh_inv(k: i64, p: u32) -> Fix {
    let mut sum = BigInt::zero();
    let mut pow = (BigInt::one() << p) / k; // 1/k^(2j+1)
    let k2 = BigInt::from(k * k);
    let mut j: i64 = 0;
    while !pow.is_zero() {
        sum += &pow / (2 * j + 1);
        pow /= &k2;
        j += 1;
    }
    Fix { m: sum, p }
}

/// `atan(1/k)` at `p` bits.
fn atan_inv(k: i64, p: u32) -> Fix {
    let mut sum = BigInt::zero();
    let mut pow = (BigInt::one() << p) / k;
    let k2 = BigInt::from(k * k);
    let mut j: i64 = 0;
    while !pow.is_zero() {
        let t = &pow / (2 * j + 1);
        if j % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pow /= &k2;
        j += 1;
    }
    Fix { m: sum, p }
}

static CONST_CACHE: Mutex<Option<HashMap<(u8, u32), Fix>>> = Mutex::new(None);

fn cached(tag: u8, p: u32, make: impl FnOnce(u32) -> Fix) -> Fix {
    {
        let guard = CONST_CACHE.lock().unwrap();
        if let Some(v) = guard.as_ref().and_then(|m| m.get(&(tag, p))) {
            return v.clone();
        }
    }
    let v = make(p);
    let mut guard = CONST_CACHE.lock().unwrap();
    guard.get_or_insert_with(HashMap::new).insert((tag, p), v.clone());
    v
}

pub fn pi(p: u32) -> Fix {
    cached(0, p, |p| {
        let q = p + 16;
        // Machin: π = 16 atan(1/5) − 4 atan(1/239)
        atan_inv(5, q).mul_i64(16).sub(&atan_inv(239, q).mul_i64(4)).with_prec(p)
    })
}

pub fn ln2(p: u32) -> Fix {
    cached(1, p, |p| {
        let q = p + 16;
        atanh_inv(3, q).mul_i64(2).with_prec(p)
    })
}

/// `e^x`.
pub fn exp(x: &Fix) -> Fix {
    let p = x.p;
    let xf = x.to_f64();
    let k = (xf / LN2).round() as i64;
    let kbits = 64 - k.unsigned_abs().leading_zeros();
    let q = guard(p) + kbits;
    let xq = x.with_prec(q);
    let r = xq.sub(&ln2(q).mul_i64(k));
    let s = ((q as f64).sqrt() / 2.0).ceil() as i64;
    let r = r.ldexp(-s);
    // Taylor series for e^r, |r| < 2^-s
    let one = Fix::from_i64(1, q);
    let mut sum = one.clone();
    let mut term = one;
    let mut n = 1i64;
    loop {
        term = term.mul(&r).div_i64(n);
        if term.is_zero() {
            break;
        }
        sum = sum.add(&term);
        n += 1;
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum.ldexp(k).with_prec(p)
}

/// Natural log of a positive value.
pub fn ln(x: &Fix) -> Fix {
    assert!(!x.is_negative() && !x.is_zero(), "ln of non-positive fixed-point value");
    let p = x.p;
    let q = p + 32;
    let xq = x.with_prec(q);
    let mut y = Fix::from_f64(x.ln_abs_f64(), q);
    // Halley step for e^y = x: y += 2(x − e^y)/(x + e^y), cubic convergence
    let mut bits_ok = 45.0;
    for _ in 0..12 {
        let ey = exp(&y);
        let num = xq.sub(&ey).mul_i64(2);
        let den = xq.add(&ey);
        let step = num.div(&den);
        y = y.add(&step);
        if bits_ok > q as f64 + 8.0 || step.is_zero() {
            break;
        }
        bits_ok *= 3.0;
    }
    y.with_prec(p)
}

/// `(cos θ, sin θ)` with explicit reduction of θ modulo 2π.
pub fn cis(theta: &Fix) -> (Fix, Fix) {
    let p = theta.p;
    // bits needed to hold the quotient θ / 2π
    let mag_bits = (theta.ln_abs_f64().max(0.0) / LN2).ceil() as u32 + 2;
    let q = guard(p) + mag_bits;
    let th = theta.with_prec(q);
    let two_pi = pi(q).mul_i64(2);
    let turns = th.div(&two_pi).round();
    let r = th.sub(&two_pi.mul_big(&turns));
    let s = ((q as f64).sqrt() / 2.0).ceil() as i64;
    let q2 = q + 2 * s as u32;
    let r = r.with_prec(q2).ldexp(-s);
    // series for cos and sin of r
    let one = Fix::from_i64(1, q2);
    let mut c = one.clone();
    let mut sn = r.clone();
    let r2 = r.mul(&r);
    let mut tc = one;
    let mut ts = r;
    let mut n = 1i64;
    loop {
        tc = tc.mul(&r2).div_i64((2 * n - 1) * (2 * n)).neg();
        ts = ts.mul(&r2).div_i64((2 * n) * (2 * n + 1)).neg();
        if tc.is_zero() && ts.is_zero() {
            break;
        }
        c = c.add(&tc);
        sn = sn.add(&ts);
        n += 1;
    }
    for _ in 0..s {
        let c2 = c.mul(&c).sub(&sn.mul(&sn));
        let s2 = c.mul(&sn).mul_i64(2);
        c = c2;
        sn = s2;
    }
    (c.with_prec(p), sn.with_prec(p))
}

/// Argument of `x + iy` in `(-π, π]`.
pub fn atan2(y: &Fix, x: &Fix) -> Fix {
    assert!(!(x.is_zero() && y.is_zero()), "atan2(0, 0)");
    let p = x.p;
    let q = p + 32;
    let (xq, yq) = (x.with_prec(q), y.with_prec(q));
    // f64 seed from a common scale so huge inputs stay finite
    let scale = x.ln_abs_f64().max(y.ln_abs_f64());
    let xs = if x.is_zero() { 0.0 } else { x.to_f64().signum() * (x.ln_abs_f64() - scale).exp() };
    let ys = if y.is_zero() { 0.0 } else { y.to_f64().signum() * (y.ln_abs_f64() - scale).exp() };
    let mut th = Fix::from_f64(ys.atan2(xs), q);
    for _ in 0..12 {
        let (c, s) = cis(&th);
        let re = xq.mul(&c).add(&yq.mul(&s));
        let im = yq.mul(&c).sub(&xq.mul(&s));
        if im.is_zero() {
            break;
        }
        let t = im.div(&re);
        // atan(t) = t − t³/3 + …, enough at cubic order once |t| < 2^-40
        let t3 = t.mul(&t).mul(&t).div_i64(3);
        th = th.add(&t.sub(&t3));
        if t.abs().ln_abs_f64() < -(q as f64) * LN2 / 3.0 {
            break;
        }
    }
    th.with_prec(p)
}

/// Complex value in fixed point.
#[derive(Clone, Debug)]
pub struct CFix {
    pub re: Fix,
    pub im: Fix,
}

impl CFix {
    pub fn new(re: Fix, im: Fix) -> Self {
        CFix { re, im }
    }

    pub fn exp(&self) -> CFix {
        let r = exp(&self.re);
        let (c, s) = cis(&self.im);
        CFix { re: r.mul(&c), im: r.mul(&s) }
    }

    /// Principal logarithm.
    pub fn ln(&self) -> CFix {
        let m2 = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let re = ln(&m2).ldexp(-1);
        CFix { re, im: atan2(&self.im, &self.re) }
    }

    pub fn add(&self, o: &CFix) -> CFix {
        CFix { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &CFix) -> CFix {
        CFix { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }
}
