//! Magnitudes of the form `exp^k(v)`.
//!
//! Iterated maximum moduli and orbit moduli of transcendental maps leave the
//! f64 range after two or three steps. A [`TowerReal`] stores the number of
//! exponentials applied (`depth`) and the innermost value (`base`), kept in a
//! canonical band so that ordering is lexicographic on `(depth, base)`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Upper edge of the canonical band.
pub const BAND_TOP: f64 = 1e8;
/// `ln(BAND_TOP)`, lower edge of the band for `depth >= 1`.
pub const BAND_BOTTOM: f64 = 18.420_680_743_952_367;

/// Bases closer than this many ulps compare equal. Normalization moves a
/// value across the band edge through one `exp`/`ln`, which can cost a few
/// ulps.
const EQ_ULPS: u64 = 4;

/// Non-negative real `exp^depth(base)`.
#[derive(Debug, Clone, Copy)]
pub struct TowerReal {
    depth: u32,
    base: f64,
}

impl TowerReal {
    /// Builds and normalizes `exp^depth(base)`.
    ///
    /// `base` must be finite and non-negative.
    pub fn new(depth: u32, base: f64) -> Self {
        assert!(base.is_finite() && base >= 0.0, "tower base must be finite and >= 0, got {base}");
        let mut t = TowerReal { depth, base };
        t.normalize();
        t
    }

    /// The value `x` itself.
    pub fn from_value(x: f64) -> Self {
        if x.is_infinite() && x > 0.0 {
            // only reachable through f64 overflow upstream; callers should use from_log
            return TowerReal::new(1, f64::MAX.ln());
        }
        TowerReal::new(0, x)
    }

    /// The value `exp(log_value)`.
    pub fn from_log(log_value: f64) -> Self {
        assert!(log_value.is_finite(), "tower_from_log needs a finite input");
        if log_value < BAND_BOTTOM {
            TowerReal::new(0, log_value.exp())
        } else {
            TowerReal::new(1, log_value)
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn is_canonical(&self) -> bool {
        if self.depth == 0 {
            self.base >= 0.0 && self.base < BAND_TOP
        } else {
            self.base >= BAND_BOTTOM && self.base < BAND_TOP
        }
    }

    fn normalize(&mut self) {
        loop {
            if self.base >= BAND_TOP {
                self.base = self.base.ln();
                self.depth += 1;
            } else if self.depth >= 1 && self.base < BAND_BOTTOM {
                self.base = self.base.exp();
                self.depth -= 1;
            } else {
                break;
            }
        }
    }

    /// Returns a normalized copy. Values built through [`TowerReal::new`] are
    /// already canonical, so this is the identity on them.
    pub fn normalized(&self) -> Self {
        let mut t = *self;
        t.normalize();
        t
    }

    /// Natural logarithm of the represented value.
    ///
    /// Fails with [`Error::TowerDomain`] when the value is at most 1, since
    /// the result would not be a positive magnitude.
    pub fn ln(&self) -> Result<TowerReal> {
        if self.depth == 0 {
            if self.base <= 1.0 {
                return Err(Error::TowerDomain(self.base));
            }
            Ok(TowerReal::new(0, self.base.ln()))
        } else {
            Ok(TowerReal::new(self.depth - 1, self.base))
        }
    }

    /// `exp` of the represented value.
    pub fn exp(&self) -> TowerReal {
        TowerReal::new(self.depth + 1, self.base)
    }

    /// `ln` of the value as an f64, when it fits. Values at most 1 return a
    /// plain (possibly negative) logarithm.
    pub fn log_f64(&self) -> Option<f64> {
        match self.depth {
            0 => Some(self.base.ln()),
            1 => Some(self.base),
            2 => {
                let l = self.base.exp();
                l.is_finite().then_some(l)
            }
            _ => None,
        }
    }

    /// `ln ln` of the value as an f64, when the value exceeds `e`.
    pub fn log_log_f64(&self) -> Option<f64> {
        match self.depth {
            0 | 1 => {
                let l = self.log_f64()?;
                (l > 0.0).then(|| l.ln())
            }
            2 => Some(self.base),
            3 => {
                let l = self.base.exp();
                l.is_finite().then_some(l)
            }
            _ => None,
        }
    }

    /// The value as an f64 (may be `inf`).
    pub fn to_f64(&self) -> f64 {
        match self.depth {
            0 => self.base,
            1 => self.base.exp(),
            _ => f64::INFINITY,
        }
    }

    /// `value + c` for a small real `c`, keeping the dominant term at
    /// depth >= 2 where the correction is below f64 resolution.
    pub(crate) fn add_real(&self, c: f64) -> TowerReal {
        match self.depth {
            0 => TowerReal::new(0, (self.base + c).max(0.0)),
            1 => {
                let rel = c * (-self.base).exp();
                if rel <= -1.0 {
                    return TowerReal::new(0, 0.0);
                }
                TowerReal::new(1, self.base + rel.ln_1p())
            }
            _ => *self,
        }
    }

    /// `value · e^c`.
    pub(crate) fn scale_by_exp(&self, c: f64) -> TowerReal {
        if self.depth == 0 {
            if self.base == 0.0 {
                return *self;
            }
            return TowerReal::from_log(self.base.ln() + c);
        }
        TowerReal::new(self.depth - 1, self.base).add_real(c).exp()
    }

    /// `value^p` for `p > 0`.
    pub(crate) fn powf(&self, p: f64) -> TowerReal {
        debug_assert!(p > 0.0);
        if self.depth == 0 {
            if self.base == 0.0 {
                return *self;
            }
            return TowerReal::from_log(p * self.base.ln());
        }
        // value^p = exp(p · ln value)
        TowerReal::new(self.depth - 1, self.base).scale_by_exp(p.ln()).exp()
    }

    /// Ordering of the represented reals.
    pub fn compare(&self, other: &TowerReal) -> Ordering {
        let a = self.normalized();
        let b = other.normalized();
        match a.depth.cmp(&b.depth) {
            Ordering::Equal => {
                if ulp_distance(a.base, b.base) <= EQ_ULPS {
                    Ordering::Equal
                } else {
                    a.base.total_cmp(&b.base)
                }
            }
            // depth 0 carries [0, T); depth 1 starts at T. Across depths the
            // canonical bands do not overlap.
            o => o,
        }
    }

    /// `ln(self) - ln(other)` when both logs fit an f64; otherwise
    /// `±inf` by ordering (0 when equal).
    pub fn log_ratio(&self, other: &TowerReal) -> f64 {
        match (self.log_f64(), other.log_f64()) {
            (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a - b,
            _ => match self.compare(other) {
                Ordering::Greater => f64::INFINITY,
                Ordering::Less => f64::NEG_INFINITY,
                Ordering::Equal => 0.0,
            },
        }
    }
}

fn ulp_distance(a: f64, b: f64) -> u64 {
    // both non-negative and finite here
    a.to_bits().abs_diff(b.to_bits())
}

/// Free-function form of [`TowerReal::from_log`].
pub fn tower_from_log(log_value: f64) -> TowerReal {
    TowerReal::from_log(log_value)
}

/// Free-function form of [`TowerReal::compare`].
pub fn tower_compare(a: &TowerReal, b: &TowerReal) -> Ordering {
    a.compare(b)
}

/// Free-function form of [`TowerReal::ln`].
pub fn tower_log(a: &TowerReal) -> Result<TowerReal> {
    a.ln()
}

impl PartialEq for TowerReal {
    fn eq(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Equal
    }
}

impl PartialOrd for TowerReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.compare(other))
    }
}

/// Formats with 17 significant digits, which round-trips any f64.
pub(crate) fn fmt_sig17(v: f64) -> String {
    format!("{v:.16e}")
}

impl fmt::Display for TowerReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E^{}({})", self.depth, fmt_sig17(self.base))
    }
}

impl FromStr for TowerReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a tower literal: {s:?}"));
        let rest = s.trim().strip_prefix("E^").ok_or_else(bad)?;
        let open = rest.find('(').ok_or_else(bad)?;
        let inner = rest[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let depth: u32 = rest[..open].parse().map_err(|_| bad())?;
        let base: f64 = inner.parse().map_err(|_| bad())?;
        if !base.is_finite() || base < 0.0 {
            return Err(bad());
        }
        Ok(TowerReal::new(depth, base))
    }
}

impl Serialize for TowerReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TowerReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn from_log_examples() {
        let one = tower_from_log(0.0);
        assert_eq!((one.depth(), one.base()), (0, 1.0));

        let five = tower_from_log(5.0f64.ln());
        assert_eq!(five.depth(), 0);
        assert!((five.base() - 5.0).abs() < 1e-14);

        let big = tower_from_log(1e9);
        assert_eq!(big.depth(), 2);
        assert!((big.base() - 1e9f64.ln()).abs() < 1e-12);
        // peel twice to get back to 1e9
        let back = big.ln().unwrap().ln().unwrap();
        assert_eq!(back.depth(), 0);
        assert!((back.base() - 20.723_265_836_946_41).abs() < 1e-12);
    }

    #[test]
    fn compare_examples() {
        let a = TowerReal::new(0, 5.0);
        let b = TowerReal::new(1, 3.0);
        assert_eq!(tower_compare(&a, &b), Ordering::Less);
        assert_eq!(tower_compare(&TowerReal::new(2, 30.0), &TowerReal::new(2, 30.0)), Ordering::Equal);
        let c = TowerReal::new(1, 100.0);
        let d = TowerReal::new(2, 100f64.ln());
        assert_eq!(tower_compare(&c, &d), Ordering::Equal);
    }

    #[test]
    fn log_examples() {
        let t = TowerReal::new(1, 50.0).ln().unwrap();
        assert_eq!(t.depth(), 0);
        assert!((t.base() - 50.0).abs() < 1e-12);
        let t = TowerReal::new(0, std::f64::consts::E.powi(2)).ln().unwrap();
        assert!((t.base() - 2.0).abs() < 1e-15);
        let t = TowerReal::new(3, 25.0).ln().unwrap();
        assert_eq!((t.depth(), t.base()), (2, 25.0));
    }

    #[test]
    fn log_domain_error() {
        assert!(matches!(TowerReal::new(0, 0.5).ln(), Err(Error::TowerDomain(_))));
        assert!(matches!(TowerReal::new(0, 1.0).ln(), Err(Error::TowerDomain(_))));
    }

    #[test]
    fn deep_small_base_normalizes_down() {
        let t = TowerReal::new(5, 0.5);
        assert!(t.is_canonical());
        assert_eq!(t.depth(), 2);
    }

    #[test]
    fn display_and_parse() {
        let t = tower_from_log(1e9);
        let s = t.to_string();
        assert!(s.starts_with("E^2("), "{s}");
        let back: TowerReal = s.parse().unwrap();
        assert_eq!(back.depth(), 2);
        assert_eq!(back.base(), t.base());
        assert!("E^x(1)".parse::<TowerReal>().is_err());
        assert!("2(1)".parse::<TowerReal>().is_err());
    }

    #[test]
    fn round_trip_grid() {
        // 10^4 points on [1, 1e6]
        for i in 0..10_000 {
            let x = 1.0 + (1e6 - 1.0) * (i as f64) / 9_999.0;
            let t = tower_log(&tower_from_log(x)).unwrap();
            let v = t.to_f64();
            assert!(((v - x) / x).abs() <= 1e-12, "x={x} v={v}");
        }
    }

    #[test]
    fn helpers() {
        // e^5 * e^2 = e^7
        let t = tower_from_log(5.0).scale_by_exp(2.0);
        assert!((t.log_f64().unwrap() - 7.0).abs() < 1e-12);
        // (e^100)^0.5 = e^50
        let t = tower_from_log(100.0).powf(0.5);
        assert!((t.log_f64().unwrap() - 50.0).abs() < 1e-12);
        let t = TowerReal::new(0, 3.0).add_real(2.0);
        assert_eq!(t.to_f64(), 5.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn order_embedding(a in 1.0f64..700.0, b in 1.0f64..700.0) {
            let o = tower_compare(&tower_from_log(a), &tower_from_log(b));
            if a == b {
                prop_assert_eq!(o, Ordering::Equal);
            } else if (a - b).abs() > 1e-12 * a.max(b) {
                prop_assert_eq!(o, a.partial_cmp(&b).unwrap());
            }
        }

        #[test]
        fn normalization_idempotent(depth in 0u32..6, base in 0.0f64..1e12) {
            let once = TowerReal::new(depth, base);
            let twice = once.normalized();
            prop_assert!(once.is_canonical());
            prop_assert_eq!(once.depth(), twice.depth());
            prop_assert_eq!(once.base().to_bits(), twice.base().to_bits());
        }
    }
}
