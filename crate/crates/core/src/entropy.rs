//! Extended nonnegative reals and entropy enclosures (all values in nats).

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative real number or `+∞`.
///
/// Multiplication follows the identity-map convention `0 · ∞ = 0`.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// `None` for NaN or negative input.
    pub fn new(x: f64) -> Option<ExtReal> {
        (x >= 0.0).then_some(ExtReal(if x == 0.0 { 0.0 } else { x }))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn add_down(self, other: ExtReal) -> ExtReal {
        ExtReal(add_round(self.0, other.0, false))
    }

    pub fn add_up(self, other: ExtReal) -> ExtReal {
        ExtReal(add_round(self.0, other.0, true))
    }

    /// `c · self` rounded down, `c >= 0`.
    pub fn scale_down(self, c: f64) -> ExtReal {
        ExtReal(mul_round(c, self.0, false))
    }

    pub fn scale_up(self, c: f64) -> ExtReal {
        ExtReal(mul_round(c, self.0, true))
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }
}

/// Directed sum via TwoSum: exact results are left alone.
fn add_round(a: f64, b: f64, up: bool) -> f64 {
    let s = a + b;
    if !s.is_finite() {
        return if s.is_nan() { f64::INFINITY } else { s };
    }
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    match (err > 0.0, err < 0.0, up) {
        (true, _, true) => s.next_up(),
        (_, true, false) => s.next_down().max(0.0),
        _ => s,
    }
}

/// Directed product of nonnegatives with `0 · ∞ = 0`; the rounding error is read off an FMA.
fn mul_round(a: f64, b: f64, up: bool) -> f64 {
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let p = a * b;
    if !p.is_finite() {
        return p;
    }
    let err = a.mul_add(b, -p);
    match (err > 0.0, err < 0.0, up) {
        (true, _, true) => p.next_up(),
        (_, true, false) => p.next_down().max(0.0),
        _ => p,
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl std::str::FromStr for ExtReal {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "+inf" | "infinity" | "∞") {
            return Ok(ExtReal::INFINITY);
        }
        let v: f64 = t.parse().map_err(|_| format!("not a number: {s:?}"))?;
        ExtReal::new(v).ok_or_else(|| format!("entropy values must be nonnegative, got {s}"))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => ExtReal::new(x).ok_or_else(|| serde::de::Error::custom("negative entropy")),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Enclosure `[lo, hi]` of an entropy value.
///
/// `lo` bounds the CNT entropy from below; `hi` bounds the completely positive
/// approximation entropy from above.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct EntropyInterval {
    pub lo: ExtReal,
    pub hi: ExtReal,
}

impl EntropyInterval {
    pub const ZERO: EntropyInterval = EntropyInterval { lo: ExtReal::ZERO, hi: ExtReal::ZERO };
    pub const INFINITE: EntropyInterval = EntropyInterval { lo: ExtReal::INFINITY, hi: ExtReal::INFINITY };
    pub const UNBOUNDED: EntropyInterval = EntropyInterval { lo: ExtReal::ZERO, hi: ExtReal::INFINITY };

    /// Panics unless `0 <= lo <= hi`.
    pub fn new(lo: f64, hi: f64) -> EntropyInterval {
        let lo = ExtReal::new(lo).expect("nonnegative lower endpoint");
        let hi = ExtReal::new(hi).expect("nonnegative upper endpoint");
        assert!(lo <= hi, "empty entropy interval [{lo}, {hi}]");
        EntropyInterval { lo, hi }
    }

    pub fn point(x: ExtReal) -> EntropyInterval {
        EntropyInterval { lo: x, hi: x }
    }

    /// `[ln 2]` as a one-ulp enclosure.
    pub fn ln2() -> EntropyInterval {
        // f64 LN_2 lies below the true value.
        let lo = std::f64::consts::LN_2;
        EntropyInterval::new(lo, lo.next_up())
    }

    pub fn width(&self) -> f64 {
        if self.hi.is_infinite() {
            if self.lo.is_infinite() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.hi.value() - self.lo.value()
        }
    }

    pub fn midpoint(&self) -> f64 {
        if self.lo.is_infinite() {
            f64::INFINITY
        } else {
            0.5 * (self.lo.value() + self.hi.value())
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo.value() <= x && x <= self.hi.value()
    }

    pub fn overlaps(&self, other: &EntropyInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Minkowski sum, rounded outward.
    pub fn add(&self, other: &EntropyInterval) -> EntropyInterval {
        EntropyInterval { lo: self.lo.add_down(other.lo), hi: self.hi.add_up(other.hi) }
    }

    /// `c · self` for a finite `c >= 0`, rounded outward; `0 · ∞ = 0`.
    pub fn scale(&self, c: f64) -> EntropyInterval {
        assert!(c >= 0.0 && c.is_finite(), "scale factor must be finite and nonnegative");
        EntropyInterval { lo: self.lo.scale_down(c), hi: self.hi.scale_up(c) }
    }

    /// Endpoint-wise maximum: encloses `max(x, y)` for `x ∈ self`, `y ∈ other`.
    pub fn max(&self, other: &EntropyInterval) -> EntropyInterval {
        EntropyInterval { lo: self.lo.max(other.lo), hi: self.hi.max(other.hi) }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for EntropyInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lo, p, self.hi),
            None => write!(f, "[{}, {}]", self.lo, self.hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::INFINITY.scale_down(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::INFINITY.scale_up(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::INFINITY.scale_up(2.0), ExtReal::INFINITY);
        assert_eq!(ExtReal::new(1.0).unwrap().add_up(ExtReal::INFINITY), ExtReal::INFINITY);
    }

    #[test]
    fn ln2_encloses_truth() {
        let l = EntropyInterval::ln2();
        // f64 LN_2 = 0.693147180559945286..., next_up = 0.693147180559945397...
        assert_eq!(l.lo.value(), std::f64::consts::LN_2);
        assert_eq!(l.hi.value().next_down(), l.lo.value());
    }

    #[test]
    fn exact_ops_stay_exact() {
        let a = EntropyInterval::new(0.5, 0.5);
        assert!(a.add(&a).is_exact());
        assert!(a.scale(4.0).is_exact());
    }

    #[test]
    fn parse_and_print() {
        assert_eq!("inf".parse::<ExtReal>().unwrap(), ExtReal::INFINITY);
        assert_eq!("0.25".parse::<ExtReal>().unwrap().value(), 0.25);
        assert!("-1".parse::<ExtReal>().is_err());
        let js = serde_json::to_string(&EntropyInterval { lo: ExtReal::ZERO, hi: ExtReal::INFINITY }).unwrap();
        assert_eq!(js, r#"{"lo":"0","hi":"inf"}"#);
        let back: EntropyInterval = serde_json::from_str(&js).unwrap();
        assert_eq!(back, EntropyInterval::UNBOUNDED);
    }

    proptest! {
        #[test]
        fn directed_rounding_brackets(a in 0.0f64..1e6, b in 0.0f64..1e6, c in 0.0f64..100.0) {
            let x = ExtReal::new(a).unwrap();
            let y = ExtReal::new(b).unwrap();
            let lo = x.add_down(y).value();
            let hi = x.add_up(y).value();
            prop_assert!(lo <= a + b && a + b <= hi);
            prop_assert!(hi - lo <= 2.0 * f64::EPSILON * (a + b).max(f64::MIN_POSITIVE));
            let slo = x.scale_down(c).value();
            let shi = x.scale_up(c).value();
            // exact product via FMA residual
            let p = a * c;
            let r = a.mul_add(c, -p);
            prop_assert!(slo <= p || r >= 0.0);
            prop_assert!(shi >= p || r <= 0.0);
            prop_assert!(slo <= shi);
        }
    }
}
