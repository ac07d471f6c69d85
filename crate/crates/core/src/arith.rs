//! Outward-rounded interval arithmetic over `astro_float::BigFloat`.
//!
//! Every operation rounds the lower endpoint toward -∞ and the upper endpoint
//! toward +∞, so an [`Iv`] always contains the exact real result of the
//! operation applied to any points of its operands.

use std::cell::RefCell;
use std::cmp::Ordering;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word, WORD_BIT_SIZE};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

const DOWN: RoundingMode = RoundingMode::Down;
const UP: RoundingMode = RoundingMode::Up;
const NEAR: RoundingMode = RoundingMode::ToEven;

/// Working precision plus the constant cache that `ln` needs.
pub(crate) struct Ctx {
    pub prec: usize,
    cc: RefCell<Consts>,
}

impl Ctx {
    pub fn new(prec: usize) -> Self {
        Ctx { prec, cc: RefCell::new(Consts::new().expect("astro-float constant cache")) }
    }
}

pub(crate) fn cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    match a.cmp(b).expect("NaN in interval arithmetic") {
        x if x < 0 => Ordering::Less,
        0 => Ordering::Equal,
        _ => Ordering::Greater,
    }
}

fn bmin(a: BigFloat, b: BigFloat) -> BigFloat {
    if cmp(&a, &b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn bmax(a: BigFloat, b: BigFloat) -> BigFloat {
    if cmp(&a, &b) == Ordering::Less {
        b
    } else {
        a
    }
}

pub(crate) fn zero() -> BigFloat {
    BigFloat::from_word(0, 64)
}

pub(crate) fn one() -> BigFloat {
    BigFloat::from_word(1, 64)
}

/// Exact conversion of an integer.
pub(crate) fn from_bigint(n: &BigInt) -> BigFloat {
    if n.is_zero() {
        return zero();
    }
    if let Ok(v) = i64::try_from(n) {
        return BigFloat::from_i64(v, 64);
    }
    let u32s = n.magnitude().to_u32_digits();
    let per = WORD_BIT_SIZE / 32;
    let words: Vec<Word> = u32s
        .chunks(per)
        .map(|ch| ch.iter().enumerate().fold(0 as Word, |acc, (i, &d)| acc | ((d as Word) << (32 * i))))
        .collect();
    let sign = if n.is_negative() { Sign::Neg } else { Sign::Pos };
    let e = (words.len() * WORD_BIT_SIZE) as i32;
    let x = BigFloat::from_words(&words, sign, e);
    debug_assert!(!x.is_nan());
    x
}

/// Exact conversion of a finite f64.
pub(crate) fn from_f64(x: f64) -> BigFloat {
    BigFloat::from_f64(x, 64)
}

/// `(mantissa, exponent)` with `x = mantissa * 2^exponent` exactly.
fn to_scaled_int(x: &BigFloat) -> Option<(BigInt, i64)> {
    if x.is_zero() {
        return Some((BigInt::zero(), 0));
    }
    let (words, _, sign, e, _) = x.as_raw_parts()?;
    let mut mag = BigUint::zero();
    for w in words.iter().rev() {
        mag <<= WORD_BIT_SIZE;
        mag += BigUint::from(*w);
    }
    let shift = e as i64 - (words.len() * WORD_BIT_SIZE) as i64;
    let m = BigInt::from(mag);
    Some((if sign == Sign::Neg { -m } else { m }, shift))
}

/// `floor(x)` (when `up == false`) or `ceil(x)` as an integer.
pub(crate) fn to_bigint_rounded(x: &BigFloat, up: bool) -> BigInt {
    let (m, shift) = to_scaled_int(x).expect("finite value");
    if shift >= 0 {
        return m << shift as usize;
    }
    let s = (-shift) as usize;
    let floor = &m >> s; // arithmetic shift floors for negatives too
    if up && (&floor << s) != m {
        floor + 1
    } else {
        floor
    }
}

/// Nearest-ish f64, used for seeding and display only.
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, e, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    // top 64 bits of the mantissa
    let mut top: u128 = 0;
    let mut taken = 0usize;
    for w in words.iter().rev() {
        if taken >= 64 {
            break;
        }
        top = (top << WORD_BIT_SIZE) | (*w as u128);
        taken += WORD_BIT_SIZE;
    }
    let mut v = top as f64;
    let mut k = e as i64 - taken as i64;
    while k > 0 {
        let step = k.min(1000);
        v *= 2f64.powi(step as i32);
        k -= step;
    }
    while k < 0 {
        let step = (-k).min(1000);
        v /= 2f64.powi(step as i32);
        k += step;
    }
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// Largest f64 `<= x`.
pub(crate) fn to_f64_down(x: &BigFloat) -> f64 {
    let mut v = to_f64(x);
    if v.is_nan() {
        return v;
    }
    while v.is_finite() && cmp(&from_f64(v), x) == Ordering::Greater {
        v = v.next_down();
    }
    if v == f64::INFINITY && !x.is_inf_pos() {
        v = f64::MAX;
    }
    v
}

/// Smallest f64 `>= x`.
pub(crate) fn to_f64_up(x: &BigFloat) -> f64 {
    let mut v = to_f64(x);
    if v.is_nan() {
        return v;
    }
    while v.is_finite() && cmp(&from_f64(v), x) == Ordering::Less {
        v = v.next_up();
    }
    if v == f64::NEG_INFINITY && !x.is_inf_neg() {
        v = f64::MIN;
    }
    v
}

/// Decimal rendering rounded in the given direction (`up == false` rounds toward -∞).
pub(crate) fn to_decimal(x: &BigFloat, digits: usize, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_inf_pos() {
        return "inf".into();
    }
    if x.is_inf_neg() {
        return "-inf".into();
    }
    let e2 = x.exponent().unwrap_or(0) as i64;
    let e10 = ((e2 - 1) as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let k = digits as i64 - 1 - e10;
    let pow = from_bigint(&BigInt::from(10u32).pow(k.unsigned_abs() as u32));
    let p = x.precision().unwrap_or(64) + 64 + (k.unsigned_abs() as usize) * 4;
    let rm = if up { UP } else { DOWN };
    let y = if k >= 0 { x.mul(&pow, p, rm) } else { x.div(&pow, p, rm) };
    let n = to_bigint_rounded(&y, up);
    render_scaled(&n, k)
}

/// `n * 10^-k` as a plain decimal string.
fn render_scaled(n: &BigInt, k: i64) -> String {
    let neg = n.is_negative();
    let mut s = n.magnitude().to_string();
    let out = if k <= 0 {
        s.push_str(&"0".repeat((-k) as usize));
        s
    } else {
        let k = k as usize;
        if s.len() <= k {
            s = format!("{}{}", "0".repeat(k - s.len() + 1), s);
        }
        let (int, frac) = s.split_at(s.len() - k);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        }
    };
    if neg {
        format!("-{out}")
    } else {
        out
    }
}

/// Closed real interval `[lo, hi]`.
#[derive(Clone, Debug)]
pub(crate) struct Iv {
    pub lo: BigFloat,
    pub hi: BigFloat,
}

impl Iv {
    pub fn point(x: BigFloat) -> Iv {
        Iv { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Iv {
        Iv::point(zero())
    }

    pub fn contains_zero(&self) -> bool {
        cmp(&self.lo, &zero()) != Ordering::Greater && cmp(&self.hi, &zero()) != Ordering::Less
    }
}

impl Ctx {
    pub fn add(&self, a: &Iv, b: &Iv) -> Iv {
        Iv { lo: a.lo.add(&b.lo, self.prec, DOWN), hi: a.hi.add(&b.hi, self.prec, UP) }
    }

    pub fn sub(&self, a: &Iv, b: &Iv) -> Iv {
        Iv { lo: a.lo.sub(&b.hi, self.prec, DOWN), hi: a.hi.sub(&b.lo, self.prec, UP) }
    }

    pub fn mul(&self, a: &Iv, b: &Iv) -> Iv {
        let p = self.prec;
        let pairs = [(&a.lo, &b.lo), (&a.lo, &b.hi), (&a.hi, &b.lo), (&a.hi, &b.hi)];
        let lo = pairs.iter().map(|(x, y)| x.mul(y, p, DOWN)).reduce(bmin).expect("four products");
        let hi = pairs.iter().map(|(x, y)| x.mul(y, p, UP)).reduce(bmax).expect("four products");
        Iv { lo, hi }
    }

    pub fn sqr(&self, a: &Iv) -> Iv {
        let p = self.prec;
        let (la, ha) = (a.lo.abs(), a.hi.abs());
        let (small, big) = if cmp(&la, &ha) == Ordering::Greater { (ha, la) } else { (la, ha) };
        let hi = big.mul(&big, p, UP);
        let lo = if a.contains_zero() { zero() } else { small.mul(&small, p, DOWN) };
        Iv { lo, hi }
    }

    /// `None` when the divisor contains zero.
    pub fn div(&self, a: &Iv, b: &Iv) -> Option<Iv> {
        if b.contains_zero() {
            return None;
        }
        let p = self.prec;
        let pairs = [(&a.lo, &b.lo), (&a.lo, &b.hi), (&a.hi, &b.lo), (&a.hi, &b.hi)];
        let lo = pairs.iter().map(|(x, y)| x.div(y, p, DOWN)).reduce(bmin)?;
        let hi = pairs.iter().map(|(x, y)| x.div(y, p, UP)).reduce(bmax)?;
        Some(Iv { lo, hi })
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self, a: &Iv) -> Iv {
        let lo = if cmp(&a.lo, &zero()) == Ordering::Greater { a.lo.sqrt(self.prec, DOWN) } else { zero() };
        let hi = if cmp(&a.hi, &zero()) == Ordering::Greater { a.hi.sqrt(self.prec, UP) } else { zero() };
        Iv { lo, hi }
    }

    /// `ln` of a strictly positive interval.
    pub fn ln(&self, a: &Iv) -> Iv {
        let mut cc = self.cc.borrow_mut();
        Iv { lo: a.lo.ln(self.prec, DOWN, &mut cc), hi: a.hi.ln(self.prec, UP, &mut cc) }
    }

    /// `[ln max(1, lo), ln max(1, hi)]`.
    pub fn log_plus(&self, a: &Iv) -> Iv {
        let mut cc = self.cc.borrow_mut();
        let one = one();
        let f = |x: &BigFloat, rm, cc: &mut Consts| {
            if cmp(x, &one) == Ordering::Greater {
                x.ln(self.prec, rm, cc)
            } else {
                zero()
            }
        };
        Iv { lo: f(&a.lo, DOWN, &mut cc), hi: f(&a.hi, UP, &mut cc) }
    }

    pub fn width(&self, a: &Iv) -> BigFloat {
        a.hi.sub(&a.lo, self.prec, UP)
    }
}

/// Rectangular complex interval.
#[derive(Clone, Debug)]
pub(crate) struct CIv {
    pub re: Iv,
    pub im: Iv,
}

impl CIv {
    pub fn point(c: &Cx) -> CIv {
        CIv { re: Iv::point(c.re.clone()), im: Iv::point(c.im.clone()) }
    }

    pub fn real(x: Iv) -> CIv {
        CIv { re: x, im: Iv::zero() }
    }
}

impl Ctx {
    pub fn cadd(&self, a: &CIv, b: &CIv) -> CIv {
        CIv { re: self.add(&a.re, &b.re), im: self.add(&a.im, &b.im) }
    }

    pub fn csub(&self, a: &CIv, b: &CIv) -> CIv {
        CIv { re: self.sub(&a.re, &b.re), im: self.sub(&a.im, &b.im) }
    }

    pub fn cmul(&self, a: &CIv, b: &CIv) -> CIv {
        let re = self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im));
        let im = self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re));
        CIv { re, im }
    }

    pub fn cabs(&self, a: &CIv) -> Iv {
        self.sqrt(&self.add(&self.sqr(&a.re), &self.sqr(&a.im)))
    }
}

/// Complex point at working precision, round-to-nearest; used by the iterative
/// root refinement where rigor is not needed.
#[derive(Clone, Debug)]
pub(crate) struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn from_f64(re: f64, im: f64) -> Cx {
        Cx { re: from_f64(re), im: from_f64(im) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }

    pub fn zero() -> Cx {
        Cx { re: zero(), im: zero() }
    }
}

impl Ctx {
    pub fn xadd(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.add(&b.re, self.prec, NEAR), im: a.im.add(&b.im, self.prec, NEAR) }
    }

    pub fn xsub(&self, a: &Cx, b: &Cx) -> Cx {
        Cx { re: a.re.sub(&b.re, self.prec, NEAR), im: a.im.sub(&b.im, self.prec, NEAR) }
    }

    pub fn xmul(&self, a: &Cx, b: &Cx) -> Cx {
        let p = self.prec;
        let re = a.re.mul(&b.re, p, NEAR).sub(&a.im.mul(&b.im, p, NEAR), p, NEAR);
        let im = a.re.mul(&b.im, p, NEAR).add(&a.im.mul(&b.re, p, NEAR), p, NEAR);
        Cx { re, im }
    }

    /// `a / b`, `None` if `b == 0`.
    pub fn xdiv(&self, a: &Cx, b: &Cx) -> Option<Cx> {
        let p = self.prec;
        let den = b.re.mul(&b.re, p, NEAR).add(&b.im.mul(&b.im, p, NEAR), p, NEAR);
        if den.is_zero() {
            return None;
        }
        let re = a.re.mul(&b.re, p, NEAR).add(&a.im.mul(&b.im, p, NEAR), p, NEAR);
        let im = a.im.mul(&b.re, p, NEAR).sub(&a.re.mul(&b.im, p, NEAR), p, NEAR);
        Some(Cx { re: re.div(&den, p, NEAR), im: im.div(&den, p, NEAR) })
    }

    /// `|a|` rounded to nearest, as f64 (step-size control only).
    pub fn xabs_f64(&self, a: &Cx) -> f64 {
        let (re, im) = a.to_f64();
        re.hypot(im)
    }

    pub fn round(&self, a: &Cx) -> Cx {
        let mut re = a.re.clone();
        let mut im = a.im.clone();
        let _ = re.set_precision(self.prec, NEAR);
        let _ = im.set_precision(self.prec, NEAR);
        Cx { re, im }
    }
}
