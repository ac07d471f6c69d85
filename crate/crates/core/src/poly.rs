//! Exact integer Laurent polynomials in one variable `t`.
//!
//! A [`LaurentPoly`] is stored as `t^offset * (c_0 + c_1 t + ... + c_d t^d)`
//! with `c_0 != 0` and `c_d != 0`. The zero polynomial has no coefficients.
//! Sign is never normalized here; [`cyclotomic_split`] is the only place that
//! pulls units and content out of a polynomial.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("empty polynomial text")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
}

/// Integer Laurent polynomial `t^offset * Σ coeffs[i] t^i` in normalized form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    coeffs: Vec<BigInt>,
    offset: i64,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { coeffs: Vec::new(), offset: 0 }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: i64) -> Self {
        Self::new(vec![BigInt::from(c)], 0)
    }

    /// The monomial `t^k`.
    pub fn monomial(k: i64) -> Self {
        Self::new(vec![BigInt::one()], k)
    }

    /// Builds `t^offset * Σ coeffs[i] t^i` and normalizes it.
    pub fn new(coeffs: Vec<BigInt>, offset: i64) -> Self {
        let mut p = LaurentPoly { coeffs, offset };
        p.normalize();
        p
    }

    pub fn from_i64s(coeffs: &[i64], offset: i64) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), offset)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        let low = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if low > 0 {
            self.coeffs.drain(..low);
            self.offset += low as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients `c_0 … c_d`, lowest first.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// `d` in the normalized form; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn lowest(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1 && self.offset == 0
    }

    /// Same polynomial with the monomial factor removed (offset 0).
    pub fn strip_monomial(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.clone(), offset: 0 }
    }

    /// `true` when `f(t^-1)` equals `±t^k f(t)`.
    pub fn is_self_reciprocal(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        let n = self.coeffs.len();
        let sym = (0..n).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i]);
        let anti = (0..n).all(|i| self.coeffs[i] == -&self.coeffs[n - 1 - i]);
        sym || anti
    }

    /// gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|c| -c).collect(), offset: self.offset }
    }

    /// `f(-t)`.
    pub fn negate_variable(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let exp = self.offset + i as i64;
                if exp.rem_euclid(2) == 1 {
                    -c
                } else {
                    c.clone()
                }
            })
            .collect();
        LaurentPoly { coeffs, offset: self.offset }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect(), self.offset)
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(bigint_to_f64).collect()
    }

    /// Coefficients as `i64` if they all fit.
    pub fn coeffs_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

pub(crate) fn bigint_to_f64(c: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    c.to_f64().unwrap_or(if c.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, coeffs: &[BigInt], shift: i64) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let exp = i as i64 + shift;
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        let unit = mag.is_one();
        match exp {
            0 => write!(f, "{mag}")?,
            _ => {
                if !unit {
                    write!(f, "{mag}*")?;
                }
                if exp == 1 {
                    f.write_str("t")?;
                } else {
                    write!(f, "t^{exp}")?;
                }
            }
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Canonical text: descending powers, explicit signs, `c*t^k` terms.
/// Negative offsets print as a `t^-k*(...)` wrapper around the plain part.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset < 0 {
            write!(f, "t^{}*(", self.offset)?;
            write_terms(f, &self.coeffs, 0)?;
            f.write_str(")")
        } else {
            write_terms(f, &self.coeffs, self.offset)
        }
    }
}

impl FromStr for LaurentPoly {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    T,
    Caret,
    Star,
    Plus,
    Minus,
    LParen,
    RParen,
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let tok = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: BigInt = s[start..i].parse().expect("ascii digits");
                out.push((start, Tok::Int(n)));
                continue;
            }
            b't' => Tok::T,
            b'^' => Tok::Caret,
            b'*' => Tok::Star,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = s[i..].chars().next().unwrap_or('?');
                return Err(PolyError::Syntax { pos: i, msg: format!("unexpected character '{ch}'") });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.here(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut acc = LaurentPoly::zero();
        let mut first = true;
        loop {
            let negative = if self.eat(&Tok::Minus) {
                true
            } else if self.eat(&Tok::Plus) || first {
                false
            } else {
                break;
            };
            first = false;
            let term = self.term()?;
            acc = add(&acc, &if negative { term.neg() } else { term });
        }
        Ok(acc)
    }

    fn signed_int(&mut self) -> Result<BigInt, PolyError> {
        let paren = self.eat(&Tok::LParen);
        let neg = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let n = match self.peek() {
            Some(Tok::Int(n)) => n.clone(),
            _ => return self.err("expected integer exponent"),
        };
        self.pos += 1;
        if paren && !self.eat(&Tok::RParen) {
            return self.err("expected ')'");
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<i64, PolyError> {
        // after 't'
        if self.eat(&Tok::Caret) {
            let at = self.here();
            let e = self.signed_int()?;
            i64::try_from(&e).map_err(|_| PolyError::Syntax { pos: at, msg: "exponent out of range".into() })
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, PolyError> {
        let mut coeff = BigInt::one();
        let mut exp = 0i64;
        let mut saw_any = false;
        if let Some(Tok::Int(n)) = self.peek() {
            coeff = n.clone();
            self.pos += 1;
            saw_any = true;
            // `c*t^k`, `c t^k`, `c*(...)`
            if self.peek() == Some(&Tok::Star) && self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::T) {
                self.pos += 1;
            }
        }
        if self.eat(&Tok::T) {
            exp = self.power()?;
            saw_any = true;
        }
        if !saw_any {
            if self.peek() == Some(&Tok::LParen) {
                self.pos += 1;
                let inner = self.sum()?;
                if !self.eat(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                return Ok(inner);
            }
            return self.err("expected a term");
        }
        let mut term = LaurentPoly::new(vec![coeff], exp);
        if self.peek() == Some(&Tok::Star) && self.toks.get(self.pos + 1).map(|t| &t.1) == Some(&Tok::LParen) {
            self.pos += 2;
            let inner = self.sum()?;
            if !self.eat(&Tok::RParen) {
                return self.err("expected ')'");
            }
            term = multiply(&term, &inner);
        }
        Ok(term)
    }
}

/// Parse `t^3 - 2*t + 1`, `t^-2 + t^2`, `3 t^2 - 1`, or the printer's
/// `t^-2*(t^4 + 1)` wrapper form.
pub fn parse(text: &str) -> Result<LaurentPoly, PolyError> {
    if text.trim().is_empty() {
        return Err(PolyError::Empty);
    }
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let poly = p.sum()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(poly)
}

// ---------------------------------------------------------------------------
// arithmetic

pub fn add(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    let lo = a.offset.min(b.offset);
    let hi = (a.offset + a.degree() as i64).max(b.offset + b.degree() as i64);
    let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
    for (i, c) in a.coeffs.iter().enumerate() {
        coeffs[(a.offset - lo) as usize + i] += c;
    }
    for (i, c) in b.coeffs.iter().enumerate() {
        coeffs[(b.offset - lo) as usize + i] += c;
    }
    LaurentPoly::new(coeffs, lo)
}

pub fn multiply(a: &LaurentPoly, b: &LaurentPoly) -> LaurentPoly {
    if a.is_zero() || b.is_zero() {
        return LaurentPoly::zero();
    }
    let mut coeffs = vec![BigInt::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.coeffs.iter().enumerate() {
            coeffs[i + j] += x * y;
        }
    }
    LaurentPoly::new(coeffs, a.offset + b.offset)
}

/// `f(t^-1)` with the monomial cleared: coefficients reversed, offset kept.
///
/// This is an involution and is multiplicative on normalized forms.
pub fn reciprocal(f: &LaurentPoly) -> Result<LaurentPoly, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut coeffs = f.coeffs.clone();
    coeffs.reverse();
    Ok(LaurentPoly::new(coeffs, f.offset))
}

/// `Some(q)` with `f = g*q` exactly over the integers, `None` if `g` does not divide `f`.
pub fn exact_divide(f: &LaurentPoly, g: &LaurentPoly) -> Result<Option<LaurentPoly>, PolyError> {
    if g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if f.is_zero() {
        return Ok(Some(LaurentPoly::zero()));
    }
    Ok(divide_plain(&f.coeffs, &g.coeffs).map(|q| LaurentPoly::new(q, f.offset - g.offset)))
}

/// Exact long division of plain coefficient vectors (lowest first).
/// `g[0] != 0` is assumed, so divisibility is unaffected by monomial factors.
fn divide_plain(f: &[BigInt], g: &[BigInt]) -> Option<Vec<BigInt>> {
    if g.len() > f.len() {
        return None;
    }
    let lead = g.last().expect("nonzero divisor");
    let mut rem = f.to_vec();
    let qlen = f.len() - g.len() + 1;
    let mut q = vec![BigInt::zero(); qlen];
    for k in (0..qlen).rev() {
        let top = &rem[k + g.len() - 1];
        if top.is_zero() {
            continue;
        }
        let (quot, r) = top.div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        for (j, gj) in g.iter().enumerate() {
            rem[k + j] -= &quot * gj;
        }
        q[k] = quot;
    }
    if rem.iter().all(Zero::is_zero) {
        Some(q)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// cyclotomic machinery

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn cyclo_cache() -> &'static RwLock<HashMap<u64, Arc<LaurentPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<LaurentPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The `d`-th cyclotomic polynomial, computed as `(t^d - 1) / Π_{e|d, e<d} Φ_e`.
pub fn cyclotomic(d: u64) -> Arc<LaurentPoly> {
    assert!(d >= 1, "cyclotomic index must be positive");
    if let Some(p) = cyclo_cache().read().expect("cache lock").get(&d) {
        return p.clone();
    }
    let mut coeffs = vec![BigInt::zero(); d as usize + 1];
    coeffs[0] = BigInt::from(-1);
    coeffs[d as usize] = BigInt::one();
    let mut acc = coeffs;
    for e in 1..d {
        if d.is_multiple_of(e) {
            let phi_e = cyclotomic(e);
            acc = divide_plain(&acc, &phi_e.coeffs).expect("cyclotomic factor divides t^d - 1");
        }
    }
    let p = Arc::new(LaurentPoly::new(acc, 0));
    cyclo_cache().write().expect("cache lock").insert(d, p.clone());
    p
}

/// All `d` with `φ(d) <= bound`, ascending.
pub fn cyclotomic_indices(bound: usize) -> Arc<Vec<u64>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<Vec<u64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.read().expect("cache lock").get(&bound) {
        return v.clone();
    }
    // φ(d) >= sqrt(d/2), so d <= 2*bound^2 covers every candidate.
    let limit = 2 * (bound as u64).pow(2).max(1) + 2;
    let v: Arc<Vec<u64>> = Arc::new((1..=limit).filter(|&d| euler_phi(d) <= bound as u64).collect());
    cache.write().expect("cache lock").insert(bound, v.clone());
    v
}

/// `f = unit_sign · t^monomial_exp · content · Π Φ_d^mult · remainder`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclotomicSplit {
    pub unit_sign: i8,
    pub monomial_exp: i64,
    pub content: BigInt,
    /// `(d, multiplicity)`, ascending in `d`.
    pub cyclo_factors: Vec<(u64, u32)>,
    pub remainder: LaurentPoly,
}

impl CyclotomicSplit {
    /// Multiplies the pieces back together.
    pub fn reassemble(&self) -> LaurentPoly {
        let mut acc = self.remainder.scale(&(&self.content * BigInt::from(self.unit_sign)));
        acc = multiply(&acc, &LaurentPoly::monomial(self.monomial_exp));
        for &(d, m) in &self.cyclo_factors {
            let phi = cyclotomic(d);
            for _ in 0..m {
                acc = multiply(&acc, &phi);
            }
        }
        acc
    }

    /// Measure is exactly zero: a unit times a monomial times cyclotomics.
    pub fn is_kronecker(&self) -> bool {
        self.content.is_one() && self.remainder.is_constant()
    }
}

/// Strip sign, monomial, content and every cyclotomic factor from `f`.
pub fn cyclotomic_split(f: &LaurentPoly) -> Result<CyclotomicSplit, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let unit_sign: i8 = if f.leading().expect("nonzero").is_negative() { -1 } else { 1 };
    let content = f.content();
    let mut rem: Vec<BigInt> = f.coeffs.iter().map(|c| c / &content * BigInt::from(unit_sign)).collect();
    let mut factors = Vec::new();
    let indices = cyclotomic_indices(rem.len() - 1);
    for &d in indices.iter() {
        let phi = cyclotomic(d);
        let mut mult = 0u32;
        while rem.len() > phi.degree() && rem.len() > 1 {
            match divide_plain(&rem, &phi.coeffs) {
                Some(q) => {
                    rem = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            factors.push((d, mult));
        }
    }
    Ok(CyclotomicSplit {
        unit_sign,
        monomial_exp: f.offset,
        content,
        cyclo_factors: factors,
        remainder: LaurentPoly::new(rem, 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> LaurentPoly {
        parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = p("t - 2");
        assert_eq!(f, LaurentPoly::from_i64s(&[-2, 1], 0));
        let lehmer = p("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1");
        assert_eq!(lehmer.degree(), 10);
        assert_eq!(lehmer.coeffs_i64().unwrap(), vec![1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let g = p("t^-2 + t^2");
        assert_eq!(g.coeffs_i64().unwrap(), vec![1, 0, 0, 0, 1]);
        assert_eq!(g.offset(), -2);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(p("3 t^2 - 1"), LaurentPoly::from_i64s(&[-1, 0, 3], 0));
        assert_eq!(p("-t"), LaurentPoly::from_i64s(&[-1], 1));
        assert_eq!(p("2*t^(-1) + 1"), LaurentPoly::from_i64s(&[2, 1], -1));
        assert_eq!(p("t^-2*(t^4 + 1)"), p("t^-2 + t^2"));
        assert_eq!(p("0"), LaurentPoly::zero());
        assert_eq!(p("t - t"), LaurentPoly::zero());
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse("   "), Err(PolyError::Empty));
        assert!(matches!(parse("t + x"), Err(PolyError::Syntax { pos: 4, .. })));
        assert!(matches!(parse("2 3"), Err(PolyError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("t^"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse("t +"), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn printer() {
        assert_eq!(p("1 - 2*t + t^3").to_string(), "t^3 - 2*t + 1");
        assert_eq!(p("t^-2 + t^2").to_string(), "t^-2*(t^4 + 1)");
        assert_eq!(p("-t^2 + 5").to_string(), "-t^2 + 5");
        assert_eq!(p("t^3 + t").to_string(), "t^3 + t");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        for s in ["t^-2*(t^4 + 1)", "-3*t^5 + t - 7", "t^-1*(2*t + 1)"] {
            assert_eq!(p(s).to_string(), s);
        }
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(multiply(&p("t-2"), &p("t-2")), p("t^2-4t+4"));
        let f = p("t^3 - 2t + 7");
        assert_eq!(multiply(&f, &LaurentPoly::one()), f);
        assert_eq!(multiply(&p("t^-1"), &p("t")), LaurentPoly::one());
        assert!(multiply(&f, &LaurentPoly::zero()).is_zero());
    }

    #[test]
    fn reciprocal_examples() {
        assert_eq!(reciprocal(&p("t-2")).unwrap(), LaurentPoly::from_i64s(&[1, -2], 0));
        let pal = p("t^4 + 3t^3 - t^2 + 3t + 1");
        assert_eq!(reciprocal(&pal).unwrap(), pal);
        assert_eq!(reciprocal(&LaurentPoly::zero()), Err(PolyError::ZeroPolynomial));
        assert_eq!(reciprocal(&p("t^5")).unwrap(), p("t^5"));
        let g = p("t^-2 + 3t^2 - t^3");
        assert_eq!(reciprocal(&reciprocal(&g).unwrap()).unwrap(), g);
    }

    #[test]
    fn divide_examples() {
        assert_eq!(exact_divide(&p("t^2-4"), &p("t-2")).unwrap(), Some(p("t+2")));
        assert_eq!(exact_divide(&p("t^2+1"), &p("t-2")).unwrap(), None);
        let f = p("3t^4 - t + 9");
        assert_eq!(exact_divide(&f, &f).unwrap(), Some(LaurentPoly::one()));
        assert_eq!(exact_divide(&f, &LaurentPoly::zero()), Err(PolyError::ZeroPolynomial));
        assert_eq!(exact_divide(&p("2t+2"), &p("4")).unwrap(), None);
        assert_eq!(exact_divide(&p("t^-3 + t^-1"), &p("t^2+1")).unwrap(), Some(p("t^-3")));
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(*cyclotomic(1), p("t - 1"));
        assert_eq!(*cyclotomic(4), p("t^2 + 1"));
        // (t^12 - 1) / (Φ1 Φ2 Φ3 Φ4 Φ6) computed by hand-rolled division
        let mut acc = p("t^12 - 1");
        for q in ["t-1", "t+1", "t^2+t+1", "t^2+1", "t^2-t+1"] {
            acc = exact_divide(&acc, &p(q)).unwrap().unwrap();
        }
        assert_eq!(acc, p("t^4 - t^2 + 1"));
        assert_eq!(*cyclotomic(12), acc);
        // first cyclotomic with a coefficient outside {-1, 0, 1}
        assert!(cyclotomic(105).coeffs().iter().any(|x| x == &BigInt::from(-2)));
    }

    #[test]
    fn cyclotomic_divides_t_pow_d_minus_one() {
        for d in 1..=100u64 {
            let phi = cyclotomic(d);
            assert_eq!(phi.degree() as u64, euler_phi(d), "deg Φ_{d}");
            let mut c = vec![0i64; d as usize + 1];
            c[0] = -1;
            c[d as usize] = 1;
            let td = LaurentPoly::from_i64s(&c, 0);
            assert!(exact_divide(&td, &phi).unwrap().is_some(), "Φ_{d} ∤ t^{d}-1");
        }
    }

    #[test]
    fn split_examples() {
        let s = cyclotomic_split(&p("t-1")).unwrap();
        assert_eq!(s.cyclo_factors, vec![(1, 1)]);
        assert_eq!(s.remainder, LaurentPoly::one());

        let f = multiply(&multiply(&p("2"), &p("t^2+1")), &p("t-2"));
        let s = cyclotomic_split(&f).unwrap();
        assert_eq!(s.content, BigInt::from(2));
        assert_eq!(s.cyclo_factors, vec![(4, 1)]);
        assert_eq!(s.remainder, p("t-2"));
        assert_eq!(s.reassemble(), f);

        let lehmer = p("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1");
        let s = cyclotomic_split(&lehmer).unwrap();
        assert!(s.cyclo_factors.is_empty());
        assert_eq!(s.remainder, lehmer);

        let g =
            [p("-t^3"), p("t^4-t^2+1"), p("t+1"), p("t+1")].iter().fold(LaurentPoly::one(), |acc, x| multiply(&acc, x));
        let s = cyclotomic_split(&g).unwrap();
        assert_eq!(s.unit_sign, -1);
        assert_eq!(s.monomial_exp, 3);
        assert_eq!(s.cyclo_factors, vec![(2, 2), (12, 1)]);
        assert!(s.is_kronecker());
        assert_eq!(s.reassemble(), g);
    }

    #[test]
    fn lehmer_has_no_cyclotomic_divisor_brute_force() {
        let lehmer = p("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1");
        for d in 1..=400u64 {
            if euler_phi(d) <= 10 {
                assert!(exact_divide(&lehmer, &cyclotomic(d)).unwrap().is_none());
            }
        }
    }

    #[test]
    fn cyclotomic_index_list() {
        let v = cyclotomic_indices(10);
        assert_eq!(&v[..], &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 14, 15, 16, 18, 20, 22, 24, 30]);
        let brute: Vec<u64> = (1..=5000).filter(|&d| euler_phi(d) <= 20).collect();
        assert_eq!(&cyclotomic_indices(20)[..], &brute[..]);
    }

    #[test]
    fn negate_variable_and_self_reciprocal() {
        assert_eq!(p("t^3 - 2t + 1").negate_variable(), p("-t^3 + 2t + 1"));
        assert_eq!(p("t^-1").negate_variable(), p("-t^-1"));
        assert!(p("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1").is_self_reciprocal());
        assert!(p("t^2 - 1").is_self_reciprocal());
        assert!(!p("t - 2").is_self_reciprocal());
    }
}
