//! Logarithmic Mahler measure `m(f) = log|a_d| + Σ_{|λ|>1} log|λ|` with
//! certified enclosures, plus an independent circle-quadrature estimate.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{self, cmp, Ctx, Iv};
use crate::entropy::{EntropyInterval, ExtReal};
use crate::poly::{cyclotomic_split, CyclotomicSplit, LaurentPoly, PolyError};
use crate::roots::{self, ComplexBall};

pub const DEFAULT_PRECISION_START: usize = 64;
pub const DEFAULT_PRECISION_CEILING: usize = 4096;
/// Environment override for the precision ceiling (bits).
pub const PRECISION_CEILING_ENV: &str = "MAHLERKIT_PRECISION_CEILING";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MahlerError {
    #[error("the zero polynomial has no Mahler measure")]
    ZeroPolynomial,
    #[error("constant polynomial has no roots")]
    DegreeZero,
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("root certification failed at {bits} bits; retry with higher precision")]
    PrecisionExhausted { bits: usize },
    #[error("root enclosure {certified} and quadrature band {quadrature} do not overlap")]
    Inconsistent { certified: EntropyInterval, quadrature: EntropyInterval },
}

impl From<PolyError> for MahlerError {
    fn from(_: PolyError) -> Self {
        MahlerError::ZeroPolynomial
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    /// Cyclotomic/unit part, handled exactly.
    Symbolic,
    /// Smith-certified root enclosure.
    CertifiedRoots,
    /// Circle quadrature agreed (non-certified).
    JensenCrossCheck,
}

#[derive(Debug, Clone)]
pub struct MahlerOptions {
    pub precision_start: usize,
    pub precision_ceiling: usize,
    /// Also run the quadrature and require overlap.
    pub validate: bool,
    pub jensen_tol: f64,
}

impl Default for MahlerOptions {
    fn default() -> Self {
        let ceiling = std::env::var(PRECISION_CEILING_ENV)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&b| b >= DEFAULT_PRECISION_START)
            .unwrap_or(DEFAULT_PRECISION_CEILING);
        MahlerOptions {
            precision_start: DEFAULT_PRECISION_START,
            precision_ceiling: ceiling,
            validate: false,
            jensen_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RootContribution {
    pub ball: ComplexBall,
    /// Encloses `log max(1, |λ|)` for the root `λ` in the ball.
    pub contribution: EntropyInterval,
    lo: BigFloat,
    hi: BigFloat,
}

#[derive(Debug, Clone)]
pub struct MahlerResult {
    pub value: EntropyInterval,
    pub split: CyclotomicSplit,
    pub root_contributions: Vec<RootContribution>,
    pub method_tags: Vec<MethodTag>,
    /// `hi - lo <= eps` was reached before the precision ceiling.
    pub tolerance_met: bool,
    /// Working precision (bits) of the reported enclosure; 0 when purely symbolic.
    pub precision: usize,
    pub jensen: Option<JensenResult>,
    lo: BigFloat,
    hi: BigFloat,
}

impl MahlerResult {
    /// Decimal digits the working precision supports.
    fn digits(&self) -> usize {
        ((self.precision.max(64) as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2
    }

    pub fn value_lo_decimal(&self) -> String {
        arith::to_decimal(&self.lo, self.digits(), false)
    }

    pub fn value_hi_decimal(&self) -> String {
        arith::to_decimal(&self.hi, self.digits(), true)
    }

    /// Outward-rounded decimal bounds with `digits` significant digits.
    pub fn value_decimal(&self, digits: usize) -> (String, String) {
        let d = digits.clamp(1, self.digits());
        (arith::to_decimal(&self.lo, d, false), arith::to_decimal(&self.hi, d, true))
    }

    /// Serialized form: decimal strings for high-precision numbers.
    pub fn to_json(&self) -> Value {
        let digits = self.digits();
        let roots: Vec<Value> = self
            .root_contributions
            .iter()
            .map(|rc| {
                let (re, im) = rc.ball.center_decimal(digits);
                json!({
                    "re": re,
                    "im": im,
                    "radius": rc.ball.radius_decimal(digits),
                    "contribution_lo": arith::to_decimal(&rc.lo, digits, false),
                    "contribution_hi": arith::to_decimal(&rc.hi, digits, true),
                    "cluster": rc.ball.cluster,
                })
            })
            .collect();
        json!({
            "value_lo": self.value_lo_decimal(),
            "value_hi": self.value_hi_decimal(),
            "nats": self.value.midpoint(),
            "certified": true,
            "tolerance_met": self.tolerance_met,
            "precision_bits": self.precision,
            "cyclotomic_factors": self.split.cyclo_factors.iter().map(|&(d, m)| json!([d, m])).collect::<Vec<_>>(),
            "content": self.split.content.to_string(),
            "remainder": self.split.remainder.to_string(),
            "method_tags": self.method_tags,
            "roots": roots,
            "jensen": self.jensen.as_ref().map(JensenResult::to_json),
        })
    }
}

/// Outcome of a measured evaluation that may stop early once its certified
/// lower bound exceeds a cutoff.
pub(crate) enum Bounded {
    Done(Box<MahlerResult>),
    /// Certified `m(f) > cutoff`.
    Exceeds,
}

/// `ln |n|` for a nonzero integer, as an interval at the context precision.
fn ln_int(ctx: &Ctx, n: &BigInt) -> Iv {
    if n.abs().is_one() {
        return Iv::zero();
    }
    ctx.ln(&Iv::point(arith::from_bigint(&n.abs())))
}

fn to_interval(iv: &Iv) -> EntropyInterval {
    let lo = arith::to_f64_down(&iv.lo).max(0.0);
    let hi = arith::to_f64_up(&iv.hi).max(lo);
    EntropyInterval { lo: ExtReal::new(lo).expect("lo >= 0"), hi: ExtReal::new(hi).expect("hi >= 0") }
}

pub(crate) fn mahler_bounded(
    f: &LaurentPoly,
    eps: f64,
    opts: &MahlerOptions,
    cutoff: Option<f64>,
) -> Result<Bounded, MahlerError> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(MahlerError::NonPositiveTolerance(eps));
    }
    let split = cyclotomic_split(f)?;
    mahler_of_split(split, eps, opts, cutoff)
}

pub(crate) fn mahler_of_split(
    split: CyclotomicSplit,
    eps: f64,
    opts: &MahlerOptions,
    cutoff: Option<f64>,
) -> Result<Bounded, MahlerError> {
    if split.is_kronecker() {
        return Ok(Bounded::Done(Box::new(MahlerResult {
            value: EntropyInterval::ZERO,
            split,
            root_contributions: Vec::new(),
            method_tags: vec![MethodTag::Symbolic],
            tolerance_met: true,
            precision: 0,
            jensen: None,
            lo: arith::zero(),
            hi: arith::zero(),
        })));
    }
    let rem = split.remainder.coeffs().to_vec();
    let scale = &split.content * rem.last().expect("nonzero remainder");
    let eps_bf = arith::from_f64(eps);
    let cutoff_bf = cutoff.filter(|c| c.is_finite()).map(arith::from_f64);

    let mut tags = vec![MethodTag::Symbolic];
    if rem.len() > 1 {
        tags.push(MethodTag::CertifiedRoots);
    }
    let mut best: Option<(BigFloat, MahlerResult)> = None;
    let mut z = if rem.len() > 1 { roots::seeds(&rem) } else { Vec::new() };
    let mut prec = opts.precision_start.max(64);
    loop {
        let ctx = Ctx::new(prec);
        let mut total = ln_int(&ctx, &scale);
        let mut contributions = Vec::new();
        let mut ok = true;
        if rem.len() > 1 {
            z = roots::refine(&rem, &z, &ctx);
            match roots::certify(&rem, &z, &ctx) {
                Ok(balls) => {
                    for ball in balls {
                        let c = ctx.log_plus(&ball.modulus(&ctx));
                        total = ctx.add(&total, &c);
                        contributions.push(RootContribution {
                            ball,
                            contribution: to_interval(&c),
                            lo: c.lo,
                            hi: c.hi,
                        });
                    }
                }
                Err(()) => ok = false,
            }
        }
        if ok {
            if let Some(c) = &cutoff_bf {
                if cmp(&total.lo, c) == Ordering::Greater {
                    return Ok(Bounded::Exceeds);
                }
            }
            let width = ctx.width(&total);
            let met = cmp(&width, &eps_bf) != Ordering::Greater;
            let lo = if total.lo.is_negative() { arith::zero() } else { total.lo.clone() };
            let result = MahlerResult {
                value: to_interval(&total),
                split: split.clone(),
                root_contributions: contributions,
                method_tags: tags.clone(),
                tolerance_met: met,
                precision: prec,
                jensen: None,
                lo,
                hi: total.hi.clone(),
            };
            let better = best.as_ref().is_none_or(|(w, _)| cmp(&width, w) == Ordering::Less);
            if better {
                best = Some((width, result));
            }
            if met {
                break;
            }
        }
        if prec >= opts.precision_ceiling {
            break;
        }
        prec = (prec * 2).min(opts.precision_ceiling);
    }
    match best {
        Some((_, r)) => Ok(Bounded::Done(Box::new(r))),
        None => Err(MahlerError::PrecisionExhausted { bits: opts.precision_ceiling }),
    }
}

/// Certified enclosure of `m(f)` from the root formula, raising precision
/// until the width is at most `eps` or the ceiling is hit.
pub fn mahler_from_roots(f: &LaurentPoly, eps: f64) -> Result<MahlerResult, MahlerError> {
    mahler_from_roots_with(f, eps, &MahlerOptions::default())
}

pub fn mahler_from_roots_with(f: &LaurentPoly, eps: f64, opts: &MahlerOptions) -> Result<MahlerResult, MahlerError> {
    if f.is_zero() {
        return Err(MahlerError::ZeroPolynomial);
    }
    match mahler_bounded(f, eps, opts, None)? {
        Bounded::Done(r) => Ok(*r),
        Bounded::Exceeds => unreachable!("no cutoff given"),
    }
}

// ---------------------------------------------------------------------------
// circle quadrature

#[derive(Debug, Clone, serde::Serialize)]
pub struct JensenResult {
    /// `[estimate - tol, estimate + tol]`, clamped at 0. Not certified.
    pub interval: EntropyInterval,
    pub estimate: f64,
    pub grid: usize,
    pub converged: bool,
}

impl JensenResult {
    fn to_json(&self) -> Value {
        json!({
            "estimate": self.estimate,
            "lo": self.interval.lo,
            "hi": self.interval.hi,
            "grid": self.grid,
            "converged": self.converged,
            "certified": false,
        })
    }
}

pub const JENSEN_START_GRID: usize = 64;
pub const JENSEN_MAX_GRID: usize = 1 << 26;

/// Shifted rectangle rule for `∫_0^1 log|f(e^{2πis})| ds` on `n` points.
fn circle_rule(coeffs: &[f64], n: usize) -> f64 {
    // irrational shift keeps nodes off every root of unity
    const SHIFT: f64 = 0.381_966_011_250_105_1;
    const CHUNK: usize = 1 << 14;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = 0.0;
            let mut comp = 0.0;
            for k in (c * CHUNK)..((c + 1) * CHUNK).min(n) {
                let s = (k as f64 + SHIFT) / n as f64;
                let (sn, cs) = (std::f64::consts::TAU * s).sin_cos();
                let (mut re, mut im) = (0.0, 0.0);
                for &a in coeffs.iter().rev() {
                    let t = re * cs - im * sn + a;
                    im = re * sn + im * cs;
                    re = t;
                }
                let term = 0.5 * (re * re + im * im).ln();
                // Kahan summation
                let y = term - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
            }
            sum
        })
        .collect();
    partial.iter().sum::<f64>() / n as f64
}

/// Independent, non-certified estimate of `m(f)` by circle quadrature with
/// grid doubling until successive estimates differ by less than `tol / 2`.
pub fn mahler_jensen(f: &LaurentPoly, tol: f64) -> Result<JensenResult, MahlerError> {
    if f.is_zero() {
        return Err(MahlerError::ZeroPolynomial);
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(MahlerError::NonPositiveTolerance(tol));
    }
    let coeffs = f.coeffs_f64();
    let band = |est: f64, half: f64, grid, converged| JensenResult {
        interval: EntropyInterval::new((est - half).max(0.0), (est + half).max(0.0)),
        estimate: est,
        grid,
        converged,
    };
    if coeffs.len() == 1 {
        let est = coeffs[0].abs().ln();
        return Ok(band(est, tol, 1, true));
    }
    let mut n = JENSEN_START_GRID.max(4 * coeffs.len());
    let mut prev = circle_rule(&coeffs, n);
    loop {
        n *= 2;
        let est = circle_rule(&coeffs, n);
        let diff = (est - prev).abs();
        if diff < tol / 2.0 {
            return Ok(band(est, tol, n, true));
        }
        if n >= JENSEN_MAX_GRID {
            return Ok(band(est, tol.max(2.0 * diff), n, false));
        }
        prev = est;
    }
}

/// Certified value from the root formula; with `validate`, also runs the
/// quadrature and fails loudly if the two disagree.
pub fn mahler(f: &LaurentPoly, eps: f64, validate: bool) -> Result<MahlerResult, MahlerError> {
    let opts = MahlerOptions { validate, ..MahlerOptions::default() };
    mahler_with(f, eps, &opts)
}

pub fn mahler_with(f: &LaurentPoly, eps: f64, opts: &MahlerOptions) -> Result<MahlerResult, MahlerError> {
    let mut result = mahler_from_roots_with(f, eps, opts)?;
    if opts.validate {
        let j = mahler_jensen(f, opts.jensen_tol)?;
        if !result.value.overlaps(&j.interval) {
            return Err(MahlerError::Inconsistent { certified: result.value, quadrature: j.interval });
        }
        result.method_tags.push(MethodTag::JensenCrossCheck);
        result.jensen = Some(j);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{cyclotomic, multiply, parse};

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn t_minus_two_is_log_two() {
        let r = mahler_from_roots(&parse("t - 2").unwrap(), 1e-12).unwrap();
        assert!(r.value.contains(LN2));
        assert!(r.value.width() <= 1e-12);
        assert!(r.tolerance_met);
    }

    #[test]
    fn cyclotomic_times_unit_is_exact_zero() {
        let f = multiply(&cyclotomic(12), &parse("-t^3").unwrap());
        let r = mahler_from_roots(&f, 1e-12).unwrap();
        assert_eq!(r.value, EntropyInterval::ZERO);
        assert_eq!(r.method_tags, vec![MethodTag::Symbolic]);
    }

    #[test]
    fn golden_ratio() {
        // only (1+√5)/2 lies outside the unit circle
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let r = mahler_from_roots(&parse("t^2 - t - 1").unwrap(), 1e-12).unwrap();
        assert!((r.value.midpoint() - phi.ln()).abs() < 1e-12, "{}", r.value);
        assert!((r.value.midpoint() - 0.4812118250).abs() < 1e-10);
    }

    #[test]
    fn lehmer_value() {
        let f = parse("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1").unwrap();
        let r = mahler_from_roots(&f, 1e-12).unwrap();
        assert!(r.value.contains(0.16235761) || (r.value.midpoint() - 0.1623576120).abs() < 1e-10, "{}", r.value);
        assert!(r.value.width() <= 1e-12);
        assert_eq!(r.root_contributions.len(), 10);
    }

    #[test]
    fn jensen_examples() {
        let j = mahler_jensen(&parse("t - 2").unwrap(), 1e-8).unwrap();
        assert!(j.converged);
        assert!((j.estimate - LN2).abs() < 1e-8);
        let c = mahler_jensen(&parse("3").unwrap(), 1e-8).unwrap();
        assert!((c.estimate - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lehmer_two_methods_agree() {
        let f = parse("t^10+t^9-t^7-t^6-t^5-t^4-t^3+t+1").unwrap();
        let j = mahler_jensen(&f, 1e-6).unwrap();
        let r = mahler_from_roots(&f, 1e-12).unwrap();
        assert!((j.estimate - r.value.midpoint()).abs() < 1e-5, "{} vs {}", j.estimate, r.value);
    }

    #[test]
    fn constant_is_log_abs() {
        let r = mahler(&parse("2").unwrap(), 1e-12, false).unwrap();
        assert!(r.value.contains(LN2));
        let r = mahler(&parse("-6").unwrap(), 1e-12, true).unwrap();
        assert!(r.value.contains(6f64.ln()));
    }

    #[test]
    fn strips_units_bit_identically() {
        let f = parse("3t^4 - t + 5").unwrap();
        let a = mahler_from_roots(&f, 1e-10).unwrap();
        let b = mahler_from_roots(&multiply(&f, &parse("-t^7").unwrap()), 1e-10).unwrap();
        let c = mahler_from_roots(&multiply(&f, &parse("t^-2").unwrap()), 1e-10).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.value, c.value);
        assert_eq!(a.value_lo_decimal(), b.value_lo_decimal());
    }

    #[test]
    fn validate_flag_attaches_quadrature() {
        let r = mahler(&parse("t^3 - t - 1").unwrap(), 1e-10, true).unwrap();
        assert!(r.method_tags.contains(&MethodTag::JensenCrossCheck));
        assert!(r.jensen.is_some());
    }

    #[test]
    fn errors() {
        assert_eq!(mahler_from_roots(&LaurentPoly::zero(), 1e-3).unwrap_err(), MahlerError::ZeroPolynomial);
        assert!(matches!(mahler_from_roots(&parse("t").unwrap(), 0.0), Err(MahlerError::NonPositiveTolerance(_))));
        assert!(matches!(mahler_from_roots(&parse("t-2").unwrap(), -1.0), Err(MahlerError::NonPositiveTolerance(_))));
    }

    #[test]
    fn ceiling_hit_reports_best_enclosure() {
        let opts = MahlerOptions { precision_ceiling: 64, ..Default::default() };
        let r = mahler_from_roots_with(&parse("t^2 - 4t + 4").unwrap(), 1e-30, &opts).unwrap();
        assert!(!r.tolerance_met);
        assert!(r.value.contains(2.0 * LN2));
    }

    #[test]
    fn json_shape() {
        let r = mahler(&parse("2t^2 - 2").unwrap(), 1e-10, false).unwrap();
        let js = r.to_json();
        assert_eq!(js["content"], "2");
        assert_eq!(js["cyclotomic_factors"], json!([[1, 1], [2, 1]]));
        assert!(js["value_lo"].as_str().unwrap().starts_with("0.69314718"));
        let r = mahler(&parse("t^3 - 2").unwrap(), 1e-10, false).unwrap();
        let js = r.to_json();
        assert_eq!(js["roots"].as_array().unwrap().len(), 3);
        for root in js["roots"].as_array().unwrap() {
            for key in ["re", "im", "radius", "contribution_lo", "contribution_hi"] {
                assert!(root[key].is_string(), "{key}");
            }
        }
    }
}
