use serde::Serialize;

use super::spec::{ClassicalSpec, Multiplicity, QuantumSpec, SystemSpec};
use super::CalculusError;
use crate::arith::{self, Ctx, Iv};
use crate::entropy::EntropyInterval;
use crate::mahler::{mahler_with, MahlerOptions, MahlerResult};
use crate::poly::LaurentPoly;

const SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-9;
/// Bits used for leaf entropies before outward rounding to f64.
const LEAF_PRECISION: usize = 192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ergodicity {
    Ergodic,
    NonErgodic,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalEntropyReport {
    /// Kolmogorov–Sinai entropy.
    pub ks: EntropyInterval,
    pub hcpa: EntropyInterval,
    pub ergodic: Ergodicity,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyReport {
    /// Entropy of the restriction to the Cartan subalgebra.
    pub cartan: EntropyInterval,
    /// Lower end bounds the dynamical entropy, upper end bounds hcpa.
    pub total: EntropyInterval,
    pub trace: Vec<TraceEntry>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum Report {
    Quantum(EntropyReport),
    Classical(ClassicalEntropyReport),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum TraceValues {
    Classical { ks: EntropyInterval, hcpa: EntropyInterval, ergodic: Ergodicity },
    Quantum { cartan: EntropyInterval, total: EntropyInterval },
}

/// One rule application, recorded in post-order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    /// `$` for the root, then `.left`, `.right`, `.inner`, `.system`.
    pub path: String,
    pub node: &'static str,
    pub rule: &'static str,
    pub basis: &'static str,
    /// The rule is used by the construction without being stated as a result.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub implicit: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<&'static str>,
    #[serde(flatten)]
    pub values: TraceValues,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl EntropyReport {
    pub fn warnings(&self) -> impl Iterator<Item = (&str, &str)> {
        self.trace.iter().flat_map(|e| e.warnings.iter().map(move |w| (e.path.as_str(), w.as_str())))
    }
}

impl ClassicalEntropyReport {
    pub fn warnings(&self) -> impl Iterator<Item = (&str, &str)> {
        self.trace.iter().flat_map(|e| e.warnings.iter().map(move |w| (e.path.as_str(), w.as_str())))
    }
}

/// An interval, possibly known to be exactly `k · log 2` for an exact `k`.
#[derive(Debug, Clone, Copy)]
struct Val {
    iv: EntropyInterval,
    ln2: Option<f64>,
}

impl Val {
    fn of(iv: EntropyInterval) -> Val {
        Val { iv, ln2: None }
    }

    fn ln2_multiple(k: f64) -> Val {
        let iv = if k.is_infinite() {
            EntropyInterval::INFINITE
        } else if k == 0.0 {
            EntropyInterval::ZERO
        } else {
            EntropyInterval::ln2().scale(k)
        };
        Val { iv, ln2: Some(k) }
    }

    fn scale(self, c: f64) -> Val {
        match self.ln2.and_then(|k| exact_mul(k, c)) {
            Some(k) => Val::ln2_multiple(k),
            None => Val::of(self.iv.scale(c)),
        }
    }

    fn add(self, other: Val) -> Val {
        match (self.ln2, other.ln2) {
            (Some(a), Some(b)) => match exact_add(a, b) {
                Some(k) => Val::ln2_multiple(k),
                None => Val::of(self.iv.add(&other.iv)),
            },
            _ => Val::of(self.iv.add(&other.iv)),
        }
    }
}

fn exact_mul(a: f64, b: f64) -> Option<f64> {
    if a == 0.0 || b == 0.0 {
        return Some(0.0);
    }
    if a.is_infinite() || b.is_infinite() {
        return Some(f64::INFINITY);
    }
    let p = a * b;
    (p.is_finite() && a.mul_add(b, -p) == 0.0).then_some(p)
}

fn exact_add(a: f64, b: f64) -> Option<f64> {
    if a.is_infinite() || b.is_infinite() {
        return Some(f64::INFINITY);
    }
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s.is_finite() && err == 0.0).then_some(s)
}

/// `n · x` for a possibly infinite multiplicity, with `∞ · 0 = 0`.
fn times(n: Multiplicity, x: EntropyInterval) -> EntropyInterval {
    match n {
        Multiplicity::Finite(k) => x.scale(k as f64),
        Multiplicity::Infinite => infinite_multiple(x),
    }
}

/// `∞ · x`: infinite when `x` is certified positive, zero when `x = 0`.
fn infinite_multiple(x: EntropyInterval) -> EntropyInterval {
    if !x.lo.is_zero() {
        EntropyInterval::INFINITE
    } else if x.hi.is_zero() {
        EntropyInterval::ZERO
    } else {
        EntropyInterval::UNBOUNDED
    }
}

/// `[-Σ w·p·ln p]` over `(w, p)` pairs, rounded outward to f64.
fn entropy_sum(terms: impl Iterator<Item = (f64, f64)>) -> EntropyInterval {
    let ctx = Ctx::new(LEAF_PRECISION);
    let mut acc = Iv::zero();
    for (w, p) in terms {
        if w == 0.0 || p == 0.0 || p == 1.0 {
            continue;
        }
        let lnp = ctx.ln(&Iv::point(arith::from_f64(p)));
        let wp = ctx.mul(&Iv::point(arith::from_f64(w)), &Iv::point(arith::from_f64(p)));
        acc = ctx.add(&acc, &ctx.mul(&wp, &lnp));
    }
    let lo = (-arith::to_f64_up(&acc.hi)).max(0.0);
    let hi = (-arith::to_f64_down(&acc.lo)).max(lo);
    EntropyInterval::new(lo, hi)
}

/// `1 - x` for `x ∈ (0, 1)`, bracketed by f64 values.
fn one_minus(x: f64) -> (f64, f64) {
    let c = 1.0 - x;
    // c + x = s + err exactly; 1 - x - c = (1 - s) - err, and 1 - s is exact near 1
    let s = c + x;
    let bb = s - c;
    let err = (c - (s - bb)) + (x - bb);
    let r = (1.0 - s) - err;
    if r > 0.0 {
        (c, c.next_up())
    } else if r < 0.0 {
        (c.next_down(), c)
    } else {
        (c, c)
    }
}

fn invalid(path: &str, msg: impl Into<String>) -> CalculusError {
    CalculusError::InvalidSpec(format!("{path}: {}", msg.into()))
}

fn check_probability_vector(path: &str, what: &str, p: &[f64]) -> Result<(), CalculusError> {
    if p.is_empty() {
        return Err(invalid(path, format!("{what} is empty")));
    }
    if let Some(x) = p.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(invalid(path, format!("{what} has entry {x} outside [0, 1]")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(invalid(path, format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

fn irreducible(p: &[Vec<f64>]) -> bool {
    let n = p.len();
    let reach = |transpose: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for (j, s) in seen.iter_mut().enumerate() {
                let w = if transpose { p[j][i] } else { p[i][j] };
                if w > 0.0 && !*s {
                    *s = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(false) && reach(true)
}

fn check_time(path: &str, t: f64) -> Result<(), CalculusError> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(invalid(path, format!("flow time must be finite, got {t}")))
    }
}

fn check_power(path: &str, m: u64) -> Result<f64, CalculusError> {
    if m == 0 {
        return Err(invalid(path, "power exponent must be at least 1"));
    }
    let c = m as f64;
    if c as u64 != m {
        return Err(invalid(path, format!("power exponent {m} is not exactly representable")));
    }
    Ok(c)
}

fn child(path: &str, name: &str) -> String {
    format!("{path}.{name}")
}

struct Env<'a> {
    eps: f64,
    opts: &'a MahlerOptions,
}

impl Env<'_> {
    fn mahler(&self, path: &str, f: &LaurentPoly) -> Result<(MahlerResult, Vec<String>), CalculusError> {
        if f.is_zero() {
            return Err(invalid(path, "f must be nonzero"));
        }
        let r = mahler_with(f, self.eps, self.opts)?;
        let mut warnings = Vec::new();
        if !r.tolerance_met {
            warnings.push(format!(
                "Mahler enclosure width {:e} exceeds eps {:e} at the precision ceiling ({} bits)",
                r.value.width(),
                self.eps,
                r.precision
            ));
        }
        Ok((r, warnings))
    }
}

struct ClassicalVal {
    ks: EntropyInterval,
    hcpa: EntropyInterval,
    ergodic: Ergodicity,
}

type Traced<T> = Result<(T, Vec<TraceEntry>), CalculusError>;

fn join<A: Send, B: Send>(a: impl FnOnce() -> A + Send, b: impl FnOnce() -> B + Send) -> (A, B) {
    rayon::join(a, b)
}

fn eval_classical(s: &ClassicalSpec, path: &str, env: &Env<'_>) -> Traced<ClassicalVal> {
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut assumptions = Vec::new();
    let (val, rule, basis) = match s {
        ClassicalSpec::Bernoulli { p } => {
            check_probability_vector(path, "p", p)?;
            let h = entropy_sum(p.iter().map(|&x| (1.0, x)));
            (ClassicalVal { ks: h, hcpa: h, ergodic: Ergodicity::Ergodic }, "bernoulli_entropy", "h = -Σ p_i log p_i")
        }
        ClassicalSpec::Markov { matrix, stationary } => {
            let n = matrix.len();
            if n == 0 || matrix.iter().any(|row| row.len() != n) {
                return Err(invalid(path, "transition matrix must be square and nonempty"));
            }
            if stationary.len() != n {
                return Err(invalid(path, format!("stationary vector has length {}, expected {n}", stationary.len())));
            }
            for (i, row) in matrix.iter().enumerate() {
                check_probability_vector(path, &format!("row {i}"), row)?;
            }
            check_probability_vector(path, "stationary vector", stationary)?;
            for j in 0..n {
                let pj: f64 = (0..n).map(|i| stationary[i] * matrix[i][j]).sum();
                if (pj - stationary[j]).abs() > STATIONARY_TOL {
                    return Err(invalid(path, format!("stationary vector is not invariant at state {j}")));
                }
            }
            let h = entropy_sum(
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (stationary[i], matrix[i][j])),
            );
            let ergodic = if irreducible(matrix) { Ergodicity::Ergodic } else { Ergodicity::NonErgodic };
            (ClassicalVal { ks: h, hcpa: h, ergodic }, "markov_entropy", "h = -Σ_i π_i Σ_j P_ij log P_ij")
        }
        ClassicalSpec::IrrationalRotation => (
            ClassicalVal { ks: EntropyInterval::ZERO, hcpa: EntropyInterval::ZERO, ergodic: Ergodicity::Ergodic },
            "rotation_entropy",
            "h = 0",
        ),
        ClassicalSpec::AlgebraicDual { f, n } => {
            if *n == Multiplicity::Finite(0) {
                return Err(invalid(path, "n must be at least 1"));
            }
            let (m, w) = env.mahler(path, f)?;
            warnings.extend(w);
            let ks = times(*n, m.value);
            // roots of unity among the roots of f are exactly the obstruction to ergodicity
            let ergodic = if m.split.cyclo_factors.is_empty() { Ergodicity::Ergodic } else { Ergodicity::NonErgodic };
            (ClassicalVal { ks, hcpa: ks, ergodic }, "algebraic_dual_entropy", "h = n·m(f)")
        }
        ClassicalSpec::Product { left, right, ergodic_override } => {
            let (a, b) = join(
                || eval_classical(left, &child(path, "left"), env),
                || eval_classical(right, &child(path, "right"), env),
            );
            let ((a, ta), (b, tb)) = (a?, b?);
            trace.extend(ta);
            trace.extend(tb);
            let ks = a.ks.add(&b.ks);
            let ergodic = match (a.ergodic, b.ergodic) {
                (Ergodicity::NonErgodic, _) | (_, Ergodicity::NonErgodic) => Ergodicity::NonErgodic,
                (Ergodicity::Ergodic, Ergodicity::Ergodic) if *ergodic_override => {
                    assumptions.push("product declared ergodic");
                    Ergodicity::Ergodic
                }
                _ => Ergodicity::Unknown,
            };
            let hcpa = if ergodic == Ergodicity::Ergodic {
                ks
            } else {
                EntropyInterval { lo: a.hcpa.lo.max(b.hcpa.lo), hi: a.hcpa.hi.add_up(b.hcpa.hi) }
            };
            (ClassicalVal { ks, hcpa, ergodic }, "ks_additivity", "h(T×S) = h(T) + h(S); max hcpa ≤ hcpa(T×S) ≤ Σ hcpa")
        }
        ClassicalSpec::Power { m, inner } => {
            let c = check_power(path, *m)?;
            let (a, t) = eval_classical(inner, &child(path, "inner"), env)?;
            trace.extend(t);
            let ergodic = match a.ergodic {
                Ergodicity::NonErgodic => Ergodicity::NonErgodic,
                e if *m == 1 => e,
                _ => Ergodicity::Unknown,
            };
            (ClassicalVal { ks: a.ks.scale(c), hcpa: a.hcpa.scale(c), ergodic }, "power_scaling", "h(T^m) = m·h(T)")
        }
        ClassicalSpec::Flow { t, inner } => {
            check_time(path, *t)?;
            let (a, tr) = eval_classical(inner, &child(path, "inner"), env)?;
            trace.extend(tr);
            if *t == 0.0 {
                warnings.push("time-0 map is the identity; entropy 0 by convention".into());
            }
            let ergodic = match a.ergodic {
                Ergodicity::NonErgodic if *t != 0.0 => Ergodicity::NonErgodic,
                e if t.abs() == 1.0 => e,
                _ => Ergodicity::Unknown,
            };
            let c = t.abs();
            (ClassicalVal { ks: a.ks.scale(c), hcpa: a.hcpa.scale(c), ergodic }, "flow_scaling", "h(F_t) = |t|·h(F_1)")
        }
        ClassicalSpec::WeightedUnion { left, right, lambda } => {
            if !(*lambda > 0.0 && *lambda < 1.0) {
                return Err(invalid(path, format!("lambda must lie in (0, 1), got {lambda}")));
            }
            let (a, b) = join(
                || eval_classical(left, &child(path, "left"), env),
                || eval_classical(right, &child(path, "right"), env),
            );
            let ((a, ta), (b, tb)) = (a?, b?);
            trace.extend(ta);
            trace.extend(tb);
            let (mu_lo, mu_hi) = one_minus(*lambda);
            let ks = EntropyInterval {
                lo: a.ks.lo.scale_down(*lambda).add_down(b.ks.lo.scale_down(mu_lo)),
                hi: a.ks.hi.scale_up(*lambda).add_up(b.ks.hi.scale_up(mu_hi)),
            };
            (
                ClassicalVal { ks, hcpa: a.hcpa.max(&b.hcpa), ergodic: Ergodicity::NonErgodic },
                "convex_combination",
                "h = λ·h(T_1) + (1-λ)·h(T_2); hcpa = max(hcpa(T_1), hcpa(T_2))",
            )
        }
    };
    trace.push(TraceEntry {
        path: path.to_string(),
        node: s.kind(),
        rule,
        basis,
        implicit: false,
        assumptions,
        values: TraceValues::Classical { ks: val.ks, hcpa: val.hcpa, ergodic: val.ergodic },
        warnings,
    });
    Ok((val, trace))
}

struct QuantumVal {
    cartan: Val,
    total: Val,
}

/// Checks the twisted-torus hypotheses on `f` and returns any warnings.
fn twisted_torus_hypotheses(path: &str, f: &LaurentPoly, m: &MahlerResult) -> Result<Vec<String>, CalculusError> {
    let hyp = |msg: String| CalculusError::Hypothesis(format!("{path}: {msg}"));
    if f.degree() == 0 {
        return if f.leading().map(|c| c.magnitude() <= &1u32.into()).unwrap_or(true) {
            Err(hyp(format!("f = {f} is a unit; the twisted torus needs f ≠ 1")))
        } else {
            Ok(Vec::new())
        };
    }
    let unit = |c: Option<&num_bigint::BigInt>| c.map(|c| c.magnitude() == &1u32.into()).unwrap_or(false);
    if !unit(f.leading()) || !unit(f.lowest()) {
        return Err(hyp(format!(
            "the leading and lowest coefficients of f must be ±1 (Laurent-unit ends); f = {f} has leading {} and lowest {}",
            f.leading().expect("nonzero"),
            f.lowest().expect("nonzero")
        )));
    }
    if !m.split.cyclo_factors.is_empty() {
        let list: Vec<String> = m.split.cyclo_factors.iter().map(|(d, k)| format!("Φ_{d}^{k}")).collect();
        return Err(hyp(format!("f must have no roots of modulus 1; f has cyclotomic factors {}", list.join("·"))));
    }
    let balls: Vec<_> = m.root_contributions.iter().map(|rc| &rc.ball).collect();
    let reciprocal = m.split.remainder.is_self_reciprocal();
    let mut warnings = Vec::new();
    for (i, b) in balls.iter().enumerate() {
        if b.off_unit_circle() {
            continue;
        }
        if reciprocal && b.cluster.is_none() && unimodular_by_symmetry(i, &balls) {
            let (re, im) = b.center();
            return Err(hyp(format!(
                "f must have no roots of modulus 1; f has a certified root of modulus 1 near {re:.12} {} {:.12}i",
                if im < 0.0 { "-" } else { "+" },
                im.abs()
            )));
        }
        let (re, im) = b.center();
        warnings.push(format!(
            "hypothesis unverifiable: the root ball at {re:.6}{:+.6}i meets the unit circle; the interval rule is applied anyway",
            im
        ));
    }
    Ok(warnings)
}

/// For a self-reciprocal real polynomial, an isolated ball meeting the unit
/// circle whose 6r-neighbourhood meets no other ball holds a root `λ` with
/// `1/λ̄` in that neighbourhood, hence `λ = 1/λ̄`.
fn unimodular_by_symmetry(i: usize, balls: &[&crate::roots::ComplexBall]) -> bool {
    let r = balls[i].radius();
    if r.is_nan() || r > 0.01 {
        return false;
    }
    let (x, y) = balls[i].center();
    balls.iter().enumerate().filter(|&(j, _)| j != i).all(|(_, b)| {
        let (u, v) = b.center();
        let d = (x - u).hypot(y - v);
        d * (1.0 - 1e-12) - 1e-14 > 6.0 * r + b.radius()
    })
}

fn eval_quantum(q: &QuantumSpec, path: &str, env: &Env<'_>) -> Traced<QuantumVal> {
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let mut assumptions = Vec::new();
    let mut implicit = false;
    let (val, rule, basis) = match q {
        QuantumSpec::CrossedProduct { system } => {
            let (c, t) = eval_classical(system, &child(path, "system"), env)?;
            trace.extend(t);
            assumptions.push("T commutes with a free ergodic action of an amenable group");
            let total = if c.ergodic == Ergodicity::Ergodic {
                c.ks
            } else {
                EntropyInterval { lo: c.ks.lo, hi: c.ks.hi.max(c.hcpa.hi) }
            };
            (
                QuantumVal { cartan: Val::of(c.ks), total: Val::of(total) },
                "crossed_product_equality",
                "H(α_T|A) = h(T); H(α_T) = h(T); hcpa(α_T) = hcpa(T)",
            )
        }
        QuantumSpec::TwistedTorus { f, n } => {
            if let Multiplicity::Finite(k) = n {
                if *k < 2 {
                    return Err(invalid(path, format!("n must be at least 2, got {k}")));
                }
            }
            let (m, w) = env.mahler(path, f)?;
            warnings.extend(w);
            warnings.extend(twisted_torus_hypotheses(path, f, &m)?);
            let mv = m.value;
            let total = match n {
                Multiplicity::Finite(k) => {
                    EntropyInterval { lo: mv.lo.scale_down(*k as f64), hi: mv.hi.scale_up((*k + 1) as f64) }
                }
                Multiplicity::Infinite => infinite_multiple(mv),
            };
            (
                QuantumVal { cartan: Val::of(mv), total: Val::of(total) },
                "twisted_torus_bounds",
                "H(α|A) = m(f); n·m(f) ≤ H(α) ≤ (n+1)·m(f)",
            )
        }
        QuantumSpec::TwistedTorusSpecial => (
            QuantumVal { cartan: Val::ln2_multiple(1.0), total: Val::ln2_multiple(2.0) },
            "special_character_preset",
            "f = 2, n = 2, special χ: H(α|A) = log 2; H(α) = 2 log 2",
        ),
        QuantumSpec::Padic { p } => {
            if *p < 3 || !is_prime(*p) {
                return Err(invalid(path, format!("p must be an odd prime, got {p}")));
            }
            (
                QuantumVal { cartan: Val::ln2_multiple(0.0), total: Val::ln2_multiple(1.0) },
                "padic_preset",
                "H(α|A) = 0; H(α) = hcpa(α) = log 2",
            )
        }
        QuantumSpec::Tensor { left, right } => {
            let (a, b) = join(
                || eval_quantum(left, &child(path, "left"), env),
                || eval_quantum(right, &child(path, "right"), env),
            );
            let ((a, ta), (b, tb)) = (a?, b?);
            trace.extend(ta);
            trace.extend(tb);
            implicit = true;
            (
                QuantumVal { cartan: a.cartan.add(b.cartan), total: a.total.add(b.total) },
                "tensor_additivity",
                "H(α⊗β|A⊗B) = H(α|A) + H(β|B); H superadditive; hcpa subadditive",
            )
        }
        QuantumSpec::Power { m, inner } => {
            let c = check_power(path, *m)?;
            let (a, t) = eval_quantum(inner, &child(path, "inner"), env)?;
            trace.extend(t);
            (
                QuantumVal { cartan: a.cartan.scale(c), total: a.total.scale(c) },
                "power_scaling",
                "H(α^m) = m·H(α); hcpa(α^m) = m·hcpa(α)",
            )
        }
        QuantumSpec::Flow { t, inner } => {
            check_time(path, *t)?;
            let (a, tr) = eval_quantum(inner, &child(path, "inner"), env)?;
            trace.extend(tr);
            if *t == 0.0 {
                warnings.push("time-0 map is the identity; entropy 0 by convention".into());
            }
            let c = t.abs();
            (
                QuantumVal { cartan: a.cartan.scale(c), total: a.total.scale(c) },
                "flow_scaling",
                "H(α_t) = |t|·H(α_1); hcpa(α_t) = |t|·hcpa(α_1)",
            )
        }
        QuantumSpec::InfiniteTensorPower { inner } => {
            let (a, t) = eval_quantum(inner, &child(path, "inner"), env)?;
            trace.extend(t);
            let lift = |v: Val| match v.ln2 {
                Some(k) => Val::ln2_multiple(if k > 0.0 { f64::INFINITY } else { 0.0 }),
                None => Val::of(infinite_multiple(v.iv)),
            };
            (
                QuantumVal { cartan: lift(a.cartan), total: lift(a.total) },
                "infinite_tensor_power",
                "⊗^∞: ∞ when the factor value is positive, 0 when it is 0",
            )
        }
    };
    debug_assert!(val.total.iv.lo >= val.cartan.iv.lo, "{path}: total below cartan");
    trace.push(TraceEntry {
        path: path.to_string(),
        node: q.kind(),
        rule,
        basis,
        implicit,
        assumptions,
        values: TraceValues::Quantum { cartan: val.cartan.iv, total: val.total.iv },
        warnings,
    });
    Ok((val, trace))
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn check_eps(eps: f64) -> Result<(), CalculusError> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(CalculusError::InvalidSpec(format!("eps must be positive, got {eps}")))
    }
}

pub fn classical_entropy(s: &ClassicalSpec, eps: f64) -> Result<ClassicalEntropyReport, CalculusError> {
    classical_entropy_with(s, eps, &MahlerOptions::default())
}

pub fn classical_entropy_with(
    s: &ClassicalSpec,
    eps: f64,
    opts: &MahlerOptions,
) -> Result<ClassicalEntropyReport, CalculusError> {
    check_eps(eps)?;
    let (v, trace) = eval_classical(s, "$", &Env { eps, opts })?;
    Ok(ClassicalEntropyReport { ks: v.ks, hcpa: v.hcpa, ergodic: v.ergodic, trace })
}

pub fn quantum_entropy(q: &QuantumSpec, eps: f64) -> Result<EntropyReport, CalculusError> {
    quantum_entropy_with(q, eps, &MahlerOptions::default())
}

pub fn quantum_entropy_with(q: &QuantumSpec, eps: f64, opts: &MahlerOptions) -> Result<EntropyReport, CalculusError> {
    check_eps(eps)?;
    let (v, trace) = eval_quantum(q, "$", &Env { eps, opts })?;
    Ok(EntropyReport { cartan: v.cartan.iv, total: v.total.iv, trace })
}

pub fn evaluate(spec: &SystemSpec, eps: f64, opts: &MahlerOptions) -> Result<Report, CalculusError> {
    Ok(match spec {
        SystemSpec::Quantum(q) => Report::Quantum(quantum_entropy_with(q, eps, opts)?),
        SystemSpec::Classical(c) => Report::Classical(classical_entropy_with(c, eps, opts)?),
    })
}
