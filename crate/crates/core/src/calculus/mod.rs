//! Entropy calculus for classical systems and their crossed products.
//!
//! Specs are evaluated bottom-up into [`EntropyInterval`]s. Each rule records a
//! [`TraceEntry`] in post-order, so a report shows how every bound was derived.

mod eval;
mod spec;

use thiserror::Error;

pub use eval::{
    classical_entropy, classical_entropy_with, evaluate, quantum_entropy, quantum_entropy_with, ClassicalEntropyReport,
    EntropyReport, Ergodicity, Report, TraceEntry, TraceValues,
};
pub use spec::{ClassicalSpec, Multiplicity, QuantumSpec, SystemSpec};

use crate::entropy::{EntropyInterval, ExtReal};
use crate::mahler::MahlerError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error(transparent)]
    Mahler(#[from] MahlerError),
}

/// Preset with Cartan entropy 0 and total entropy `log 2`.
fn padic() -> QuantumSpec {
    QuantumSpec::Padic { p: 3 }
}

/// Crossed product of the fair coin flip: Cartan and total entropy `log 2`.
fn coin() -> QuantumSpec {
    QuantumSpec::CrossedProduct { system: ClassicalSpec::fair_coin() }
}

fn flow_or_self(q: QuantumSpec, time: f64) -> QuantumSpec {
    if time == 1.0 {
        q
    } else {
        q.flow(time)
    }
}

/// A system whose Cartan entropy is `s` and total entropy is `t`.
///
/// Finite targets are reached by flowing the coin crossed product (equal
/// entropies) and the p-adic preset (pure gap) for times measured in units of
/// `log 2`, then tensoring. Infinite targets use infinite tensor powers.
pub fn synthesize_pair(s: ExtReal, t: ExtReal) -> Result<QuantumSpec, CalculusError> {
    if s > t {
        return Err(CalculusError::InvalidTarget(format!("s ≤ t required, got s = {s}, t = {t}")));
    }
    let ln2 = std::f64::consts::LN_2;
    let spec = match (s.is_infinite(), t.is_infinite()) {
        (true, _) => coin().infinite_tensor_power(),
        (false, true) if s.is_zero() => padic().infinite_tensor_power(),
        (false, true) => QuantumSpec::tensor(flow_or_self(coin(), s.value() / ln2), padic().infinite_tensor_power()),
        (false, false) if t.is_zero() => QuantumSpec::CrossedProduct { system: ClassicalSpec::IrrationalRotation },
        (false, false) if s.is_zero() => flow_or_self(padic(), t.value() / ln2),
        (false, false) if s == t => flow_or_self(coin(), s.value() / ln2),
        (false, false) => QuantumSpec::tensor(
            flow_or_self(padic(), (t.value() - s.value()) / ln2),
            flow_or_self(coin(), s.value() / ln2),
        ),
    };
    Ok(spec)
}

/// Distance from `x` to the interval, with `∞` matched only by an infinite endpoint.
pub fn miss_distance(iv: &EntropyInterval, x: ExtReal) -> f64 {
    if x.is_infinite() {
        return if iv.lo.is_infinite() { 0.0 } else { f64::INFINITY };
    }
    if iv.hi.is_infinite() {
        return if iv.lo.is_infinite() { f64::INFINITY } else { (iv.lo.value() - x.value()).max(0.0) };
    }
    (iv.lo.value() - x.value()).max(x.value() - iv.hi.value()).max(0.0)
}

#[cfg(test)]
mod tests;
