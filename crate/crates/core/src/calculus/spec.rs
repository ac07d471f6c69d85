//! Expression trees for classical and crossed-product systems.
//!
//! The JSON form tags every node with a `kind` field, e.g.
//! `{"kind":"flow","t":2.0,"inner":{"kind":"padic","p":3}}`. Polynomial fields
//! use the text form of [`LaurentPoly`].

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::poly::LaurentPoly;

/// Number of copies: a positive integer or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(n) => s.serialize_u64(*n),
            Multiplicity::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(Multiplicity::Finite(n)),
            Raw::Str(s) if matches!(s.trim().to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") => {
                Ok(Multiplicity::Infinite)
            }
            Raw::Str(s) => Err(serde::de::Error::custom(format!("expected a positive integer or \"inf\", got {s:?}"))),
        }
    }
}

/// A measure-preserving transformation of a probability space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassicalSpec {
    /// Full shift with marginal `p`.
    Bernoulli {
        p: Vec<f64>,
    },
    /// Stationary Markov shift with transition matrix `matrix` and stationary row vector.
    Markov {
        matrix: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
    IrrationalRotation,
    /// Dual of multiplication by `t` on `n` copies of `Z[t, 1/t]/(f)`.
    AlgebraicDual {
        f: LaurentPoly,
        n: Multiplicity,
    },
    Product {
        left: Box<ClassicalSpec>,
        right: Box<ClassicalSpec>,
        /// Declares the product ergodic (e.g. disjoint spectra); never verified.
        #[serde(default, skip_serializing_if = "is_false")]
        ergodic_override: bool,
    },
    Power {
        m: u64,
        inner: Box<ClassicalSpec>,
    },
    /// Time-`t` map of the unit-roof suspension flow.
    Flow {
        t: f64,
        inner: Box<ClassicalSpec>,
    },
    /// `left` on mass `lambda`, `right` on mass `1 - lambda`.
    WeightedUnion {
        left: Box<ClassicalSpec>,
        right: Box<ClassicalSpec>,
        lambda: f64,
    },
}

/// An automorphism of a von Neumann algebra with a distinguished Cartan subalgebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QuantumSpec {
    /// `L∞(X) ⋊ G` with `T` commuting with a free ergodic amenable action of `G` (declared).
    CrossedProduct {
        system: ClassicalSpec,
    },
    /// Twisted crossed product over the dual of `n` copies of `Z[t, 1/t]/(f)`.
    TwistedTorus {
        f: LaurentPoly,
        n: Multiplicity,
    },
    /// `f = 2`, `n = 2` with the special character for which the total entropy is `2 log 2`.
    TwistedTorusSpecial,
    /// The p-adic construction with Cartan entropy 0 and total entropy `log 2`.
    Padic {
        p: u64,
    },
    Tensor {
        left: Box<QuantumSpec>,
        right: Box<QuantumSpec>,
    },
    Power {
        m: u64,
        inner: Box<QuantumSpec>,
    },
    Flow {
        t: f64,
        inner: Box<QuantumSpec>,
    },
    InfiniteTensorPower {
        inner: Box<QuantumSpec>,
    },
}

/// Either kind of system; quantum interpretations take precedence when a
/// document parses both ways.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Quantum(QuantumSpec),
    Classical(ClassicalSpec),
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl SystemSpec {
    pub fn from_json(text: &str) -> Result<SystemSpec, String> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        SystemSpec::from_value(value)
    }

    pub fn from_value(value: serde_json::Value) -> Result<SystemSpec, String> {
        let quantum = QuantumSpec::deserialize(&value);
        let q_err = match quantum {
            Ok(q) => return Ok(SystemSpec::Quantum(q)),
            Err(e) => e.to_string(),
        };
        let c_err = match ClassicalSpec::deserialize(&value) {
            Ok(c) => return Ok(SystemSpec::Classical(c)),
            Err(e) => e.to_string(),
        };
        let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("");
        Err(match kind {
            "crossed_product"
            | "twisted_torus"
            | "twisted_torus_special"
            | "padic"
            | "tensor"
            | "infinite_tensor_power" => q_err,
            "bernoulli" | "markov" | "irrational_rotation" | "algebraic_dual" | "product" | "weighted_union" => c_err,
            _ => format!("not a quantum system ({q_err}) nor a classical one ({c_err})"),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            SystemSpec::Quantum(q) => serde_json::to_value(q),
            SystemSpec::Classical(c) => serde_json::to_value(c),
        }
        .expect("specs serialize")
    }
}

impl Serialize for SystemSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SystemSpec::Quantum(q) => q.serialize(s),
            SystemSpec::Classical(c) => c.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for SystemSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        SystemSpec::from_value(v).map_err(serde::de::Error::custom)
    }
}

impl From<QuantumSpec> for SystemSpec {
    fn from(q: QuantumSpec) -> Self {
        SystemSpec::Quantum(q)
    }
}

impl From<ClassicalSpec> for SystemSpec {
    fn from(c: ClassicalSpec) -> Self {
        SystemSpec::Classical(c)
    }
}

impl ClassicalSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassicalSpec::Bernoulli { .. } => "bernoulli",
            ClassicalSpec::Markov { .. } => "markov",
            ClassicalSpec::IrrationalRotation => "irrational_rotation",
            ClassicalSpec::AlgebraicDual { .. } => "algebraic_dual",
            ClassicalSpec::Product { .. } => "product",
            ClassicalSpec::Power { .. } => "power",
            ClassicalSpec::Flow { .. } => "flow",
            ClassicalSpec::WeightedUnion { .. } => "weighted_union",
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            ClassicalSpec::Product { left, right, .. } | ClassicalSpec::WeightedUnion { left, right, .. } => {
                1 + left.size() + right.size()
            }
            ClassicalSpec::Power { inner, .. } | ClassicalSpec::Flow { inner, .. } => 1 + inner.size(),
            _ => 1,
        }
    }

    pub fn fair_coin() -> ClassicalSpec {
        ClassicalSpec::Bernoulli { p: vec![0.5, 0.5] }
    }
}

impl QuantumSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            QuantumSpec::CrossedProduct { .. } => "crossed_product",
            QuantumSpec::TwistedTorus { .. } => "twisted_torus",
            QuantumSpec::TwistedTorusSpecial => "twisted_torus_special",
            QuantumSpec::Padic { .. } => "padic",
            QuantumSpec::Tensor { .. } => "tensor",
            QuantumSpec::Power { .. } => "power",
            QuantumSpec::Flow { .. } => "flow",
            QuantumSpec::InfiniteTensorPower { .. } => "infinite_tensor_power",
        }
    }

    pub fn size(&self) -> usize {
        match self {
            QuantumSpec::CrossedProduct { system } => 1 + system.size(),
            QuantumSpec::Tensor { left, right } => 1 + left.size() + right.size(),
            QuantumSpec::Power { inner, .. }
            | QuantumSpec::Flow { inner, .. }
            | QuantumSpec::InfiniteTensorPower { inner } => 1 + inner.size(),
            _ => 1,
        }
    }

    pub fn tensor(left: QuantumSpec, right: QuantumSpec) -> QuantumSpec {
        QuantumSpec::Tensor { left: Box::new(left), right: Box::new(right) }
    }

    pub fn flow(self, t: f64) -> QuantumSpec {
        QuantumSpec::Flow { t, inner: Box::new(self) }
    }

    pub fn power(self, m: u64) -> QuantumSpec {
        QuantumSpec::Power { m, inner: Box::new(self) }
    }

    pub fn infinite_tensor_power(self) -> QuantumSpec {
        QuantumSpec::InfiniteTensorPower { inner: Box::new(self) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let docs = [
            r#"{"kind":"tensor","left":{"kind":"padic","p":3},"right":{"kind":"twisted_torus","f":"t^2 - t - 1","n":2}}"#,
            r#"{"kind":"flow","t":-2.0,"inner":{"kind":"bernoulli","p":[0.5,0.5]}}"#,
            r#"{"kind":"algebraic_dual","f":"t - 2","n":"inf"}"#,
            r#"{"kind":"weighted_union","left":{"kind":"irrational_rotation"},"right":{"kind":"markov","matrix":[[0.5,0.5],[1.0,0.0]],"stationary":[0.6666666666666666,0.3333333333333333]},"lambda":0.25}"#,
            r#"{"kind":"infinite_tensor_power","inner":{"kind":"crossed_product","system":{"kind":"bernoulli","p":[0.5,0.5]}}}"#,
        ];
        for doc in docs {
            let spec = SystemSpec::from_json(doc).unwrap();
            let again = SystemSpec::from_json(&spec.to_json().to_string()).unwrap();
            assert_eq!(spec, again, "{doc}");
        }
    }

    #[test]
    fn power_and_flow_resolve_by_leaf() {
        let q = SystemSpec::from_json(r#"{"kind":"power","m":5,"inner":{"kind":"padic","p":3}}"#).unwrap();
        assert!(matches!(q, SystemSpec::Quantum(_)));
        let c = SystemSpec::from_json(r#"{"kind":"power","m":5,"inner":{"kind":"bernoulli","p":[1.0]}}"#).unwrap();
        assert!(matches!(c, SystemSpec::Classical(_)));
    }

    #[test]
    fn schema_errors_name_the_problem() {
        let e = SystemSpec::from_json(r#"{"kind":"padic","q":3}"#).unwrap_err();
        assert!(e.contains("q") || e.contains("p"), "{e}");
        let e = SystemSpec::from_json(r#"{"kind":"twisted_torus","f":"t^","n":2}"#).unwrap_err();
        assert!(!e.is_empty());
        assert!(SystemSpec::from_json(r#"{"kind":"nonsense"}"#).is_err());
        assert!(SystemSpec::from_json(r#"{"kind":"algebraic_dual","f":"t-2","n":"many"}"#).is_err());
    }
}
