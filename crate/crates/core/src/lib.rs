//! Certified logarithmic Mahler measures, an interval calculus for the entropy
//! of classical and crossed-product dynamical systems, and an exhaustive search
//! for small Mahler measures.

mod arith;
pub mod calculus;
pub mod entropy;
pub mod lehmer;
pub mod mahler;
pub mod poly;
pub mod roots;

pub use calculus::{classical_entropy, quantum_entropy, synthesize_pair, ClassicalSpec, QuantumSpec, SystemSpec};
pub use entropy::{EntropyInterval, ExtReal};
pub use lehmer::{canonicalize, search, SearchConfig, SearchRecord};
pub use mahler::{mahler, mahler_from_roots, mahler_jensen, MahlerError, MahlerResult};
pub use poly::{parse, CyclotomicSplit, LaurentPoly, PolyError};
pub use roots::{roots_with_radii, ComplexBall};
