//! Exact polynomial algebra for Keller maps.

pub mod arith;
pub mod error;
pub mod experiments;
pub mod groebner;
pub mod keller;
pub mod parse;
pub mod poly;
pub mod polymap;
pub mod sample;
pub mod skeller;

pub use arith::{Fp, Integer, Rational, Ring, Scalar};
pub use error::{Error, Result};
pub use groebner::{groebner_basis, GroebnerBasis, GroebnerOptions, Ideal};
pub use poly::{Monomial, MonomialOrder, Polynomial, VariableSet};
pub use polymap::{PolyMap, PolyMatrix, TameFactor, TameRecipe};
pub use keller::{builtin_radical_generators, GeneratorCertificate, GeneratorSet, KellerSystem};
pub use skeller::{bounded_lift, keller_check, strong_keller_check, LiftOptions, Outcome, Verdict};
