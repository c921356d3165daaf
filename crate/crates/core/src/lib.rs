//! Integral-integral affine manifolds `B = R^n / Γ`, their Lagrangian torus
//! fibrations, and the exact identities
//!
//! ```text
//! RR(M) = vol(M) = vol(B) = |B_Z| = |BS|
//! ```
//!
//! checked on quotient presentations with exact rational arithmetic.
//!
//! ```
//! use iiaffine::{builtin_presentation, verify_all, DEFAULT_WORD_BOUND};
//!
//! let q = builtin_presentation("torus-2", 3).unwrap();
//! let report = verify_all(&q, DEFAULT_WORD_BOUND, 10_000, 0).unwrap();
//! assert!(report.passed());
//! assert_eq!(report.count_bs, 9);
//! ```

pub mod affine;
pub mod al_models;
pub mod dual_bundle;
pub mod error;
pub mod forms;
pub mod io;
pub mod linalg;
pub mod quotient;
pub mod riemann_roch;
pub mod scalar;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use affine::{AffineMap, AffineTier, DEFAULT_WORD_BOUND};
pub use al_models::{ALTransition, EnhancedALModel, FibreLoop};
pub use error::{Error, Result};
pub use linalg::{Matrix, Vector};
pub use quotient::{builtin_presentation, LatticePointSet, Polytope, QuotientPresentation, BUILTIN_NAMES};
pub use riemann_roch::{verify_all, VerificationReport};
pub use scalar::Scalar;

pub type Rational = BigRational;
pub type RVector = Vector<Rational>;
pub type RMatrix = Matrix<Rational>;
pub type RAffineMap = AffineMap<Rational>;
pub type FVector = Vector<f64>;
pub type FMatrix = Matrix<f64>;
pub type FAffineMap = AffineMap<f64>;
