use thiserror::Error;

use crate::affine::AffineTier;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is singular")]
    Singular,

    #[error("tier: {found:?}, expected {expected:?}")]
    Tier { found: AffineTier, expected: AffineTier },

    #[error("degenerate polytope: affine hull has dimension {found}, expected {expected}")]
    Degenerate { found: usize, expected: usize },

    #[error("unknown builtin presentation `{0}`")]
    UnknownBuiltin(String),

    #[error("point lies outside the chart domain")]
    OutsideDomain,

    #[error("sections coincide identically; no transverse intersection")]
    NonTransverse,

    #[error("presentation is not orientable; only unsigned counts are available")]
    NonOrientable,

    #[error("form is not closed")]
    NotClosed,

    #[error("form is not invariant under the fibre torus action; average it first")]
    NotInvariant,

    #[error("ambient mismatch: {0}")]
    Ambient(String),

    #[error("phase e^(2πi·{0}) is not a Gaussian rational")]
    InexactPhase(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
