use thiserror::Error;

use crate::exact::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which of the three (c, d) admissibility inequalities failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CdCondition {
    /// c > 2n(1 - 1/m) - 2
    C,
    /// d > 2n(1 - 1/m) - 2
    D,
    /// c + d > 2n(2 - 1/m) - 2
    Sum,
}

impl std::fmt::Display for CdCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CdCondition::C => f.write_str("c > 2n(1-1/m)-2"),
            CdCondition::D => f.write_str("d > 2n(1-1/m)-2"),
            CdCondition::Sum => f.write_str("c+d > 2n(2-1/m)-2"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape m={m}, n={n}: both must be positive")]
    InvalidShape { m: i64, n: i64 },

    #[error("exponent p = {0} must satisfy p >= 1")]
    ExponentBelowOne(Rational),

    #[error("invalid lattice index ({a1}, {a2}): the z1 exponent must be nonnegative")]
    NegativeZ1Exponent { a1: i64, a2: i64 },

    #[error("interval lower endpoint {0} is below 1")]
    IntervalBelowOne(Rational),

    #[error("(c, d) bound is not admissible: condition {0} fails")]
    Inadmissible(CdCondition),

    #[error("Schur parameters must satisfy 0 <= alpha < beta and 0 <= gamma < delta")]
    SchurOrdering,

    #[error("index ({a1}, {a2}) is not in the {basis} index set; see is_allowable")]
    NotAllowable { a1: i64, a2: i64, basis: &'static str },

    #[error("point is outside the domain: {0}")]
    DomainMembership(String),

    #[error("kernel/bound shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite integrand value at {location}")]
    Singularity { location: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("config error: {0}")]
    Config(String),
}
