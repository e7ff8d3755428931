use thiserror::Error;

use crate::families::HypothesisFailure;
use crate::ratgeom::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("matrix has rank {rank} but {cols} columns; full column rank required")]
    RankDeficient { rank: usize, cols: usize },

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("inequality is identically zero")]
    ZeroInequality,

    #[error("inequality is not valid for polytope {polytope}: max of lhs is {max}, rhs is {rhs}")]
    InvalidForPolytope {
        polytope: usize,
        max: Rational,
        rhs: Rational,
    },

    #[error("inequality {inequality} is violated by a lifted extreme point of polytope {polytope}")]
    InvalidForHull { inequality: String, polytope: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("oracle needs {candidates} candidate subsets, cap is {cap}")]
    OracleCapExceeded { candidates: u128, cap: u128 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("x >= 0 is not valid: polytope {polytope} has an extreme point with a negative coordinate")]
    NonnegativityFails { polytope: usize },

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("hypothesis failure: {0}")]
    Hypothesis(HypothesisFailure),

    #[error("internal error: {0}")]
    Internal(String),
}
