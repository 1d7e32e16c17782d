use thiserror::Error;

use crate::cycles::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("product point needs at least 2 blocks, got {0}")]
    TooFewBlocks(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("right-hand side is not in the range of Id - R: block-sum norm {block_sum_norm:e} exceeds {tol:e}")]
    NotInRange { block_sum_norm: f64, tol: f64 },

    #[error("linear system is numerically singular (pivot ratio {pivot_ratio:e})")]
    SingularSystem { pivot_ratio: f64 },

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("block {index}: {source}")]
    Block {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),

    #[error(
        "no cycle after {} iterations (residual {:e}{}); a cycle exists iff every F_i is nonempty",
        .0.iterations,
        .0.final_residual(),
        if .0.stalled { ", stalled" } else { "" }
    )]
    NoConvergence(Box<SolveReport>),

    #[error("point is not in F_{index} (cyclic residual {residual:e} > {tol:e})")]
    NotAFixedPoint {
        index: usize,
        residual: f64,
        tol: f64,
    },

    #[error("sample {sample} is not in F_{index} (cyclic residual {residual:e})")]
    SampleNotInFi {
        sample: usize,
        index: usize,
        residual: f64,
    },

    #[error("block index {index} out of range for {m} blocks")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("{problem} solution is not a singleton (singular sum)")]
    SingularSum { problem: &'static str },

    #[error("operator {which} is not invertible as an affine map")]
    SingularFactor { which: &'static str },

    #[error("operator {index} is not affine")]
    NotAffine { index: usize },

    #[error("cycle is invalid: composed residual {residual:e} > {tol:e}")]
    CycleInvalid { residual: f64, tol: f64 },

    #[error("grid intersected with the set is empty")]
    EmptyGridIntersection,

    #[error("right-hand side is inconsistent (least-squares residual {0:e})")]
    Inconsistent(f64),
}

impl Error {
    pub(crate) fn in_block(self, index: usize) -> Self {
        Error::Block {
            index,
            source: Box::new(self),
        }
    }
}
