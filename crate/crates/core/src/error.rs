//! Error type shared by the whole crate.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("signature mismatch: Cl({p1},{q1}) vs Cl({p2},{q2})")]
    SignatureMismatch { p1: u32, q1: u32, p2: u32, q2: u32 },

    #[error("signature Cl({p},{q}) exceeds the supported dimension (p+q <= 6)")]
    SignatureTooLarge { p: u32, q: u32 },

    #[error("grade {grade} out of range for a {dim}-dimensional algebra")]
    GradeOutOfRange { grade: u32, dim: u32 },

    #[error("basis index {index} out of range for a {dim}-dimensional algebra")]
    BasisIndexOutOfRange { index: usize, dim: u32 },

    #[error("coefficient vector has length {got}, expected {expected}")]
    CoefficientCount { got: usize, expected: usize },

    #[error("expected an element of Cl({p},{q})")]
    WrongAlgebra { p: u32, q: u32 },

    #[error("multivector has a nonzero odd part; an even element is required")]
    NotEven,

    #[error("value is not a member of the spinor ideal (residual {residual:.3e})")]
    NotInIdeal { residual: f64 },

    #[error("syntax error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("domain error evaluating `{context}`: {message}")]
    EvalDomain { context: String, message: String },

    #[error("point {point:?} lies outside the spacetime domain")]
    OutsideDomain { point: [f64; 4] },

    #[error("finite-difference stencil leaves the spacetime domain near {point:?}")]
    StencilOutsideDomain { point: [f64; 4] },

    #[error("metric is singular at {point:?}")]
    SingularMetric { point: [f64; 4] },

    #[error("metric does not have signature (+,-,-,-) at {point:?}")]
    WrongMetricSignature { point: [f64; 4] },

    #[error("tetrad does not reproduce the metric at {point:?} (residual {residual:.3e})")]
    TetradMismatch { point: [f64; 4], residual: f64 },

    #[error("frame field is not unit timelike at {point:?} (g(Z,Z) = {norm})")]
    FrameNotNormalized { point: [f64; 4], norm: f64 },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn parse(offset: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn domain(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::EvalDomain {
            context: context.into(),
            message: message.into(),
        }
    }
}
