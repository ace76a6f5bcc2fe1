use thiserror::Error;

use crate::trig::VarKind;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("antiderivative requested in periodic variable {0}; use the Fourier mean")]
    PeriodicAntiderivative(usize),
    #[error("variable {var} has the wrong kind, expected {expected:?}")]
    WrongVarKind { var: usize, expected: VarKind },
    #[error("phase is not a quarter turn: {0}")]
    InexactPhase(String),
    #[error("pullback of variable {0} is not affine-compatible")]
    NonAffinePullback(usize),
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a function (degree-0 form without θ-part)")]
    NotAFunction,
    #[error("slot index {r} out of range 1..={n}")]
    SlotOutOfRange { r: usize, n: usize },
    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
