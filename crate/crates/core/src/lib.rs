//! Exact entire cyclic chains of torus-invariant differential forms.
//!
//! The crate builds odd and even Chern chains of unitary matrix functions on
//! tori, checks the cyclic-complex identities they satisfy, evaluates chains
//! on affine loop families through the equivariant Chen integral, and compares
//! the result with a numerically integrated Bismut–Chern character.

pub mod chen;
pub mod cyclic;
pub mod error;
pub mod bismut;
pub mod chern;
pub mod corpus;
pub mod form;
pub mod matrix;
pub mod norms;
pub mod quadrature;
pub mod random;
pub mod scalar;
pub mod serialize;
pub mod suites;
pub mod trig;

pub use chen::Plot;
pub use cyclic::{chain_equal, Chain};
pub use error::{Error, Result};
pub use form::{Form, TTForm};
pub use scalar::Scalar;
pub use trig::{Mono, TrigPoly, VarKind, VarSpace};
