//! Topological invariants of Hermitian operator families.
//!
//! The crate covers three layers that feed each other:
//!
//! * [`clifford`]: standard graded and ungraded Clifford representations,
//!   the linear `μ`-maps and the suspension formula.
//! * [`local_model`], [`toeplitz`]: the 4×4 local edge model in closed form
//!   and the numerical Toeplitz truncation it is checked against.
//! * [`bloch`], [`fermi`]: bulk second Chern numbers on `T⁴`, Fermi-point
//!   sign counts over parameter manifolds, spectral flow and the bulk-edge
//!   identity `c₂ = −(edge index)`.
//!
//! [`catalog`] holds the worked families used by the CLI and the tests.

pub mod bloch;
pub mod catalog;
pub mod clifford;
pub mod error;
pub mod fermi;
pub mod linalg;
pub mod local_model;
pub mod manifold;
pub mod toeplitz;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
