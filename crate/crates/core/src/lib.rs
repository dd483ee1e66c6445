//! Core library: real Clifford algebras, spinor ideals and their 2x2 complex
//! matrix representation, a small metric expression language, and a numerical
//! Lorentzian geometry layer (tetrads, curvature, spin connection) with a
//! constraint checker that classifies frame fields per spacetime.
//!
//! Everything is built around three concrete algebras: the spacetime algebra
//! Cl(1,3), the Pauli algebra Cl(3,0) and the quaternions Cl(0,2). All values
//! are immutable after construction and all operations are pure, so the types
//! here can be shared freely across threads.

// tensor index loops read better than iterator chains
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod checks;
pub mod connection;
pub mod error;
pub mod expr;
pub mod fd;
pub mod geometry;
pub mod ideals;
pub mod linalg;
pub mod matrix;
pub mod selftest;
pub mod tolerance;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
