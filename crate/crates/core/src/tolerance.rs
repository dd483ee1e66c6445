//! Default tolerances used across the crate.
//!
//! Two regimes: `TOL_ALG` bounds residuals of pointwise algebra (products,
//! representations, trace identities) where only f64 rounding enters, and
//! `TOL_GEO` bounds anything that goes through a finite-difference stencil
//! (curvature, spin-connection coefficients, covariant derivatives of
//! sampled fields). Both are overridable from the CLI.

/// Pointwise algebraic identities: rounding noise only.
pub const TOL_ALG: f64 = 1e-9;

/// Identities that involve numerical derivatives of the metric or tetrad.
pub const TOL_GEO: f64 = 1e-5;

/// Residuals of exact small-integer arithmetic.
pub const TOL_EXACT: f64 = 1e-12;

/// Relative slack accepted when testing ideal membership of floating inputs.
pub const IDEAL_MEMBERSHIP_REL: f64 = 1e-10;

/// A check fails outright only above `FAIL_MARGIN * tol`; the band between
/// `tol` and that limit is reported as inconclusive so stencil noise cannot
/// flip a classification.
pub const FAIL_MARGIN: f64 = 10.0;
