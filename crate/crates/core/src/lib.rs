//! Rational Gaussian and orthogonal quadrature on [-1, 1] for integrands
//! with poles outside the interval, in arbitrary precision.
//!
//! Rules are exact (Gaussian) or orthogonality-based (orthogonal) on the
//! span of `1/(1 + t_i x)` for a user-supplied parameter sequence `t_i` in
//! (-1, 1). They are computed from modified moments of a rational weight,
//! the modified Chebyshev algorithm, and the Jacobi matrix eigenproblem.

pub mod analysis;
pub mod error;
pub mod integrands;
pub mod moments;
pub mod numerics;
pub mod params;
pub mod recurrence;
pub mod rules;

pub use error::{Error, Result};
pub use numerics::{make_context, PrecisionContext, Real};
pub use params::{BaseWeight, ModifiedWeight, ParamEntry, ParameterSet};
pub use recurrence::RecurrenceCoeffs;
pub use rules::{QuadratureRule, RuleKind};
