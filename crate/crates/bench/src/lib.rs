//! Shared fixtures for the benchmarks.

use ratquad::integrands::{param_gen_chebyshev_ladder, param_gen_sqrt};
use ratquad::{make_context, ParameterSet, PrecisionContext};

pub fn context(bits: u32) -> PrecisionContext {
    let tol = if bits >= 256 { 1e-30 } else { 1e-15 };
    make_context(bits, tol).expect("valid benchmark context")
}

/// `t_i = 1 - 1/√i`, enough slots for GR(n).
pub fn sqrt_params(n: usize, ctx: &PrecisionContext) -> ParameterSet {
    param_gen_sqrt(2 * n, ctx).expect("sqrt parameters")
}

/// Chebyshev ladder of level 3, enough slots for GR(n) up to n = 14.
pub fn ladder_params(n: usize, ctx: &PrecisionContext) -> ParameterSet {
    param_gen_chebyshev_ladder(3, 2 * n, ctx).expect("ladder parameters")
}
