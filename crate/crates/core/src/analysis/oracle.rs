//! Independent reference computations: Gram-Schmidt orthogonalization of
//! the rational basis, a direct Newton solve of the Gaussian exactness
//! conditions, and the L2 error of rational interpolation at the
//! orthogonal-rule nodes.
//!
//! Everything here uses only the adaptive integrator and dense linear
//! algebra; none of it touches the moment/recurrence pipeline.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{integrate_unit, powi, solve_dense, with_escalation, PrecisionContext, Real};
use crate::params::ParameterSet;
use crate::rules::{basis_functions, orthogonal_nodes, BasisFunction};

const ORACLE_MAX_N: usize = 6;
const SCAN_POINTS: usize = 2048;

fn gram_matrix(basis: &[BasisFunction], ctx: &PrecisionContext) -> Result<Vec<Vec<Real>>> {
    let m = basis.len();
    let mut g = vec![vec![ctx.zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let (a, b) = (&basis[i], &basis[j]);
            let v = integrate_unit(|x| a.eval(x) * b.eval(x), ctx)?;
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    Ok(g)
}

fn inner(u: &[Real], v: &[Real], g: &[Vec<Real>]) -> Real {
    let prec = u[0].prec();
    let mut acc = Float::new(prec);
    for (i, ui) in u.iter().enumerate() {
        if ui.is_zero() {
            continue;
        }
        for (j, vj) in v.iter().enumerate() {
            acc += Float::with_val(prec, ui * vj) * &g[i][j];
        }
    }
    acc
}

/// Coefficients of the last orthogonalized basis function in the basis of
/// `params`' slots, by modified Gram-Schmidt against the Gram matrix.
pub fn gram_schmidt_last(params: &ParameterSet, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let basis = basis_functions(params);
    let g = gram_matrix(&basis, ctx)?;
    let m = basis.len();
    let mut q: Vec<Vec<Real>> = Vec::with_capacity(m);
    for k in 0..m {
        let mut v = vec![ctx.zero(); m];
        v[k] = ctx.one();
        for qj in &q {
            let coef = inner(&v, qj, &g) / inner(qj, qj, &g);
            for (vi, qi) in v.iter_mut().zip(qj) {
                *vi -= Float::with_val(ctx.precision_bits(), &coef * qi);
            }
        }
        if inner(&v, &v, &g) <= 0u32 {
            return Err(Error::Oracle(format!("Gram-Schmidt lost positivity at step {k}")));
        }
        q.push(v);
    }
    Ok(q.pop().unwrap_or_default())
}

fn combination(coefs: &[Real], basis: &[BasisFunction], x: &Real) -> Real {
    let prec = x.prec();
    coefs
        .iter()
        .zip(basis)
        .fold(Float::new(prec), |acc, (c, phi)| acc + Float::with_val(prec, c * phi.eval(x)))
}

/// Sign changes of `f` on a Chebyshev-spaced grid, refined by bisection.
fn bracketed_zeros<F: Fn(&Real) -> Real>(f: F, ctx: &PrecisionContext) -> Vec<Real> {
    let prec = ctx.precision_bits();
    let pi = ctx.pi();
    let grid: Vec<Real> = (0..=SCAN_POINTS)
        .map(|k| -(Float::with_val(prec, &pi * k as u32) / SCAN_POINTS as u32).cos())
        .collect();
    let values: Vec<Real> = grid.iter().map(&f).collect();
    let width_goal = ctx.epsilon() << 4u32;
    let mut zeros = Vec::new();
    for k in 0..SCAN_POINTS {
        let (fa, fb) = (&values[k], &values[k + 1]);
        if fa.is_zero() {
            zeros.push(grid[k].clone());
            continue;
        }
        if fa.is_sign_negative() == fb.is_sign_negative() || fb.is_zero() {
            continue;
        }
        let (mut lo, mut hi) = (grid[k].clone(), grid[k + 1].clone());
        let lo_negative = fa.is_sign_negative();
        for _ in 0..(2 * prec) {
            if Float::with_val(prec, &hi - &lo) <= width_goal {
                break;
            }
            let mid = Float::with_val(prec, &lo + &hi) / 2u32;
            let fm = f(&mid);
            if fm.is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if fm.is_sign_negative() == lo_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        zeros.push(Float::with_val(prec, &lo + &hi) / 2u32);
    }
    if values[SCAN_POINTS].is_zero() {
        zeros.push(grid[SCAN_POINTS].clone());
    }
    zeros
}

/// Zeros of the orthogonalized rational function `r_{n+1}` for the `n + 1`
/// slots of `params`, computed at the context's precision with oracle-grade
/// integration tolerance.
pub fn gram_schmidt_oracle(params: &ParameterSet, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let slots = params.total_slots();
    if slots < 2 || slots - 1 > ORACLE_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "oracle handles 2..={} slots, got {slots}",
            ORACLE_MAX_N + 1
        )));
    }
    let n = slots - 1;
    let oc = ctx.oracle();
    let coefs = gram_schmidt_last(params, &oc)?;
    let basis = basis_functions(params);
    let zeros = bracketed_zeros(|x| combination(&coefs, &basis, x), &oc);
    if zeros.len() != n {
        return Err(Error::Oracle(format!("found {} sign changes, expected {n}", zeros.len())));
    }
    Ok(zeros)
}

/// Gauss-Legendre rule on `n <= 3` points in closed form.
fn gauss_legendre_closed(n: usize, ctx: &PrecisionContext) -> Option<(Vec<Real>, Vec<Real>)> {
    let r = |num: i64, den: i64| ctx.int(num) / ctx.int(den);
    match n {
        1 => Some((vec![ctx.zero()], vec![ctx.int(2)])),
        2 => {
            let x = r(1, 3).sqrt();
            Some((vec![-x.clone(), x], vec![ctx.one(), ctx.one()]))
        }
        3 => {
            let x = r(3, 5).sqrt();
            Some((vec![-x.clone(), ctx.zero(), x], vec![r(5, 9), r(8, 9), r(5, 9)]))
        }
        _ => None,
    }
}

/// `(x^j / P(x), d/dx of it)` for `P = prod (1 + s t x)` over `ts`.
fn g_and_derivative(j: u32, x: &Real, ts: &[Real], s: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p = Float::with_val(prec, 1);
    let mut log_d = Float::new(prec);
    for t in ts {
        let st = Float::with_val(prec, s * t);
        let f = Float::with_val(prec, &st * x) + 1u32;
        log_d += Float::with_val(prec, &st / &f);
        p *= f;
    }
    let xj = powi(x, j);
    let g = Float::with_val(prec, &xj / &p);
    let dxj = if j == 0 {
        Float::new(prec)
    } else {
        powi(x, j - 1) * j
    };
    let dg = (dxj - Float::with_val(prec, &xj * &log_d)) / &p;
    (g, dg)
}

/// Nodes and weights of the Gaussian rule for the `2n` slots of `params`
/// (`n <= 3`), by Newton's method on the exactness conditions
/// `sum beta_i x_i^j / P(x_i) = int x^j / P`, `j < 2n`, with continuation
/// from Gauss-Legendre as the parameters are scaled from 0 to their values.
pub fn brute_force_gaussian(params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<(Vec<Real>, Vec<Real>)> {
    let slots = params.prefix(2 * n)?;
    let ts = slots.slots();
    let oc = ctx.oracle();
    let prec = oc.precision_bits();
    let (mut xs, mut bs) =
        gauss_legendre_closed(n, &oc).ok_or_else(|| Error::InvalidArgument(format!("brute force handles n <= 3, got {n}")))?;
    let steps = 16u32;
    let newton_goal = Float::with_val(prec, 2f64.powf(-0.7 * f64::from(prec)));
    for step in 1..=steps {
        let s = oc.int(i64::from(step)) / steps;
        let moments = (0..2 * n as u32)
            .map(|j| {
                integrate_unit(
                    |x| {
                        let (g, _) = g_and_derivative(j, x, &ts, &s);
                        g
                    },
                    &oc,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut converged = false;
        for _ in 0..60 {
            let mut f = Vec::with_capacity(2 * n);
            let mut jac = Vec::with_capacity(2 * n);
            for (j, m) in moments.iter().enumerate() {
                let mut val = Float::with_val(prec, -m);
                let mut row = vec![oc.zero(); 2 * n];
                for i in 0..n {
                    let (g, dg) = g_and_derivative(j as u32, &xs[i], &ts, &s);
                    val += Float::with_val(prec, &bs[i] * &g);
                    row[i] = Float::with_val(prec, &bs[i] * &dg);
                    row[n + i] = g;
                }
                f.push(-val);
                jac.push(row);
            }
            let delta = solve_dense(jac, f)?;
            let mut size = Float::new(prec);
            for i in 0..n {
                xs[i] += &delta[i];
                bs[i] += &delta[n + i];
                size = size.max(&Float::with_val(prec, delta[i].abs_ref()));
                size = size.max(&Float::with_val(prec, delta[n + i].abs_ref()));
            }
            if xs.iter().any(|x| x.as_abs().clone() >= 1u32) {
                return Err(Error::Oracle(format!("Newton left (-1, 1) at continuation step {step}")));
            }
            if size <= newton_goal {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Oracle(format!("Newton did not converge at continuation step {step}")));
        }
    }
    let mut pairs: Vec<(Real, Real)> = xs.into_iter().zip(bs).collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(pairs.into_iter().unzip())
}

/// `||L_n f - f||_2` on [-1, 1], where `L_n f` interpolates `f` at the
/// orthogonal-rule nodes in the span of the first `n` basis functions of
/// `params` (`n + 1` slots, `t_1 = 0`).
pub fn interpolant_l2_error<F>(f: F, params: &ParameterSet, ctx: &PrecisionContext) -> Result<Real>
where
    F: Fn(&Real) -> Real,
{
    if !params.starts_with_zero() {
        return Err(Error::InvalidArgument("interpolation error needs t_1 = 0".into()));
    }
    let slots = params.total_slots();
    if slots < 2 {
        return Err(Error::InsufficientParameters { needed: 2, available: slots });
    }
    let n = slots - 1;
    let basis = basis_functions(&params.prefix(n)?);
    with_escalation(ctx, |c| {
        let nodes = orthogonal_nodes(params, n, c)?;
        let matrix = nodes
            .iter()
            .map(|x| basis.iter().map(|phi| phi.eval(x)).collect())
            .collect();
        let rhs = nodes.iter().map(&f).collect();
        let coefs = solve_dense(matrix, rhs)?;
        let sq = integrate_unit(
            |x| {
                let d = combination(&coefs, &basis, x) - f(x);
                d.square()
            },
            c,
        )?;
        Ok(sq.abs().sqrt())
    })
}
