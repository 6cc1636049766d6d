//! Nodes and Christoffel numbers from the symmetric tridiagonal Jacobi
//! matrix, by implicit QL with Wilkinson-type shifts. Only the first
//! components of the eigenvectors are carried along.

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};
use crate::recurrence::RecurrenceCoeffs;

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

fn hypot1(x: &Real) -> Real {
    (Float::with_val(x.prec(), x.square_ref()) + 1u32).sqrt()
}

/// Diagonalizes the Jacobi matrix with diagonal `d` and off-diagonal `e`
/// (`e.len() == d.len() - 1`), rotating `z` along. On return `d` holds the
/// eigenvalues and `z` the transformed vector, both sorted ascending by
/// eigenvalue.
fn implicit_ql(d: &mut [Real], e_in: &[Real], z: &mut [Real], ctx: &PrecisionContext) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    let prec = ctx.precision_bits();
    let eps = ctx.epsilon() << 2u32;
    let mut e: Vec<Real> = e_in.to_vec();
    e.push(Float::new(prec));

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let scale = Float::with_val(prec, d[m].abs_ref()) + Float::with_val(prec, d[m + 1].abs_ref());
                if Float::with_val(prec, e[m].abs_ref()) <= Float::with_val(prec, &eps * &scale) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if sweeps >= MAX_SWEEPS_PER_EIGENVALUE {
                return Err(Error::NonConvergence {
                    what: format!("implicit QL for eigenvalue {l} of {n}"),
                });
            }
            sweeps += 1;

            let p0 = d[l].clone();
            let mut g = Float::with_val(prec, &d[l + 1] - &p0) / (Float::with_val(prec, &e[l]) * 2u32);
            let r = hypot1(&g);
            let signed_r = if g.is_sign_negative() { -r } else { r };
            g = Float::with_val(prec, &d[m] - &p0) + Float::with_val(prec, &e[l] / (g + signed_r));

            let mut s = Float::with_val(prec, 1);
            let mut c = Float::with_val(prec, 1);
            let mut p = Float::new(prec);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = Float::with_val(prec, &s * &e[i]);
                let b = Float::with_val(prec, &c * &e[i]);
                if f.is_zero() && g.is_zero() {
                    // Exact deflation: the rotation is the identity.
                    d[i + 1] -= &p;
                    e[m] = Float::new(prec);
                    underflow = true;
                    break;
                }
                if Float::with_val(prec, g.abs_ref()) <= Float::with_val(prec, f.abs_ref()) {
                    c = Float::with_val(prec, &g / &f);
                    let r = hypot1(&c);
                    e[i + 1] = Float::with_val(prec, &f * &r);
                    s = r.recip();
                    c *= &s;
                } else {
                    s = Float::with_val(prec, &f / &g);
                    let r = hypot1(&s);
                    e[i + 1] = Float::with_val(prec, &g * &r);
                    c = r.recip();
                    s *= &c;
                }
                let g2 = Float::with_val(prec, &d[i + 1] - &p);
                let r = Float::with_val(prec, &d[i] - &g2) * &s + Float::with_val(prec, &c * &b) * 2u32;
                p = Float::with_val(prec, &s * &r);
                d[i + 1] = Float::with_val(prec, &g2 + &p);
                g = Float::with_val(prec, &c * &r) - &b;

                let zf = z[i + 1].clone();
                z[i + 1] = Float::with_val(prec, &s * &z[i]) + Float::with_val(prec, &c * &zf);
                z[i] = Float::with_val(prec, &c * &z[i]) - Float::with_val(prec, &s * &zf);
            }
            if underflow {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::new(prec);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_d: Vec<Real> = order.iter().map(|&i| d[i].clone()).collect();
    let sorted_z: Vec<Real> = order.iter().map(|&i| z[i].clone()).collect();
    d.clone_from_slice(&sorted_d);
    z.clone_from_slice(&sorted_z);
    Ok(())
}

/// Zeros of the degree-`n` orthogonal polynomial and the matching
/// Christoffel numbers `lambda_j = beta_0 v_{1j}^2`, nodes ascending.
pub fn jacobi_nodes_weights(rc: &RecurrenceCoeffs, n: usize, ctx: &PrecisionContext) -> Result<(Vec<Real>, Vec<Real>)> {
    if n == 0 || rc.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need {n} recurrence coefficients, have {}",
            rc.len()
        )));
    }
    let prec = ctx.precision_bits();
    let mut d: Vec<Real> = rc.alpha[..n].iter().map(|a| ctx.round(a)).collect();
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for b in &rc.beta[1..n] {
        if *b <= 0u32 {
            return Err(Error::Breakdown { k: e.len() + 1 });
        }
        e.push(ctx.round(b).sqrt());
    }
    let mut z = vec![Float::new(prec); n];
    z[0] = ctx.round(&rc.beta[0]).sqrt();
    implicit_ql(&mut d, &e, &mut z, ctx)?;
    let lambda = z.into_iter().map(|v| v.square()).collect();
    Ok((d, lambda))
}
