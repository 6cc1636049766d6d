//! Modified Chebyshev algorithm: `2n` modified moments to the first `n`
//! three-term recurrence coefficients of the monic orthogonal polynomials.

use std::fmt::Write as _;

use rug::Float;

use crate::error::{Error, Result};
use crate::moments::MomentTable;
use crate::numerics::{format_sci, PrecisionContext, Real};

/// Recurrence `p_{k+1} = (x - a_k) p_k - b_k p_{k-1}` of the monic reference
/// polynomials the moments are taken against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRecurrence {
    pub a: Vec<Real>,
    pub b: Vec<Real>,
}

impl ReferenceRecurrence {
    /// Monic Chebyshev polynomials of the first kind: `a_k = 0`,
    /// `b_1 = 1/2`, `b_k = 1/4` for `k >= 2` (`b_0` is unused and set to 0).
    pub fn monic_chebyshev(len: usize, ctx: &PrecisionContext) -> Self {
        let a = vec![ctx.zero(); len.max(1)];
        let b = (0..len.max(2))
            .map(|k| match k {
                0 => ctx.zero(),
                1 => ctx.real(0.5),
                _ => ctx.real(0.25),
            })
            .collect();
        ReferenceRecurrence { a, b }
    }

    fn a_at(&self, k: usize, prec: u32) -> Real {
        self.a
            .get(k)
            .cloned()
            .unwrap_or_else(|| Float::with_val(prec, self.a.last().expect("non-empty")))
    }

    fn b_at(&self, k: usize, prec: u32) -> Real {
        self.b
            .get(k)
            .cloned()
            .unwrap_or_else(|| Float::with_val(prec, self.b.last().expect("non-empty")))
    }

    /// `p_k(x)`; coefficients past the stored length repeat the last one.
    pub fn eval(&self, k: usize, x: &Real) -> Real {
        let prec = x.prec();
        let mut prev = Float::new(prec);
        let mut cur = Float::with_val(prec, 1);
        for j in 0..k {
            let shifted = Float::with_val(prec, x - self.a_at(j, prec));
            let next = shifted * &cur - Float::with_val(prec, self.b_at(j, prec) * &prev);
            prev = std::mem::replace(&mut cur, next);
        }
        cur
    }
}

/// Jacobi coefficients of the monic orthogonal polynomials:
/// `p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}`, with `beta_0` the total
/// mass of the weight.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceCoeffs {
    pub alpha: Vec<Real>,
    pub beta: Vec<Real>,
}

impl RecurrenceCoeffs {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// CSV with header `k,alpha_k,beta_k`.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("k,alpha_k,beta_k\n");
        for (k, (a, b)) in self.alpha.iter().zip(&self.beta).enumerate() {
            let _ = writeln!(out, "{k},{},{}", format_sci(a, digits), format_sci(b, digits));
        }
        out
    }
}

/// Mixed-moment recursion
///
/// ```text
/// sigma_{-1,l} = 0, sigma_{0,l} = m_l
/// sigma_{k,l} = sigma_{k-1,l+1} - (alpha_{k-1} - a_l) sigma_{k-1,l}
///               - beta_{k-1} sigma_{k-2,l} + b_l sigma_{k-1,l-1}
/// alpha_k = a_k + sigma_{k,k+1}/sigma_{k,k} - sigma_{k-1,k}/sigma_{k-1,k-1}
/// beta_k  = sigma_{k,k} / sigma_{k-1,k-1}
/// ```
///
/// A non-positive `beta_k` can only come from lost precision (the weight is
/// positive) and is reported as [`Error::Breakdown`].
pub fn modified_chebyshev(
    moments: &MomentTable,
    reference: &ReferenceRecurrence,
    ctx: &PrecisionContext,
) -> Result<RecurrenceCoeffs> {
    let m = &moments.values;
    let n = m.len() / 2;
    if n == 0 {
        return Err(Error::InvalidArgument("need at least two moments".into()));
    }
    if m[0] <= 0u32 {
        return Err(Error::Breakdown { k: 0 });
    }
    let prec = ctx.precision_bits();
    let len = 2 * n;
    let a: Vec<Real> = (0..len).map(|k| reference.a_at(k, prec)).collect();
    let b: Vec<Real> = (0..len).map(|k| reference.b_at(k, prec)).collect();

    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    alpha.push(Float::with_val(prec, &a[0] + Float::with_val(prec, &m[1] / &m[0])));
    beta.push(ctx.round(&m[0]));

    let mut sigma_prev = vec![ctx.zero(); len]; // sigma_{k-2, .}
    let mut sigma_cur: Vec<Real> = m.iter().take(len).map(|v| ctx.round(v)).collect(); // sigma_{k-1, .}

    for k in 1..n {
        let mut sigma_next = vec![ctx.zero(); len];
        for l in k..(len - k) {
            let mut s = sigma_cur[l + 1].clone();
            s -= Float::with_val(prec, &alpha[k - 1] - &a[l]) * &sigma_cur[l];
            s -= Float::with_val(prec, &beta[k - 1] * &sigma_prev[l]);
            s += Float::with_val(prec, &b[l] * &sigma_cur[l - 1]);
            sigma_next[l] = s;
        }
        if sigma_next[k] <= 0u32 {
            return Err(Error::Breakdown { k });
        }
        let a_k = Float::with_val(prec, &a[k])
            + Float::with_val(prec, &sigma_next[k + 1] / &sigma_next[k])
            - Float::with_val(prec, &sigma_cur[k] / &sigma_cur[k - 1]);
        let b_k = Float::with_val(prec, &sigma_next[k] / &sigma_cur[k - 1]);
        alpha.push(a_k);
        beta.push(b_k);
        sigma_prev = std::mem::replace(&mut sigma_cur, sigma_next);
    }
    Ok(RecurrenceCoeffs { alpha, beta })
}
