//! Partial fractions of the rational weight factor and modified moments
//! against monic Chebyshev polynomials.
//!
//! For `w = 1` every moment reduces to integrals of `T_k / (1 + t x)` and
//! `T_k / (1 + t x)^2`. With `2x/(1+tx) = 2/t - (2/t)/(1+tx)` and
//! `T_{k+1} = 2x T_k - T_{k-1}` these satisfy
//!
//! ```text
//! mu_{k+1} = (2/t) A_k - (2/t) mu_k - mu_{k-1}
//! nu_{k+1} = (2/t) (mu_k - nu_k) - nu_{k-1}
//! ```
//!
//! where `A_k = int T_k`. The homogeneous solutions grow like
//! `rho(t)^k`, `rho(t) = (1 + sqrt(1 - t^2)) / |t|`, so the forward recursion
//! loses about `k log2 rho` bits; that loss is budgeted before computing.

use std::fmt::Write as _;

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{atanh_over_t, format_sci, PrecisionContext, Real};
use crate::params::{BaseWeight, ModifiedWeight};
use crate::recurrence::ReferenceRecurrence;

/// Guard bits required on top of the tolerance after the estimated loss.
const GUARD_BITS: f64 = 12.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractionTerm {
    pub t: Real,
    /// Pole order, 1 or 2.
    pub order: u32,
    pub coefficient: Real,
}

/// `1 / prod (1 + t_i x)^{m_i} = sum c / (1 + t x)^order + polynomial`.
/// The polynomial part is non-empty only for an empty denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialFraction {
    pub terms: Vec<PartialFractionTerm>,
    pub polynomial: Vec<Real>,
}

impl PartialFraction {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        let mut acc = Float::new(prec);
        let mut power = Float::with_val(prec, 1);
        for p in &self.polynomial {
            acc += Float::with_val(prec, p * &power);
            power *= x;
        }
        for term in &self.terms {
            let base = Float::with_val(prec, &term.t * x) + 1u32;
            let den = if term.order == 1 { base } else { base.square() };
            acc += Float::with_val(prec, &term.coefficient / den);
        }
        acc
    }

    /// `log2( sum |terms at x| / |value at x| )`, the bits cancelled when the
    /// terms are summed at `x`.
    fn cancellation_bits(&self, x: &Real) -> f64 {
        let prec = x.prec();
        let mut abs_sum = Float::new(prec);
        for term in &self.terms {
            let base = Float::with_val(prec, &term.t * x) + 1u32;
            let den = if term.order == 1 { base } else { base.square() };
            abs_sum += Float::with_val(prec, &term.coefficient / den).abs();
        }
        let value = self.eval(x).abs();
        if value.is_zero() || abs_sum.is_zero() {
            return 0.0;
        }
        (abs_sum / value).log2().to_f64().max(0.0)
    }
}

/// Residue decomposition of `1 / prod (1 + t_i x)^{m_i}` for `m_i <= 2`.
///
/// Simple pole: `c_i = prod_{j != i} (t_i / (t_i - t_j))^{m_j}`. Double pole:
/// leading coefficient as above, sub-leading
/// `-c_i sum_{j != i} m_j t_j / (t_i - t_j)`.
pub fn partial_fractions(denominator: &[(Real, u32)], ctx: &PrecisionContext) -> Result<PartialFraction> {
    let prec = ctx.precision_bits();
    if denominator.is_empty() {
        return Ok(PartialFraction {
            terms: Vec::new(),
            polynomial: vec![ctx.one()],
        });
    }
    let eps = ctx.confluence_threshold();
    for (i, (t, m)) in denominator.iter().enumerate() {
        if t.is_zero() {
            return Err(Error::InvalidArgument("partial fractions need nonzero poles".into()));
        }
        if *m == 0 || *m > 2 {
            return Err(Error::InvalidArgument(format!(
                "pole order {m} is not supported by the recursive moments"
            )));
        }
        for (s, _) in &denominator[i + 1..] {
            if Float::with_val(prec, t - s).abs() <= eps {
                return Err(Error::Confluence {
                    a: t.to_f64(),
                    b: s.to_f64(),
                });
            }
        }
    }

    let mut terms = Vec::new();
    for (i, (ti, mi)) in denominator.iter().enumerate() {
        let ti = ctx.round(ti);
        let mut lead = ctx.one();
        let mut log_derivative = ctx.zero();
        for (j, (tj, mj)) in denominator.iter().enumerate() {
            if i == j {
                continue;
            }
            let diff = Float::with_val(prec, &ti - tj);
            let ratio = Float::with_val(prec, &ti / &diff);
            lead *= crate::numerics::powi(&ratio, *mj);
            log_derivative += Float::with_val(prec, tj / &diff) * *mj;
        }
        if *mi == 2 {
            terms.push(PartialFractionTerm {
                t: ti.clone(),
                order: 1,
                coefficient: -(Float::with_val(prec, &lead * &log_derivative)),
            });
            terms.push(PartialFractionTerm {
                t: ti,
                order: 2,
                coefficient: lead,
            });
        } else {
            terms.push(PartialFractionTerm {
                t: ti,
                order: 1,
                coefficient: lead,
            });
        }
    }
    Ok(PartialFraction {
        terms,
        polynomial: Vec::new(),
    })
}

/// `int_{-1}^{1} T_k(x) dx`: 0 for odd `k`, `2/(1 - k^2)` for even `k`.
pub fn chebyshev_free_moment(k: usize, ctx: &PrecisionContext) -> Real {
    if k % 2 == 1 {
        return ctx.zero();
    }
    let k = k as i64;
    ctx.int(2) / ctx.int(1 - k * k)
}

/// Growth rate of the unstable solution of the moment recursion.
pub fn recursion_growth(t: f64) -> f64 {
    let t = t.abs();
    (1.0 + (1.0 - t * t).sqrt()) / t
}

fn check_pole(t: &Real, order: u32) -> Result<()> {
    if t.is_zero() || t.as_abs().clone() >= 1u32 {
        return Err(Error::InvalidArgument(format!(
            "base moments need 0 < |t| < 1, got {}",
            t.to_f64()
        )));
    }
    if order != 1 && order != 2 {
        return Err(Error::InvalidArgument(format!("pole order {order} is not 1 or 2")));
    }
    Ok(())
}

/// `int T_k(x) / (1 + t x)^order dx` for `k = 0..count`, by the forward
/// recursion seeded with `mu_0 = (2/t) atanh t` and `nu_0 = 2/(1 - t^2)`.
/// No budget check; see [`base_moment`].
pub fn base_moment_sequence(t: &Real, order: u32, count: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    check_pole(t, order)?;
    let prec = ctx.precision_bits();
    let t = ctx.round(t);
    let two_over_t = ctx.int(2) / &t;

    let mu0 = atanh_over_t(&t) * 2u32;
    let mut mu = Vec::with_capacity(count.max(2));
    mu.push(mu0.clone());
    // mu_1 = (A_0 - mu_0) / t
    mu.push((ctx.int(2) - &mu0) / &t);
    for k in 1..count.saturating_sub(1) {
        let free = chebyshev_free_moment(k, ctx);
        let next = Float::with_val(prec, &two_over_t * (free - &mu[k])) - &mu[k - 1];
        mu.push(next);
    }
    mu.truncate(count);
    if order == 1 {
        return Ok(mu);
    }

    let one_minus_t2 = 1u32 - Float::with_val(prec, t.square_ref());
    let nu0 = ctx.int(2) / one_minus_t2;
    let mut nu = Vec::with_capacity(count.max(2));
    // nu_1 = (mu_0 - nu_0) / t
    nu.push(nu0.clone());
    nu.push(Float::with_val(prec, &mu0 - &nu0) / &t);
    for k in 1..count.saturating_sub(1) {
        let diff = Float::with_val(prec, &mu[k] - &nu[k]);
        let next = Float::with_val(prec, &two_over_t * diff) - &nu[k - 1];
        nu.push(next);
    }
    nu.truncate(count);
    Ok(nu)
}

/// Bits the forward recursion is expected to lose up to index `k`.
pub fn recursion_loss_bits(t: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    k as f64 * recursion_growth(t).log2() + 2.0 * (k as f64).log2()
}

/// Single base moment `int T_k / (1 + t x)^order`. Signals
/// [`Error::PrecisionBudget`] when the recursion would eat into the
/// tolerance.
pub fn base_moment(t: &Real, order: u32, k: usize, ctx: &PrecisionContext) -> Result<Real> {
    check_pole(t, order)?;
    let loss = recursion_loss_bits(t.to_f64(), k);
    budget_check(loss, ctx)?;
    let mut seq = base_moment_sequence(t, order, k + 1, ctx)?;
    Ok(seq.swap_remove(k))
}

fn budget_check(loss: f64, ctx: &PrecisionContext) -> Result<()> {
    let available = f64::from(ctx.precision_bits()) - loss;
    if available < ctx.tolerance_bits() + GUARD_BITS {
        return Err(Error::PrecisionBudget(format!(
            "estimated loss of {loss:.0} bits leaves {available:.0} of {} bits",
            ctx.precision_bits()
        )));
    }
    Ok(())
}

/// Modified moments `m_k = int T^_k(x) w(x) dx`, `T^_k` the monic Chebyshev
/// polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub values: Vec<Real>,
    /// Bits the computation was estimated to lose (0 for the quadrature
    /// fallback).
    pub estimated_digit_loss: f64,
}

impl MomentTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV with header `k,m_k`.
    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("k,m_k\n");
        for (k, m) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{k},{}", format_sci(m, digits));
        }
        out
    }
}

/// Moments via the partial-fraction recursion, without the quadrature spot
/// checks. Falls back to adaptive quadrature for non-Legendre bases or
/// poles of order three and higher.
pub fn modified_moments_unchecked(mw: &ModifiedWeight, count: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one moment".into()));
    }
    if mw.base != BaseWeight::Legendre || mw.max_exponent() > 2 {
        return quadrature_moments(mw, count, ctx);
    }
    let prec = ctx.precision_bits();
    let pf = partial_fractions(&mw.denominator, ctx)?;

    let recursion_loss = pf
        .terms
        .iter()
        .map(|term| recursion_loss_bits(term.t.to_f64(), count - 1))
        .fold(0.0, f64::max);
    // Cancellation is worst where the weight is smallest; probe both ends
    // and the middle.
    let cancellation = [-1.0, 0.0, 1.0]
        .iter()
        .map(|&x| pf.cancellation_bits(&ctx.real(x)))
        .fold(0.0, f64::max);
    let loss = recursion_loss + cancellation;
    budget_check(loss, ctx)?;

    let mut raw = vec![ctx.zero(); count];
    if let Some(c) = pf.polynomial.first() {
        for (k, slot) in raw.iter_mut().enumerate() {
            *slot += Float::with_val(prec, c * chebyshev_free_moment(k, ctx));
        }
    }
    for term in &pf.terms {
        let seq = base_moment_sequence(&term.t, term.order, count, ctx)?;
        for (slot, v) in raw.iter_mut().zip(seq) {
            *slot += Float::with_val(prec, &term.coefficient * v);
        }
    }
    // Monic scaling T^_k = T_k / 2^{k-1}.
    let values = raw
        .into_iter()
        .enumerate()
        .map(|(k, v)| if k == 0 { v } else { v >> (k as u32 - 1) })
        .collect::<Vec<_>>();
    if values[0] <= 0u32 {
        return Err(Error::PrecisionBudget("non-positive zeroth moment".into()));
    }
    Ok(MomentTable {
        values,
        estimated_digit_loss: loss,
    })
}

fn quadrature_moments(mw: &ModifiedWeight, count: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    let reference = ReferenceRecurrence::monic_chebyshev(count, ctx);
    let values = (0..count)
        .map(|k| quadrature_moment(mw, &reference, k, ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentTable {
        values,
        estimated_digit_loss: 0.0,
    })
}

/// `int T^_k(x) w(x) dx` by adaptive quadrature.
pub fn quadrature_moment(
    mw: &ModifiedWeight,
    reference: &ReferenceRecurrence,
    k: usize,
    ctx: &PrecisionContext,
) -> Result<Real> {
    let rational = ModifiedWeight {
        base: BaseWeight::Legendre,
        ..mw.clone()
    };
    mw.base
        .integrate(|x| reference.eval(k, x) * rational.rational_factor(x), ctx)
}

/// Modified moments with the build-time spot checks: `m_0`, `m_1` and
/// `m_{K-1}` are recomputed by adaptive quadrature and must agree to the
/// context tolerance, otherwise a precision escalation is requested.
pub fn modified_moments(mw: &ModifiedWeight, count: usize, ctx: &PrecisionContext) -> Result<MomentTable> {
    let table = modified_moments_unchecked(mw, count, ctx)?;
    if mw.base != BaseWeight::Legendre || mw.max_exponent() > 2 {
        return Ok(table);
    }
    let reference = ReferenceRecurrence::monic_chebyshev(count, ctx);
    let mut checks = vec![0, 1, count - 1];
    checks.retain(|&k| k < count);
    checks.dedup();
    let prec = ctx.precision_bits();
    for k in checks {
        let oracle = quadrature_moment(mw, &reference, k, ctx)?;
        let diff = Float::with_val(prec, &table.values[k] - &oracle).abs();
        let allowed = Float::with_val(prec, oracle.abs_ref()) + 1u32;
        if diff > allowed * ctx.target_rel_tol() * 10.0 {
            return Err(Error::PrecisionBudget(format!(
                "moment {k} disagrees with quadrature by {:e}",
                diff.to_f64()
            )));
        }
    }
    Ok(table)
}
