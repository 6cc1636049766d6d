//! Quadrature rules built from the modified-weight orthogonal polynomials,
//! their application, and the exactness audit on the rational basis.
//!
//! Nodes are the zeros of the degree-`n` orthogonal polynomial for
//! `w / pi_{2n}` (Gaussian) or `w / (pi_n pi_{n+1})` (orthogonal); the
//! weights are the Christoffel numbers rescaled by the denominator at each
//! node.

mod jacobi;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rug::Float;
use serde_json::{json, Value};

pub use jacobi::jacobi_nodes_weights;

use crate::error::{Error, Result};
use crate::moments::modified_moments;
use crate::numerics::{format_fixed, format_sci, powi, with_escalation, PrecisionContext, Real};
use crate::params::{
    decimal_number, modified_weight_gr_with_base, modified_weight_or_with_base, pi_eval, BaseWeight,
    ModifiedWeight, ParameterSet,
};
use crate::recurrence::{modified_chebyshev, ReferenceRecurrence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleKind {
    /// Maximum accuracy: exact for the first `2n` basis functions.
    Gaussian,
    /// Nodes at the zeros of the orthogonalized rational function.
    Orthogonal,
    /// Classical Gauss-Legendre.
    Legendre,
}

impl RuleKind {
    pub fn tag(&self) -> &'static str {
        match self {
            RuleKind::Gaussian => "gr",
            RuleKind::Orthogonal => "or",
            RuleKind::Legendre => "gl",
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Gaussian => "GR",
            RuleKind::Orthogonal => "OR",
            RuleKind::Legendre => "GL",
        })
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gr" | "gauss" | "gaussian" => Ok(RuleKind::Gaussian),
            "or" | "orthogonal" => Ok(RuleKind::Orthogonal),
            "gl" | "legendre" => Ok(RuleKind::Legendre),
            other => Err(Error::InvalidArgument(format!("unknown rule kind {other:?}"))),
        }
    }
}

/// How orthogonal-rule weights are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrthogonalMode {
    /// Requires `t_1 = 0`; weights `pi_n(x_j) pi_{n+1}(x_j) lambda_j`.
    #[default]
    Strict,
    /// Any `t_1`; weights solve the interpolatory system on the first `n`
    /// basis functions.
    Interpolatory,
}

/// One member of the rational basis: `x^j / (1 + t x)^{j+1}`, the `j`-th
/// `t`-derivative of `1/(1+tx)` up to a constant factor.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub t: Real,
    pub derivative: u32,
}

impl BasisFunction {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        let den = Float::with_val(prec, &self.t * x) + 1u32;
        let j = self.derivative;
        powi(x, j) / powi(&den, j + 1)
    }

    /// `int phi(x) w(x) dx`; closed form for `w = 1` and the first two
    /// derivative orders, adaptive quadrature otherwise.
    pub fn integral(&self, base: BaseWeight, ctx: &PrecisionContext) -> Result<Real> {
        let t = ctx.round(&self.t);
        if base == BaseWeight::Legendre {
            if t.is_zero() {
                // x^j integrates to 2/(j+1) for even j.
                return Ok(if self.derivative.is_multiple_of(2) {
                    ctx.int(2) / (self.derivative + 1)
                } else {
                    ctx.zero()
                });
            }
            let mu0 = crate::numerics::atanh_over_t(&t) * 2u32;
            match self.derivative {
                0 => return Ok(mu0),
                1 => {
                    let nu0 = ctx.int(2) / (1u32 - Float::with_val(ctx.precision_bits(), t.square_ref()));
                    return Ok((mu0 - nu0) / &t);
                }
                _ => {}
            }
        }
        base.integrate(|x| self.eval(x), ctx)
    }
}

/// Basis functions for the slots of `params`, in slot order.
pub fn basis_functions(params: &ParameterSet) -> Vec<BasisFunction> {
    params
        .entries()
        .iter()
        .flat_map(|e| {
            (0..e.mult).map(move |j| BasisFunction {
                t: e.t.clone(),
                derivative: j,
            })
        })
        .collect()
}

/// Relative residuals `|int w phi_k - sum beta_i phi_k(x_i)| / |int w phi_k|`
/// over the basis functions the rule is guaranteed to integrate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactnessAudit {
    pub per_k: Vec<Real>,
    pub max: Real,
}

impl ExactnessAudit {
    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "max": decimal_number(&self.max, digits.min(6)),
            "per_k": self.per_k.iter().map(|r| decimal_number(r, digits.min(6))).collect::<Vec<_>>(),
        })
    }
}

fn residual(exact: &Real, approx: &Real) -> Real {
    let diff = Float::with_val(exact.prec(), exact - approx).abs();
    if exact.is_zero() {
        diff
    } else {
        diff / Float::with_val(exact.prec(), exact.abs_ref())
    }
}

/// Audits `nodes`/`weights` against each function of `basis`.
pub fn audit(
    nodes: &[Real],
    weights: &[Real],
    basis: &[BasisFunction],
    base: BaseWeight,
    ctx: &PrecisionContext,
) -> Result<ExactnessAudit> {
    let prec = ctx.precision_bits();
    let mut per_k = Vec::with_capacity(basis.len());
    let mut max = Float::new(prec);
    for phi in basis {
        let exact = phi.integral(base, ctx)?;
        let approx = nodes
            .iter()
            .zip(weights)
            .fold(Float::new(prec), |acc, (x, w)| acc + Float::with_val(prec, w * phi.eval(x)));
        let r = residual(&exact, &approx);
        if r > max {
            max = r.clone();
        }
        per_k.push(r);
    }
    Ok(ExactnessAudit { per_k, max })
}

/// A built rule. Nodes are strictly increasing inside (-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub n: usize,
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
    /// The slots the rule was built from (`2n` for GR, `n+1` for OR).
    pub params: ParameterSet,
    pub base: BaseWeight,
    pub audit: ExactnessAudit,
    /// Working precision the rule was finally computed at.
    pub precision_bits: u32,
}

impl QuadratureRule {
    pub fn weight_sum(&self) -> Real {
        let prec = self.precision_bits;
        self.weights.iter().fold(Float::new(prec), |acc, w| acc + w)
    }

    /// `{kind, n, params, nodes, weights, residuals: {max, per_k}}`.
    pub fn to_json(&self, digits: usize) -> Value {
        json!({
            "kind": self.kind.tag(),
            "n": self.n,
            "params": self.params.to_json(digits),
            "nodes": self.nodes.iter().map(|x| decimal_number(x, digits)).collect::<Vec<_>>(),
            "weights": self.weights.iter().map(|w| decimal_number(w, digits)).collect::<Vec<_>>(),
            "residuals": self.audit.to_json(digits),
        })
    }

    /// CSV `j,node,weight`; fixed-point with `decimals` digits when given,
    /// otherwise scientific with `digits` significant digits.
    pub fn to_csv(&self, digits: usize, decimals: Option<usize>) -> String {
        let fmt = |v: &Real| match decimals {
            Some(d) => format_fixed(v, d),
            None => format_sci(v, digits),
        };
        let mut out = String::from("j,node,weight\n");
        for (j, (x, w)) in self.nodes.iter().zip(&self.weights).enumerate() {
            let _ = writeln!(out, "{},{},{}", j + 1, fmt(x), fmt(w));
        }
        out
    }
}

/// Nodes and Christoffel numbers of the Gauss rule for `mw`, at the given
/// precision (no escalation).
pub fn weight_gauss_rule(mw: &ModifiedWeight, n: usize, ctx: &PrecisionContext) -> Result<(Vec<Real>, Vec<Real>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("rule needs at least one node".into()));
    }
    let moments = modified_moments(mw, 2 * n, ctx)?;
    let reference = ReferenceRecurrence::monic_chebyshev(2 * n, ctx);
    let rc = modified_chebyshev(&moments, &reference, ctx)?;
    let (nodes, lambda) = jacobi_nodes_weights(&rc, n, ctx)?;
    check_nodes(&nodes)?;
    if lambda.iter().any(|l| *l <= 0u32) {
        return Err(Error::InvalidRule("non-positive Christoffel number".into()));
    }
    Ok((nodes, lambda))
}

fn check_nodes(nodes: &[Real]) -> Result<()> {
    for (j, x) in nodes.iter().enumerate() {
        if !x.is_finite() || x.as_abs().clone() >= 1u32 {
            return Err(Error::InvalidRule(format!("node {j} = {} outside (-1, 1)", x.to_f64())));
        }
        if j > 0 && *x <= nodes[j - 1] {
            return Err(Error::InvalidRule(format!("nodes {} and {j} not increasing", j - 1)));
        }
    }
    Ok(())
}

fn check_audit(a: &ExactnessAudit, ctx: &PrecisionContext) -> Result<()> {
    if a.max > ctx.target_rel_tol() {
        return Err(Error::AuditFailed {
            max_residual: a.max.to_f64(),
            tolerance: ctx.target_rel_tol(),
        });
    }
    Ok(())
}

/// Gauss rule for `mw` with escalation; returns nodes, Christoffel numbers
/// and the precision used.
pub fn weight_gauss_rule_escalating(
    mw: &ModifiedWeight,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<Real>, Vec<Real>, u32)> {
    with_escalation(ctx, |c| {
        let (x, l) = weight_gauss_rule(mw, n, c)?;
        Ok((x, l, c.precision_bits()))
    })
}

/// Gaussian rule exact for the first `2n` basis functions (`w = 1`).
pub fn build_gaussian_rule(params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<QuadratureRule> {
    build_gaussian_rule_with_base(params, n, BaseWeight::Legendre, ctx)
}

pub fn build_gaussian_rule_with_base(
    params: &ParameterSet,
    n: usize,
    base: BaseWeight,
    ctx: &PrecisionContext,
) -> Result<QuadratureRule> {
    let slots = params.prefix(2 * n)?;
    let mw = modified_weight_gr_with_base(&slots, n, base)?;
    let basis = basis_functions(&slots);
    with_escalation(ctx, |c| {
        let (nodes, lambda) = weight_gauss_rule(&mw, n, c)?;
        let weights = nodes
            .iter()
            .zip(&lambda)
            .map(|(x, l)| Ok(pi_eval(&slots, 2 * n, x)? * l))
            .collect::<Result<Vec<_>>>()?;
        let a = audit(&nodes, &weights, &basis, base, c)?;
        check_audit(&a, c)?;
        Ok(QuadratureRule {
            kind: RuleKind::Gaussian,
            n,
            nodes,
            weights,
            params: slots.clone(),
            base,
            audit: a,
            precision_bits: c.precision_bits(),
        })
    })
}

/// Orthogonal rule in strict mode: requires `t_1 = 0`, exact for the first
/// `n+1` basis functions.
pub fn build_orthogonal_rule(params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<QuadratureRule> {
    build_orthogonal_rule_with(params, n, OrthogonalMode::Strict, BaseWeight::Legendre, ctx)
}

pub fn build_orthogonal_rule_with(
    params: &ParameterSet,
    n: usize,
    mode: OrthogonalMode,
    base: BaseWeight,
    ctx: &PrecisionContext,
) -> Result<QuadratureRule> {
    let slots = params.prefix(n + 1)?;
    let t1_zero = slots.starts_with_zero();
    if mode == OrthogonalMode::Strict && !t1_zero {
        return Err(Error::StrictOrthogonal(slots.first().map_or(f64::NAN, |t| t.to_f64())));
    }
    let mw = modified_weight_or_with_base(&slots, n, base)?;
    let all_basis = basis_functions(&slots);
    with_escalation(ctx, |c| {
        let (nodes, lambda) = weight_gauss_rule(&mw, n, c)?;
        let (weights, basis) = if t1_zero {
            let w = nodes
                .iter()
                .zip(&lambda)
                .map(|(x, l)| Ok(pi_eval(&slots, n, x)? * pi_eval(&slots, n + 1, x)? * l))
                .collect::<Result<Vec<_>>>()?;
            (w, &all_basis[..])
        } else {
            let basis = &all_basis[..n];
            let matrix = basis
                .iter()
                .map(|phi| nodes.iter().map(|x| phi.eval(x)).collect())
                .collect();
            let rhs = basis
                .iter()
                .map(|phi| phi.integral(base, c))
                .collect::<Result<Vec<_>>>()?;
            (crate::numerics::solve_dense(matrix, rhs)?, basis)
        };
        if t1_zero && weights.iter().any(|w| *w <= 0u32) {
            return Err(Error::InvalidRule("non-positive weight".into()));
        }
        let a = audit(&nodes, &weights, basis, base, c)?;
        check_audit(&a, c)?;
        Ok(QuadratureRule {
            kind: RuleKind::Orthogonal,
            n,
            nodes,
            weights,
            params: slots.clone(),
            base,
            audit: a,
            precision_bits: c.precision_bits(),
        })
    })
}

/// Classical Gauss-Legendre rule through the same moment/Jacobi pipeline.
/// Audited on the monomials `x^k`, `k < 2n`.
pub fn build_legendre_rule(n: usize, ctx: &PrecisionContext) -> Result<QuadratureRule> {
    let mw = ModifiedWeight::legendre();
    with_escalation(ctx, |c| {
        let (nodes, weights) = weight_gauss_rule(&mw, n, c)?;
        let prec = c.precision_bits();
        let mut per_k = Vec::with_capacity(2 * n);
        let mut max = Float::new(prec);
        for k in 0..(2 * n) as u32 {
            let exact = if k % 2 == 0 { c.int(2) / (k + 1) } else { c.zero() };
            let approx = nodes
                .iter()
                .zip(&weights)
                .fold(Float::new(prec), |acc, (x, w)| acc + Float::with_val(prec, w * powi(x, k)));
            let r = residual(&exact, &approx);
            if r > max {
                max = r.clone();
            }
            per_k.push(r);
        }
        let a = ExactnessAudit { per_k, max };
        check_audit(&a, c)?;
        Ok(QuadratureRule {
            kind: RuleKind::Legendre,
            n,
            nodes,
            weights,
            params: ParameterSet::empty(),
            base: BaseWeight::Legendre,
            audit: a,
            precision_bits: c.precision_bits(),
        })
    })
}

/// Builds any of the three kinds; `params` is ignored for Gauss-Legendre.
pub fn build_rule(kind: RuleKind, params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<QuadratureRule> {
    match kind {
        RuleKind::Gaussian => build_gaussian_rule(params, n, ctx),
        RuleKind::Orthogonal => build_orthogonal_rule(params, n, ctx),
        RuleKind::Legendre => build_legendre_rule(n, ctx),
    }
}

/// Nodes of the orthogonal rule (zeros of `r_{n+1}`) for any `t_1`.
pub fn orthogonal_nodes(params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let slots = params.prefix(n + 1)?;
    let mw = modified_weight_or_with_base(&slots, n, BaseWeight::Legendre)?;
    Ok(weight_gauss_rule_escalating(&mw, n, ctx)?.0)
}

/// Nodes of the Gaussian rule for the first `2n` slots.
pub fn gaussian_nodes(params: &ParameterSet, n: usize, ctx: &PrecisionContext) -> Result<Vec<Real>> {
    let slots = params.prefix(2 * n)?;
    let mw = modified_weight_gr_with_base(&slots, n, BaseWeight::Legendre)?;
    Ok(weight_gauss_rule_escalating(&mw, n, ctx)?.0)
}

/// `sum beta_i f(x_i)`.
pub fn apply_rule<F>(rule: &QuadratureRule, f: F) -> Result<Real>
where
    F: Fn(&Real) -> Real,
{
    let prec = rule.precision_bits;
    let mut acc = Float::new(prec);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::NonFinite(x.to_f64()));
        }
        acc += Float::with_val(prec, w * v);
    }
    Ok(acc)
}

/// `|int f w - Q f| / |int f w|` for a known exact value.
pub fn relative_error<F>(rule: &QuadratureRule, f: F, exact: &Real) -> Result<Real>
where
    F: Fn(&Real) -> Real,
{
    if exact.is_zero() {
        return Err(Error::ZeroExact);
    }
    let q = apply_rule(rule, f)?;
    let prec = exact.prec().max(q.prec());
    Ok(Float::with_val(prec, exact - &q).abs() / Float::with_val(prec, exact.abs_ref()))
}

/// Checks `sum beta_i <= (1 + |t_1|) int w/(1 + t_1 x)`, strict for
/// `t_1 != 0`; for `t_1 = 0` (and Gauss-Legendre) the sum must equal
/// `int w` to the context tolerance.
pub fn weight_sum_bound_check(rule: &QuadratureRule, ctx: &PrecisionContext) -> Result<bool> {
    let prec = ctx.precision_bits().max(rule.precision_bits);
    let sum = Float::with_val(prec, rule.weight_sum());
    let t1 = rule.params.first().cloned().unwrap_or_else(|| Float::new(prec));
    if t1.is_zero() {
        let mass = rule.base.mass(ctx);
        let dev = Float::with_val(prec, &sum - &mass).abs();
        return Ok(dev <= mass * ctx.target_rel_tol() * 10.0);
    }
    let phi = BasisFunction { t: t1.clone(), derivative: 0 };
    let integral = phi.integral(rule.base, ctx)?;
    let bound = (Float::with_val(prec, t1.abs_ref()) + 1u32) * integral;
    Ok(sum < bound)
}
