//! Monotonicity of nodes and extreme weights in the last parameter, and
//! partial sums of the denseness series.
//!
//! With the other parameters fixed, the nodes are zeros of the orthogonal
//! polynomial for `w / (q(x) (1 + t x))`, where `q = pi_n^2` for the
//! orthogonal rule and `q = pi_{2n-1}` for the Gaussian rule. The scans
//! build that weight directly, so a grid point equal to a fixed parameter
//! is the confluent limit rather than an error.

use rug::Float;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{PrecisionContext, Real};
use crate::params::{BaseWeight, ModifiedWeight, ParameterSet, WeightKind};
use crate::rules::{weight_gauss_rule_escalating, RuleKind};

/// Nodes and weights of the rule whose last parameter is `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub t: Real,
    pub nodes: Vec<Real>,
    pub weights: Vec<Real>,
}

fn nodes_per_fixed(kind: RuleKind, fixed: &ParameterSet) -> Result<usize> {
    let slots = fixed.total_slots();
    match kind {
        RuleKind::Orthogonal if slots >= 1 => Ok(slots),
        RuleKind::Gaussian if slots % 2 == 1 => Ok(slots.div_ceil(2)),
        RuleKind::Gaussian => Err(Error::InvalidArgument(format!(
            "Gaussian scan needs 2n-1 fixed slots, got {slots}"
        ))),
        _ => Err(Error::InvalidArgument(format!("no scan for {kind} with {slots} fixed slots"))),
    }
}

/// The rule with `fixed` parameters followed by `t`, as nodes and weights.
pub fn scan_point(kind: RuleKind, fixed: &ParameterSet, t: &Real, ctx: &PrecisionContext) -> Result<ScanPoint> {
    let n = nodes_per_fixed(kind, fixed)?;
    let scale = if kind == RuleKind::Orthogonal { 2 } else { 1 };
    let mut factors: Vec<(Real, u32)> = fixed.entries().iter().map(|e| (e.t.clone(), scale * e.mult)).collect();
    factors.push((t.clone(), 1));
    let mw = ModifiedWeight::custom(BaseWeight::Legendre, factors, WeightKind::Custom)?;
    let (nodes, lambda, _) = weight_gauss_rule_escalating(&mw, n, ctx)?;
    let weights = nodes
        .iter()
        .zip(lambda)
        .map(|(x, l)| l / mw.rational_factor(x))
        .collect();
    Ok(ScanPoint {
        t: t.clone(),
        nodes,
        weights,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub kind: &'static str,
    pub n: usize,
    pub grid: Vec<f64>,
    /// Per tracked quantity, whether it moved strictly in the claimed
    /// direction across the grid.
    pub per_index: Vec<bool>,
    pub verdict: bool,
}

fn check_grid(grid: &[Real]) -> Result<()> {
    for (i, t) in grid.iter().enumerate() {
        if t.as_abs().clone() >= 1u32 {
            return Err(Error::InvalidArgument(format!("grid point {} outside (-1, 1)", t.to_f64())));
        }
        if i > 0 && *t <= grid[i - 1] {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
    }
    Ok(())
}

fn scan(kind: RuleKind, fixed: &ParameterSet, grid: &[Real], ctx: &PrecisionContext) -> Result<Vec<ScanPoint>> {
    check_grid(grid)?;
    grid.iter().map(|t| scan_point(kind, fixed, t, ctx)).collect()
}

fn strictly(values: impl Iterator<Item = Real>, decreasing: bool) -> bool {
    let v: Vec<Real> = values.collect();
    v.windows(2).all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] })
}

/// Checks that every node strictly decreases as the last parameter runs
/// over `grid`. `fixed` holds `n` slots (orthogonal) or `2n - 1` slots
/// (Gaussian).
pub fn node_monotonicity_scan(
    kind: RuleKind,
    fixed: &ParameterSet,
    grid: &[Real],
    ctx: &PrecisionContext,
) -> Result<MonotonicityReport> {
    let n = nodes_per_fixed(kind, fixed)?;
    let points = scan(kind, fixed, grid, ctx)?;
    let per_index: Vec<bool> = (0..n)
        .map(|i| strictly(points.iter().map(|p| p.nodes[i].clone()), true))
        .collect();
    Ok(MonotonicityReport {
        kind: kind.tag(),
        n,
        grid: grid.iter().map(|t| t.to_f64()).collect(),
        verdict: per_index.iter().all(|&b| b),
        per_index,
    })
}

/// Checks that the first weight strictly decreases and the last strictly
/// increases across `grid`. Requires `t_1 = 0` and `n >= 2`;
/// `per_index` is `[first, last]`.
pub fn extreme_weight_monotonicity_scan(
    kind: RuleKind,
    fixed: &ParameterSet,
    grid: &[Real],
    ctx: &PrecisionContext,
) -> Result<MonotonicityReport> {
    if !fixed.starts_with_zero() {
        return Err(Error::InvalidArgument("extreme-weight scan requires t_1 = 0".into()));
    }
    let n = nodes_per_fixed(kind, fixed)?;
    if n < 2 {
        return Err(Error::InvalidArgument("extreme-weight scan needs at least two nodes".into()));
    }
    let points = scan(kind, fixed, grid, ctx)?;
    let first = strictly(points.iter().map(|p| p.weights[0].clone()), true);
    let last = strictly(points.iter().map(|p| p.weights[n - 1].clone()), false);
    Ok(MonotonicityReport {
        kind: kind.tag(),
        n,
        grid: grid.iter().map(|t| t.to_f64()).collect(),
        per_index: vec![first, last],
        verdict: first && last,
    })
}

/// `|c|` for the image of the pole `-1/t` under the inverse Joukowski map,
/// taking the branch inside the unit disk.
pub fn joukowski_modulus(t: &Real) -> Real {
    let prec = t.prec();
    if t.is_zero() {
        return Float::new(prec);
    }
    let abs = Float::with_val(prec, t.abs_ref());
    let root = (1u32 - Float::with_val(prec, t.square_ref())).sqrt();
    abs / (root + 1u32)
}

/// Partial sums `S_1..S_K` of `sum (1 - |c_k|)` for the first `k_max`
/// parameters produced by `params`.
pub fn denseness_partial_sums<I>(params: I, k_max: usize) -> Result<Vec<f64>>
where
    I: IntoIterator<Item = Real>,
{
    let mut sums = Vec::with_capacity(k_max);
    let mut acc: Option<Real> = None;
    for t in params.into_iter().take(k_max) {
        if !t.is_finite() || t.as_abs().clone() >= 1u32 {
            return Err(Error::InvalidParameters(format!("parameter {} outside (-1, 1)", t.to_f64())));
        }
        let term = 1u32 - joukowski_modulus(&t);
        let next = match acc {
            Some(a) => a + term,
            None => term,
        };
        sums.push(next.to_f64());
        acc = Some(next);
    }
    Ok(sums)
}

/// Share of the final partial sum contributed by its second half; near 0
/// for a convergent series, bounded away from 0 for the divergent ones
/// met in practice.
pub fn tail_share(sums: &[f64]) -> f64 {
    match sums.last() {
        Some(&last) if last > 0.0 => {
            let half = sums[sums.len() / 2 - usize::from(sums.len() >= 2)];
            (last - half) / last
        }
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        make_context(256, 1e-30).unwrap()
    }

    fn grid(c: &PrecisionContext, v: &[f64]) -> Vec<Real> {
        v.iter().map(|x| c.real(*x)).collect()
    }

    #[test]
    fn orthogonal_nodes_decrease() {
        let c = ctx();
        let fixed = ParameterSet::from_f64(&[0.0, 0.3], &c).unwrap();
        let r = node_monotonicity_scan(RuleKind::Orthogonal, &fixed, &grid(&c, &[-0.5, 0.0, 0.5]), &c).unwrap();
        assert_eq!(r.n, 2);
        assert!(r.verdict, "{r:?}");
    }

    #[test]
    fn gaussian_nodes_decrease() {
        let c = ctx();
        let fixed = ParameterSet::from_f64(&[0.0, 0.2, 0.4], &c).unwrap();
        let r = node_monotonicity_scan(RuleKind::Gaussian, &fixed, &grid(&c, &[-0.6, -0.2, 0.2, 0.6]), &c).unwrap();
        assert_eq!(r.n, 2);
        assert!(r.verdict, "{r:?}");
    }

    #[test]
    fn single_point_grid_is_trivial() {
        let c = ctx();
        let fixed = ParameterSet::from_f64(&[0.0, 0.3], &c).unwrap();
        assert!(node_monotonicity_scan(RuleKind::Orthogonal, &fixed, &grid(&c, &[0.1]), &c).unwrap().verdict);
        assert!(extreme_weight_monotonicity_scan(RuleKind::Orthogonal, &fixed, &grid(&c, &[0.1]), &c).unwrap().verdict);
    }

    #[test]
    fn scan_point_matches_rule_builder() {
        let c = ctx();
        let fixed = ParameterSet::from_f64(&[0.0, 0.3, -0.4], &c).unwrap();
        let t = c.real(0.6);
        let p = scan_point(RuleKind::Orthogonal, &fixed, &t, &c).unwrap();
        let all = fixed.pushed(crate::params::ParamEntry::simple(t), &c).unwrap();
        let rule = crate::rules::build_orthogonal_rule(&all, 3, &c).unwrap();
        for (a, b) in p.nodes.iter().zip(&rule.nodes).chain(p.weights.iter().zip(&rule.weights)) {
            assert!(Float::with_val(256, a - b).abs() < 1e-40);
        }
    }

    #[test]
    fn extreme_weights() {
        let c = ctx();
        let g = grid(&c, &[-0.8, -0.4, 0.0, 0.4, 0.8]);
        let sqrt3: Vec<Real> = (1..=3).map(|i| 1u32 - c.int(i).sqrt().recip()).collect();
        let fixed = ParameterSet::from_reals(sqrt3, &c).unwrap();
        let r = extreme_weight_monotonicity_scan(RuleKind::Orthogonal, &fixed, &g, &c).unwrap();
        assert_eq!(r.n, 3);
        assert!(r.verdict, "{r:?}");
        let fixed = ParameterSet::from_f64(&[0.0, 0.3, -0.2], &c).unwrap();
        let r = extreme_weight_monotonicity_scan(RuleKind::Gaussian, &fixed, &g, &c).unwrap();
        assert!(r.verdict, "{r:?}");
        let no_zero = ParameterSet::from_f64(&[0.1, 0.3], &c).unwrap();
        assert!(extreme_weight_monotonicity_scan(RuleKind::Orthogonal, &no_zero, &g, &c).is_err());
    }

    #[test]
    fn denseness() {
        let c = ctx();
        let zeros = denseness_partial_sums(std::iter::repeat_n(c.zero(), 10), 10).unwrap();
        assert_eq!(zeros.last().copied(), Some(10.0));

        let sqrt = denseness_partial_sums((1..).map(|i: i64| 1u32 - c.int(i).sqrt().recip()), 100).unwrap();
        assert_eq!(sqrt.len(), 100);
        assert!(tail_share(&sqrt) > 0.3);

        let fast = denseness_partial_sums((1..).map(|k: u32| 1u32 - Float::with_val(256, 4u32).pow(k).recip()), 100).unwrap();
        assert!(tail_share(&fast) < 1e-12);
        assert!(fast[99] < 2.0);
    }

    #[test]
    fn joukowski_branch() {
        let c = ctx();
        for t in [-0.9, -0.3, 0.5, 0.99] {
            let m = joukowski_modulus(&c.real(t)).to_f64();
            assert!(m < 1.0);
            // c + 1/c = -2/t for the pole -1/t
            let cc = m * (-t).signum();
            assert!((cc + 1.0 / cc + 2.0 / t).abs() < 1e-10);
        }
    }
}
