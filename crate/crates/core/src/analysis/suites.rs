//! Randomized property suites. Every suite draws its configurations from a
//! seeded ChaCha stream before doing any work, so a seed fully determines
//! the report.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::Serialize;

use crate::error::Result;
use crate::numerics::{PrecisionContext, Real};
use crate::params::ParameterSet;
use crate::rules::{
    build_gaussian_rule, build_orthogonal_rule, gaussian_nodes, orthogonal_nodes, weight_sum_bound_check, RuleKind,
};

use super::interlacing::check_interlacing_labeled;
use super::oracle::{brute_force_gaussian, gram_schmidt_oracle};
use super::scans::{denseness_partial_sums, extreme_weight_monotonicity_scan, node_monotonicity_scan, tail_share};

pub const DEFAULT_SEED: u64 = 0x5eed_1990;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub max_n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            trials: 50,
            max_n: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    /// Largest deviation seen, for suites that measure one.
    pub worst: Option<f64>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            trials: 0,
            passed: 0,
            worst: None,
            failures: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    fn record(&mut self, label: String, outcome: Result<bool>) {
        self.trials += 1;
        match outcome {
            Ok(true) => self.passed += 1,
            Ok(false) => self.failures.push(label),
            Err(e) => self.failures.push(format!("{label}: {e}")),
        }
    }
}

/// Random parameters in (-0.9, 0.9) with `|t| >= 0.05` and pairwise
/// separation at least 0.05; the first one is 0 when `zero_first`.
pub fn random_parameters(rng: &mut ChaCha8Rng, count: usize, zero_first: bool) -> Vec<f64> {
    let mut ts: Vec<f64> = Vec::with_capacity(count);
    if zero_first && count > 0 {
        ts.push(0.0);
    }
    while ts.len() < count {
        let t: f64 = rng.gen_range(-0.9..0.9);
        if t.abs() >= 0.05 && ts.iter().all(|s| (s - t).abs() >= 0.05) {
            ts.push(t);
        }
    }
    ts
}

/// Strictly increasing grid of `len` points in (-0.9, 0.9), spaced at
/// least 0.05 apart and 0.01 away from every value in `avoid`.
pub fn random_grid(rng: &mut ChaCha8Rng, len: usize, avoid: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = Vec::with_capacity(len);
    while g.len() < len {
        let t: f64 = rng.gen_range(-0.9..0.9);
        if g.iter().all(|s| (s - t).abs() >= 0.05) && avoid.iter().all(|s| (s - t).abs() >= 0.01) {
            g.push(t);
        }
    }
    g.sort_by(f64::total_cmp);
    g
}

fn set(ts: &[f64], ctx: &PrecisionContext) -> Result<ParameterSet> {
    ParameterSet::from_f64(ts, ctx)
}

fn reals(ts: &[f64], ctx: &PrecisionContext) -> Vec<Real> {
    ts.iter().map(|t| ctx.real(*t)).collect()
}

fn max_abs_diff(a: &[Real], b: &[Real]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| Float::with_val(x.prec().max(y.prec()), x - y).abs().to_f64())
        .fold(0.0, f64::max)
}

fn fmt_ts(ts: &[f64]) -> String {
    let parts: Vec<String> = ts.iter().map(|t| format!("{t:.6}")).collect();
    format!("[{}]", parts.join(", "))
}

/// Strict interlacing for five configurations: orthogonal nodes of
/// consecutive degree, with the last parameter swapped, with one parameter
/// rotated to the end; Gaussian nodes of consecutive degree and with the
/// last parameter replaced.
pub fn interlacing_suite(cfg: &SuiteConfig, ctx: &PrecisionContext) -> Vec<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let trials: Vec<(usize, Vec<f64>, usize)> = (0..cfg.trials)
        .map(|k| {
            let n = rng.gen_range(2..=cfg.max_n.max(2));
            let ts = random_parameters(&mut rng, 2 * n + 2, k % 2 == 0);
            let i = rng.gen_range(0..n);
            (n, ts, i)
        })
        .collect();

    let mut reports: Vec<SuiteReport> = ["or-degree-step", "or-last-swap", "or-rotation", "gr-degree-step", "gr-last-swap"]
        .iter()
        .map(|name| SuiteReport::new(name))
        .collect();
    for (n, ts, i) in trials {
        let label = format!("n={n} t={}", fmt_ts(&ts));
        let interlaced = |a: Result<Vec<Real>>, b: Result<Vec<Real>>, what: &str| -> Result<bool> {
            Ok(check_interlacing_labeled(&a?, &b?, what, "variant")?.interlaced)
        };

        let base = &ts[..n + 1];
        reports[0].record(
            label.clone(),
            set(base, ctx).and_then(|p| interlaced(orthogonal_nodes(&p, n - 1, ctx), orthogonal_nodes(&p, n, ctx), "or")),
        );

        let mut swapped = ts[..n].to_vec();
        swapped.push(ts[n + 1]);
        reports[1].record(
            label.clone(),
            set(base, ctx).and_then(|p| {
                let q = set(&swapped, ctx)?;
                interlaced(orthogonal_nodes(&p, n, ctx), orthogonal_nodes(&q, n, ctx), "or")
            }),
        );

        let mut rotated = base.to_vec();
        let moved = rotated.remove(i);
        rotated.push(moved);
        reports[2].record(
            format!("{label} i={}", i + 1),
            set(base, ctx).and_then(|p| {
                let q = set(&rotated, ctx)?;
                interlaced(orthogonal_nodes(&p, n, ctx), orthogonal_nodes(&q, n, ctx), "or")
            }),
        );

        let gr_base = &ts[..2 * n];
        reports[3].record(
            label.clone(),
            set(gr_base, ctx).and_then(|p| interlaced(gaussian_nodes(&p, n - 1, ctx), gaussian_nodes(&p, n, ctx), "gr")),
        );

        let mut replaced = ts[..2 * n - 1].to_vec();
        replaced.push(ts[2 * n]);
        reports[4].record(
            label,
            set(gr_base, ctx).and_then(|p| {
                let q = set(&replaced, ctx)?;
                interlaced(gaussian_nodes(&p, n, ctx), gaussian_nodes(&q, n, ctx), "gr")
            }),
        );
    }
    reports
}

/// Nodes strictly decrease in the last parameter, alternating between the
/// orthogonal and the Gaussian rule.
pub fn monotonicity_suite(cfg: &SuiteConfig, ctx: &PrecisionContext) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4d4f);
    let mut report = SuiteReport::new("node-monotonicity");
    for k in 0..cfg.trials {
        let kind = if k % 2 == 0 { RuleKind::Orthogonal } else { RuleKind::Gaussian };
        let n = rng.gen_range(1..=cfg.max_n.max(1));
        let fixed_len = if kind == RuleKind::Orthogonal { n } else { 2 * n - 1 };
        let fixed = random_parameters(&mut rng, fixed_len, k % 4 < 2);
        let grid = random_grid(&mut rng, 5, &fixed);
        let label = format!("{kind}({n}) fixed={} grid={}", fmt_ts(&fixed), fmt_ts(&grid));
        report.record(
            label,
            set(&fixed, ctx).and_then(|p| Ok(node_monotonicity_scan(kind, &p, &reals(&grid, ctx), ctx)?.verdict)),
        );
    }
    report
}

/// First weight strictly decreasing and last weight strictly increasing in
/// the last parameter, with `t_1 = 0`.
pub fn extreme_weight_suite(cfg: &SuiteConfig, ctx: &PrecisionContext) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5745);
    let mut report = SuiteReport::new("extreme-weight-monotonicity");
    for k in 0..cfg.trials {
        let kind = if k % 2 == 0 { RuleKind::Orthogonal } else { RuleKind::Gaussian };
        let n = rng.gen_range(2..=cfg.max_n.max(2));
        let fixed_len = if kind == RuleKind::Orthogonal { n } else { 2 * n - 1 };
        let fixed = random_parameters(&mut rng, fixed_len, true);
        let grid = random_grid(&mut rng, 5, &fixed);
        let label = format!("{kind}({n}) fixed={} grid={}", fmt_ts(&fixed), fmt_ts(&grid));
        report.record(
            label,
            set(&fixed, ctx)
                .and_then(|p| Ok(extreme_weight_monotonicity_scan(kind, &p, &reals(&grid, ctx), ctx)?.verdict)),
        );
    }
    report
}

/// `|sum beta - 2| <= tol` for rules with `t_1 = 0`, and the strict bound
/// for Gaussian rules with `t_1 != 0`.
pub fn weight_sum_suite(cfg: &SuiteConfig, ctx: &PrecisionContext, tol: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5753);
    let mut report = SuiteReport::new("weight-sum");
    for k in 0..cfg.trials {
        let n = rng.gen_range(1..=cfg.max_n.max(1));
        let zero_first = k % 3 != 2;
        let ts = random_parameters(&mut rng, 2 * n, zero_first);
        let label = format!("n={n} t={}", fmt_ts(&ts));
        let outcome = (|| -> Result<bool> {
            let p = set(&ts, ctx)?;
            let gr = build_gaussian_rule(&p, n, ctx)?;
            if !zero_first {
                return weight_sum_bound_check(&gr, ctx);
            }
            let or = build_orthogonal_rule(&p, n.min(ts.len() - 1), ctx)?;
            let mut ok = true;
            for rule in [&gr, &or] {
                let dev = (rule.weight_sum() - 2u32).abs().to_f64();
                report_observe(&mut report.worst, dev);
                ok &= dev <= tol;
            }
            Ok(ok)
        })();
        report.record(label, outcome);
    }
    report
}

fn report_observe(worst: &mut Option<f64>, v: f64) {
    *worst = Some(worst.map_or(v, |w| w.max(v)));
}

/// Exactness audit of GR(n) over its `2n` basis functions and OR(n)
/// (`t_1 = 0`) over its `n + 1`, against `tol`.
pub fn exactness_suite(cfg: &SuiteConfig, ctx: &PrecisionContext, tol: f64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4558);
    let mut report = SuiteReport::new("exactness-audit");
    for k in 0..cfg.trials {
        let n = rng.gen_range(1..=cfg.max_n.max(1));
        let zero_first = k % 2 == 0;
        let ts = random_parameters(&mut rng, 2 * n, zero_first);
        let label = format!("n={n} t={}", fmt_ts(&ts));
        let outcome = (|| -> Result<bool> {
            let p = set(&ts, ctx)?;
            let gr = build_gaussian_rule(&p, n, ctx)?;
            let mut worst = gr.audit.max.to_f64();
            if zero_first {
                let or = build_orthogonal_rule(&p, n.min(ts.len() - 1), ctx)?;
                worst = worst.max(or.audit.max.to_f64());
            }
            report_observe(&mut report.worst, worst);
            Ok(worst <= tol)
        })();
        report.record(label, outcome);
    }
    report
}

/// Orthogonal nodes against the Gram-Schmidt oracle (`n <= 6`, tolerance
/// `or_tol`) and Gaussian rules against the direct Newton solve
/// (`n in {1, 2}`, tolerance `gr_tol`).
pub fn oracle_suite(cfg: &SuiteConfig, ctx: &PrecisionContext, or_tol: f64, gr_tol: f64) -> Vec<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4f52);
    let mut or_report = SuiteReport::new("gram-schmidt-oracle");
    let mut gr_report = SuiteReport::new("brute-force-oracle");
    for k in 0..cfg.trials {
        let n = rng.gen_range(1..=cfg.max_n.clamp(1, 6));
        let ts = random_parameters(&mut rng, n + 1, k % 2 == 0);
        let label = format!("n={n} t={}", fmt_ts(&ts));
        let outcome = (|| -> Result<bool> {
            let p = set(&ts, ctx)?;
            let zeros = gram_schmidt_oracle(&p, ctx)?;
            let nodes = orthogonal_nodes(&p, n, ctx)?;
            let d = max_abs_diff(&zeros, &nodes);
            report_observe(&mut or_report.worst, d);
            Ok(d <= or_tol)
        })();
        or_report.record(label, outcome);

        let m = 1 + k % 2;
        let ts = random_parameters(&mut rng, 2 * m, k % 4 < 2);
        let label = format!("n={m} t={}", fmt_ts(&ts));
        let outcome = (|| -> Result<bool> {
            let p = set(&ts, ctx)?;
            let (x, b) = brute_force_gaussian(&p, m, ctx)?;
            let rule = build_gaussian_rule(&p, m, ctx)?;
            let d = max_abs_diff(&x, &rule.nodes).max(max_abs_diff(&b, &rule.weights));
            report_observe(&mut gr_report.worst, d);
            Ok(d <= gr_tol)
        })();
        gr_report.record(label, outcome);
    }
    vec![or_report, gr_report]
}

/// Partial sums of the denseness series for a named generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensenessReport {
    pub generator: String,
    pub k: usize,
    pub partial_sums: Vec<f64>,
    pub tail_share: f64,
    /// `tail_share` above 1e-6: the sums keep growing.
    pub growing: bool,
}

pub fn denseness_report<I>(generator: &str, params: I, k: usize) -> Result<DensenessReport>
where
    I: IntoIterator<Item = Real>,
{
    let sums = denseness_partial_sums(params, k)?;
    let share = tail_share(&sums);
    Ok(DensenessReport {
        generator: generator.to_string(),
        k,
        partial_sums: sums,
        tail_share: share,
        growing: share > 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    fn small() -> SuiteConfig {
        SuiteConfig {
            seed: 7,
            trials: 4,
            max_n: 4,
        }
    }

    #[test]
    fn random_parameters_respect_constraints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let ts = random_parameters(&mut rng, 12, true);
            assert_eq!(ts[0], 0.0);
            for (i, a) in ts.iter().enumerate() {
                assert!(a.abs() < 0.9);
                for b in &ts[i + 1..] {
                    assert!((a - b).abs() >= 0.05);
                }
            }
        }
    }

    #[test]
    fn suites_are_deterministic_and_pass() {
        let c = make_context(256, 1e-30).unwrap();
        let a = interlacing_suite(&small(), &c);
        let b = interlacing_suite(&small(), &c);
        assert_eq!(a, b);
        for r in &a {
            assert!(r.all_passed(), "{r:?}");
        }
        assert!(monotonicity_suite(&small(), &c).all_passed());
        assert!(extreme_weight_suite(&small(), &c).all_passed());
        assert!(weight_sum_suite(&small(), &c, 1e-20).all_passed());
        assert!(exactness_suite(&small(), &c, 1e-20).all_passed());
    }
}
