//! `props`: the randomized property suites as one JSON report.

use ratquad::analysis::suites::{
    denseness_report, exactness_suite, extreme_weight_suite, interlacing_suite, monotonicity_suite, oracle_suite,
    weight_sum_suite, SuiteConfig, SuiteReport,
};
use ratquad::{PrecisionContext, RuleKind};
use serde_json::json;

use crate::args::PropsArgs;
use crate::gen::GenSpec;
use crate::{json_text, Failure, Output};

const SUITES: [&str; 7] = [
    "interlacing",
    "monotonicity",
    "extreme-weights",
    "weight-sum",
    "exactness",
    "oracle",
    "denseness",
];
const DEFAULT_GENS: [&str; 3] = ["sqrt", "conv:0.5:0.3", "poles:2"];

const WEIGHT_SUM_TOL: f64 = 1e-20;
const AUDIT_TOL: f64 = 1e-20;
const GS_ORACLE_TOL: f64 = 1e-12;
const BRUTE_FORCE_TOL: f64 = 1e-20;

/// Pinned tolerances, loosened when the context itself is looser.
fn tol(base: f64, ctx: &PrecisionContext) -> f64 {
    base.max(ctx.target_rel_tol() * 1e3)
}

pub fn run(a: &PropsArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let wanted: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&a.suite.as_str()) {
        vec![a.suite.as_str()]
    } else {
        return Err(Failure::Usage(format!(
            "unknown suite {:?}; expected all or one of {}",
            a.suite,
            SUITES.join(", ")
        )));
    };
    if a.max_n == 0 || a.k == 0 {
        return Err(Failure::Usage("--max-n and --k must be positive".into()));
    }
    let cfg = SuiteConfig {
        seed: a.seed,
        trials: a.trials,
        max_n: a.max_n,
    };

    let mut reports: Vec<SuiteReport> = Vec::new();
    let mut denseness = Vec::new();
    for name in wanted {
        match name {
            "interlacing" => reports.extend(interlacing_suite(&cfg, ctx)),
            "monotonicity" => reports.push(monotonicity_suite(&cfg, ctx)),
            "extreme-weights" => reports.push(extreme_weight_suite(&cfg, ctx)),
            "weight-sum" => reports.push(weight_sum_suite(&cfg, ctx, tol(WEIGHT_SUM_TOL, ctx))),
            "exactness" => reports.push(exactness_suite(&cfg, ctx, tol(AUDIT_TOL, ctx))),
            "oracle" => reports.extend(oracle_suite(
                &cfg,
                ctx,
                tol(GS_ORACLE_TOL, ctx),
                tol(BRUTE_FORCE_TOL, ctx),
            )),
            _ => {
                let gens: Vec<String> = if a.gens.is_empty() {
                    DEFAULT_GENS.iter().map(|s| s.to_string()).collect()
                } else {
                    a.gens.clone()
                };
                for g in gens {
                    let spec: GenSpec = g.parse()?;
                    let params = spec.build(RuleKind::Gaussian, a.k, ctx)?;
                    denseness.push(denseness_report(&spec.to_string(), params.slots(), a.k)?);
                }
            }
        }
    }

    let passed = reports.iter().all(SuiteReport::all_passed);
    for r in reports.iter().filter(|r| !r.all_passed()) {
        eprintln!("{}: {}/{} passed", r.name, r.passed, r.trials);
    }
    let body = json!({
        "seed": a.seed,
        "trials": a.trials,
        "max_n": a.max_n,
        "passed": passed,
        "suites": reports,
        "denseness": denseness,
    });
    Ok(Output {
        text: json_text(&body),
        ok: passed,
    })
}
