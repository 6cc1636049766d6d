//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances are pinned below.

use std::process::ExitCode;
use std::time::Instant;

use ratquad::analysis::suites::{
    exactness_suite, extreme_weight_suite, interlacing_suite, monotonicity_suite, oracle_suite, weight_sum_suite,
    SuiteConfig, SuiteReport, DEFAULT_SEED,
};
use ratquad::analysis::{asymptotic_density, node_distribution_distance, ParameterMeasure};
use ratquad::integrands::{param_gen_chebyshev_ladder, param_gen_converging, param_gen_reciprocal_poles, param_gen_sqrt, Integrand};
use ratquad::rules::{build_gaussian_rule, gaussian_nodes, build_legendre_rule, build_orthogonal_rule, relative_error, QuadratureRule};
use ratquad::{make_context, PrecisionContext, Real, Result};

const TABLE1_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-20;
const AUDIT_TOL: f64 = 1e-20;
const GS_ORACLE_TOL: f64 = 1e-12;
const BRUTE_FORCE_TOL: f64 = 1e-20;
const KS_LADDER_MAX: f64 = 0.1;
const KS_LEGENDRE_MAX: f64 = 0.05;
const PUBLISHED_FACTOR: f64 = 2.0;

const GR6_NODES: [f64; 6] = [
    -0.9797390942708352,
    -0.8853794251591486,
    -0.6822351336410264,
    -0.3156675377072605,
    0.2408527285476740,
    0.8155273184304977,
];
const GR6_WEIGHTS: [f64; 6] = [
    0.0528758827013522,
    0.1411615118844550,
    0.2748067575758422,
    0.4657849717765712,
    0.6221630733806293,
    0.4432078026811501,
];
const OR6_NODES: [f64; 6] = [
    -0.9736320979338328,
    -0.8537169072027923,
    -0.6094091127142633,
    -0.2057016948376719,
    0.3414560761423378,
    0.8474273771128526,
];
const OR6_WEIGHTS: [f64; 6] = [
    0.0685126325838336,
    0.1760476819554412,
    0.3192517203251832,
    0.4878639628808742,
    0.5765658940369015,
    0.3717581082177663,
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn max_dev(values: &[Real], expected: &[f64]) -> f64 {
    values
        .iter()
        .zip(expected)
        .map(|(v, e)| (v.to_f64() - e).abs())
        .fold(0.0, f64::max)
}

fn rel_err(rule: &QuadratureRule, f: Integrand, ctx: &PrecisionContext) -> Result<f64> {
    let exact = f.exact_value(ctx)?;
    Ok(relative_error(rule, |x| f.eval(x), &exact.value)?.to_f64())
}

fn ctx256() -> PrecisionContext {
    make_context(256, 1e-30).expect("valid context")
}

fn table1() -> Result<Outcome> {
    let c = ctx256();
    let p = param_gen_sqrt(12, &c)?;
    let gr = build_gaussian_rule(&p, 6, &c)?;
    let or = build_orthogonal_rule(&p, 6, &c)?;
    let d = [
        max_dev(&gr.nodes, &GR6_NODES),
        max_dev(&gr.weights, &GR6_WEIGHTS),
        max_dev(&or.nodes, &OR6_NODES),
        max_dev(&or.weights, &OR6_WEIGHTS),
    ];
    let worst = d.iter().copied().fold(0.0, f64::max);
    ok(
        worst <= TABLE1_TOL,
        format!("max |deviation| over 24 values = {worst:.2e} (tol {TABLE1_TOL:.0e})"),
    )
}

fn suite_line(reports: &[SuiteReport], tol: Option<f64>) -> Outcome {
    let pass = reports.iter().all(|r| r.all_passed());
    let parts: Vec<String> = reports
        .iter()
        .map(|r| {
            let worst = r.worst.map(|w| format!(", worst {w:.2e}")).unwrap_or_default();
            format!("{} {}/{}{worst}", r.name, r.passed, r.trials)
        })
        .collect();
    let mut detail = parts.join("; ");
    if let Some(t) = tol {
        detail.push_str(&format!(" (tol {t:.0e})"));
    }
    for r in reports {
        for f in r.failures.iter().take(3) {
            detail.push_str(&format!("\n      failed: {} {f}", r.name));
        }
    }
    Outcome { pass, detail }
}

fn weight_sum() -> Result<Outcome> {
    let c = ctx256();
    let p = param_gen_sqrt(12, &c)?;
    let mut worst = 0.0f64;
    for rule in [build_gaussian_rule(&p, 6, &c)?, build_orthogonal_rule(&p, 6, &c)?] {
        worst = worst.max((rule.weight_sum() - 2u32).abs().to_f64());
    }
    let cfg = SuiteConfig {
        seed: DEFAULT_SEED,
        trials: 50,
        max_n: 10,
    };
    let report = weight_sum_suite(&cfg, &c, WEIGHT_SUM_TOL);
    let mut out = suite_line(&[report], Some(WEIGHT_SUM_TOL));
    out.pass &= worst <= WEIGHT_SUM_TOL;
    out.detail = format!("table-1 rules {worst:.2e}; {}", out.detail);
    Ok(out)
}

fn exactness() -> Result<Outcome> {
    let c = ctx256();
    let cfg = SuiteConfig {
        seed: DEFAULT_SEED,
        trials: 25,
        max_n: 10,
    };
    Ok(suite_line(&[exactness_suite(&cfg, &c, AUDIT_TOL)], Some(AUDIT_TOL)))
}

fn within_factor(value: f64, published: f64) -> bool {
    value <= published * PUBLISHED_FACTOR && value >= published / PUBLISHED_FACTOR
}

fn table2() -> Result<Outcome> {
    let c = ctx256();
    let f = Integrand::Exponential { omega: 5.0 };
    let p = param_gen_sqrt(12, &c)?;
    let gr = rel_err(&build_gaussian_rule(&p, 6, &c)?, f, &c)?;
    let or = rel_err(&build_orthogonal_rule(&p, 6, &c)?, f, &c)?;
    let gl = rel_err(&build_legendre_rule(6, &c)?, f, &c)?;
    let pass = (1e-6..=1e-5).contains(&gr)
        && (1e-7..=1e-6).contains(&or)
        && within_factor(gr, 0.261e-5)
        && within_factor(or, 0.207e-6)
        && gl > gr
        && gl > or;
    ok(pass, format!("omega=5 n=6: GR {gr:.3e} (published 0.261e-5), OR {or:.3e} (published 0.207e-6), GL {gl:.3e}"))
}

fn table3() -> Result<Outcome> {
    let c = ctx256();
    let f = Integrand::Stieltjes;
    let p = param_gen_chebyshev_ladder(3, 12, &c)?;
    let gr2 = rel_err(&build_gaussian_rule(&p, 2, &c)?, f, &c)?;
    let gl2 = rel_err(&build_legendre_rule(2, &c)?, f, &c)?;
    let gr6 = rel_err(&build_gaussian_rule(&p, 6, &c)?, f, &c)?;
    let pass = gr2 <= 1e-5 && gr2 * 1e3 <= gl2 && gr6 <= 1e-15 && (0.161e-19 / 100.0..=0.161e-19 * 100.0).contains(&gr6);
    ok(
        pass,
        format!("n=2: GR {gr2:.3e} vs GL {gl2:.3e} (ratio {:.1e}); n=6: GR {gr6:.3e} (published 0.161e-19)", gl2 / gr2),
    )
}

fn tables45() -> Result<Outcome> {
    let c = ctx256();
    let omega = 2.0;
    let n = 5;
    let gr_params = param_gen_reciprocal_poles(omega, 2 * n, false, &c)?;
    let or_params = param_gen_reciprocal_poles(omega, n + 1, true, &c)?;
    let gr = build_gaussian_rule(&gr_params, n, &c)?;
    let or = build_orthogonal_rule(&or_params, n, &c)?;
    let gl = build_legendre_rule(n, &c)?;
    let i3 = Integrand::SincPoles { omega };
    let i4 = Integrand::SincPolesSquared { omega };
    let (g3, o3, l3) = (rel_err(&gr, i3, &c)?, rel_err(&or, i3, &c)?, rel_err(&gl, i3, &c)?);
    let (g4, o4, l4) = (rel_err(&gr, i4, &c)?, rel_err(&or, i4, &c)?, rel_err(&gl, i4, &c)?);
    let pass = g3 * 1e3 <= l3 && o3 * 1e3 <= l3 && o4 * 1e2 <= g4;
    ok(
        pass,
        format!(
            "omega=2 n=5: I3 GR {g3:.2e} OR {o3:.2e} GL {l3:.2e} (published 0.46e-11/0.26e-8/0.52e-5); \
             I4 GR {g4:.2e} OR {o4:.2e} GL {l4:.2e} (published 0.65e-5/0.79e-8/0.47e-4)"
        ),
    )
}

fn oracles() -> Result<Outcome> {
    let c = ctx256();
    let cfg = SuiteConfig {
        seed: DEFAULT_SEED,
        trials: 20,
        max_n: 6,
    };
    let reports = oracle_suite(&cfg, &c, GS_ORACLE_TOL, BRUTE_FORCE_TOL);
    let mut out = suite_line(&reports, None);
    out.detail.push_str(&format!(" (tol {GS_ORACLE_TOL:.0e} / {BRUTE_FORCE_TOL:.0e})"));
    Ok(out)
}

fn properties() -> Result<Outcome> {
    let c = ctx256();
    let cfg = SuiteConfig {
        seed: DEFAULT_SEED,
        trials: 50,
        max_n: 8,
    };
    let mut reports = interlacing_suite(&cfg, &c);
    reports.push(monotonicity_suite(&cfg, &c));
    reports.push(extreme_weight_suite(&cfg, &c));
    Ok(suite_line(&reports, None))
}

fn distribution() -> Result<Outcome> {
    let c = make_context(256, 1e-20)?;
    let model = asymptotic_density(&ParameterMeasure::point(0.5))?;
    let mut ladder = Vec::new();
    for n in [20usize, 60] {
        let p = param_gen_converging(0.5, 0.3, 2 * n, &c)?;
        let nodes = gaussian_nodes(&p, n, &c)?;
        ladder.push(node_distribution_distance(&nodes, &model));
    }
    let arcsin = asymptotic_density(&ParameterMeasure::point(0.0))?;
    let gl = build_legendre_rule(50, &c)?;
    let ks_gl = node_distribution_distance(&gl.nodes, &arcsin);
    let pass = ladder[1] < ladder[0] && ladder[1] < KS_LADDER_MAX && ks_gl < KS_LEGENDRE_MAX;
    ok(
        pass,
        format!(
            "t_i -> 0.5: KS(20) = {:.4}, KS(60) = {:.4}; GL(50) vs arcsin KS = {ks_gl:.4}",
            ladder[0], ladder[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("table-1 nodes and weights", table1),
        ("weight-sum identity", weight_sum),
        ("exactness audit", exactness),
        ("table-2 spot check", table2),
        ("table-3 spot check", table3),
        ("tables-4/5 qualitative", tables45),
        ("oracle equivalence", oracles),
        ("property suites", properties),
        ("distribution convergence", distribution),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag}  {name}: {} [{secs:.1}s]", outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
