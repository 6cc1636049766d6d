//! `table N`: nodes and weights (1) or relative-error grids (2-5).

use rayon::prelude::*;
use ratquad::integrands::Integrand;
use ratquad::numerics::{format_fixed, format_mantissa_exponent};
use ratquad::rules::{build_rule, relative_error};
use ratquad::{PrecisionContext, Real, RuleKind};

use crate::args::TableArgs;
use crate::gen::GenSpec;
use crate::{Failure, Output};

const KINDS: [RuleKind; 3] = [RuleKind::Gaussian, RuleKind::Orthogonal, RuleKind::Legendre];

struct Layout {
    omegas: Vec<Option<f64>>,
    ns: Vec<usize>,
    digits: usize,
    integrand: fn(Option<f64>) -> Integrand,
    params: fn(Option<f64>) -> GenSpec,
}

fn layout(which: u8) -> Option<Layout> {
    let some = |v: &[f64]| v.iter().copied().map(Some).collect();
    match which {
        2 => Some(Layout {
            omegas: some(&[5.0, 25.0]),
            ns: vec![2, 6, 10, 14],
            digits: 3,
            integrand: |w| Integrand::Exponential { omega: w.unwrap_or(5.0) },
            params: |_| GenSpec::Sqrt,
        }),
        3 => Some(Layout {
            omegas: vec![None],
            ns: vec![2, 6, 10],
            digits: 3,
            integrand: |_| Integrand::Stieltjes,
            params: |_| GenSpec::Ladder(3),
        }),
        4 | 5 => Some(Layout {
            omegas: some(&[2.0, 1.1, 1.01]),
            ns: vec![5, 10, 15],
            digits: 2,
            integrand: if which == 4 {
                |w| Integrand::SincPoles { omega: w.unwrap_or(2.0) }
            } else {
                |w| Integrand::SincPolesSquared { omega: w.unwrap_or(2.0) }
            },
            params: |w| GenSpec::Poles {
                omega: w.unwrap_or(2.0),
                zero: None,
            },
        }),
        _ => None,
    }
}

fn table1(a: &TableArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let n = a.ns.as_ref().and_then(|v| v.first().copied()).unwrap_or(6);
    let params = GenSpec::Sqrt.build(RuleKind::Gaussian, 2 * n, ctx)?;
    let gr = build_rule(RuleKind::Gaussian, &params, n, ctx)?;
    let or = build_rule(RuleKind::Orthogonal, &params, n, ctx)?;
    let f = |v: &Real| format_fixed(v, 16);
    let mut text = String::from("j,gr_node,gr_weight,or_node,or_weight\n");
    for j in 0..n {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            j + 1,
            f(&gr.nodes[j]),
            f(&gr.weights[j]),
            f(&or.nodes[j]),
            f(&or.weights[j])
        ));
    }
    Ok(Output { text, ok: true })
}

fn cell(integrand: Integrand, params: &GenSpec, kind: RuleKind, n: usize, exact: &Real, ctx: &PrecisionContext) -> Result<f64, Failure> {
    let set = params.for_rule(kind, n, ctx)?;
    let rule = build_rule(kind, &set, n, ctx)?;
    Ok(relative_error(&rule, |x| integrand.eval(x), exact)?.to_f64())
}

pub fn run(a: &TableArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    if a.which == 1 {
        return table1(a, ctx);
    }
    let mut lay = layout(a.which).ok_or_else(|| Failure::Usage(format!("no table {}; pick 1 to 5", a.which)))?;
    if let Some(ns) = &a.ns {
        if ns.is_empty() || ns.contains(&0) {
            return Err(Failure::Usage("--ns needs positive node counts".into()));
        }
        lay.ns = ns.clone();
    }
    if let Some(ws) = &a.omegas {
        if ws.is_empty() || lay.omegas == [None] {
            return Err(Failure::Usage(format!("table {} takes no omega list here", a.which)));
        }
        lay.omegas = ws.iter().copied().map(Some).collect();
    }
    // Validate ids up front so a bad omega is a usage error, not a column of failures.
    for w in &lay.omegas {
        (lay.integrand)(*w).to_string().parse::<Integrand>()?;
    }

    let references: Vec<Result<Real, String>> = lay
        .omegas
        .par_iter()
        .map(|w| (lay.integrand)(*w).exact_value(ctx).map(|r| r.value).map_err(|e| e.to_string()))
        .collect();

    let jobs: Vec<(usize, usize, RuleKind)> = (0..lay.omegas.len())
        .flat_map(|i| lay.ns.iter().flat_map(move |&n| KINDS.iter().map(move |&k| (i, n, k))))
        .collect();
    let results: Vec<Result<f64, String>> = jobs
        .par_iter()
        .map(|&(i, n, kind)| {
            let w = lay.omegas[i];
            let exact = references[i].as_ref().map_err(|e| format!("reference: {e}"))?;
            cell((lay.integrand)(w), &(lay.params)(w), kind, n, exact, ctx).map_err(|e| e.to_string())
        })
        .collect();

    let with_omega = lay.omegas[0].is_some();
    let mut text = String::from(if with_omega { "omega,n,GR,OR,GL\n" } else { "n,GR,OR,GL\n" });
    let mut ok = true;
    for (row, chunk) in jobs.chunks(KINDS.len()).zip(results.chunks(KINDS.len())) {
        let (i, n, _) = row[0];
        if let Some(w) = lay.omegas[i] {
            text.push_str(&format!("{w},"));
        }
        text.push_str(&n.to_string());
        for (&(_, _, kind), r) in row.iter().zip(chunk) {
            let s = match r {
                Ok(v) if a.sci => format!("{v:.3e}"),
                Ok(v) => format_mantissa_exponent(*v, lay.digits),
                Err(e) => {
                    ok = false;
                    eprintln!("table {}: {kind}({n}) failed: {e}", a.which);
                    "FAIL".to_string()
                }
            };
            text.push(',');
            text.push_str(&s);
        }
        text.push('\n');
    }
    Ok(Output { text, ok })
}
