//! `dist`: Kolmogorov distance between node sets and the limit density.

use rayon::prelude::*;
use ratquad::analysis::{asymptotic_density, node_distribution_distance, ParameterMeasure};
use ratquad::rules::{build_legendre_rule, gaussian_nodes, orthogonal_nodes};
use ratquad::{PrecisionContext, RuleKind};
use serde_json::json;

use crate::args::DistArgs;
use crate::gen::{slots_needed, GenSpec};
use crate::{json_text, Failure, Output};

pub fn run(a: &DistArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let kind: RuleKind = a.kind.parse()?;
    let gen: GenSpec = a.generator.parse()?;
    if a.ns.is_empty() || a.ns.contains(&0) {
        return Err(Failure::Usage("--ns needs positive node counts".into()));
    }
    if a.grid < 2 {
        return Err(Failure::Usage("--grid needs at least 2 points".into()));
    }
    let measure = match kind {
        RuleKind::Legendre => ParameterMeasure::point(0.0),
        _ => gen
            .limit()
            .ok_or_else(|| Failure::Usage(format!("generator {gen} has no known limit distribution")))?,
    };
    let model = asymptotic_density(&measure)?;

    let distances: Vec<Result<f64, Failure>> = a
        .ns
        .par_iter()
        .map(|&n| {
            let nodes = match kind {
                RuleKind::Legendre => build_legendre_rule(n, ctx)?.nodes,
                RuleKind::Gaussian => gaussian_nodes(&gen.build(kind, slots_needed(kind, n), ctx)?, n, ctx)?,
                RuleKind::Orthogonal => orthogonal_nodes(&gen.build(kind, slots_needed(kind, n), ctx)?, n, ctx)?,
            };
            Ok(node_distribution_distance(&nodes, &model))
        })
        .collect();
    let mut pairs = Vec::with_capacity(a.ns.len());
    for (n, d) in a.ns.iter().zip(distances) {
        pairs.push(json!({ "n": n, "ks": d? }));
    }
    let density: Vec<_> = model
        .sample(a.grid)
        .into_iter()
        .map(|(x, p)| json!({ "x": x, "pdf": p }))
        .collect();
    let generator = if kind == RuleKind::Legendre { None } else { Some(gen.to_string()) };
    let body = json!({
        "kind": kind.tag(),
        "gen": generator,
        "model": model,
        "pairs": pairs,
        "density": density,
    });
    Ok(Output {
        text: json_text(&body),
        ok: true,
    })
}
