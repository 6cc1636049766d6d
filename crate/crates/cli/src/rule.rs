//! `rule` and `integrate`.

use ratquad::integrands::Integrand;
use ratquad::params::decimal_number;
use ratquad::rules::{build_rule, relative_error};
use ratquad::{PrecisionContext, QuadratureRule, RuleKind};
use serde_json::json;

use crate::args::{Format, IntegrateArgs, RuleArgs};
use crate::gen::GenSpec;
use crate::{json_text, Failure, Output};

const TABLE1_DECIMALS: usize = 16;

fn build(kind: &str, n: usize, params: &str, ctx: &PrecisionContext) -> Result<(QuadratureRule, GenSpec), Failure> {
    let kind: RuleKind = kind.parse()?;
    if n == 0 {
        return Err(Failure::Usage("n must be at least 1".into()));
    }
    let gen: GenSpec = params.parse()?;
    let set = gen.for_rule(kind, n, ctx)?;
    let rule = build_rule(kind, &set, n, ctx)?;
    eprintln!(
        "{}({n}): max residual {:.2e}, {} bits",
        rule.kind,
        rule.audit.max.to_f64(),
        rule.precision_bits
    );
    Ok((rule, gen))
}

pub fn run_rule(a: &RuleArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let (rule, _) = build(&a.kind, a.n, &a.params, ctx)?;
    let digits = if a.table1 { TABLE1_DECIMALS } else { ctx.output_digits() };
    let text = match a.format {
        Format::Json => json_text(&rule.to_json(digits)),
        Format::Csv => rule.to_csv(digits, a.table1.then_some(TABLE1_DECIMALS)),
    };
    Ok(Output { text, ok: true })
}

pub fn run_integrate(a: &IntegrateArgs, ctx: &PrecisionContext) -> Result<Output, Failure> {
    let f: Integrand = a.integrand.parse()?;
    let (rule, gen) = build(&a.kind, a.n, &a.params, ctx)?;
    let value = ratquad::rules::apply_rule(&rule, |x| f.eval(x))?;
    let reference = f.exact_value(ctx)?;
    let err = relative_error(&rule, |x| f.eval(x), &reference.value)?;
    let digits = ctx.output_digits();
    let params = if rule.kind == RuleKind::Legendre { None } else { Some(gen.to_string()) };
    let body = json!({
        "integrand": f.to_string(),
        "kind": rule.kind.tag(),
        "n": rule.n,
        "params": params,
        "value": decimal_number(&value, digits),
        "reference": decimal_number(&reference.value, digits),
        "provenance": reference.provenance.to_string(),
        "relative_error": decimal_number(&err, 6),
    });
    Ok(Output {
        text: json_text(&body),
        ok: true,
    })
}
