//! Parameter generator specs such as `sqrt`, `ladder:3` or `poles:2:zero`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ratquad::analysis::ParameterMeasure;
use ratquad::integrands::{param_gen_chebyshev_ladder, param_gen_converging, param_gen_reciprocal_poles, param_gen_sqrt};
use ratquad::{Error, ParameterSet, PrecisionContext, Result, RuleKind};

#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    /// `t_i = 1 - 1/√i`.
    Sqrt,
    /// Nested Chebyshev ladder of level `m`, poles on [-3, -2].
    Ladder(u32),
    /// `t = -1/p` over the poles `±ω, ±2ω, ...`; `zero` defaults to
    /// whether the rule is orthogonal.
    Poles { omega: f64, zero: Option<bool> },
    /// `t_i = a + s (-1)^i / i`.
    Converging { a: f64, s: f64 },
    /// Literal values, in order.
    List(Vec<String>),
    /// `[{t, mult}, ...]` JSON file.
    File(PathBuf),
}

fn number(field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("{what}: cannot parse {field:?}")))
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let fields: Vec<&str> = if rest.is_empty() { Vec::new() } else { rest.split(':').collect() };
        let bad = || Error::InvalidArgument(format!("unrecognized parameter generator {s:?}"));
        match (head, fields.as_slice()) {
            ("sqrt", []) => Ok(GenSpec::Sqrt),
            ("ladder", [m]) => m
                .parse()
                .map(GenSpec::Ladder)
                .map_err(|_| Error::InvalidArgument(format!("ladder level {m:?}"))),
            ("poles", [w]) => Ok(GenSpec::Poles {
                omega: number(w, "poles")?,
                zero: None,
            }),
            ("poles", [w, z]) => {
                let zero = match *z {
                    "zero" => true,
                    "nozero" => false,
                    _ => return Err(bad()),
                };
                Ok(GenSpec::Poles {
                    omega: number(w, "poles")?,
                    zero: Some(zero),
                })
            }
            ("conv", [a, sc]) => Ok(GenSpec::Converging {
                a: number(a, "conv")?,
                s: number(sc, "conv")?,
            }),
            ("list", _) if !rest.is_empty() => Ok(GenSpec::List(rest.split(',').map(|v| v.trim().to_string()).collect())),
            ("file", _) if !rest.is_empty() => Ok(GenSpec::File(PathBuf::from(rest))),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Sqrt => write!(f, "sqrt"),
            GenSpec::Ladder(m) => write!(f, "ladder:{m}"),
            GenSpec::Poles { omega, zero: None } => write!(f, "poles:{omega}"),
            GenSpec::Poles { omega, zero: Some(z) } => {
                write!(f, "poles:{omega}:{}", if *z { "zero" } else { "nozero" })
            }
            GenSpec::Converging { a, s } => write!(f, "conv:{a}:{s}"),
            GenSpec::List(v) => write!(f, "list:{}", v.join(",")),
            GenSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Basis slots a rule of this kind and size consumes.
pub fn slots_needed(kind: RuleKind, n: usize) -> usize {
    match kind {
        RuleKind::Gaussian => 2 * n,
        RuleKind::Orthogonal => n + 1,
        RuleKind::Legendre => 0,
    }
}

impl GenSpec {
    /// The first `count` parameters for a rule of the given kind. Literal
    /// lists and files are returned whole.
    pub fn build(&self, kind: RuleKind, count: usize, ctx: &PrecisionContext) -> Result<ParameterSet> {
        match self {
            GenSpec::Sqrt => param_gen_sqrt(count, ctx),
            GenSpec::Ladder(m) => param_gen_chebyshev_ladder(*m, count, ctx),
            GenSpec::Poles { omega, zero } => {
                let zero = zero.unwrap_or(kind == RuleKind::Orthogonal);
                param_gen_reciprocal_poles(*omega, count, zero, ctx)
            }
            GenSpec::Converging { a, s } => param_gen_converging(*a, *s, count, ctx),
            GenSpec::List(values) => {
                let ts = values.iter().map(|v| ctx.parse(v)).collect::<Result<Vec<_>>>()?;
                ParameterSet::from_reals(ts, ctx)
            }
            GenSpec::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                let value: serde_json::Value = serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                ParameterSet::from_json(&value, ctx)
            }
        }
    }

    /// Parameters for the rule `kind(n)`.
    pub fn for_rule(&self, kind: RuleKind, n: usize, ctx: &PrecisionContext) -> Result<ParameterSet> {
        if kind == RuleKind::Legendre {
            return Ok(ParameterSet::empty());
        }
        self.build(kind, slots_needed(kind, n), ctx)
    }

    /// Limit distribution of the generated sequence, where it has one.
    pub fn limit(&self) -> Option<ParameterMeasure> {
        match self {
            GenSpec::Sqrt => Some(ParameterMeasure::point(1.0)),
            GenSpec::Poles { .. } => Some(ParameterMeasure::point(0.0)),
            GenSpec::Converging { a, .. } => Some(ParameterMeasure::point(*a)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in ["sqrt", "ladder:3", "poles:2", "poles:1.1:zero", "poles:2:nozero", "conv:0.5:0.3", "list:0,0.25,-0.5"] {
            let g: GenSpec = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "sqrt:2", "ladder", "ladder:x", "poles:2:maybe", "conv:1", "list:", "nope"] {
            assert!(s.parse::<GenSpec>().is_err(), "{s}");
        }
    }
}
