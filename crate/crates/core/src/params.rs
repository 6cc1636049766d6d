//! Pole parameter sets, the product `pi_n(x) = prod (1 + t_i x)` and the
//! modified weights whose orthogonal polynomials carry the quadrature nodes.

use std::fmt;

use rug::Float;
use serde_json::{json, Number, Value};

use crate::error::{Error, Result};
use crate::numerics::{format_sci, integrate_unit, powi, PrecisionContext, Real};

/// One parameter `t` in (-1, 1) occupying `mult` consecutive basis slots.
/// Slots beyond the first are derivatives of `1/(1+tx)` with respect to `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamEntry {
    pub t: Real,
    pub mult: u32,
}

impl ParamEntry {
    pub fn new(t: Real, mult: u32) -> Self {
        ParamEntry { t, mult }
    }

    pub fn simple(t: Real) -> Self {
        ParamEntry { t, mult: 1 }
    }
}

/// Ordered pole parameters. Order matters for orthogonal rules (which
/// parameter is last) and is ignored by Gaussian rules.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParameterSet {
    entries: Vec<ParamEntry>,
}

impl ParameterSet {
    /// Validates the entries against the context's confluence threshold.
    pub fn new(entries: Vec<ParamEntry>, ctx: &PrecisionContext) -> Result<Self> {
        Self::with_threshold(entries, ctx.confluence_threshold())
    }

    pub fn with_threshold(entries: Vec<ParamEntry>, eps_conf: f64) -> Result<Self> {
        let mut zeros = 0;
        for (i, e) in entries.iter().enumerate() {
            if e.mult == 0 {
                return Err(Error::InvalidParameters(format!("entry {i} has multiplicity 0")));
            }
            if !e.t.is_finite() || e.t.as_abs().clone() >= 1u32 {
                return Err(Error::InvalidParameters(format!(
                    "entry {i}: t = {} is not inside (-1, 1)",
                    e.t.to_f64()
                )));
            }
            if e.t.is_zero() {
                zeros += e.mult;
            }
        }
        if zeros > 1 {
            return Err(Error::InvalidParameters(
                "t = 0 may occupy at most one basis slot".into(),
            ));
        }
        for i in 0..entries.len() {
            for j in i + 1..entries.len() {
                let gap = Float::with_val(entries[i].t.prec().max(64), &entries[i].t - &entries[j].t).abs();
                if gap <= eps_conf {
                    return Err(Error::Confluence {
                        a: entries[i].t.to_f64(),
                        b: entries[j].t.to_f64(),
                    });
                }
            }
        }
        Ok(ParameterSet { entries })
    }

    /// All-simple parameter set from working-precision values.
    pub fn from_reals(ts: Vec<Real>, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(ts.into_iter().map(ParamEntry::simple).collect(), ctx)
    }

    /// All-simple parameter set from `f64` values (exact binary values).
    pub fn from_f64(ts: &[f64], ctx: &PrecisionContext) -> Result<Self> {
        Self::from_reals(ts.iter().map(|&t| ctx.real(t)).collect(), ctx)
    }

    pub fn empty() -> Self {
        ParameterSet { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[ParamEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of basis slots, multiplicities counted.
    pub fn total_slots(&self) -> usize {
        self.entries.iter().map(|e| e.mult as usize).sum()
    }

    /// Parameter value of every slot, in slot order.
    pub fn slots(&self) -> Vec<Real> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.t.clone(), e.mult as usize))
            .collect()
    }

    /// The first `count` slots as a parameter set; a confluent entry cut by
    /// the boundary keeps only the slots inside it.
    pub fn prefix(&self, count: usize) -> Result<ParameterSet> {
        let available = self.total_slots();
        if count > available {
            return Err(Error::InsufficientParameters {
                needed: count,
                available,
            });
        }
        let mut left = count;
        let mut entries = Vec::new();
        for e in &self.entries {
            if left == 0 {
                break;
            }
            let take = (e.mult as usize).min(left);
            entries.push(ParamEntry::new(e.t.clone(), take as u32));
            left -= take;
        }
        Ok(ParameterSet { entries })
    }

    /// Value of the first slot, if any.
    pub fn first(&self) -> Option<&Real> {
        self.entries.first().map(|e| &e.t)
    }

    pub fn starts_with_zero(&self) -> bool {
        self.first().is_some_and(|t| t.is_zero())
    }

    /// Appends an entry, re-validating separation.
    pub fn pushed(&self, entry: ParamEntry, ctx: &PrecisionContext) -> Result<ParameterSet> {
        let mut entries = self.entries.clone();
        entries.push(entry);
        ParameterSet::new(entries, ctx)
    }

    /// JSON array of `{t, mult}` in slot order; `t` written with `digits`
    /// significant digits.
    pub fn to_json(&self, digits: usize) -> Value {
        Value::Array(
            self.entries
                .iter()
                .map(|e| json!({ "t": decimal_number(&e.t, digits), "mult": e.mult }))
                .collect(),
        )
    }

    pub fn from_json(value: &Value, ctx: &PrecisionContext) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::InvalidParameters("expected a JSON array of {t, mult}".into()))?;
        let mut entries = Vec::with_capacity(items.len());
        for item in items {
            let obj = item
                .as_object()
                .ok_or_else(|| Error::InvalidParameters("expected {t, mult} objects".into()))?;
            if let Some(key) = obj.keys().find(|k| *k != "t" && *k != "mult") {
                return Err(Error::InvalidParameters(format!("unknown key {key:?}")));
            }
            let t = match obj.get("t") {
                Some(Value::Number(n)) => ctx.parse(&n.to_string())?,
                Some(Value::String(s)) => ctx.parse(s)?,
                _ => return Err(Error::InvalidParameters("missing numeric t".into())),
            };
            let mult = match obj.get("mult") {
                None => 1,
                Some(v) => v
                    .as_u64()
                    .and_then(|m| u32::try_from(m).ok())
                    .ok_or_else(|| Error::InvalidParameters("mult must be a positive integer".into()))?,
            };
            entries.push(ParamEntry::new(t, mult));
        }
        ParameterSet::new(entries, ctx)
    }
}

impl fmt::Display for ParameterSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if e.mult == 1 {
                write!(f, "{:.6}", e.t.to_f64())?;
            } else {
                write!(f, "({:.6}, mult {})", e.t.to_f64(), e.mult)?;
            }
        }
        write!(f, "}}")
    }
}

/// A JSON number carrying the full decimal expansion.
pub fn decimal_number(x: &Real, digits: usize) -> Value {
    let text = format_sci(x, digits);
    text.parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::String(text))
}

/// `prod (1 + t_i x)` over the first `prefix_count` slots.
pub fn pi_eval(params: &ParameterSet, prefix_count: usize, x: &Real) -> Result<Real> {
    let available = params.total_slots();
    if prefix_count > available {
        return Err(Error::InsufficientParameters {
            needed: prefix_count,
            available,
        });
    }
    let prec = x.prec();
    let mut acc = Float::with_val(prec, 1);
    let mut left = prefix_count;
    for e in params.entries() {
        if left == 0 {
            break;
        }
        let take = (e.mult as usize).min(left);
        left -= take;
        if e.t.is_zero() {
            continue;
        }
        let factor = Float::with_val(prec, &e.t * x) + 1u32;
        acc *= powi(&factor, take as u32);
    }
    Ok(acc)
}

/// Base weight `w(x)` on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseWeight {
    /// `w = 1`; the only base weight with recursive moments.
    Legendre,
    /// `1/sqrt(1 - x^2)`
    ChebyshevFirst,
    /// `sqrt(1 - x^2)`
    ChebyshevSecond,
    /// `sqrt((1 - x)/(1 + x))`
    ChebyshevThird,
}

impl BaseWeight {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        match self {
            BaseWeight::Legendre => Float::with_val(prec, 1),
            BaseWeight::ChebyshevFirst => {
                let s = 1u32 - Float::with_val(prec, x.square_ref());
                s.sqrt().recip()
            }
            BaseWeight::ChebyshevSecond => (1u32 - Float::with_val(prec, x.square_ref())).sqrt(),
            BaseWeight::ChebyshevThird => {
                let num = 1u32 - x.clone();
                let den = Float::with_val(prec, x + 1u32);
                (num / den).sqrt()
            }
        }
    }

    /// `int w`.
    pub fn mass(&self, ctx: &PrecisionContext) -> Real {
        match self {
            BaseWeight::Legendre => ctx.int(2),
            BaseWeight::ChebyshevFirst | BaseWeight::ChebyshevThird => ctx.pi(),
            BaseWeight::ChebyshevSecond => ctx.pi() / 2u32,
        }
    }

    /// `int f(x) w(x) dx`, with `x = cos(theta)` for the singular Chebyshev
    /// weights so the integrand handed to the integrator stays smooth.
    pub fn integrate<F>(&self, f: F, ctx: &PrecisionContext) -> Result<Real>
    where
        F: Fn(&Real) -> Real,
    {
        let prec = ctx.precision_bits();
        match self {
            BaseWeight::Legendre => integrate_unit(f, ctx),
            _ => {
                let pi = ctx.pi();
                let interval = crate::numerics::Interval::new(ctx.zero(), pi)?;
                let kind = *self;
                crate::numerics::adaptive_integrate(
                    |theta| {
                        let x = Float::with_val(prec, theta.cos_ref());
                        let jac = match kind {
                            BaseWeight::ChebyshevFirst => Float::with_val(prec, 1),
                            BaseWeight::ChebyshevSecond => Float::with_val(prec, theta.sin_ref()).square(),
                            BaseWeight::ChebyshevThird => 1u32 - x.clone(),
                            BaseWeight::Legendre => unreachable!(),
                        };
                        f(&x) * jac
                    },
                    &interval,
                    ctx,
                )
            }
        }
    }
}

/// Which reduction produced a modified weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `w / (pi_n pi_{n+1})` and its confluent form.
    Orthogonal,
    /// `w / pi_{2n}` and its confluent form.
    Gaussian,
    Custom,
}

/// `base(x) / prod (1 + t_i x)^{m_i}`; zero parameters are dropped from the
/// denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifiedWeight {
    pub base: BaseWeight,
    pub denominator: Vec<(Real, u32)>,
    pub kind: WeightKind,
}

impl ModifiedWeight {
    /// Merges equal parameters (summing exponents) and drops zeros and zero
    /// exponents.
    pub fn custom(base: BaseWeight, factors: Vec<(Real, u32)>, kind: WeightKind) -> Result<Self> {
        let mut denominator: Vec<(Real, u32)> = Vec::new();
        for (t, m) in factors {
            if !t.is_finite() || t.as_abs().clone() >= 1u32 {
                return Err(Error::InvalidParameters(format!(
                    "pole parameter {} is not inside (-1, 1)",
                    t.to_f64()
                )));
            }
            if t.is_zero() || m == 0 {
                continue;
            }
            match denominator.iter_mut().find(|(s, _)| *s == t) {
                Some(slot) => slot.1 += m,
                None => denominator.push((t, m)),
            }
        }
        Ok(ModifiedWeight {
            base,
            denominator,
            kind,
        })
    }

    pub fn legendre() -> Self {
        ModifiedWeight {
            base: BaseWeight::Legendre,
            denominator: Vec::new(),
            kind: WeightKind::Custom,
        }
    }

    pub fn denominator_degree(&self) -> u32 {
        self.denominator.iter().map(|(_, m)| m).sum()
    }

    pub fn max_exponent(&self) -> u32 {
        self.denominator.iter().map(|&(_, m)| m).max().unwrap_or(0)
    }

    /// Value of the rational factor `1 / prod (1 + t x)^m`.
    pub fn rational_factor(&self, x: &Real) -> Real {
        let prec = x.prec();
        let mut den = Float::with_val(prec, 1);
        for (t, m) in &self.denominator {
            let f = Float::with_val(prec, t * x) + 1u32;
            den *= powi(&f, *m);
        }
        den.recip()
    }

    pub fn eval(&self, x: &Real) -> Real {
        self.base.eval(x) * self.rational_factor(x)
    }
}

/// Groups the first `count` slots into `(t, multiplicity)` runs.
fn grouped_prefix(params: &ParameterSet, count: usize) -> Result<Vec<(Real, u32)>> {
    Ok(params
        .prefix(count)?
        .entries()
        .iter()
        .map(|e| (e.t.clone(), e.mult))
        .collect())
}

/// Weight whose degree-n orthogonal polynomial vanishes at the orthogonal
/// rule's nodes: `w / (pi_n pi_{n+1})`. For confluent entries the exponent
/// is `2 mu_i`, except `2 mu_k - 1` on the last entry.
pub fn modified_weight_or(params: &ParameterSet, n: usize) -> Result<ModifiedWeight> {
    modified_weight_or_with_base(params, n, BaseWeight::Legendre)
}

pub fn modified_weight_or_with_base(
    params: &ParameterSet,
    n: usize,
    base: BaseWeight,
) -> Result<ModifiedWeight> {
    let groups = grouped_prefix(params, n + 1)?;
    let last = groups.len().saturating_sub(1);
    let factors = groups
        .into_iter()
        .enumerate()
        .map(|(i, (t, mu))| (t, if i == last { 2 * mu - 1 } else { 2 * mu }))
        .collect();
    ModifiedWeight::custom(base, factors, WeightKind::Orthogonal)
}

/// Weight whose degree-n orthogonal polynomial vanishes at the Gaussian
/// rule's nodes: `w / pi_{2n}`.
pub fn modified_weight_gr(params: &ParameterSet, n: usize) -> Result<ModifiedWeight> {
    modified_weight_gr_with_base(params, n, BaseWeight::Legendre)
}

pub fn modified_weight_gr_with_base(
    params: &ParameterSet,
    n: usize,
    base: BaseWeight,
) -> Result<ModifiedWeight> {
    let groups = grouped_prefix(params, 2 * n)?;
    ModifiedWeight::custom(base, groups, WeightKind::Gaussian)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::make_context;

    fn ctx() -> PrecisionContext {
        make_context(256, 1e-30).unwrap()
    }

    fn sqrt_params(count: usize, c: &PrecisionContext) -> ParameterSet {
        let ts = (1..=count)
            .map(|i| 1u32 - c.int(i as i64).sqrt().recip())
            .collect();
        ParameterSet::from_reals(ts, c).unwrap()
    }

    fn as_f64(d: &[(Real, u32)]) -> Vec<(f64, u32)> {
        d.iter().map(|(t, m)| (t.to_f64(), *m)).collect()
    }

    #[test]
    fn pi_eval_examples() {
        let c = ctx();
        let p = ParameterSet::from_f64(&[0.0, 0.5], &c).unwrap();
        assert_eq!(pi_eval(&p, 2, &c.one()).unwrap(), 1.5f64);
        assert_eq!(pi_eval(&p, 0, &c.real(0.3)).unwrap(), 1u32);
        let s = sqrt_params(12, &c);
        assert_eq!(pi_eval(&s, 12, &c.zero()).unwrap(), 1u32);
        assert!(matches!(
            pi_eval(&p, 3, &c.one()),
            Err(Error::InsufficientParameters { needed: 3, available: 2 })
        ));
    }

    #[test]
    fn pi_eval_positive_on_grid() {
        let c = ctx();
        let s = sqrt_params(20, &c);
        for i in 0..=200 {
            let x = c.real(-1.0 + i as f64 / 100.0);
            for k in 0..=20 {
                assert!(pi_eval(&s, k, &x).unwrap() > 0u32);
            }
        }
    }

    #[test]
    fn or_weight_examples() {
        let c = ctx();
        let p = ParameterSet::from_f64(&[0.0, 0.3], &c).unwrap();
        assert_eq!(as_f64(&modified_weight_or(&p, 1).unwrap().denominator), vec![(0.3, 1)]);
        let p = ParameterSet::from_f64(&[0.2, 0.4, 0.6], &c).unwrap();
        assert_eq!(
            as_f64(&modified_weight_or(&p, 2).unwrap().denominator),
            vec![(0.2, 2), (0.4, 2), (0.6, 1)]
        );
        let p = ParameterSet::new(vec![ParamEntry::new(c.real(0.5), 3)], &c).unwrap();
        assert_eq!(as_f64(&modified_weight_or(&p, 2).unwrap().denominator), vec![(0.5, 5)]);
        assert!(matches!(
            modified_weight_or(&p, 3),
            Err(Error::InsufficientParameters { .. })
        ));
    }

    #[test]
    fn gr_weight_examples() {
        let c = ctx();
        let p = ParameterSet::from_f64(&[0.0, 0.3], &c).unwrap();
        assert_eq!(as_f64(&modified_weight_gr(&p, 1).unwrap().denominator), vec![(0.3, 1)]);
        let s = sqrt_params(12, &c);
        let w = modified_weight_gr(&s, 6).unwrap();
        assert_eq!(w.denominator.len(), 11);
        assert!(w.denominator.iter().all(|&(_, m)| m == 1));
        let p = ParameterSet::new(
            vec![ParamEntry::new(c.real(0.5), 2), ParamEntry::new(c.real(-0.5), 2)],
            &c,
        )
        .unwrap();
        assert_eq!(
            as_f64(&modified_weight_gr(&p, 2).unwrap().denominator),
            vec![(0.5, 2), (-0.5, 2)]
        );
    }

    #[test]
    fn denominator_degrees_with_leading_zero() {
        let c = ctx();
        let s = sqrt_params(25, &c);
        for n in 1..=12 {
            assert_eq!(modified_weight_or(&s, n).unwrap().denominator_degree() as usize, 2 * n - 1);
            assert_eq!(modified_weight_gr(&s, n).unwrap().denominator_degree() as usize, 2 * n - 1);
        }
    }

    #[test]
    fn validation() {
        let c = ctx();
        assert!(ParameterSet::from_f64(&[1.0], &c).is_err());
        assert!(ParameterSet::from_f64(&[-1.5], &c).is_err());
        assert!(ParameterSet::from_f64(&[0.0, 0.0], &c).is_err());
        assert!(ParameterSet::new(vec![ParamEntry::new(c.zero(), 2)], &c).is_err());
        let close = vec![c.real(0.3), c.real(0.3) + c.real(1e-25)];
        assert!(matches!(ParameterSet::from_reals(close, &c), Err(Error::Confluence { .. })));
        assert!(ParameterSet::new(vec![ParamEntry::new(c.real(0.1), 0)], &c).is_err());
    }

    #[test]
    fn prefix_cuts_confluent_entry() {
        let c = ctx();
        let p = ParameterSet::new(
            vec![ParamEntry::new(c.real(0.1), 1), ParamEntry::new(c.real(0.5), 3)],
            &c,
        )
        .unwrap();
        let pre = p.prefix(3).unwrap();
        assert_eq!(pre.total_slots(), 3);
        assert_eq!(pre.entries()[1].mult, 2);
    }

    #[test]
    fn json_roundtrip_keeps_full_precision() {
        let c = ctx();
        let s = sqrt_params(4, &c);
        let v = s.to_json(c.output_digits());
        let text = serde_json::to_string(&v).unwrap();
        let back = ParameterSet::from_json(&serde_json::from_str(&text).unwrap(), &c).unwrap();
        for (a, b) in s.slots().iter().zip(back.slots()) {
            assert!(Float::with_val(256, a - &b).abs() < 1e-38);
        }
        let bad: Value = serde_json::from_str(r#"[{"t": 0.1, "mult": 1, "x": 2}]"#).unwrap();
        assert!(ParameterSet::from_json(&bad, &c).is_err());
    }

    #[test]
    fn base_weight_masses_match_integration() {
        let c = make_context(128, 1e-18).unwrap();
        for base in [
            BaseWeight::Legendre,
            BaseWeight::ChebyshevFirst,
            BaseWeight::ChebyshevSecond,
            BaseWeight::ChebyshevThird,
        ] {
            let m = base.integrate(|_| c.one(), &c).unwrap();
            assert!(Float::with_val(128, m - base.mass(&c)).abs() < 1e-18, "{base:?}");
        }
    }
}
