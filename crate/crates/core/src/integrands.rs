//! Test integrands with reference values, and the pole-parameter
//! generators used with them.

use std::fmt;
use std::str::FromStr;

use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_integrate, integrate_unit, Interval, PrecisionContext, Real};
use crate::params::ParameterSet;

/// Factor by which reference integrations are tighter than the caller's
/// tolerance.
pub const REFERENCE_TIGHTENING: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    /// `ω e^{-ω(x+1)}`.
    Exponential { omega: f64 },
    /// `1 / sqrt((x+3)(x+2))`, a Stieltjes function with cut [-3, -2].
    Stieltjes,
    /// `u / sin u` with `u = πx/ω`: simple poles at `x = kω`.
    SincPoles { omega: f64 },
    /// `(u / sin u)^2`: double poles at `x = kω`.
    SincPolesSquared { omega: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    HighPrecisionReference,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::HighPrecisionReference => "high-precision reference",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceValue {
    pub value: Real,
    pub provenance: Provenance,
}

fn check_omega(omega: f64, min: f64) -> Result<f64> {
    if omega.is_finite() && omega > min {
        Ok(omega)
    } else {
        Err(Error::InvalidArgument(format!("omega must exceed {min}, got {omega}")))
    }
}

impl FromStr for Integrand {
    type Err = Error;

    /// Registry ids: `i1:<ω>`, `i2`, `i3:<ω>`, `i4:<ω>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s.as_str(), None),
        };
        let omega = |min: f64| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::InvalidArgument(format!("integrand {name} needs :<omega>")))?;
            let w: f64 = a
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse omega {a:?}")))?;
            check_omega(w, min)
        };
        match name {
            "i1" => Ok(Integrand::Exponential { omega: omega(0.0)? }),
            "i2" if arg.is_none() => Ok(Integrand::Stieltjes),
            "i3" => Ok(Integrand::SincPoles { omega: omega(1.0)? }),
            "i4" => Ok(Integrand::SincPolesSquared { omega: omega(1.0)? }),
            _ => Err(Error::InvalidArgument(format!("unknown integrand {s:?}"))),
        }
    }
}

impl fmt::Display for Integrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrand::Exponential { omega } => write!(f, "i1:{omega}"),
            Integrand::Stieltjes => f.write_str("i2"),
            Integrand::SincPoles { omega } => write!(f, "i3:{omega}"),
            Integrand::SincPolesSquared { omega } => write!(f, "i4:{omega}"),
        }
    }
}

/// `u / sin u`, with the series `1 + u²/6 + 7u⁴/360` when `|u|` is below
/// `2^{-prec/4}`.
fn u_over_sin(u: &Real) -> Real {
    let prec = u.prec();
    if u.is_zero() {
        return Float::with_val(prec, 1);
    }
    let guard = Float::with_val(prec, 2f64.powf(-f64::from(prec) / 4.0));
    if Float::with_val(prec, u.abs_ref()) < guard {
        let u2 = Float::with_val(prec, u.square_ref());
        let u4 = Float::with_val(prec, u2.square_ref());
        return 1u32 + u2 / 6u32 + u4 * 7u32 / 360u32;
    }
    Float::with_val(prec, u / Float::with_val(prec, u.sin_ref()))
}

impl Integrand {
    pub fn eval(&self, x: &Real) -> Real {
        let prec = x.prec();
        match *self {
            Integrand::Exponential { omega } => {
                let w = Float::with_val(prec, omega);
                let e = Float::with_val(prec, -(Float::with_val(prec, x + 1u32) * &w)).exp();
                w * e
            }
            Integrand::Stieltjes => {
                let a = Float::with_val(prec, x + 3u32);
                let b = Float::with_val(prec, x + 2u32);
                (a * b).sqrt().recip()
            }
            Integrand::SincPoles { omega } => {
                let pi = Float::with_val(prec, rug::float::Constant::Pi);
                u_over_sin(&(pi * x / Float::with_val(prec, omega)))
            }
            Integrand::SincPolesSquared { omega } => {
                let pi = Float::with_val(prec, rug::float::Constant::Pi);
                u_over_sin(&(pi * x / Float::with_val(prec, omega))).square()
            }
        }
    }

    pub fn omega(&self) -> Option<f64> {
        match *self {
            Integrand::Exponential { omega }
            | Integrand::SincPoles { omega }
            | Integrand::SincPolesSquared { omega } => Some(omega),
            Integrand::Stieltjes => None,
        }
    }

    /// `∫_{-1}^{1} f`. Closed form where one exists; otherwise adaptive
    /// integration at a context [`REFERENCE_TIGHTENING`] times tighter.
    pub fn exact_value(&self, ctx: &PrecisionContext) -> Result<ReferenceValue> {
        match *self {
            Integrand::Exponential { omega } => {
                let w = ctx.real(omega);
                let value = 1u32 - (w * -2i32).exp();
                Ok(ReferenceValue {
                    value,
                    provenance: Provenance::ClosedForm,
                })
            }
            Integrand::Stieltjes => Ok(ReferenceValue {
                value: stieltjes_closed_form(ctx),
                provenance: Provenance::ClosedForm,
            }),
            Integrand::SincPoles { .. } | Integrand::SincPolesSquared { .. } => {
                let fine = ctx.tightened(REFERENCE_TIGHTENING);
                let v = integrate_unit(|x| self.eval(x), &fine)?;
                Ok(ReferenceValue {
                    value: ctx.round(&v),
                    provenance: Provenance::HighPrecisionReference,
                })
            }
        }
    }
}

/// `2 ln((2 + √3) / (1 + √2))` from the antiderivative
/// `2 ln(√(x+3) + √(x+2))`.
pub fn stieltjes_closed_form(ctx: &PrecisionContext) -> Real {
    let num = ctx.int(3).sqrt() + 2u32;
    let den = ctx.int(2).sqrt() + 1u32;
    (num / den).ln() * 2u32
}

/// Both sides of the Cauchy-transform representation of the Stieltjes
/// integrand at `x`: the direct value and
/// `(1/π) ∫_0^π dθ / (x + 2.5 - 0.5 cos θ)`, the cut integral after
/// `t = -2.5 + 0.5 cos θ`.
pub fn stieltjes_representation(x: &Real, ctx: &PrecisionContext) -> Result<(Real, Real)> {
    let direct = Integrand::Stieltjes.eval(&ctx.round(x));
    let prec = ctx.precision_bits();
    let shift = Float::with_val(prec, x + 2.5f64);
    let interval = Interval::new(ctx.zero(), ctx.pi())?;
    let cut = adaptive_integrate(
        |th| {
            let c = Float::with_val(prec, th.cos_ref()) / 2u32;
            Float::with_val(prec, &shift - c).recip()
        },
        &interval,
        ctx,
    )?;
    Ok((direct, cut / ctx.pi()))
}

/// `t_i = 1 - 1/√i`, `i = 1..=count`.
pub fn param_gen_sqrt(count: usize, ctx: &PrecisionContext) -> Result<ParameterSet> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let ts = (1..=count).map(|i| 1u32 - ctx.int(i as i64).sqrt().recip()).collect();
    ParameterSet::from_reals(ts, ctx)
}

/// Zeros of `T_{3^m}` ordered level by level: the zeros of `T_3`
/// descending, then the new zeros of `T_9` descending, and so on.
pub fn nested_chebyshev_zeros(m: u32, ctx: &PrecisionContext) -> Vec<Real> {
    let prec = ctx.precision_bits();
    let pi = ctx.pi();
    let mut out = Vec::new();
    let mut degree = 1u64;
    for level in 1..=m {
        degree *= 3;
        for j in 1..=degree {
            let odd = 2 * j - 1;
            if level > 1 && odd % 3 == 0 {
                continue;
            }
            let angle = Float::with_val(prec, &pi * odd) / (2 * degree);
            out.push(angle.cos());
        }
    }
    out
}

/// `t_1 = 0` followed by `-2 / (x_i - 5)` over the nested zeros of
/// `T_{3^m}`; the poles `-1/t` then fill [-3, -2].
pub fn param_gen_chebyshev_ladder(m: u32, count: usize, ctx: &PrecisionContext) -> Result<ParameterSet> {
    let available = 3usize.checked_pow(m).map(|v| v + 1).unwrap_or(usize::MAX);
    if count == 0 || count > available {
        return Err(Error::InvalidArgument(format!(
            "ladder of level {m} has {available} entries, asked for {count}"
        )));
    }
    let mut ts = vec![ctx.zero()];
    for x in nested_chebyshev_zeros(m, ctx).into_iter().take(count - 1) {
        ts.push(ctx.int(-2) / (x - 5u32));
    }
    ParameterSet::from_reals(ts, ctx)
}

/// `t = -1/p` over the poles `ω, -ω, 2ω, -2ω, ...`, optionally preceded by
/// `t_1 = 0`; `count` includes the zero.
pub fn param_gen_reciprocal_poles(omega: f64, count: usize, include_zero: bool, ctx: &PrecisionContext) -> Result<ParameterSet> {
    check_omega(omega, 1.0)?;
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    let w = ctx.real(omega);
    let mut ts = Vec::with_capacity(count);
    if include_zero {
        ts.push(ctx.zero());
    }
    let mut i = 0i64;
    while ts.len() < count {
        let k = i / 2 + 1;
        let sign = if i % 2 == 0 { 1 } else { -1 };
        let pole = Float::with_val(ctx.precision_bits(), &w * (sign * k));
        ts.push(-pole.recip());
        i += 1;
    }
    ParameterSet::from_reals(ts, ctx)
}

/// `t_i = a + s (-1)^i / i`, `i = 1..=count`: converges to `a`, with
/// parameters on both sides of the limit.
pub fn param_gen_converging(a: f64, s: f64, count: usize, ctx: &PrecisionContext) -> Result<ParameterSet> {
    let ts = (1..=count)
        .map(|i| {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            ctx.real(a) + ctx.real(s) * sign / ctx.int(i as i64)
        })
        .collect();
    ParameterSet::from_reals(ts, ctx)
}
