//! Working-precision reals, the tolerance policy, and a deterministic
//! adaptive integrator used as an independent oracle throughout the crate.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

/// Working real type. Every value carries its own mantissa width.
pub type Real = Float;

pub const DEFAULT_PRECISION_BITS: u32 = 256;
pub const DEFAULT_TARGET_REL_TOL: f64 = 1e-30;
pub const DEFAULT_MAX_ESCALATIONS: u32 = 4;

/// Mantissa width, acceptance tolerance and escalation budget shared by a
/// computation. Immutable; escalation produces a new context.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    precision_bits: u32,
    target_rel_tol: f64,
    max_escalations: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            precision_bits: DEFAULT_PRECISION_BITS,
            target_rel_tol: DEFAULT_TARGET_REL_TOL,
            max_escalations: DEFAULT_MAX_ESCALATIONS,
        }
    }
}

/// Builds a context with the default escalation budget.
pub fn make_context(precision_bits: u32, target_rel_tol: f64) -> Result<PrecisionContext> {
    PrecisionContext::new(precision_bits, target_rel_tol, DEFAULT_MAX_ESCALATIONS)
}

/// Smallest tolerance a context of `bits` bits accepts: 2^(1 - bits/2).
pub fn tolerance_floor(bits: u32) -> f64 {
    2f64.powf(1.0 - f64::from(bits) / 2.0)
}

impl PrecisionContext {
    pub fn new(precision_bits: u32, target_rel_tol: f64, max_escalations: u32) -> Result<Self> {
        if precision_bits < 64 {
            return Err(Error::InvalidContext(format!(
                "precision_bits must be at least 64, got {precision_bits}"
            )));
        }
        if precision_bits > (1 << 20) {
            return Err(Error::InvalidContext(format!(
                "precision_bits {precision_bits} is unreasonably large"
            )));
        }
        if !(target_rel_tol.is_finite() && target_rel_tol > 0.0) {
            return Err(Error::InvalidContext(format!(
                "target_rel_tol must be a positive finite number, got {target_rel_tol}"
            )));
        }
        let floor = tolerance_floor(precision_bits);
        if target_rel_tol < floor {
            return Err(Error::InvalidContext(format!(
                "target_rel_tol {target_rel_tol:e} is below the floor {floor:e} for {precision_bits}-bit reals"
            )));
        }
        Ok(PrecisionContext {
            precision_bits,
            target_rel_tol,
            max_escalations,
        })
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn target_rel_tol(&self) -> f64 {
        self.target_rel_tol
    }

    pub fn max_escalations(&self) -> u32 {
        self.max_escalations
    }

    pub fn with_max_escalations(&self, max_escalations: u32) -> Self {
        PrecisionContext {
            max_escalations,
            ..self.clone()
        }
    }

    /// Bits of accuracy the tolerance asks for, `-log2(target_rel_tol)`.
    pub fn tolerance_bits(&self) -> f64 {
        -self.target_rel_tol.log2()
    }

    /// Unit roundoff of the working reals.
    pub fn epsilon(&self) -> Real {
        Float::with_val(self.precision_bits, 1) >> (self.precision_bits - 1)
    }

    /// Parameters closer than this must be merged into one confluent entry:
    /// 2^(-precision_bits/4).
    pub fn confluence_threshold(&self) -> f64 {
        2f64.powf(-f64::from(self.precision_bits) / 4.0)
    }

    /// Decimal digits written to files: min(working digits, 40).
    pub fn output_digits(&self) -> usize {
        let working = (f64::from(self.precision_bits) * std::f64::consts::LOG10_2).floor() as usize;
        working.min(40)
    }

    /// Context with twice the mantissa width and one escalation fewer.
    pub fn doubled(&self) -> Option<Self> {
        if self.max_escalations == 0 {
            return None;
        }
        Some(PrecisionContext {
            precision_bits: self.precision_bits * 2,
            target_rel_tol: self.target_rel_tol,
            max_escalations: self.max_escalations - 1,
        })
    }

    /// Context whose tolerance is `factor` times tighter. Precision is raised
    /// as far as needed to keep the tolerance above the floor.
    pub fn tightened(&self, factor: f64) -> Self {
        let tol = self.target_rel_tol / factor;
        let mut bits = self.precision_bits;
        while tol < tolerance_floor(bits) {
            bits += 64;
        }
        PrecisionContext {
            precision_bits: bits,
            target_rel_tol: tol,
            max_escalations: self.max_escalations,
        }
    }

    /// Same precision, tolerance at 3/4 of the working bits. Used by the
    /// integration oracles that feed ill-conditioned linear algebra.
    pub fn oracle(&self) -> Self {
        let tol = 2f64.powf(-0.75 * f64::from(self.precision_bits)).max(tolerance_floor(self.precision_bits));
        PrecisionContext {
            precision_bits: self.precision_bits,
            target_rel_tol: tol.min(self.target_rel_tol),
            max_escalations: self.max_escalations,
        }
    }

    pub fn real(&self, v: f64) -> Real {
        Float::with_val(self.precision_bits, v)
    }

    pub fn int(&self, v: i64) -> Real {
        Float::with_val(self.precision_bits, v)
    }

    pub fn zero(&self) -> Real {
        Float::new(self.precision_bits)
    }

    pub fn one(&self) -> Real {
        self.int(1)
    }

    pub fn pi(&self) -> Real {
        Float::with_val(self.precision_bits, Constant::Pi)
    }

    /// Rounds `v` to this context's precision.
    pub fn round(&self, v: &Real) -> Real {
        Float::with_val(self.precision_bits, v)
    }

    pub fn tol(&self) -> Real {
        self.real(self.target_rel_tol)
    }

    /// Parses a decimal string at working precision.
    pub fn parse(&self, s: &str) -> Result<Real> {
        let parsed = Float::parse(s.trim())
            .map_err(|e| Error::InvalidArgument(format!("cannot parse {s:?} as a real: {e}")))?;
        Ok(Float::with_val(self.precision_bits, parsed))
    }
}

/// Runs `f`, doubling the working precision whenever it fails with a
/// precision-related error, up to the context's escalation budget.
pub fn with_escalation<T, F>(ctx: &PrecisionContext, mut f: F) -> Result<T>
where
    F: FnMut(&PrecisionContext) -> Result<T>,
{
    let mut current = ctx.clone();
    loop {
        match f(&current) {
            Ok(v) => return Ok(v),
            Err(e) if e.is_precision_issue() => match current.doubled() {
                Some(next) => current = next,
                None => {
                    return Err(Error::EscalationExhausted {
                        bits: current.precision_bits(),
                        cause: Box::new(e),
                    })
                }
            },
            Err(e) => return Err(e),
        }
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    lo: Real,
    hi: Real,
}

impl Interval {
    pub fn new(lo: Real, hi: Real) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidArgument(format!(
                "interval needs finite lo < hi, got [{}, {}]",
                lo.to_f64(),
                hi.to_f64()
            )));
        }
        Ok(Interval { lo, hi })
    }

    /// The default domain `[-1, 1]`.
    pub fn unit(ctx: &PrecisionContext) -> Self {
        Interval {
            lo: ctx.int(-1),
            hi: ctx.int(1),
        }
    }

    pub fn lo(&self) -> &Real {
        &self.lo
    }

    pub fn hi(&self) -> &Real {
        &self.hi
    }
}

/// Gauss-Legendre panel on [-1, 1], computed by Newton iteration on the
/// Legendre three-term recurrence. Independent of the Jacobi-matrix route.
#[derive(Debug)]
struct LegendrePanel {
    nodes: Vec<Real>,
    weights: Vec<Real>,
}

fn legendre_with_derivative(m: usize, x: &Real) -> (Real, Real) {
    let prec = x.prec();
    let mut p_prev = Float::with_val(prec, 1);
    let mut p = x.clone();
    for k in 1..m {
        let kf = k as u32;
        // (k+1) P_{k+1} = (2k+1) x P_k - k P_{k-1}
        let next = (Float::with_val(prec, x * &p) * (2 * kf + 1) - p_prev * kf) / (kf + 1);
        p_prev = std::mem::replace(&mut p, next);
    }
    // P'_m = m (x P_m - P_{m-1}) / (x^2 - 1)
    let x2m1 = Float::with_val(prec, x.square_ref()) - 1u32;
    let dp = (Float::with_val(prec, x * &p) - &p_prev) * (m as u32) / x2m1;
    (p, dp)
}

fn legendre_panel(m: usize, prec: u32) -> Result<LegendrePanel> {
    let mut nodes = vec![Float::new(prec); m];
    let mut weights = vec![Float::new(prec); m];
    let stop = Float::with_val(prec, 1) >> (prec.saturating_sub(4));
    for i in 0..m.div_ceil(2) {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut x = Float::with_val(prec, guess);
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(m, &x);
            let dx = p / dp;
            x -= &dx;
            if dx.abs() <= stop {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                what: format!("Gauss-Legendre node {i} of {m}"),
            });
        }
        let (_, dp) = legendre_with_derivative(m, &x);
        let one_minus_x2 = 1u32 - Float::with_val(prec, x.square_ref());
        let w = Float::with_val(prec, 2) / (one_minus_x2 * dp.square());
        // Descending from +1; stored ascending.
        nodes[m - 1 - i] = x.clone();
        weights[m - 1 - i] = w.clone();
        nodes[i] = -x;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = Float::new(prec);
    }
    Ok(LegendrePanel { nodes, weights })
}

type PanelCache = Mutex<HashMap<(usize, u32), Arc<LegendrePanel>>>;

fn cached_panel(m: usize, prec: u32) -> Result<Arc<LegendrePanel>> {
    static CACHE: OnceLock<PanelCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().expect("panel cache poisoned").get(&(m, prec)) {
        return Ok(Arc::clone(p));
    }
    let panel = Arc::new(legendre_panel(m, prec)?);
    cache
        .lock()
        .expect("panel cache poisoned")
        .insert((m, prec), Arc::clone(&panel));
    Ok(panel)
}

/// Panel order used for a given context; grows with the requested accuracy.
pub fn panel_order(ctx: &PrecisionContext) -> usize {
    ((ctx.tolerance_bits() / 3.0).ceil() as usize).clamp(16, 128)
}

const MAX_DEPTH: u32 = 60;
const MAX_PANELS: usize = 200_000;

fn panel_sum<F: Fn(&Real) -> Real>(f: &F, panel: &LegendrePanel, a: &Real, b: &Real) -> Real {
    let prec = a.prec();
    let half = Float::with_val(prec, b - a) / 2u32;
    let mid = Float::with_val(prec, a + b) / 2u32;
    let mut acc = Float::new(prec);
    for (x, w) in panel.nodes.iter().zip(&panel.weights) {
        let xx = Float::with_val(prec, x * &half) + &mid;
        acc += Float::with_val(prec, w * f(&xx));
    }
    acc * half
}

/// Integrates `f` over `interval` by Gauss-Legendre panels with
/// deterministic bisection. Returns `I` with
/// `|I - int f| <= target_rel_tol * (1 + |I|)` for integrands that are
/// smooth on each final panel.
///
/// Removable singularities must be resolved by the caller; a panel that
/// keeps failing its error test after 60 bisections is reported as
/// [`Error::NonConvergence`].
pub fn adaptive_integrate<F>(f: F, interval: &Interval, ctx: &PrecisionContext) -> Result<Real>
where
    F: Fn(&Real) -> Real,
{
    let prec = ctx.precision_bits();
    let panel = cached_panel(panel_order(ctx), prec)?;
    let a = ctx.round(interval.lo());
    let b = ctx.round(interval.hi());
    let total_width = Float::with_val(prec, &b - &a);

    let whole = panel_sum(&f, &panel, &a, &b);
    if !whole.is_finite() {
        return Err(Error::NonFinite(f64::NAN));
    }
    let abs_tol = ctx.tol() * (Float::with_val(prec, whole.abs_ref()) + 1u32);
    // Each panel gets a share of the budget proportional to its width; the
    // factor 1/4 leaves room for the error of the estimate itself.
    let density = abs_tol / &total_width / 4u32;

    let mut stack = vec![(a, b, whole, 0u32)];
    let mut total = Float::new(prec);
    let mut panels = 0usize;
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let left = panel_sum(&f, &panel, &lo, &mid);
        let right = panel_sum(&f, &panel, &mid, &hi);
        let fine = Float::with_val(prec, &left + &right);
        if !fine.is_finite() {
            return Err(Error::NonFinite(mid.to_f64()));
        }
        panels += 2;
        let err = Float::with_val(prec, &fine - &coarse).abs();
        let width = Float::with_val(prec, &hi - &lo);
        if err <= Float::with_val(prec, &density * &width) {
            total += fine;
            continue;
        }
        if depth >= MAX_DEPTH || panels >= MAX_PANELS {
            return Err(Error::NonConvergence {
                what: format!(
                    "adaptive integration near [{:.6e}, {:.6e}]",
                    lo.to_f64(),
                    hi.to_f64()
                ),
            });
        }
        stack.push((mid.clone(), hi, right, depth + 1));
        stack.push((lo, mid, left, depth + 1));
    }
    Ok(total)
}

/// Integral over the default domain `[-1, 1]`.
pub fn integrate_unit<F>(f: F, ctx: &PrecisionContext) -> Result<Real>
where
    F: Fn(&Real) -> Real,
{
    adaptive_integrate(f, &Interval::unit(ctx), ctx)
}

/// Solves the dense system `a x = b` by Gaussian elimination with partial
/// pivoting. `a` is row-major and square.
pub fn solve_dense(mut a: Vec<Vec<Real>>, mut b: Vec<Real>) -> Result<Vec<Real>> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("solve_dense: shape mismatch".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let prec = b[0].prec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .as_abs()
                    .partial_cmp(&*a[j][col].as_abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[pivot][col].is_zero() {
            return Err(Error::Singular(format!("zero pivot in column {col}")));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = Float::with_val(prec, &a[row][col] / &a[col][col]);
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let delta = Float::with_val(prec, &factor * &a[col][k]);
                a[row][k] -= delta;
            }
            let delta = Float::with_val(prec, &factor * &b[col]);
            b[row] -= delta;
        }
    }
    let mut x = vec![Float::new(prec); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= Float::with_val(prec, &a[row][k] * &x[k]);
        }
        x[row] = acc / &a[row][row];
    }
    Ok(x)
}

/// Scientific notation with `digits` significant digits, e.g. `-9.7973e-1`.
/// Always valid as a JSON number.
pub fn format_sci(x: &Real, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    // rug writes exponents as `e-5`, `e5`; both are valid JSON.
    s
}

/// Fixed-point notation with `decimals` digits after the point, rounded to
/// nearest.
pub fn format_fixed(x: &Real, decimals: usize) -> String {
    let prec = x.prec().max(64) + 64;
    let scale = Float::with_val(prec, 10u32).pow(decimals as u32);
    let scaled = Float::with_val(prec, x * scale).round();
    let int = scaled.to_integer().unwrap_or_default();
    let negative = int < 0;
    let mut digits = int.abs().to_string();
    if digits.len() <= decimals {
        digits = format!("{}{}", "0".repeat(decimals + 1 - digits.len()), digits);
    }
    let split = digits.len() - decimals;
    let (whole, frac) = digits.split_at(split);
    let sign = if negative { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{frac}")
    }
}

/// Relative error mantissa/exponent style `0.261(-5)`, the exponent chosen
/// so the mantissa lies in [0.1, 1).
pub fn format_mantissa_exponent(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return "---".to_string();
    }
    let mag = v.abs();
    let mut exp = mag.log10().floor() as i32 + 1;
    let mut mantissa = mag / 10f64.powi(exp);
    let rounded = (mantissa * 10f64.powi(digits as i32)).round() / 10f64.powi(digits as i32);
    mantissa = rounded;
    if mantissa >= 1.0 {
        mantissa /= 10.0;
        exp += 1;
    }
    let sign = if v < 0.0 { "-" } else { "" };
    let m = format!("{mantissa:.digits$}");
    if exp == 0 {
        format!("{sign}{m}")
    } else {
        format!("{sign}{m}({exp})")
    }
}

/// `atanh(t)/t`, equal to 1 at `t = 0`.
pub(crate) fn atanh_over_t(t: &Real) -> Real {
    if t.is_zero() {
        return Float::with_val(t.prec(), 1);
    }
    Float::with_val(t.prec(), t.atanh_ref()) / t
}

/// `x^k` for a non-negative integer power.
pub(crate) fn powi(x: &Real, k: u32) -> Real {
    Float::with_val(x.prec(), rug::ops::Pow::pow(x, k))
}
