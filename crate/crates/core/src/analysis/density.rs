//! Limit distributions of the nodes and the Kolmogorov distance to them.
//!
//! A parameter distribution `p δ(-1) + q δ(1) + r δ(0) + s ν0` maps to the
//! node distribution `p δ(1) + q δ(-1) + r arcsin + s μb`, where `μb` is the
//! mixture over `ν0` of the one-pole densities
//! `sqrt(1-a²) / (π (1+a x) sqrt(1-x²))`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Real;

const MASS_SLACK: f64 = 1e-12;

/// Atom of the limit distribution; always located at -1 or 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub location: f64,
    pub mass: f64,
}

/// Absolutely continuous component: mass `weight` with the one-pole
/// density for parameter `a` (`a = 0` is the arcsin density).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleComponent {
    pub a: f64,
    pub weight: f64,
}

/// Parameter distribution: boundary masses and a weighted sample set for
/// the continuous part `ν0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterMeasure {
    /// Mass at -1.
    pub p: f64,
    /// Mass at 1.
    pub q: f64,
    /// Mass at 0.
    pub r: f64,
    /// `(t, weight)` samples of `ν0`; weights are normalized internally.
    pub nu0: Vec<(f64, f64)>,
}

impl ParameterMeasure {
    /// All mass at `a`.
    pub fn point(a: f64) -> Self {
        ParameterMeasure {
            p: 0.0,
            q: 0.0,
            r: 0.0,
            nu0: vec![(a, 1.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityModel {
    pub atoms: Vec<Atom>,
    pub components: Vec<PoleComponent>,
    /// Set when some of `p, q, r` is zero; the limit theorem is stated for
    /// positive masses, degenerate cases are accepted and flagged.
    pub boundary_case: bool,
}

/// Limit node distribution for the parameter distribution `nu`.
pub fn asymptotic_density(nu: &ParameterMeasure) -> Result<DensityModel> {
    let ParameterMeasure { p, q, r, ref nu0 } = *nu;
    if [p, q, r].iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::InvalidArgument("masses must be finite and nonnegative".into()));
    }
    let rest = 1.0 - (p + q + r);
    if rest < -MASS_SLACK {
        return Err(Error::InvalidArgument(format!("masses sum to {} > 1", p + q + r)));
    }
    let rest = rest.max(0.0);

    let mut atoms = Vec::new();
    let mut components = Vec::new();
    push_atom(1.0, p, &mut atoms);
    push_atom(-1.0, q, &mut atoms);
    if r > 0.0 {
        components.push(PoleComponent { a: 0.0, weight: r });
    }

    if rest > 0.0 {
        if nu0.is_empty() {
            return Err(Error::InvalidArgument("remaining mass needs a ν0 sample set".into()));
        }
        let total: f64 = nu0.iter().map(|(_, w)| *w).sum();
        if total.is_nan() || total <= 0.0 || nu0.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("ν0 weights must be nonnegative with positive sum".into()));
        }
        let point = nu0.len() == 1;
        for &(t, w) in nu0 {
            if !t.is_finite() || t.abs() > 1.0 {
                return Err(Error::InvalidArgument(format!("ν0 sample {t} outside [-1, 1]")));
            }
            let mass = rest * w / total;
            if point && t.abs() == 1.0 {
                // A single point at ±1 is the degenerate limit: atom at ∓1.
                push_atom(-t, mass, &mut atoms);
                continue;
            }
            if t.abs() == 1.0 {
                return Err(Error::InvalidArgument(
                    "ν0 samples at ±1 belong to the boundary masses".into(),
                ));
            }
            if t == 0.0 && !point {
                return Err(Error::InvalidArgument("log|t| is not ν0-integrable: sample at 0".into()));
            }
            if mass > 0.0 {
                components.push(PoleComponent { a: t, weight: mass });
            }
        }
    }
    let boundary_case = p == 0.0 || q == 0.0 || r == 0.0;
    Ok(DensityModel {
        atoms,
        components,
        boundary_case,
    })
}

fn push_atom(location: f64, mass: f64, atoms: &mut Vec<Atom>) {
    if mass <= 0.0 {
        return;
    }
    match atoms.iter_mut().find(|a| a.location == location) {
        Some(a) => a.mass += mass,
        None => atoms.push(Atom { location, mass }),
    }
}

fn pole_pdf(a: f64, x: f64) -> f64 {
    (1.0 - a * a).sqrt() / (PI * (1.0 + a * x) * (1.0 - x * x).sqrt())
}

/// `μa([x, 1])` in closed form via `x = cos θ`.
fn pole_upper_tail(a: f64, x: f64) -> f64 {
    let theta = x.clamp(-1.0, 1.0).acos();
    let (s, c) = (theta / 2.0).sin_cos();
    2.0 / PI * ((1.0 - a).sqrt() * s).atan2((1.0 + a).sqrt() * c)
}

impl DensityModel {
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + self.components.iter().map(|c| c.weight).sum::<f64>()
    }

    /// Density of the continuous part on (-1, 1).
    pub fn pdf(&self, x: f64) -> f64 {
        if x.abs() >= 1.0 {
            return 0.0;
        }
        self.components.iter().map(|c| c.weight * pole_pdf(c.a, x)).sum()
    }

    /// `μ([-1, x])`, including an atom at `x` itself.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < -1.0 {
            return 0.0;
        }
        let atoms: f64 = self.atoms.iter().filter(|a| a.location <= x).map(|a| a.mass).sum();
        let cont: f64 = self
            .components
            .iter()
            .map(|c| c.weight * (1.0 - pole_upper_tail(c.a, x)))
            .sum();
        atoms + cont
    }

    /// `μ([-1, x))`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let at: f64 = self.atoms.iter().filter(|a| a.location == x).map(|a| a.mass).sum();
        self.cdf(x) - at
    }

    /// Smallest `x` with `cdf(x) >= u`.
    pub fn quantile(&self, u: f64) -> f64 {
        if let [c] = self.components.as_slice() {
            if self.atoms.is_empty() {
                let a = c.a;
                let tail = (1.0 - u).clamp(0.0, 1.0);
                let half = ((1.0 + a).sqrt() * (PI * tail / 2.0).sin())
                    .atan2((1.0 - a).sqrt() * (PI * tail / 2.0).cos());
                return (2.0 * half).cos();
            }
        }
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        if self.cdf(lo) >= u {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.cdf(mid) >= u {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Mass of the continuous part by the trapezoid rule in `θ`, where the
    /// integrand `pdf(cos θ) sin θ` is smooth and periodic, plus the atoms.
    pub fn numeric_mass(&self) -> f64 {
        let m = 4096;
        let h = PI / m as f64;
        let mut sum = 0.0;
        for k in 0..=m {
            let theta = k as f64 * h;
            let g: f64 = self
                .components
                .iter()
                .map(|c| c.weight * (1.0 - c.a * c.a).sqrt() / (PI * (1.0 + c.a * theta.cos())))
                .sum();
            sum += if k == 0 || k == m { 0.5 * g } else { g };
        }
        sum * h + self.atoms.iter().map(|a| a.mass).sum::<f64>()
    }

    /// Density sampled on `points` equispaced interior points, for plotting.
    pub fn sample(&self, points: usize) -> Vec<(f64, f64)> {
        (1..=points)
            .map(|i| {
                let x = -1.0 + 2.0 * i as f64 / (points + 1) as f64;
                (x, self.pdf(x))
            })
            .collect()
    }
}

/// Kolmogorov distance between the empirical distribution of `nodes` and
/// `model`. Exact supremum: the empirical CDF is a step function and the
/// model CDF is continuous on (-1, 1).
pub fn ks_distance(nodes: &[f64], model: &DensityModel) -> f64 {
    let mut xs = nodes.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let below = i as f64 / n;
        let upto = (i + 1) as f64 / n;
        d = d.max(model.cdf_left(x) - below).max(upto - model.cdf(x));
    }
    if xs.is_empty() {
        return 1.0;
    }
    d
}

/// Kolmogorov distance between the nodes of a rule and `model`.
pub fn node_distribution_distance(nodes: &[Real], model: &DensityModel) -> f64 {
    let xs: Vec<f64> = nodes.iter().map(|x| x.to_f64()).collect();
    ks_distance(&xs, model)
}
