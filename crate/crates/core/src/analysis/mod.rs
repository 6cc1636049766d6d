//! Empirical checks of the structural properties of the rules: limit node
//! distributions, interlacing, monotonicity in a parameter, denseness of
//! the basis, and independent oracles for nodes and weights.

mod density;
mod interlacing;
mod oracle;
mod scans;
pub mod suites;

pub use density::{
    asymptotic_density, ks_distance, node_distribution_distance, Atom, DensityModel, ParameterMeasure, PoleComponent,
};
pub use interlacing::{check_interlacing, check_interlacing_labeled, InterlacingReport};
pub use oracle::{brute_force_gaussian, gram_schmidt_last, gram_schmidt_oracle, interpolant_l2_error};
pub use scans::{
    denseness_partial_sums, extreme_weight_monotonicity_scan, joukowski_modulus, node_monotonicity_scan, scan_point,
    tail_share, MonotonicityReport, ScanPoint,
};
