//! Extremal values of the mean ratio `(A - G) / (P_alpha - G)` over the
//! probability simplex.
//!
//! The numerical core is generic over [`Scalar`] (`f32` and `f64`); the
//! sampling oracle works in `f64` only. Aliases for the common `f64`
//! instantiations live at the crate root.

// `!(a > b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod error;
mod extended;
mod scalar;

pub mod constants;
pub mod means;
pub mod oracle;
pub mod profile;
pub mod reduction;
pub mod regimes;
pub mod serial;
pub mod solver;

pub use error::{Error, Result};
pub use extended::Extended;
pub use scalar::{expm1_sub, ln1p_sub, pow1p_sub, Scalar};

pub use constants::{best_constants, ratio_from_f, ExtremumCertificate, InterpolationConstants, Tolerances};
pub use means::{ratio_gap, ExponentPair, SampleVector};
pub use oracle::{
    check_bounds, grid_scan_two_value, monte_carlo_extremes, run_oracle, simplex_sample, OracleConfig, OracleReport, SimplexSampler,
};
pub use profile::{ProfileParams, ProfilePoint};
pub use reduction::{curve_params, curve_point, two_value_config, CurveParams, CurvePoint};
pub use regimes::{classify, locate_mu, CriticalPoint, FShape, Regime, RegimeTag};
pub use solver::{find_extremum, find_root, Bracket, BracketKind, SolveResult};

pub type ExponentPair64 = ExponentPair<f64>;
pub type SampleVector64 = SampleVector<f64>;
pub type ProfileParams64 = ProfileParams<f64>;
pub type ProfilePoint64 = ProfilePoint<f64>;
pub type Regime64 = Regime<f64>;
pub type CriticalPoint64 = CriticalPoint<f64>;
pub type Certificate64 = ExtremumCertificate<f64>;
pub type InterpolationConstants64 = InterpolationConstants<f64>;
pub type CurveParams64 = CurveParams<f64>;
