//! Maximum-likelihood estimation, observed information and asymptotic
//! intervals.
//!
//! The search runs BFGS in log-coordinates from several deterministic starts
//! and finishes with Newton steps on the analytic Hessian, so the reported
//! score is small in the natural parametrization.

mod fit;
mod likelihood;

pub use fit::{
    fit_mle, initial_points, normal_critical_value, plugin_hazard, plugin_reliability, FitOptions,
    FitResult, Interval,
};
pub(crate) use likelihood::ObsTerms;
pub use likelihood::{
    hessian_raw, log_likelihood, log_likelihood_raw, observed_information, score, score_raw, Mat3,
    Vec3,
};
