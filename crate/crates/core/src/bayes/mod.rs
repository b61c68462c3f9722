//! Bayes estimation under independent gamma priors: Lindley's expansion,
//! Metropolis–Hastings-within-Gibbs sampling and HPD intervals.

mod hpd;
mod lindley;
mod mcmc;
mod prior;

pub use hpd::{equal_tailed_interval, hpd_interval, HpdInterval};
pub use lindley::{
    coordinate_u, hazard_u, lindley_estimate, lindley_hazard, lindley_params, lindley_reliability,
    reliability_u, third_derivatives, CrossTerm, LindleyBasis, LindleyOptions, LindleyResult,
    Tensor3, UDerivatives,
};
pub use mcmc::{
    log_full_conditional, posterior_hazard, posterior_means, posterior_reliability, run_chain,
    chain_start, Coordinate, McmcConfig, PosteriorChain, PosteriorTarget,
};
pub use prior::{prior_log_density_grad, PriorHyper};
