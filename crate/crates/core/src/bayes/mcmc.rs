//! Random-walk Metropolis–Hastings within Gibbs on log-coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::prior::PriorHyper;
use crate::dist::{Dataset, Params};
use crate::error::{Error, Result};
use crate::mle::{log_likelihood_raw, FitResult, Vec3};

pub const MIN_RETAINED: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    Alpha,
    Lambda,
    Beta,
}

impl Coordinate {
    pub const ALL: [Coordinate; 3] = [Coordinate::Alpha, Coordinate::Lambda, Coordinate::Beta];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub chain_length: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Standard deviations of the log-scale random-walk proposals.
    pub proposal_scales: Vec3,
    pub adapt: bool,
    pub target_accept_range: (f64, f64),
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            chain_length: 50_000,
            burn_in: 10_000,
            thin: 4,
            seed: 1,
            proposal_scales: [0.3, 0.3, 0.5],
            adapt: true,
            target_accept_range: (0.2, 0.5),
        }
    }
}

impl McmcConfig {
    pub fn retained(&self) -> usize {
        self.chain_length.saturating_sub(self.burn_in) / self.thin.max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.burn_in >= self.chain_length {
            return Err(Error::Config(format!(
                "burn-in ({}) must be smaller than the chain length ({})",
                self.burn_in, self.chain_length
            )));
        }
        if self.retained() < MIN_RETAINED {
            return Err(Error::Config(format!(
                "(chain_length - burn_in) / thin = {} retained draws; at least {MIN_RETAINED} required",
                self.retained()
            )));
        }
        if !self.proposal_scales.iter().all(|s| s.is_finite() && *s > 0.0) {
            return Err(Error::Config("proposal scales must be positive".into()));
        }
        let (lo, hi) = self.target_accept_range;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::Config(format!(
                "target acceptance range ({lo}, {hi}) must satisfy 0 < lo < hi < 1"
            )));
        }
        Ok(())
    }
}

/// Unnormalized joint posterior of `(α, λ, β)`.
#[derive(Debug, Clone)]
pub struct PosteriorTarget<'a> {
    xs: &'a [f64],
    prior: PriorHyper,
}

impl<'a> PosteriorTarget<'a> {
    pub fn new(d: &'a Dataset, prior: PriorHyper) -> Self {
        PosteriorTarget {
            xs: d.values(),
            prior,
        }
    }

    /// Target without data: the chain then samples the prior itself.
    pub fn prior_only(prior: PriorHyper) -> PosteriorTarget<'static> {
        PosteriorTarget { xs: &[], prior }
    }

    pub fn log_posterior(&self, theta: &Vec3) -> f64 {
        if !theta.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        log_likelihood_raw(theta, self.xs) + self.prior.log_density(theta)
    }

    /// Log full conditional of one coordinate, dropping additive terms that
    /// do not depend on it.
    pub fn log_conditional(&self, which: Coordinate, theta: &Vec3) -> f64 {
        if !theta.iter().all(|v| *v > 0.0 && v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let [alpha, lambda, beta] = *theta;
        let i = which.index();
        let (shape, rate) = self.prior.pairs()[i];
        let n = self.xs.len() as f64;
        let mut acc = (shape - 1.0) * theta[i].ln() - rate * theta[i];
        if which == Coordinate::Alpha {
            acc += n * alpha.ln();
        }
        for &x in self.xs {
            let lw = (x * (lambda + beta * x)).ln_1p();
            acc += (alpha - 1.0) * lw - (alpha * lw).exp_m1();
            if which != Coordinate::Alpha {
                acc += (lambda + 2.0 * beta * x).ln();
            }
        }
        acc
    }

    /// α-conditional from cached `ln w(x_i)` values.
    fn alpha_conditional_cached(&self, alpha: f64, lws: &[f64], sum_lw: f64) -> f64 {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let (shape, rate) = self.prior.pairs()[0];
        let n = lws.len() as f64;
        let tail: f64 = lws.iter().map(|lw| (alpha * lw).exp_m1()).sum();
        (n + shape - 1.0) * alpha.ln() - rate * alpha + (alpha - 1.0) * sum_lw - tail
    }
}

/// Log full conditional of `which` at `p` given data `d` and prior `h`.
pub fn log_full_conditional(which: Coordinate, p: &Params, d: &Dataset, h: &PriorHyper) -> f64 {
    PosteriorTarget::new(d, *h).log_conditional(which, &p.as_array())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorChain {
    /// Retained `(α, λ, β)` draws after burn-in and thinning.
    pub draws: Vec<Vec3>,
    /// Post-burn-in acceptance rate of each coordinate.
    pub accept_rates: Vec3,
    /// Proposal scales in use after adaptation.
    pub final_scales: Vec3,
    pub seed: u64,
    pub config: McmcConfig,
}

impl PosteriorChain {
    /// 1-based iteration number of retained draw `j`.
    pub fn iteration_of(&self, j: usize) -> usize {
        self.config.burn_in + (j + 1) * self.config.thin
    }

    /// Draws of one coordinate, sorted ascending.
    pub fn sorted_marginal(&self, which: Coordinate) -> Vec<f64> {
        let mut v: Vec<f64> = self.draws.iter().map(|d| d[which.index()]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// CSV with columns `iteration,alpha,lambda,beta`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,alpha,lambda,beta\n");
        for (j, d) in self.draws.iter().enumerate() {
            out.push_str(&format!("{},{:?},{:?},{:?}\n", self.iteration_of(j), d[0], d[1], d[2]));
        }
        out
    }

    /// Monte Carlo standard error of the mean of `f(draw)` by batch means.
    pub fn batch_mean_se<F: Fn(&Vec3) -> f64>(&self, f: F) -> f64 {
        let vals: Vec<f64> = self.draws.iter().map(f).collect();
        batch_means_se(&vals)
    }
}

fn batch_means_se(vals: &[f64]) -> f64 {
    let batches = 50.min(vals.len());
    let size = vals.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| vals[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (batches - 1).max(1) as f64;
    (var / batches as f64).sqrt()
}

/// Starting state: the MLE with any zero rate nudged inside the support,
/// or a data-scaled default when no fit is available.
pub fn chain_start(d: &Dataset, fit: Option<&FitResult>) -> Params {
    let m = d.mean();
    let floor = [1e-3, 1e-3 / m, 1e-3 / (m * m)];
    let theta = match fit {
        Some(f) => f.params_hat.as_array(),
        None => [1.0, 1.0 / m, 1e-3 / (m * m)],
    };
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = theta[i].max(floor[i]);
    }
    Params::from_array(out).expect("positive components")
}

/// Runs the sampler against `target`.
pub fn run_chain(target: &PosteriorTarget<'_>, cfg: &McmcConfig, init: &Params) -> Result<PosteriorChain> {
    cfg.validate()?;
    let mut theta = init.as_array();
    if !theta.iter().all(|v| *v > 0.0) {
        return Err(Error::InvalidParams(format!(
            "chain must start in the interior, got {theta:?}"
        )));
    }
    if !target.log_posterior(&theta).is_finite() {
        return Err(Error::InvalidParams(format!(
            "posterior is zero at the starting point {theta:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let target_rate = 0.5 * (cfg.target_accept_range.0 + cfg.target_accept_range.1);
    let mut log_scales = cfg.proposal_scales.map(f64::ln);

    let xs = target.xs;
    let mut lws: Vec<f64> = xs.iter().map(|&x| (x * (theta[1] + theta[2] * x)).ln_1p()).collect();
    let mut sum_lw: f64 = lws.iter().sum();

    let mut accepted = [0usize; 3];
    let mut draws = Vec::with_capacity(cfg.retained());
    for iter in 0..cfg.chain_length {
        let burning = iter < cfg.burn_in;
        for which in Coordinate::ALL {
            let i = which.index();
            let z: f64 = rng.sample(StandardNormal);
            let proposal = theta[i] * (log_scales[i].exp() * z).exp();
            let mut trial = theta;
            trial[i] = proposal;
            let (cur, new) = match which {
                Coordinate::Alpha => (
                    target.alpha_conditional_cached(theta[0], &lws, sum_lw),
                    target.alpha_conditional_cached(proposal, &lws, sum_lw),
                ),
                _ => (target.log_conditional(which, &theta), target.log_conditional(which, &trial)),
            };
            // log-scale walk: the Jacobian adds ln θ' - ln θ
            let log_ratio = new - cur + (proposal / theta[i]).ln();
            let u: f64 = rng.random();
            let accept = log_ratio.is_finite() && u.ln() < log_ratio;
            if accept {
                theta = trial;
                if which != Coordinate::Alpha {
                    for (lw, &x) in lws.iter_mut().zip(xs) {
                        *lw = (x * (theta[1] + theta[2] * x)).ln_1p();
                    }
                    sum_lw = lws.iter().sum();
                }
            }
            if burning {
                if cfg.adapt {
                    let gain = ((iter + 1) as f64).powf(-0.6);
                    let hit = if accept { 1.0 } else { 0.0 };
                    log_scales[i] += gain * (hit - target_rate);
                }
            } else if accept {
                accepted[i] += 1;
            }
        }
        if !burning && (iter + 1 - cfg.burn_in) % cfg.thin == 0 {
            draws.push(theta);
        }
    }
    let post = (cfg.chain_length - cfg.burn_in) as f64;
    Ok(PosteriorChain {
        draws,
        accept_rates: accepted.map(|a| a as f64 / post),
        final_scales: log_scales.map(f64::exp),
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

/// Coordinate-wise means of the retained draws.
pub fn posterior_means(ch: &PosteriorChain) -> Vec3 {
    let n = ch.draws.len() as f64;
    let mut m = [0.0; 3];
    for d in &ch.draws {
        for i in 0..3 {
            m[i] += d[i];
        }
    }
    m.map(|v| v / n)
}

fn mean_over<F: Fn(&Params) -> f64>(ch: &PosteriorChain, f: F) -> f64 {
    let total: f64 = ch
        .draws
        .iter()
        .map(|d| f(&Params::from_array(*d).expect("draws are interior")))
        .sum();
    total / ch.draws.len() as f64
}

/// Posterior mean of `R(t)`.
pub fn posterior_reliability(ch: &PosteriorChain, t: f64) -> f64 {
    mean_over(ch, |p| p.survival(t))
}

/// Posterior mean of `h(t)`.
pub fn posterior_hazard(ch: &PosteriorChain, t: f64) -> f64 {
    mean_over(ch, |p| p.hazard(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_chain(draws: Vec<Vec3>) -> PosteriorChain {
        PosteriorChain {
            draws,
            accept_rates: [0.0; 3],
            final_scales: [1.0; 3],
            seed: 0,
            config: McmcConfig::default(),
        }
    }

    #[test]
    fn summaries_of_fixed_chains() {
        let ch = constant_chain(vec![[1.0, 1.0, 1.0], [3.0, 3.0, 3.0]]);
        assert_eq!(posterior_means(&ch), [2.0, 2.0, 2.0]);
        let ch = constant_chain(vec![[1.0, 0.7, 0.0]; 4]);
        assert_eq!(posterior_hazard(&ch, 2.0), 0.7);
        assert_eq!(posterior_reliability(&ch, 0.0), 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(McmcConfig::default().validate().is_ok());
        let short = McmcConfig {
            chain_length: 500,
            burn_in: 100,
            thin: 5,
            ..McmcConfig::default()
        };
        assert!(matches!(short.validate(), Err(Error::Config(_))));
        let bad = McmcConfig {
            burn_in: 60_000,
            ..McmcConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn prior_only_alpha_conditional_is_gamma_kernel() {
        let h = PriorHyper::new(2.0, 1.0, 1.0, 0.0, 1.0, 0.0).unwrap();
        let t = PosteriorTarget::prior_only(h);
        let f = |a: f64| t.log_conditional(Coordinate::Alpha, &[a, 0.5, 0.5]);
        let g = |a: f64| a.ln() - a;
        assert!(((f(2.5) - f(0.7)) - (g(2.5) - g(0.7))).abs() < 1e-12);
    }

    #[test]
    fn cached_alpha_conditional_matches() {
        let d = Dataset::new(vec![0.4, 1.1, 2.9]).unwrap();
        let h = PriorHyper::new(2.0, 0.5, 1.0, 0.0, 1.0, 0.0).unwrap();
        let t = PosteriorTarget::new(&d, h);
        let theta = [0.9, 0.6, 0.2];
        let lws: Vec<f64> = d.values().iter().map(|&x| (x * (0.6 + 0.2 * x)).ln_1p()).collect();
        let s: f64 = lws.iter().sum();
        for a in [0.3, 0.9, 2.0] {
            let mut th = theta;
            th[0] = a;
            let direct = t.log_conditional(Coordinate::Alpha, &th);
            let cached = t.alpha_conditional_cached(a, &lws, s);
            assert!((direct - cached).abs() < 1e-12);
        }
    }
}
