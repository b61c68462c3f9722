//! Monte Carlo comparison of the estimators: simulated risk, bias and
//! interval coverage.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bayes::{
    chain_start, hpd_interval, lindley_params, posterior_means, run_chain, Coordinate,
    LindleyOptions, McmcConfig, PosteriorTarget, PriorHyper,
};
use crate::dist::Params;
use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOptions};

pub const PARAM_NAMES: [&str; 3] = ["alpha", "lambda", "beta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Mle,
    Lindley,
    Mcmc,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Mle => "mle",
            Estimator::Lindley => "lindley",
            Estimator::Mcmc => "mcmc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPrior {
    pub label: String,
    pub prior: PriorHyper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub true_params: Params,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub priors: Vec<LabeledPrior>,
    pub estimators: Vec<Estimator>,
    pub seed: u64,
    pub level: f64,
    /// Chain settings per replication; its `seed` is replaced by a
    /// replication-derived value.
    pub mcmc: McmcConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        let truth = Params::new(0.5, 1.0, 0.5).expect("valid");
        SimConfig {
            true_params: truth,
            sample_sizes: vec![20, 50, 100],
            replications: 500,
            priors: vec![
                LabeledPrior {
                    label: "noninformative".into(),
                    prior: PriorHyper::non_informative(),
                },
                LabeledPrior {
                    label: "informative".into(),
                    prior: centered_prior(&truth, 20.0),
                },
            ],
            estimators: vec![Estimator::Mle, Estimator::Lindley, Estimator::Mcmc],
            seed: 1,
            level: 0.95,
            mcmc: McmcConfig {
                chain_length: 6_000,
                burn_in: 1_000,
                thin: 5,
                ..McmcConfig::default()
            },
        }
    }
}

/// Gamma priors with means at `truth` and the given common shape.
pub fn centered_prior(truth: &Params, shape: f64) -> PriorHyper {
    let [a, l, b] = truth.as_array();
    PriorHyper {
        a: shape,
        b: shape / a,
        c: shape,
        d: shape / l,
        g: shape,
        f: shape / b,
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications: must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.iter().any(|&n| n < 5) {
            return Err(Error::Config(format!(
                "sample_sizes: need a non-empty list of sizes >= 5, got {:?}",
                self.sample_sizes
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("estimators: list is empty".into()));
        }
        let bayes = self.estimators.iter().any(|e| *e != Estimator::Mle);
        if bayes && self.priors.is_empty() {
            return Err(Error::Config(
                "priors: Bayes estimators requested but no prior given".into(),
            ));
        }
        for p in &self.priors {
            p.prior
                .validate()
                .map_err(|e| Error::Config(format!("priors[{}]: {e}", p.label)))?;
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config(format!("level: must lie in (0, 1), got {}", self.level)));
        }
        if self.estimators.contains(&Estimator::Mcmc) {
            self.mcmc
                .validate()
                .map_err(|e| Error::Config(format!("mcmc: {e}")))?;
        }
        Ok(())
    }

    /// Reads a JSON config; missing keys take their defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SimConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("simulation config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Deterministic generator for one `(seed, n, replication, stream)` cell.
fn sub_rng(seed: u64, n: usize, rep: usize, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(n as u64).to_le_bytes());
    key[16..24].copy_from_slice(&(rep as u64).to_le_bytes());
    key[24..].copy_from_slice(&stream.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn sub_seed(seed: u64, n: usize, rep: usize, stream: u64) -> u64 {
    use rand::RngCore;
    sub_rng(seed, n, rep, stream).next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub n: usize,
    pub estimator: Estimator,
    /// Prior label; empty for the MLE.
    pub prior: String,
    pub parameter: String,
    /// Mean squared error over the replications used.
    pub risk: f64,
    pub bias: f64,
    /// Fraction of intervals covering the truth (asymptotic CI for the MLE,
    /// HPD for MCMC, none for Lindley).
    pub coverage: Option<f64>,
    pub mean_length: Option<f64>,
    pub used: usize,
    pub excluded: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskTable {
    pub config: SimConfig,
    pub rows: Vec<RiskRow>,
}

impl RiskTable {
    pub fn find(&self, n: usize, est: Estimator, prior: &str, parameter: &str) -> Option<&RiskRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.estimator == est && r.prior == prior && r.parameter == parameter)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,estimator,prior,parameter,risk,bias,coverage,mean_length,used,excluded\n");
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:?},{:?},{},{},{},{}\n",
                r.n,
                r.estimator.name(),
                r.prior,
                r.parameter,
                r.risk,
                r.bias,
                opt(r.coverage),
                opt(r.mean_length),
                r.used,
                r.excluded
            ));
        }
        out
    }
}

#[derive(Default)]
struct Acc {
    sq: [f64; 3],
    err: [f64; 3],
    cover: [usize; 3],
    len: [f64; 3],
    has_interval: bool,
    used: usize,
    excluded: usize,
}

impl Acc {
    fn push(&mut self, est: [f64; 3], truth: [f64; 3], intervals: Option<[(f64, f64); 3]>) {
        self.used += 1;
        for i in 0..3 {
            let e = est[i] - truth[i];
            self.sq[i] += e * e;
            self.err[i] += e;
        }
        if let Some(iv) = intervals {
            self.has_interval = true;
            for i in 0..3 {
                if iv[i].0 <= truth[i] && truth[i] <= iv[i].1 {
                    self.cover[i] += 1;
                }
                self.len[i] += iv[i].1 - iv[i].0;
            }
        }
    }
}

/// Runs the study. Replication failures are excluded and counted, never fatal.
pub fn run_study(cfg: &SimConfig) -> Result<RiskTable> {
    cfg.validate()?;
    let truth = cfg.true_params.as_array();
    let wants = |e: Estimator| cfg.estimators.contains(&e);
    let mut accs: BTreeMap<(usize, Estimator, String), Acc> = BTreeMap::new();

    for &n in &cfg.sample_sizes {
        for rep in 0..cfg.replications {
            let mut rng = sub_rng(cfg.seed, n, rep, 0);
            let d = cfg.true_params.sample_with(n, &mut rng)?;
            let fit = fit_mle(
                &d,
                &FitOptions {
                    level: cfg.level,
                    ..FitOptions::default()
                },
            )
            .ok()
            .filter(|f| f.converged);

            if wants(Estimator::Mle) {
                let acc = accs.entry((n, Estimator::Mle, String::new())).or_default();
                match &fit {
                    Some(f) => acc.push(
                        f.params_hat.as_array(),
                        truth,
                        Some(f.ci.map(|c| (c.lower, c.upper))),
                    ),
                    None => acc.excluded += 1,
                }
            }
            for (pi, lp) in cfg.priors.iter().enumerate() {
                if wants(Estimator::Lindley) {
                    let est = fit
                        .as_ref()
                        .and_then(|f| lindley_params(&d, &lp.prior, f, LindleyOptions::default()).ok())
                        .filter(|v| v.iter().all(|x| x.is_finite()));
                    let acc = accs.entry((n, Estimator::Lindley, lp.label.clone())).or_default();
                    match est {
                        Some(v) => acc.push(v, truth, None),
                        None => acc.excluded += 1,
                    }
                }
                if wants(Estimator::Mcmc) {
                    let mcmc = McmcConfig {
                        seed: sub_seed(cfg.seed, n, rep, 1 + pi as u64),
                        ..cfg.mcmc.clone()
                    };
                    let target = PosteriorTarget::new(&d, lp.prior);
                    let out = run_chain(&target, &mcmc, &chain_start(&d, fit.as_ref())).and_then(|ch| {
                        let mut iv = [(0.0, 0.0); 3];
                        for c in Coordinate::ALL {
                            let h = hpd_interval(&ch.sorted_marginal(c), cfg.level)?;
                            iv[c.index()] = (h.lower, h.upper);
                        }
                        Ok((posterior_means(&ch), iv))
                    });
                    let acc = accs.entry((n, Estimator::Mcmc, lp.label.clone())).or_default();
                    match out {
                        Ok((m, iv)) => acc.push(m, truth, Some(iv)),
                        Err(_) => acc.excluded += 1,
                    }
                }
            }
        }
    }

    let mut rows = Vec::new();
    for ((n, est, prior), acc) in accs {
        for (i, name) in PARAM_NAMES.iter().enumerate() {
            let used = acc.used as f64;
            let (risk, bias, coverage, mean_length) = if acc.used == 0 {
                (f64::NAN, f64::NAN, None, None)
            } else {
                (
                    acc.sq[i] / used,
                    acc.err[i] / used,
                    acc.has_interval.then(|| acc.cover[i] as f64 / used),
                    acc.has_interval.then(|| acc.len[i] / used),
                )
            };
            rows.push(RiskRow {
                n,
                estimator: est,
                prior: prior.clone(),
                parameter: name.to_string(),
                risk,
                bias,
                coverage,
                mean_length,
                used: acc.used,
                excluded: acc.excluded,
            });
        }
    }
    Ok(RiskTable {
        config: cfg.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub n: usize,
    pub estimator: Estimator,
    pub prior: String,
    pub parameter: String,
    pub nominal: f64,
    pub coverage: f64,
    /// Binomial Monte Carlo standard error `sqrt(p(1-p)/R)`.
    pub mc_se: f64,
    pub lower: f64,
    pub upper: f64,
    /// Nominal level of 1, or an observed coverage of exactly 0 or 1, where
    /// the binomial error bar carries no information.
    pub degenerate: bool,
}

/// Coverage with ±1.96 binomial error bars for every row that has intervals.
pub fn coverage_report(tbl: &RiskTable, nominal: f64) -> Vec<CoverageRow> {
    tbl.rows
        .iter()
        .filter_map(|r| {
            let p = r.coverage?;
            let se = (p * (1.0 - p) / r.used.max(1) as f64).sqrt();
            Some(CoverageRow {
                n: r.n,
                estimator: r.estimator,
                prior: r.prior.clone(),
                parameter: r.parameter.clone(),
                nominal,
                coverage: p,
                mc_se: se,
                lower: (p - 1.96 * se).max(0.0),
                upper: (p + 1.96 * se).min(1.0),
                degenerate: nominal >= 1.0 || p == 0.0 || p == 1.0,
            })
        })
        .collect()
}

pub fn coverage_csv(rows: &[CoverageRow]) -> String {
    let mut out = String::from("n,estimator,prior,parameter,nominal,coverage,mc_se,lower,upper,degenerate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{:?},{:?},{:?},{:?},{:?},{}\n",
            r.n,
            r.estimator.name(),
            r.prior,
            r.parameter,
            r.nominal,
            r.coverage,
            r.mc_se,
            r.lower,
            r.upper,
            r.degenerate
        ));
    }
    out
}
