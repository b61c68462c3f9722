//! The six command-line operations as library calls. Each returns a
//! [`RunRecord`] plus whatever side tables the command produces; writing
//! them anywhere is left to the caller.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::{ingest, RunRecord};
use crate::bayes::{
    chain_start, hpd_interval, lindley_estimate, posterior_hazard, posterior_means,
    posterior_reliability, run_chain, Coordinate, LindleyOptions, McmcConfig, PosteriorChain,
    PosteriorTarget, PriorHyper,
};
use crate::competitors::{
    comparison_csv, comparison_table, ecdf_overlay, fit_model, kolmogorov_distance,
    kolmogorov_pvalue, ModelFit, ModelId,
};
use crate::dist::{Dataset, MomentMethod, MomentSpec, Params};
use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOptions, FitResult, Interval};
use crate::sim::{coverage_report, run_study, CoverageRow, RiskTable, SimConfig, PARAM_NAMES};

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn named(values: &[f64], names: &[&str]) -> Value {
    let mut m = Map::new();
    for (k, v) in names.iter().zip(values) {
        m.insert(k.to_string(), json!(v));
    }
    Value::Object(m)
}

fn named_intervals(ci: &[Interval; 3]) -> Value {
    let mut m = Map::new();
    for (k, c) in PARAM_NAMES.iter().zip(ci) {
        m.insert(k.to_string(), to_value(c));
    }
    Value::Object(m)
}

fn check_time(t: Option<f64>) -> Result<()> {
    match t {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            Err(Error::Domain(format!("--at must be a non-negative time, got {t}")))
        }
        _ => Ok(()),
    }
}

// ---- fit ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    pub data: String,
    pub model: ModelId,
    pub at: Option<f64>,
    pub level: f64,
}

impl FitArgs {
    pub fn new(data: &str) -> Self {
        FitArgs {
            data: data.to_string(),
            model: ModelId::Mexed,
            at: None,
            level: 0.95,
        }
    }
}

pub fn mle_summary(fit: &FitResult, at: Option<f64>) -> Value {
    let p = fit.params_hat.as_array();
    let k = fit.free_parameters();
    let nll = -fit.loglik;
    let (aic, bic) = crate::competitors::information_criteria(nll, k, fit.n);
    let mut out = json!({
        "params_hat": named(&p, &PARAM_NAMES),
        "loglik": fit.loglik,
        "neg_loglik": nll,
        "aic": aic,
        "bic": bic,
        "std_errors": named(&fit.std_errors(), &PARAM_NAMES),
        "ci": named_intervals(&fit.ci),
        "level": fit.level,
        "cov": fit.cov_matrix,
        "information": fit.info_matrix,
        "cov_reliable": fit.cov_reliable,
        "converged": fit.converged,
        "gradient_norm": fit.gradient_norm,
        "iterations": fit.iterations,
        "n": fit.n,
    });
    if let Some(t) = at {
        out["at"] = json!({
            "t": t,
            "reliability": fit.params_hat.survival(t),
            "hazard": fit.params_hat.hazard(t),
        });
    }
    out
}

fn competitor_summary(fit: &ModelFit, at: Option<f64>) -> Value {
    let mut out = json!({
        "model": fit.model_id.name(),
        "params_hat": named(&fit.params, fit.model_id.param_names()),
        "loglik": -fit.neg_loglik,
        "neg_loglik": fit.neg_loglik,
        "aic": fit.aic,
        "bic": fit.bic,
        "k": fit.k,
        "n": fit.n,
        "converged": fit.converged,
        "reliable": fit.reliable,
    });
    if let Some(t) = at {
        out["at"] = json!({ "t": t, "reliability": 1.0 - fit.cdf(t) });
    }
    out
}

pub fn run_fit(args: &FitArgs) -> Result<RunRecord> {
    check_time(args.at)?;
    let d = ingest(&args.data)?;
    let results = match args.model {
        ModelId::Mexed => {
            let opts = FitOptions {
                level: args.level,
                ..FitOptions::default()
            };
            let fit = fit_mle(&d, &opts)?;
            let mut v = mle_summary(&fit, args.at);
            v["model"] = json!("mexed");
            v
        }
        m => competitor_summary(&fit_model(m, &d)?, args.at),
    };
    Ok(RunRecord::new("fit", to_value(args), None, results))
}

// ---- bayes ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BayesMethod {
    Lindley,
    Mcmc,
    Both,
}

impl std::str::FromStr for BayesMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lindley" => Ok(BayesMethod::Lindley),
            "mcmc" => Ok(BayesMethod::Mcmc),
            "both" => Ok(BayesMethod::Both),
            _ => Err(Error::Config(format!(
                "unknown method `{s}`; expected lindley, mcmc or both"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BayesArgs {
    pub data: String,
    pub method: BayesMethod,
    pub prior: PriorHyper,
    pub at: Option<f64>,
    /// HPD credibility level.
    pub level: f64,
    pub mcmc: McmcConfig,
    pub lindley: LindleyOptions,
}

impl BayesArgs {
    pub fn new(data: &str) -> Self {
        BayesArgs {
            data: data.to_string(),
            method: BayesMethod::Both,
            prior: PriorHyper::non_informative(),
            at: None,
            level: 0.95,
            mcmc: McmcConfig::default(),
            lindley: LindleyOptions::default(),
        }
    }
}

pub fn mcmc_summary(chain: &PosteriorChain, at: Option<f64>, level: f64) -> Result<Value> {
    let means = posterior_means(chain);
    let mut hpd = Map::new();
    let mut se = Map::new();
    for (i, c) in [Coordinate::Alpha, Coordinate::Lambda, Coordinate::Beta]
        .into_iter()
        .enumerate()
    {
        let iv = hpd_interval(&chain.sorted_marginal(c), level)?;
        hpd.insert(PARAM_NAMES[i].into(), to_value(&iv));
        se.insert(PARAM_NAMES[i].into(), json!(chain.batch_mean_se(|th| th[i])));
    }
    let mut out = json!({
        "posterior_mean": named(&means, &PARAM_NAMES),
        "mc_se": Value::Object(se),
        "hpd": Value::Object(hpd),
        "accept_rates": named(&chain.accept_rates, &PARAM_NAMES),
        "final_scales": named(&chain.final_scales, &PARAM_NAMES),
        "retained": chain.draws.len(),
    });
    if let Some(t) = at {
        let sorted = |f: &dyn Fn(&Params) -> f64| {
            let mut v: Vec<f64> = chain
                .draws
                .iter()
                .map(|th| f(&Params::from_array(*th).expect("chain stays in the domain")))
                .collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let r_hpd = hpd_interval(&sorted(&|p| p.survival(t)), level)?;
        let h_hpd = hpd_interval(&sorted(&|p| p.hazard(t)), level)?;
        out["at"] = json!({
            "t": t,
            "reliability": posterior_reliability(chain, t),
            "reliability_hpd": r_hpd,
            "hazard": posterior_hazard(chain, t),
            "hazard_hpd": h_hpd,
        });
    }
    Ok(out)
}

/// Runs the requested Bayes estimators. The chain is returned for dumping.
pub fn run_bayes(args: &BayesArgs) -> Result<(RunRecord, Option<PosteriorChain>)> {
    check_time(args.at)?;
    args.prior.validate()?;
    let d = ingest(&args.data)?;
    let want_lindley = args.method != BayesMethod::Mcmc;
    let want_mcmc = args.method != BayesMethod::Lindley;

    let fit = fit_mle(&d, &FitOptions::default());
    let mut results = Map::new();
    if want_lindley {
        let fit = fit.as_ref().map_err(|e| {
            Error::ApproximationUnavailable(format!("no maximum-likelihood anchor: {e}"))
        })?;
        let l = lindley_estimate(&d, &args.prior, fit, args.at, args.lindley)?;
        let mut v = json!({
            "estimate": named(&l.params_array(), &PARAM_NAMES),
            "mle_anchor": named(&l.mle_anchor.params_hat.as_array(), &PARAM_NAMES),
        });
        if let Some(t) = l.t {
            v["at"] = json!({
                "t": t,
                "reliability": l.reliability_bs,
                "reliability_clamped": l.reliability_clamped,
                "hazard": l.hazard_bs,
                "hazard_clamped": l.hazard_clamped,
            });
        }
        results.insert("lindley".into(), v);
    }
    let mut chain = None;
    if want_mcmc {
        args.mcmc.validate()?;
        let target = PosteriorTarget::new(&d, args.prior);
        let start = chain_start(&d, fit.as_ref().ok());
        let ch = run_chain(&target, &args.mcmc, &start)?;
        results.insert("mcmc".into(), mcmc_summary(&ch, args.at, args.level)?);
        chain = Some(ch);
    }
    let seed = want_mcmc.then_some(args.mcmc.seed);
    let record = RunRecord::new("bayes", to_value(args), seed, Value::Object(results));
    Ok((record, chain))
}

// ---- compare ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareArgs {
    pub data: String,
    pub models: Vec<ModelId>,
}

impl CompareArgs {
    pub fn new(data: &str) -> Self {
        CompareArgs {
            data: data.to_string(),
            models: ModelId::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub record: RunRecord,
    pub table_csv: String,
    pub ecdf_csv: String,
}

/// Fits every model; fails only when no row succeeds.
pub fn run_compare(args: &CompareArgs) -> Result<CompareOutput> {
    let d = ingest(&args.data)?;
    let rows = comparison_table(&d, &args.models);
    let fits: Vec<ModelFit> = rows.iter().filter_map(|r| r.fit.clone()).collect();
    if fits.is_empty() {
        return Err(Error::Numeric("no model could be fitted".into()));
    }
    let sorted = d.sorted();
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|r| match &r.fit {
            Some(f) => {
                let ks = kolmogorov_distance(&sorted, |x| f.cdf(x));
                let mut v = competitor_summary(f, None);
                v["ks_distance"] = json!(ks);
                v["ks_pvalue"] = json!(kolmogorov_pvalue(ks, d.len()));
                v["error"] = Value::Null;
                v
            }
            None => json!({ "model": r.model_id.name(), "error": r.error }),
        })
        .collect();
    let record = RunRecord::new("compare", to_value(args), None, json!({ "rows": json_rows }));
    Ok(CompareOutput {
        record,
        table_csv: comparison_csv(&rows),
        ecdf_csv: ecdf_overlay(&d, &fits).to_csv(),
    })
}

// ---- simulate ----

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub record: RunRecord,
    pub table: RiskTable,
    pub coverage: Vec<CoverageRow>,
}

pub fn run_simulate(cfg: &SimConfig) -> Result<SimulateOutput> {
    let table = run_study(cfg)?;
    let coverage = coverage_report(&table, cfg.level);
    let record = RunRecord::new(
        "simulate",
        to_value(cfg),
        Some(cfg.seed),
        json!({ "risk": table.rows, "coverage": coverage }),
    );
    Ok(SimulateOutput {
        record,
        table,
        coverage,
    })
}

// ---- eval ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalFunction {
    Pdf,
    Cdf,
    Survival,
    Hazard,
    CumHazard,
    Quantile,
    Moment,
    Mean,
    Variance,
    Median,
    Mode,
}

impl EvalFunction {
    pub const ALL: [EvalFunction; 11] = [
        EvalFunction::Pdf,
        EvalFunction::Cdf,
        EvalFunction::Survival,
        EvalFunction::Hazard,
        EvalFunction::CumHazard,
        EvalFunction::Quantile,
        EvalFunction::Moment,
        EvalFunction::Mean,
        EvalFunction::Variance,
        EvalFunction::Median,
        EvalFunction::Mode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalFunction::Pdf => "pdf",
            EvalFunction::Cdf => "cdf",
            EvalFunction::Survival => "survival",
            EvalFunction::Hazard => "hazard",
            EvalFunction::CumHazard => "cum_hazard",
            EvalFunction::Quantile => "quantile",
            EvalFunction::Moment => "moment",
            EvalFunction::Mean => "mean",
            EvalFunction::Variance => "variance",
            EvalFunction::Median => "median",
            EvalFunction::Mode => "mode",
        }
    }

    fn pointwise(self) -> bool {
        matches!(
            self,
            EvalFunction::Pdf
                | EvalFunction::Cdf
                | EvalFunction::Survival
                | EvalFunction::Hazard
                | EvalFunction::CumHazard
                | EvalFunction::Quantile
        )
    }
}

impl std::str::FromStr for EvalFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EvalFunction::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown function `{s}`; expected one of {}",
                    EvalFunction::ALL.map(|f| f.name()).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalArgs {
    pub params: Params,
    pub function: EvalFunction,
    /// Evaluation points (probability levels for `quantile`).
    pub at: Vec<f64>,
    pub moment: MomentSpec,
}

pub fn run_eval(args: &EvalArgs) -> Result<RunRecord> {
    let p = &args.params;
    let f = args.function;
    let results = if f.pointwise() {
        if args.at.is_empty() {
            return Err(Error::Config(format!("`{}` needs at least one --at value", f.name())));
        }
        let values = args
            .at
            .iter()
            .map(|&x| {
                let v = match f {
                    EvalFunction::Pdf => p.pdf(x),
                    EvalFunction::Cdf => p.cdf(x),
                    EvalFunction::Survival => p.survival(x),
                    EvalFunction::Hazard => p.hazard(x),
                    EvalFunction::CumHazard => p.cum_hazard(x),
                    _ => p.quantile(x)?,
                };
                Ok(json!({ "x": x, "value": v }))
            })
            .collect::<Result<Vec<_>>>()?;
        json!({ "function": f.name(), "values": values })
    } else {
        let value = match f {
            EvalFunction::Moment => p.moment(&args.moment)?,
            EvalFunction::Mean => p.mean_and_variance()?.0,
            EvalFunction::Variance => p.mean_and_variance()?.1,
            EvalFunction::Median => p.median(),
            _ => p.mode(),
        };
        let mut v = json!({ "function": f.name(), "value": value });
        if f == EvalFunction::Moment {
            v["order"] = json!(args.moment.order);
            v["method"] = to_value(&args.moment.method);
        }
        v
    };
    Ok(RunRecord::new("eval", to_value(args), None, results))
}

/// Moment settings from the command-line pieces.
pub fn moment_spec(order: u32, method: MomentMethod, cutoff: u32) -> MomentSpec {
    match method {
        MomentMethod::Quadrature => MomentSpec::quadrature(order),
        MomentMethod::Series => MomentSpec::series(order, cutoff),
    }
}

// ---- sample ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleArgs {
    pub params: Params,
    pub n: usize,
    pub seed: u64,
}

pub fn run_sample(args: &SampleArgs) -> Result<(RunRecord, Dataset)> {
    let d = args.params.sample(args.n, args.seed)?;
    let record = RunRecord::new(
        "sample",
        to_value(args),
        Some(args.seed),
        json!({ "n": d.len(), "values": d.values() }),
    );
    Ok((record, d))
}

/// One value per line, readable by [`super::ingest`].
pub fn dataset_csv(d: &Dataset) -> String {
    let mut out = String::from("x\n");
    for v in d.values() {
        out.push_str(&format!("{v:?}\n"));
    }
    out
}
