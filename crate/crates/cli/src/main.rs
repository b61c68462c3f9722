use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mexed::bayes::{McmcConfig, PriorHyper};
use mexed::competitors::ModelId;
use mexed::io::commands::{self, BayesArgs, BayesMethod, CompareArgs, EvalArgs, EvalFunction, FitArgs, SampleArgs};
use mexed::io::{write_atomic, RunRecord};
use mexed::sim::SimConfig;
use mexed::{MomentMethod, Params};

#[derive(Parser)]
#[command(name = "mexed", version, about = "Fitting, Bayes estimation and simulation for the MExED lifetime model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Maximum-likelihood fit
    Fit(FitCli),
    /// Lindley and/or MCMC Bayes estimates
    Bayes(BayesCli),
    /// Six-model comparison table
    Compare(CompareCli),
    /// Monte Carlo risk study
    Simulate(SimulateCli),
    /// Evaluate a distribution function
    Eval(EvalCli),
    /// Draw a seeded sample
    Sample(SampleCli),
}

#[derive(Args)]
struct Common {
    /// File path, `-` for stdin, or builtin:aircond
    #[arg(long)]
    data: String,
    /// Result JSON destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitCli {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "mexed", value_parser = parse_model)]
    model: ModelId,
    #[arg(long)]
    at: Option<f64>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct BayesCli {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "both", value_parser = parse_method)]
    method: BayesMethod,
    /// Gamma hyperparameters a,b,c,d,g,f
    #[arg(long, value_parser = parse_prior)]
    prior: Option<PriorHyper>,
    #[arg(long)]
    at: Option<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    chain_length: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Write retained draws as CSV
    #[arg(long)]
    dump_chain: Option<PathBuf>,
}

#[derive(Args)]
struct CompareCli {
    #[command(flatten)]
    common: Common,
    /// Table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Empirical vs fitted CDF columns as CSV
    #[arg(long)]
    ecdf: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateCli {
    /// JSON file with SimConfig keys; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    sample_sizes: Option<Vec<usize>>,
    /// True parameters alpha,lambda,beta
    #[arg(long, value_parser = parse_params)]
    true_params: Option<Params>,
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Risk table as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Coverage report as CSV
    #[arg(long)]
    coverage: Option<PathBuf>,
}

#[derive(Args)]
struct EvalCli {
    /// alpha,lambda,beta
    #[arg(long, value_parser = parse_params)]
    params: Params,
    #[arg(long = "fn", value_parser = parse_function)]
    function: EvalFunction,
    /// Points (or probability levels for quantile), comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    at: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    order: u32,
    #[arg(long, default_value = "quadrature", value_parser = parse_moment_method)]
    moment_method: MomentMethod,
    #[arg(long, default_value_t = 60)]
    cutoff: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleCli {
    #[arg(long, value_parser = parse_params)]
    params: Params,
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sample as a one-column CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    s.parse().map_err(|e: mexed::Error| e.to_string())
}

fn parse_method(s: &str) -> Result<BayesMethod, String> {
    s.parse().map_err(|e: mexed::Error| e.to_string())
}

fn parse_prior(s: &str) -> Result<PriorHyper, String> {
    PriorHyper::parse(s).map_err(|e| e.to_string())
}

fn parse_params(s: &str) -> Result<Params, String> {
    Params::parse(s).map_err(|e| e.to_string())
}

fn parse_function(s: &str) -> Result<EvalFunction, String> {
    s.parse().map_err(|e: mexed::Error| e.to_string())
}

fn parse_moment_method(s: &str) -> Result<MomentMethod, String> {
    match s {
        "quadrature" => Ok(MomentMethod::Quadrature),
        "series" => Ok(MomentMethod::Series),
        _ => Err(format!("unknown moment method `{s}`; expected quadrature or series")),
    }
}

fn emit(record: &RunRecord, out: Option<&Path>) -> mexed::Result<()> {
    let text = record.to_json()?;
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_opt(path: Option<&Path>, contents: &str) -> mexed::Result<()> {
    match path {
        Some(p) => write_atomic(p, contents.as_bytes()),
        None => Ok(()),
    }
}

fn run(cli: Cli) -> mexed::Result<()> {
    match cli.cmd {
        Cmd::Fit(a) => {
            let args = FitArgs {
                data: a.common.data,
                model: a.model,
                at: a.at,
                level: a.level,
            };
            emit(&commands::run_fit(&args)?, a.common.out.as_deref())
        }
        Cmd::Bayes(a) => {
            let mut args = BayesArgs::new(&a.common.data);
            args.method = a.method;
            args.prior = a.prior.unwrap_or_default();
            args.at = a.at;
            args.level = a.level;
            args.mcmc = McmcConfig {
                seed: a.seed,
                ..McmcConfig::default()
            };
            if let Some(v) = a.chain_length {
                args.mcmc.chain_length = v;
            }
            if let Some(v) = a.burn_in {
                args.mcmc.burn_in = v;
            }
            if let Some(v) = a.thin {
                args.mcmc.thin = v;
            }
            let (record, chain) = commands::run_bayes(&args)?;
            if let (Some(p), Some(ch)) = (a.dump_chain.as_deref(), chain) {
                write_atomic(p, ch.to_csv().as_bytes())?;
            }
            emit(&record, a.common.out.as_deref())
        }
        Cmd::Compare(a) => {
            let out = commands::run_compare(&CompareArgs::new(&a.common.data))?;
            write_opt(a.csv.as_deref(), &out.table_csv)?;
            write_opt(a.ecdf.as_deref(), &out.ecdf_csv)?;
            emit(&out.record, a.common.out.as_deref())
        }
        Cmd::Simulate(a) => {
            let mut cfg = match &a.config {
                Some(p) => SimConfig::from_json(&std::fs::read_to_string(p)?)?,
                None => SimConfig::default(),
            };
            if let Some(v) = a.seed {
                cfg.seed = v;
            }
            if let Some(v) = a.replications {
                cfg.replications = v;
            }
            if let Some(v) = a.sample_sizes {
                cfg.sample_sizes = v;
            }
            if let Some(v) = a.true_params {
                cfg.true_params = v;
            }
            if let Some(v) = a.level {
                cfg.level = v;
            }
            let out = commands::run_simulate(&cfg)?;
            write_opt(a.csv.as_deref(), &out.table.to_csv())?;
            write_opt(a.coverage.as_deref(), &mexed::sim::coverage_csv(&out.coverage))?;
            emit(&out.record, a.out.as_deref())
        }
        Cmd::Eval(a) => {
            let args = EvalArgs {
                params: a.params,
                function: a.function,
                at: a.at,
                moment: commands::moment_spec(a.order, a.moment_method, a.cutoff),
            };
            emit(&commands::run_eval(&args)?, a.out.as_deref())
        }
        Cmd::Sample(a) => {
            let args = SampleArgs {
                params: a.params,
                n: a.n,
                seed: a.seed,
            };
            let (record, d) = commands::run_sample(&args)?;
            write_opt(a.csv.as_deref(), &commands::dataset_csv(&d))?;
            emit(&record, a.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
