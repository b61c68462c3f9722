// A small Monte Carlo risk study. The defaults run 500 replications.

use mexed::sim::{coverage_report, run_study, Estimator, SimConfig};

pub fn run_example() -> mexed::Result<()> {
    let mut cfg = SimConfig {
        replications: 20,
        sample_sizes: vec![30, 100],
        estimators: vec![Estimator::Mle, Estimator::Mcmc],
        ..SimConfig::default()
    };
    cfg.mcmc.chain_length = 3000;
    cfg.mcmc.burn_in = 500;
    let table = run_study(&cfg)?;
    print!("{}", table.to_csv());
    for c in coverage_report(&table, cfg.level) {
        println!(
            "n={:<4} {:<5} {:<14} {:<7} coverage {:.2} ± {:.2}",
            c.n,
            c.estimator.name(),
            c.prior,
            c.parameter,
            c.coverage,
            1.96 * c.mc_se
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
