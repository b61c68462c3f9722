// Metropolis-within-Gibbs posterior sampling with HPD intervals.

use mexed::bayes::{
    chain_start, equal_tailed_interval, hpd_interval, posterior_means, posterior_reliability,
    run_chain, Coordinate, McmcConfig, PosteriorTarget, PriorHyper,
};
use mexed::data::aircond;
use mexed::io::write_atomic;
use mexed::mle::{fit_mle, FitOptions};

pub fn run_example() -> mexed::Result<()> {
    let d = aircond();
    let prior = PriorHyper::new(1.0, 1.0, 1.0, 10.0, 1.0, 100.0)?;
    let fit = fit_mle(&d, &FitOptions::default())?;
    let cfg = McmcConfig {
        chain_length: 20_000,
        burn_in: 4_000,
        thin: 4,
        seed: 11,
        ..McmcConfig::default()
    };
    let target = PosteriorTarget::new(&d, prior);
    let chain = run_chain(&target, &cfg, &chain_start(&d, Some(&fit)))?;

    println!("acceptance rates {:?}", chain.accept_rates);
    println!("posterior means  {:?}", posterior_means(&chain));
    for c in [Coordinate::Alpha, Coordinate::Lambda, Coordinate::Beta] {
        let draws = chain.sorted_marginal(c);
        let hpd = hpd_interval(&draws, 0.95)?;
        let et = equal_tailed_interval(&draws, 0.95)?;
        println!(
            "{c:?}: HPD [{:.5}, {:.5}] len {:.5}; equal-tailed len {:.5}",
            hpd.lower, hpd.upper, hpd.length, et.length
        );
    }
    println!("E[R(50) | data] = {:.4}", posterior_reliability(&chain, 50.0));

    let dir = std::env::temp_dir().join("mexed-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("chain.csv");
    write_atomic(&path, chain.to_csv().as_bytes())?;
    println!("wrote {} draws to {}", chain.draws.len(), path.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
