// Maximum-likelihood fit to the bundled air-conditioning failure times.

use mexed::data::aircond;
use mexed::mle::{fit_mle, plugin_hazard, plugin_reliability, FitOptions};

pub fn run_example() -> mexed::Result<()> {
    let d = aircond();
    let fit = fit_mle(&d, &FitOptions::default())?;
    let names = ["alpha", "lambda", "beta"];
    let se = fit.std_errors();
    println!("log L = {:.4}  (converged: {})", fit.loglik, fit.converged);
    for (i, name) in names.iter().enumerate() {
        let ci = fit.ci[i];
        println!(
            "{name:>6} = {:.6}  se {:.6}  95% CI [{:.6}, {:.6}]",
            fit.params_hat.as_array()[i],
            se[i],
            ci.lower,
            ci.upper
        );
    }
    for t in [10.0, 50.0, 100.0] {
        println!("t={t:<5} R = {:.4}  h = {:.5}", plugin_reliability(&fit, t), plugin_hazard(&fit, t));
    }

    let ne = fit_mle(&d, &FitOptions::without_quadratic_term())?;
    println!("beta = 0 sub-model: log L = {:.4}", ne.loglik);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
