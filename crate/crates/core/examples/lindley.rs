// Lindley approximations to posterior means under gamma priors.

use mexed::bayes::{lindley_estimate, LindleyOptions, PriorHyper};
use mexed::mle::{fit_mle, FitOptions};
use mexed::Params;

pub fn run_example() -> mexed::Result<()> {
    let truth = Params::new(0.5, 0.1, 2.0)?;
    let d = truth.sample(200, 17)?;
    let fit = fit_mle(&d, &FitOptions::default())?;
    println!("MLE {:?}", fit.params_hat.as_array());

    let priors = [
        ("flat", PriorHyper::non_informative()),
        ("gamma shape 2", PriorHyper::new(2.0, 4.0, 2.0, 10.0, 2.0, 1.0)?),
    ];
    for (label, prior) in priors {
        let res = lindley_estimate(&d, &prior, &fit, Some(0.5), LindleyOptions::default())?;
        println!(
            "{label:<14} alpha {:.5}  lambda {:.5}  beta {:.5}  R(0.5) {:.5}  h(0.5) {:.5}",
            res.alpha_bs,
            res.lambda_bs,
            res.beta_bs,
            res.reliability_bs.unwrap_or(f64::NAN),
            res.hazard_bs.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
