// Analytic score and information against central differences.

use mexed::bayes::third_derivatives;
use mexed::mle::{log_likelihood, observed_information, score};
use mexed::Params;

pub fn run_example() -> mexed::Result<()> {
    let truth = Params::new(0.8, 0.5, 0.3)?;
    let d = truth.sample(200, 5)?;
    let theta = [0.9, 0.45, 0.35];
    let at = |v: [f64; 3]| Params::from_array(v).expect("interior point");
    let p = at(theta);

    let s = score(&p, &d);
    let info = observed_information(&p, &d);
    for i in 0..3 {
        let h = 1e-5 * theta[i];
        let (mut up, mut dn) = (theta, theta);
        up[i] += h;
        dn[i] -= h;
        let fd = (log_likelihood(&at(up), &d) - log_likelihood(&at(dn), &d)) / (2.0 * h);
        let fd_row: Vec<f64> = (0..3)
            .map(|j| -(score(&at(up), &d)[j] - score(&at(dn), &d)[j]) / (2.0 * h))
            .collect();
        println!("score[{i}] {:+.8e}  fd {:+.8e}", s[i], fd);
        println!("info[{i}]  {:?}\n  fd      {:?}", info[i], fd_row);
    }
    let l3 = third_derivatives(&p, &d);
    println!("L_000 = {:.6e}, L_012 = {:.6e}", l3[0][0][0], l3[0][1][2]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
