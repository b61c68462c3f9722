// Density, distribution, hazard and moments at a few parameter settings.

use mexed::{MomentSpec, Params};

pub fn run_example() -> mexed::Result<()> {
    let settings = [(1.0, 1.0, 0.0), (0.5, 1.0, 0.5), (2.0, 0.2, 1.5), (0.22, 0.048, 0.01)];
    for (a, l, b) in settings {
        let p = Params::new(a, l, b)?;
        let (mean, var) = p.mean_and_variance()?;
        println!("alpha={a} lambda={l} beta={b}");
        println!("  mean {mean:.6}  var {var:.6}  median {:.6}  mode {:.6}", p.median(), p.mode());
        for x in [0.1, 0.5, 1.0, 2.0] {
            println!(
                "  x={x:<4} pdf {:.6}  cdf {:.6}  R {:.6}  h {:.6}  H {:.6}",
                p.pdf(x),
                p.cdf(x),
                p.survival(x),
                p.hazard(x),
                p.cum_hazard(x)
            );
        }
        println!("  q(0.9) = {:.6}", p.quantile(0.9)?);
    }

    // the series form needs lambda^2 > 4 beta
    let p = Params::new(1.5, 1.0, 0.01)?;
    let quad = p.moment(&MomentSpec::quadrature(2))?;
    let series = p.moment(&MomentSpec::series(2, 60))?;
    println!("E[X^2] at (1.5, 1, 0.01): quadrature {quad:.10}, series {series:.10}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
