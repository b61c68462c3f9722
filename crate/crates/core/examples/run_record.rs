// The command layer behind the `mexed` binary, called directly.

use mexed::io::commands::{run_eval, run_fit, EvalArgs, EvalFunction, FitArgs};
use mexed::{MomentSpec, Params};

pub fn run_example() -> mexed::Result<()> {
    let rec = run_fit(&FitArgs {
        at: Some(25.0),
        ..FitArgs::new("builtin:aircond")
    })?;
    print!("{}", rec.to_json()?);

    let rec = run_eval(&EvalArgs {
        params: Params::new(0.5, 1.0, 0.5)?,
        function: EvalFunction::Quantile,
        at: vec![0.1, 0.5, 0.9],
        moment: MomentSpec::quadrature(1),
    })?;
    println!("{}", rec.results);
    Ok(())
}

#[allow(dead_code)]
fn main() -> mexed::Result<()> {
    run_example()
}
