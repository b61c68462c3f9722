//! Bundled reference data.

use crate::dist::Dataset;
use crate::io::parse_dataset;

const AIRCOND_CSV: &str = include_str!("../data/aircond.csv");

/// Name accepted by `--data builtin:<name>`.
pub const AIRCOND: &str = "aircond";

/// The 30 air-conditioning failure times (hours) used in the reference
/// model-comparison table.
pub fn aircond() -> Dataset {
    parse_dataset(AIRCOND_CSV).expect("bundled dataset is valid")
}

pub fn builtin(name: &str) -> Option<Dataset> {
    match name {
        AIRCOND => Some(aircond()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aircond_exponential_anchor() {
        let d = aircond();
        assert_eq!(d.len(), 30);
        let n = d.len() as f64;
        let nll = n * (d.mean().ln() + 1.0);
        assert!((nll - 152.629).abs() < 1e-3);
    }
}
