use std::fs;

/// Refuses to build when the bundled air-conditioning data no longer
/// reproduces the exponential-fit anchor `-log L = 152.629`.
fn main() {
    let path = "data/aircond.csv";
    println!("cargo:rerun-if-changed={path}");
    let text = fs::read_to_string(path).expect("bundled dataset is readable");
    let values: Vec<f64> = text
        .lines()
        .filter_map(|l| l.trim().parse::<f64>().ok())
        .collect();
    assert_eq!(values.len(), 30, "bundled dataset must hold 30 failure times");
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let neg_loglik = n * (mean.ln() + 1.0);
    assert!(
        (neg_loglik - 152.629).abs() < 1e-3,
        "bundled dataset fails its anchor check: -log L = {neg_loglik}"
    );
}
