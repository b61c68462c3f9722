//! Shared test oracles.
#![allow(dead_code)]

use mexed::bayes::{PosteriorChain, PosteriorTarget};
use mexed::Params;

/// Posterior expectations on a tensor grid with trapezoid weights.
pub struct GridOracle {
    pub alpha: f64,
    pub lambda: f64,
    pub beta: f64,
    pub reliability: f64,
    pub hazard: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

/// Box `[q_0.001, q_0.999]` of each marginal of a pilot chain, `points` nodes
/// per axis.
pub fn grid_oracle(target: &PosteriorTarget<'_>, pilot: &PosteriorChain, points: usize, t: f64) -> GridOracle {
    let axes: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let mut v: Vec<f64> = pilot.draws.iter().map(|d| d[i]).collect();
            v.sort_by(f64::total_cmp);
            let (lo, hi) = (quantile(&v, 0.001), quantile(&v, 0.999));
            (0..points)
                .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
                .collect()
        })
        .collect();
    let weight = |k: usize| -> f64 { if k == 0 || k == points - 1 { 0.5 } else { 1.0 } };
    let mut logs = Vec::with_capacity(points.pow(3));
    for (i, &a) in axes[0].iter().enumerate() {
        for (j, &l) in axes[1].iter().enumerate() {
            for (k, &b) in axes[2].iter().enumerate() {
                let lp = target.log_posterior(&[a, l, b]);
                logs.push((lp + (weight(i) * weight(j) * weight(k)).ln(), [a, l, b]));
            }
        }
    }
    let max = logs.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let (mut z, mut acc) = (0.0, [0.0; 5]);
    for (lv, th) in &logs {
        let w = (lv - max).exp();
        let p = Params::from_array(*th).unwrap();
        z += w;
        acc[0] += w * th[0];
        acc[1] += w * th[1];
        acc[2] += w * th[2];
        acc[3] += w * p.survival(t);
        acc[4] += w * p.hazard(t);
    }
    GridOracle {
        alpha: acc[0] / z,
        lambda: acc[1] / z,
        beta: acc[2] / z,
        reliability: acc[3] / z,
        hazard: acc[4] / z,
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
