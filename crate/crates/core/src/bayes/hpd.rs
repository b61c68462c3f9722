use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpdInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub length: f64,
}

fn window(draws: &[f64], level: f64) -> Result<usize> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("level must lie in (0, 1), got {level}")));
    }
    let needed = (1.0 / (1.0 - level)).ceil() as usize;
    if draws.len() < needed {
        return Err(Error::InsufficientSample {
            needed,
            got: draws.len(),
        });
    }
    Ok(((level * draws.len() as f64).ceil() as usize).clamp(1, draws.len()))
}

/// Shortest interval spanning `⌈level·N⌉` consecutive order statistics of
/// `sorted_draws` (ascending). Ties go to the smallest lower endpoint.
pub fn hpd_interval(sorted_draws: &[f64], level: f64) -> Result<HpdInterval> {
    let k = window(sorted_draws, level)?;
    let (mut best, mut best_len) = (0, f64::INFINITY);
    for i in 0..=sorted_draws.len() - k {
        let len = sorted_draws[i + k - 1] - sorted_draws[i];
        if len < best_len {
            best = i;
            best_len = len;
        }
    }
    Ok(HpdInterval {
        lower: sorted_draws[best],
        upper: sorted_draws[best + k - 1],
        level,
        length: best_len,
    })
}

/// Interval cutting equal numbers of draws from both tails, same window size
/// as [`hpd_interval`].
pub fn equal_tailed_interval(sorted_draws: &[f64], level: f64) -> Result<HpdInterval> {
    let k = window(sorted_draws, level)?;
    let lo = (sorted_draws.len() - k) / 2;
    let (lower, upper) = (sorted_draws[lo], sorted_draws[lo + k - 1]);
    Ok(HpdInterval {
        lower,
        upper,
        level,
        length: upper - lower,
    })
}
