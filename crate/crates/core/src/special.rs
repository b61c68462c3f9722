//! Special functions not covered by `statrs`.

use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-12;
const MAX_ITER: usize = 100_000;
const TINY: f64 = 1e-300;

/// Unnormalized upper incomplete gamma function `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt`.
///
/// Lentz continued fraction when `x >= s + 1`, otherwise `Γ(s) - γ(s, x)` with
/// the lower function summed as a power series.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0 && x > 0.0) {
        return Err(Error::Domain(format!(
            "upper incomplete gamma needs s > 0 and x > 0, got s={s}, x={x}"
        )));
    }
    if x >= s + 1.0 {
        continued_fraction(s, x)
    } else {
        Ok(gamma(s) - lower_series(s, x)?)
    }
}

fn continued_fraction(s: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = if b.abs() < TINY { 1.0 / TINY } else { 1.0 / b };
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < REL_TOL {
            return Ok((s * x.ln() - x).exp() * h);
        }
    }
    Err(Error::Numeric(format!(
        "incomplete gamma continued fraction did not converge for s={s}, x={x}"
    )))
}

fn lower_series(s: f64, x: f64) -> Result<f64> {
    let mut ap = s;
    let mut term = 1.0 / s;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * REL_TOL {
            return Ok(sum * (s * x.ln() - x).exp());
        }
    }
    Err(Error::Numeric(format!(
        "incomplete gamma series did not converge for s={s}, x={x}"
    )))
}

/// Second derivative of `ln Γ(x)` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + inv2 / 2.0
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))
}

/// Generalized binomial coefficient `C(a, m)` for real `a` and integer `m >= 0`.
pub fn binomial_real(a: f64, m: u32) -> f64 {
    (0..m).fold(1.0, |acc, j| acc * (a - j as f64) / (j as f64 + 1.0))
}

/// `ln C(n, k)` for integers.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::{digamma, gamma_ur};

    #[test]
    fn upper_gamma_matches_regularized_reference() {
        for &s in &[0.3, 0.9, 1.0, 1.5, 2.0, 5.5, 17.0, 41.0] {
            let reference = gamma_ur(s, 1.0) * gamma(s);
            let got = upper_incomplete_gamma(s, 1.0).unwrap();
            assert!(
                ((got - reference) / reference).abs() < 1e-11,
                "s={s}: {got} vs {reference}"
            );
        }
    }

    #[test]
    fn upper_gamma_integer_closed_form() {
        // Γ(k, 1) = (k-1)! e^{-1} Σ_{j<k} 1/j!
        let e_inv = (-1.0f64).exp();
        assert!((upper_incomplete_gamma(1.0, 1.0).unwrap() - e_inv).abs() < 1e-12);
        assert!((upper_incomplete_gamma(2.0, 1.0).unwrap() - 2.0 * e_inv).abs() < 1e-12);
        assert!((upper_incomplete_gamma(3.0, 1.0).unwrap() - 5.0 * e_inv).abs() < 1e-12);
    }

    #[test]
    fn trigamma_matches_digamma_differences() {
        for &x in &[0.2f64, 0.8, 1.0, 3.3, 12.0, 150.0] {
            let h = 1e-5 * x.max(1.0);
            let fd = (digamma(x + h) - digamma(x - h)) / (2.0 * h);
            assert!(((trigamma(x) - fd) / fd).abs() < 1e-6, "x={x}");
        }
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((trigamma(1.0) - pi2_6).abs() < 1e-12);
    }

    #[test]
    fn real_binomial() {
        assert_eq!(binomial_real(5.0, 2), 10.0);
        assert!((binomial_real(0.5, 2) + 0.125).abs() < 1e-15);
        assert_eq!(binomial_real(1.0, 3), 0.0);
    }
}
