//! Log-likelihood of a complete sample and its first two derivatives.
//!
//! Coordinates are ordered `(alpha, lambda, beta)` throughout.

use crate::dist::{Dataset, Params};

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Per-observation quantities shared by all derivative formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ObsTerms {
    pub x: f64,
    /// `λ + 2βx`
    pub slope: f64,
    /// `w = 1 + λx + βx²`
    pub w: f64,
    /// `ln w`
    pub lw: f64,
    /// `w^α`
    pub wa: f64,
}

impl ObsTerms {
    #[inline]
    pub fn new(theta: &Vec3, x: f64) -> Self {
        let [alpha, lambda, beta] = *theta;
        let z = x * (lambda + beta * x);
        let lw = z.ln_1p();
        ObsTerms {
            x,
            slope: lambda + 2.0 * beta * x,
            w: 1.0 + z,
            lw,
            wa: (alpha * lw).exp(),
        }
    }
}

/// `ln L` at an arbitrary coordinate triple; `-∞` outside the parameter space
/// (including `λ = β = 0`).
pub fn log_likelihood_raw(theta: &Vec3, xs: &[f64]) -> f64 {
    let [alpha, lambda, beta] = *theta;
    if !(alpha > 0.0 && lambda >= 0.0 && beta >= 0.0) || !theta.iter().all(|v| v.is_finite()) {
        return f64::NEG_INFINITY;
    }
    let mut acc = xs.len() as f64 * alpha.ln();
    for &x in xs {
        let slope = lambda + 2.0 * beta * x;
        if slope <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let lw = (x * (lambda + beta * x)).ln_1p();
        acc += slope.ln() + (alpha - 1.0) * lw - (alpha * lw).exp_m1();
    }
    if acc.is_nan() {
        f64::NEG_INFINITY
    } else {
        acc
    }
}

pub fn log_likelihood(p: &Params, d: &Dataset) -> f64 {
    log_likelihood_raw(&p.as_array(), d.values())
}

/// Gradient `(∂/∂α, ∂/∂λ, ∂/∂β) ln L`.
pub fn score_raw(theta: &Vec3, xs: &[f64]) -> Vec3 {
    let alpha = theta[0];
    let mut s = [xs.len() as f64 / alpha, 0.0, 0.0];
    for &x in xs {
        let t = ObsTerms::new(theta, x);
        let inv_w = 1.0 / t.w;
        let pow_term = alpha * t.wa * inv_w;
        s[0] += t.lw - t.wa * t.lw;
        s[1] += 1.0 / t.slope + (alpha - 1.0) * x * inv_w - pow_term * x;
        s[2] += 2.0 * x / t.slope + (alpha - 1.0) * x * x * inv_w - pow_term * x * x;
    }
    s
}

pub fn score(p: &Params, d: &Dataset) -> Vec3 {
    score_raw(&p.as_array(), d.values())
}

/// Second derivatives `L_ij = ∂² ln L / ∂θ_i ∂θ_j`.
pub fn hessian_raw(theta: &Vec3, xs: &[f64]) -> Mat3 {
    let alpha = theta[0];
    let am1 = alpha - 1.0;
    let aam1 = alpha * am1;
    let n = xs.len() as f64;
    let mut h = [[0.0; 3]; 3];
    h[0][0] = -n / (alpha * alpha);
    for &x in xs {
        let t = ObsTerms::new(theta, x);
        let inv_w = 1.0 / t.w;
        let inv_w2 = inv_w * inv_w;
        let inv_s2 = 1.0 / (t.slope * t.slope);
        let wa_w = t.wa * inv_w;
        let wa_w2 = t.wa * inv_w2;
        let mixed = 1.0 + alpha * t.lw;
        let (x2, x3) = (x * x, x * x * x);

        h[0][0] -= t.wa * t.lw * t.lw;
        h[0][1] += x * inv_w - x * wa_w * mixed;
        h[0][2] += x2 * inv_w - x2 * wa_w * mixed;
        h[1][1] += -inv_s2 - am1 * x2 * inv_w2 - aam1 * x2 * wa_w2;
        h[1][2] += -2.0 * x * inv_s2 - am1 * x3 * inv_w2 - aam1 * x3 * wa_w2;
        h[2][2] += -4.0 * x2 * inv_s2 - am1 * x2 * x2 * inv_w2 - aam1 * x2 * x2 * wa_w2;
    }
    h[1][0] = h[0][1];
    h[2][0] = h[0][2];
    h[2][1] = h[1][2];
    h
}

/// Observed Fisher information `-∇² ln L`.
pub fn observed_information(p: &Params, d: &Dataset) -> Mat3 {
    let h = hessian_raw(&p.as_array(), d.values());
    let mut info = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            info[i][j] = -h[i][j];
        }
    }
    info
}
