//! Lindley's approximation to posterior means under squared-error loss.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::prior::{prior_log_density_grad, PriorHyper};
use crate::dist::{Dataset, Params};
use crate::error::{Error, Result};
use crate::mle::{hessian_raw, FitResult, Mat3, ObsTerms, Vec3};

/// Full symmetric tensor of third log-likelihood derivatives `L_ijk`.
pub type Tensor3 = [[[f64; 3]; 3]; 3];

/// `L_ijk = ∂³ ln L / ∂θ_i ∂θ_j ∂θ_k` in `(α, λ, β)` order.
pub fn third_derivatives(p: &Params, d: &Dataset) -> Tensor3 {
    third_derivatives_raw(&p.as_array(), d.values())
}

pub(crate) fn third_derivatives_raw(theta: &Vec3, xs: &[f64]) -> Tensor3 {
    let alpha = theta[0];
    let am1 = alpha - 1.0;
    // distinct entries, indexed as in `entry_index`
    let mut e = [0.0; 10];
    e[0] = 2.0 * xs.len() as f64 / alpha.powi(3);
    for &x in xs {
        let t = ObsTerms::new(theta, x);
        let g = [x, t.x * t.x]; // dw/dλ, dw/dβ
        let sd = [1.0, 2.0 * x]; // ds/dλ, ds/dβ
        let inv_w = 1.0 / t.w;
        let w_am1 = t.wa * inv_w;
        let w_am2 = w_am1 * inv_w;
        let w_am3 = w_am2 * inv_w;
        let inv_s3 = 1.0 / (t.slope * t.slope * t.slope);
        let lw = t.lw;

        e[0] -= t.wa * lw * lw * lw;
        for j in 0..2 {
            // L_ααj
            e[1 + j] -= g[j] * w_am1 * lw * (2.0 + alpha * lw);
        }
        for (k, (j, l)) in [(0, 0), (0, 1), (1, 1)].into_iter().enumerate() {
            let gg = g[j] * g[l];
            // L_αjl
            e[3 + k] += -gg * inv_w * inv_w - gg * w_am2 * ((2.0 * alpha - 1.0) + alpha * am1 * lw);
        }
        for (k, (i, j, l)) in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)].into_iter().enumerate() {
            let ggg = g[i] * g[j] * g[l];
            e[6 + k] += 2.0 * sd[i] * sd[j] * sd[l] * inv_s3
                + 2.0 * am1 * ggg * inv_w * inv_w * inv_w
                - alpha * am1 * (alpha - 2.0) * ggg * w_am3;
        }
    }
    let mut out = [[[0.0; 3]; 3]; 3];
    for (i, plane) in out.iter_mut().enumerate() {
        for (j, row) in plane.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = e[entry_index(i, j, k)];
            }
        }
    }
    out
}

/// Position of `(i, j, k)` among the ten distinct entries, ordered
/// ααα, ααλ, ααβ, αλλ, αλβ, αββ, λλλ, λλβ, λββ, βββ.
fn entry_index(i: usize, j: usize, k: usize) -> usize {
    let mut idx = [i, j, k];
    idx.sort_unstable();
    match idx {
        [0, 0, 0] => 0,
        [0, 0, 1] => 1,
        [0, 0, 2] => 2,
        [0, 1, 1] => 3,
        [0, 1, 2] => 4,
        [0, 2, 2] => 5,
        [1, 1, 1] => 6,
        [1, 1, 2] => 7,
        [1, 2, 2] => 8,
        _ => 9,
    }
}

/// How the mixed second-derivative term enters the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossTerm {
    /// `u₁₂σ₁₂ + u₁₃σ₁₃ + u₂₃σ₂₃`, which together with `½Σ u_ii σ_ii` equals
    /// `½ Σ_ij u_ij σ_ij`.
    #[default]
    Printed,
    /// Twice the printed off-diagonal sum.
    Doubled,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LindleyOptions {
    pub cross_term: CrossTerm,
    /// Test hook: drop every `L_ijk`, leaving only the prior and curvature
    /// corrections.
    pub zero_third_derivatives: bool,
}

/// Value, gradient and Hessian of a function `u(α, λ, β)` at the MLE.
#[derive(Debug, Clone, Copy)]
pub struct UDerivatives {
    pub value: f64,
    pub grad: Vec3,
    pub hess: Mat3,
}

/// Pieces of the expansion that do not depend on `u`.
#[derive(Debug, Clone)]
pub struct LindleyBasis {
    pub theta: Vec3,
    /// `σ = {-L_ij}^{-1}`.
    pub sigma: Mat3,
    pub rho: Vec3,
    /// `(A, B, C) = Σ_ij σ_ij L_ijk` for `k = 1, 2, 3`.
    pub abc: Vec3,
    pub options: LindleyOptions,
}

impl LindleyBasis {
    pub fn new(d: &Dataset, h: &PriorHyper, fit: &FitResult, options: LindleyOptions) -> Result<Self> {
        if fit.estimated != [true; 3] {
            return Err(Error::ApproximationUnavailable(
                "the expansion needs a fit of all three parameters".into(),
            ));
        }
        if !fit.cov_reliable {
            return Err(Error::ApproximationUnavailable(
                "observed information at the MLE is not positive definite".into(),
            ));
        }
        let theta = fit.params_hat.as_array();
        let hess = hessian_raw(&theta, d.values());
        let neg = Matrix3::from_fn(|i, j| -hess[i][j]);
        let chol = neg.cholesky().ok_or_else(|| {
            Error::ApproximationUnavailable("observed information is singular".into())
        })?;
        let mut sigma = [[0.0; 3]; 3];
        for j in 0..3 {
            let col = chol.solve(&Vector3::from_fn(|i, _| if i == j { 1.0 } else { 0.0 }));
            for i in 0..3 {
                sigma[i][j] = col[i];
            }
        }
        for i in 0..3 {
            for j in 0..i {
                let m = 0.5 * (sigma[i][j] + sigma[j][i]);
                sigma[i][j] = m;
                sigma[j][i] = m;
            }
        }
        let rho = prior_log_density_grad(h, &fit.params_hat)?;
        let mut abc = [0.0; 3];
        if !options.zero_third_derivatives {
            let l3 = third_derivatives_raw(&theta, d.values());
            for (k, out) in abc.iter_mut().enumerate() {
                for i in 0..3 {
                    for j in 0..3 {
                        *out += sigma[i][j] * l3[i][j][k];
                    }
                }
            }
        }
        Ok(LindleyBasis {
            theta,
            sigma,
            rho,
            abc,
            options,
        })
    }

    /// Approximate posterior mean of `u`.
    pub fn expectation(&self, u: &UDerivatives) -> f64 {
        let s = &self.sigma;
        let a: Vec3 = [0, 1, 2].map(|i| (0..3).map(|j| self.rho[j] * s[i][j]).sum());
        let cross = u.hess[0][1] * s[0][1] + u.hess[0][2] * s[0][2] + u.hess[1][2] * s[1][2];
        let a4 = match self.options.cross_term {
            CrossTerm::Printed => cross,
            CrossTerm::Doubled => 2.0 * cross,
        };
        let a5 = 0.5 * (0..3).map(|i| u.hess[i][i] * s[i][i]).sum::<f64>();
        let third: f64 = (0..3)
            .map(|k| self.abc[k] * (0..3).map(|l| u.grad[l] * s[k][l]).sum::<f64>())
            .sum();
        u.value + (0..3).map(|i| u.grad[i] * a[i]).sum::<f64>() + a4 + a5 + 0.5 * third
    }
}

/// `u = θ_i`.
pub fn coordinate_u(theta: &Vec3, i: usize) -> UDerivatives {
    let mut grad = [0.0; 3];
    grad[i] = 1.0;
    UDerivatives {
        value: theta[i],
        grad,
        hess: [[0.0; 3]; 3],
    }
}

/// `u = R(t) = exp(1 - w(t)^α)` and its derivatives.
pub fn reliability_u(theta: &Vec3, t: f64) -> UDerivatives {
    let e = power_derivatives(theta, t);
    let r = (-(e.value - 1.0)).exp();
    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    for i in 0..3 {
        grad[i] = -r * e.grad[i];
        for j in 0..3 {
            hess[i][j] = r * (e.grad[i] * e.grad[j] - e.hess[i][j]);
        }
    }
    UDerivatives {
        value: r,
        grad,
        hess,
    }
}

/// `u = h(t) = α(λ + 2βt) w(t)^{α-1}` and its derivatives.
pub fn hazard_u(theta: &Vec3, t: f64) -> UDerivatives {
    let [alpha, lambda, beta] = *theta;
    let lw = (t * (lambda + beta * t)).ln_1p();
    let w = 1.0 + t * (lambda + beta * t);
    let s = lambda + 2.0 * beta * t;
    let g = [t, t * t];
    let sd = [1.0, 2.0 * t];
    let p = ((alpha - 1.0) * lw).exp(); // w^{α-1}
    let p2 = p / w; // w^{α-2}
    let p3 = p2 / w; // w^{α-3}
    // derivatives of P = w^{α-1}
    let p_a = p * lw;
    let p_aa = p * lw * lw;
    let p_j = g.map(|gj| (alpha - 1.0) * gj * p2);
    let p_aj = g.map(|gj| gj * p2 * (1.0 + (alpha - 1.0) * lw));

    let mut grad = [0.0; 3];
    let mut hess = [[0.0; 3]; 3];
    grad[0] = s * p + alpha * s * p_a;
    hess[0][0] = 2.0 * s * p_a + alpha * s * p_aa;
    for j in 0..2 {
        grad[1 + j] = alpha * (sd[j] * p + s * p_j[j]);
        hess[0][1 + j] = sd[j] * p + s * p_j[j] + alpha * (sd[j] * p_a + s * p_aj[j]);
        hess[1 + j][0] = hess[0][1 + j];
        for k in 0..2 {
            let p_jk = (alpha - 1.0) * (alpha - 2.0) * g[j] * g[k] * p3;
            hess[1 + j][1 + k] = alpha * (sd[j] * p_j[k] + sd[k] * p_j[j] + s * p_jk);
        }
    }
    UDerivatives {
        value: alpha * s * p,
        grad,
        hess,
    }
}

/// Derivatives of `w(t)^α`.
fn power_derivatives(theta: &Vec3, t: f64) -> UDerivatives {
    let [alpha, lambda, beta] = *theta;
    let lw = (t * (lambda + beta * t)).ln_1p();
    let w = 1.0 + t * (lambda + beta * t);
    let e = (alpha * lw).exp();
    let e1 = e / w;
    let e2 = e1 / w;
    let g = [t, t * t];
    let mut grad = [e * lw, 0.0, 0.0];
    let mut hess = [[0.0; 3]; 3];
    hess[0][0] = e * lw * lw;
    for j in 0..2 {
        grad[1 + j] = alpha * g[j] * e1;
        hess[0][1 + j] = g[j] * e1 * (1.0 + alpha * lw);
        hess[1 + j][0] = hess[0][1 + j];
        for k in 0..2 {
            hess[1 + j][1 + k] = alpha * (alpha - 1.0) * g[j] * g[k] * e2;
        }
    }
    UDerivatives {
        value: e,
        grad,
        hess,
    }
}

/// Lindley estimates of the parameters and, when `t` is given, of `R(t)` and
/// `h(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LindleyResult {
    pub alpha_bs: f64,
    pub lambda_bs: f64,
    pub beta_bs: f64,
    pub t: Option<f64>,
    pub reliability_bs: Option<f64>,
    pub hazard_bs: Option<f64>,
    /// Set when the raw reliability expansion left `[0, 1]`.
    pub reliability_clamped: bool,
    /// Set when the raw hazard expansion was negative.
    pub hazard_clamped: bool,
    pub mle_anchor: FitResult,
}

impl LindleyResult {
    pub fn params_array(&self) -> Vec3 {
        [self.alpha_bs, self.lambda_bs, self.beta_bs]
    }
}

/// Parameter estimates only.
pub fn lindley_params(
    d: &Dataset,
    h: &PriorHyper,
    fit: &FitResult,
    options: LindleyOptions,
) -> Result<Vec3> {
    let basis = LindleyBasis::new(d, h, fit, options)?;
    Ok([0, 1, 2].map(|i| basis.expectation(&coordinate_u(&basis.theta, i))))
}

/// Reliability estimate at `t`, clamped to `[0, 1]`; the flag reports clamping.
pub fn lindley_reliability(
    d: &Dataset,
    h: &PriorHyper,
    fit: &FitResult,
    t: f64,
    options: LindleyOptions,
) -> Result<(f64, bool)> {
    check_time(t)?;
    let basis = LindleyBasis::new(d, h, fit, options)?;
    let raw = basis.expectation(&reliability_u(&basis.theta, t));
    let v = raw.clamp(0.0, 1.0);
    Ok((v, v != raw))
}

/// Hazard estimate at `t`, clamped below at zero; the flag reports clamping.
pub fn lindley_hazard(
    d: &Dataset,
    h: &PriorHyper,
    fit: &FitResult,
    t: f64,
    options: LindleyOptions,
) -> Result<(f64, bool)> {
    check_time(t)?;
    let basis = LindleyBasis::new(d, h, fit, options)?;
    let raw = basis.expectation(&hazard_u(&basis.theta, t));
    let v = raw.max(0.0);
    Ok((v, v != raw))
}

/// Everything in one pass.
pub fn lindley_estimate(
    d: &Dataset,
    h: &PriorHyper,
    fit: &FitResult,
    t: Option<f64>,
    options: LindleyOptions,
) -> Result<LindleyResult> {
    let basis = LindleyBasis::new(d, h, fit, options)?;
    let [alpha_bs, lambda_bs, beta_bs] =
        [0, 1, 2].map(|i| basis.expectation(&coordinate_u(&basis.theta, i)));
    let mut out = LindleyResult {
        alpha_bs,
        lambda_bs,
        beta_bs,
        t,
        reliability_bs: None,
        hazard_bs: None,
        reliability_clamped: false,
        hazard_clamped: false,
        mle_anchor: fit.clone(),
    };
    if let Some(t) = t {
        check_time(t)?;
        let r = basis.expectation(&reliability_u(&basis.theta, t));
        let hz = basis.expectation(&hazard_u(&basis.theta, t));
        out.reliability_bs = Some(r.clamp(0.0, 1.0));
        out.reliability_clamped = !(0.0..=1.0).contains(&r);
        out.hazard_bs = Some(hz.max(0.0));
        out.hazard_clamped = hz < 0.0;
    }
    if ![alpha_bs, lambda_bs, beta_bs].iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("non-finite Lindley estimate".into()));
    }
    Ok(out)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive and finite, got {t}")))
    }
}
