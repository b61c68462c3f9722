//! Two-parameter and one-parameter competitors, information criteria and
//! ECDF overlays.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{digamma, gamma_lr, ln_gamma};

use crate::dist::{Dataset, Params};
use crate::error::{Error, Result};
use crate::mle::{fit_mle, FitOptions};
use crate::optim::golden_section;
use crate::special::trigamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Exponential,
    GenExponential,
    Gamma,
    Weibull,
    ExtExponential,
    Mexed,
}

impl ModelId {
    pub const ALL: [ModelId; 6] = [
        ModelId::Exponential,
        ModelId::GenExponential,
        ModelId::Gamma,
        ModelId::Weibull,
        ModelId::ExtExponential,
        ModelId::Mexed,
    ];

    /// Number of free parameters.
    pub fn k(self) -> usize {
        match self {
            ModelId::Exponential => 1,
            ModelId::Mexed => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelId::Exponential => "exponential",
            ModelId::GenExponential => "gen_exponential",
            ModelId::Gamma => "gamma",
            ModelId::Weibull => "weibull",
            ModelId::ExtExponential => "ext_exponential",
            ModelId::Mexed => "mexed",
        }
    }

    /// Names of the entries of [`ModelFit::params`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelId::Exponential => &["rate"],
            ModelId::GenExponential => &["rate", "shape"],
            ModelId::Gamma => &["shape", "rate"],
            ModelId::Weibull => &["shape", "scale"],
            ModelId::ExtExponential => &["rate", "shape"],
            ModelId::Mexed => &["alpha", "lambda", "beta"],
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelId::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown model `{s}`; expected one of {}",
                    ModelId::ALL.map(|m| m.name()).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub model_id: ModelId,
    pub k: usize,
    pub params: Vec<f64>,
    pub neg_loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub n: usize,
    pub converged: bool,
    /// False when the fit should not be trusted: non-convergence, fewer
    /// observations than parameters, or a singular information matrix.
    pub reliable: bool,
}

impl ModelFit {
    fn new(model_id: ModelId, params: Vec<f64>, neg_loglik: f64, n: usize, converged: bool) -> Self {
        let k = model_id.k();
        let (aic, bic) = information_criteria(neg_loglik, k, n);
        ModelFit {
            model_id,
            k,
            params,
            neg_loglik,
            aic,
            bic,
            n,
            converged,
            reliable: converged && n > k && neg_loglik.is_finite(),
        }
    }

    /// Fitted distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let p = &self.params;
        match self.model_id {
            ModelId::Exponential => -(-p[0] * x).exp_m1(),
            ModelId::GenExponential => (-(-p[0] * x).exp_m1()).powf(p[1]),
            ModelId::Gamma => gamma_lr(p[0], p[1] * x),
            ModelId::Weibull => -(-(x / p[1]).powf(p[0])).exp_m1(),
            ModelId::ExtExponential => -(-((p[1] * (p[0] * x).ln_1p()).exp_m1())).exp_m1(),
            ModelId::Mexed => Params::new(p[0], p[1], p[2]).map(|q| q.cdf(x)).unwrap_or(f64::NAN),
        }
    }
}

/// `(AIC, BIC) = (2·nll + 2k, 2·nll + k·ln n)`.
pub fn information_criteria(neg_loglik: f64, k: usize, n: usize) -> (f64, f64) {
    let k = k as f64;
    (
        2.0 * neg_loglik + 2.0 * k,
        2.0 * neg_loglik + k * (n as f64).ln(),
    )
}

/// Maximum-likelihood fit of one model.
pub fn fit_model(model: ModelId, d: &Dataset) -> Result<ModelFit> {
    let xs = d.values();
    let n = xs.len();
    let nf = n as f64;
    let mean = d.mean();
    let mean_ln = xs.iter().map(|x| x.ln()).sum::<f64>() / nf;
    match model {
        ModelId::Exponential => {
            let rate = 1.0 / mean;
            Ok(ModelFit::new(model, vec![rate], nf * (mean.ln() + 1.0), n, true))
        }
        ModelId::GenExponential => {
            let nll = |rate: f64| ge_neg_loglik(xs, rate, ge_profile_shape(xs, rate));
            // search ln(rate) over a wide bracket around 1/x̄
            let c = golden_section(|z| nll(z.exp() / mean), -12.0, 8.0, 1e-12);
            let rate = c.exp() / mean;
            let shape = ge_profile_shape(xs, rate);
            let v = ge_neg_loglik(xs, rate, shape);
            Ok(ModelFit::new(model, vec![rate, shape], v, n, v.is_finite()))
        }
        ModelId::Gamma => {
            let s = mean.ln() - mean_ln;
            if !(s > 0.0) {
                return Err(Error::Numeric(
                    "gamma MLE undefined for a constant sample".into(),
                ));
            }
            let mut k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
            let mut converged = false;
            for _ in 0..100 {
                let g = k.ln() - digamma(k) - s;
                let dg = 1.0 / k - trigamma(k);
                let step = g / dg;
                let next = if k - step > 0.0 { k - step } else { 0.5 * k };
                if (next - k).abs() <= 1e-14 * k {
                    k = next;
                    converged = true;
                    break;
                }
                k = next;
            }
            let rate = k / mean;
            let ll = nf * (k * rate.ln() - ln_gamma(k)) + (k - 1.0) * nf * mean_ln - rate * nf * mean;
            Ok(ModelFit::new(model, vec![k, rate], -ll, n, converged))
        }
        ModelId::Weibull => {
            // score equation in the shape after profiling out the scale; the
            // left side increases in k
            let g = |k: f64| {
                let (mut a, mut b) = (0.0, 0.0);
                for &x in xs {
                    let xk = (k * (x / mean).ln()).exp();
                    a += xk * x.ln();
                    b += xk;
                }
                a / b - 1.0 / k - mean_ln
            };
            let (mut lo, mut hi) = (1e-3, 1.0);
            while g(hi) < 0.0 && hi < 1e4 {
                lo = hi;
                hi *= 2.0;
            }
            while g(lo) > 0.0 && lo > 1e-12 {
                hi = lo;
                lo *= 0.5;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi {
                    break;
                }
            }
            let k = 0.5 * (lo + hi);
            let converged = g(lo) <= 0.0 && g(hi) >= 0.0;
            let mk = xs.iter().map(|x| (x / mean).powf(k)).sum::<f64>() / nf;
            let scale = mean * mk.powf(1.0 / k);
            let ll = nf * k.ln() - nf * k * scale.ln() + (k - 1.0) * nf * mean_ln - nf;
            Ok(ModelFit::new(model, vec![k, scale], -ll, n, converged))
        }
        ModelId::ExtExponential => {
            let fit = fit_mle(d, &FitOptions::without_quadratic_term())?;
            let p = fit.params_hat;
            let mut out = ModelFit::new(model, vec![p.lambda(), p.alpha()], -fit.loglik, n, fit.converged);
            out.reliable &= fit.cov_reliable;
            Ok(out)
        }
        ModelId::Mexed => {
            let fit = fit_mle(d, &FitOptions::default())?;
            let mut out = ModelFit::new(
                model,
                fit.params_hat.as_array().to_vec(),
                -fit.loglik,
                n,
                fit.converged,
            );
            out.reliable &= fit.cov_reliable;
            Ok(out)
        }
    }
}

/// Shape maximizing the generalized-exponential likelihood at a given rate.
fn ge_profile_shape(xs: &[f64], rate: f64) -> f64 {
    let s: f64 = xs.iter().map(|&x| (-(-rate * x).exp()).ln_1p()).sum();
    -(xs.len() as f64) / s
}

fn ge_neg_loglik(xs: &[f64], rate: f64, shape: f64) -> f64 {
    if !(rate > 0.0 && shape > 0.0 && shape.is_finite()) {
        return f64::INFINITY;
    }
    let n = xs.len() as f64;
    let mut ll = n * (rate.ln() + shape.ln());
    for &x in xs {
        ll += -rate * x + (shape - 1.0) * (-(-rate * x).exp()).ln_1p();
    }
    if ll.is_nan() {
        f64::INFINITY
    } else {
        -ll
    }
}

/// Log-likelihood of the generalized exponential at `(rate, shape)`.
pub fn gen_exponential_loglik(d: &Dataset, rate: f64, shape: f64) -> f64 {
    -ge_neg_loglik(d.values(), rate, shape)
}

/// Log-likelihood of the (linear-argument) extended exponential at `(rate, shape)`.
pub fn ext_exponential_loglik(d: &Dataset, rate: f64, shape: f64) -> f64 {
    Params::new(shape, rate, 0.0)
        .map(|p| crate::mle::log_likelihood(&p, d))
        .unwrap_or(f64::NEG_INFINITY)
}

/// One row of the comparison table; failed fits keep their error message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model_id: ModelId,
    pub fit: Option<ModelFit>,
    pub error: Option<String>,
}

/// Fits `models` and sorts the rows by AIC, failures last.
pub fn comparison_table(d: &Dataset, models: &[ModelId]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = models
        .iter()
        .map(|&m| match fit_model(m, d) {
            Ok(fit) => ComparisonRow {
                model_id: m,
                fit: Some(fit),
                error: None,
            },
            Err(e) => ComparisonRow {
                model_id: m,
                fit: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    rows.sort_by(|a, b| {
        let key = |r: &ComparisonRow| r.fit.as_ref().map_or(f64::INFINITY, |f| f.aic);
        key(a).total_cmp(&key(b))
    });
    rows
}

/// CSV rendering: `model,k,params,neg_loglik,aic,bic,reliable,error`.
pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("model,k,params,neg_loglik,aic,bic,reliable,error\n");
    for r in rows {
        match &r.fit {
            Some(f) => {
                let params: Vec<String> = f.params.iter().map(|v| format!("{v:?}")).collect();
                out.push_str(&format!(
                    "{},{},{},{:?},{:?},{:?},{},\n",
                    r.model_id,
                    f.k,
                    params.join(";"),
                    f.neg_loglik,
                    f.aic,
                    f.bic,
                    f.reliable
                ));
            }
            None => out.push_str(&format!(
                "{},{},,,,,false,\"{}\"\n",
                r.model_id,
                r.model_id.k(),
                r.error.as_deref().unwrap_or("").replace('"', "'")
            )),
        }
    }
    out
}

/// Empirical and fitted CDFs evaluated at the sorted observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfOverlay {
    /// `x`, `ecdf`, then one column per fitted model.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl EcdfOverlay {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Right-continuous empirical CDF `#{x_i ≤ x} / n`.
pub fn ecdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|v| *v <= x) as f64 / sorted.len() as f64
}

pub fn ecdf_overlay(d: &Dataset, fits: &[ModelFit]) -> EcdfOverlay {
    let sorted = d.sorted();
    let mut columns = vec!["x".to_string(), "ecdf".to_string()];
    columns.extend(fits.iter().map(|f| f.model_id.name().to_string()));
    let rows = sorted
        .iter()
        .map(|&x| {
            let mut row = vec![x, ecdf(&sorted, x)];
            row.extend(fits.iter().map(|f| f.cdf(x)));
            row
        })
        .collect();
    EcdfOverlay { columns, rows }
}

/// `sup_x |F_n(x) - F(x)|` for a continuous `F`, checking both one-sided
/// limits of the step function at every observation.
pub fn kolmogorov_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max((j as f64 / n - f).abs()).max((f - i as f64 / n).abs());
        i = j;
    }
    d
}

/// Asymptotic p-value of the one-sample Kolmogorov–Smirnov statistic,
/// with the Stephens small-sample correction.
pub fn kolmogorov_pvalue(distance: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let t = (sn + 0.12 + 0.11 / sn) * distance;
    if t < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * t * t).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
