use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::likelihood::{hessian_raw, log_likelihood_raw, score_raw, Mat3, Vec3};
use crate::dist::{Dataset, Params};
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, sym_inverse};
use crate::optim::{minimize_bfgs, BfgsOptions};

/// Lower bound for the rate parameters, relative to the data scale. A rate
/// that ends up on the floor is reported as exactly zero.
const RATE_FLOOR: f64 = 1e-12;
/// Starting value standing in for a zero quadratic rate, times `1 / x̄²`.
const NEAR_ZERO_BETA: f64 = 1e-3;
const MAX_POLISH: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Extra starting point tried alongside the built-in ones.
    pub init: Option<Params>,
    /// Components held fixed during the search, `(alpha, lambda, beta)`.
    pub fixed: [Option<f64>; 3],
    pub max_iter: usize,
    /// Confidence level of the asymptotic intervals, `1 - γ`.
    pub level: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            init: None,
            fixed: [None; 3],
            max_iter: 500,
            level: 0.95,
        }
    }
}

impl FitOptions {
    /// Nadarajah–Haghighi sub-model: `beta` pinned at zero.
    pub fn without_quadratic_term() -> Self {
        FitOptions {
            fixed: [None, None, Some(0.0)],
            ..FitOptions::default()
        }
    }
}

/// Maximum-likelihood fit with asymptotic (Wald) intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params_hat: Params,
    pub loglik: f64,
    /// Sup-norm of the score at `params_hat`, ignoring fixed components and
    /// rates pinned at zero whose score points out of the domain.
    pub gradient_norm: f64,
    pub info_matrix: Mat3,
    /// Inverse of the information over the free components; rows and columns
    /// of fixed components are zero.
    pub cov_matrix: Mat3,
    /// False when the information matrix is not comfortably positive definite;
    /// `cov_matrix` then holds a pseudo-inverse.
    pub cov_reliable: bool,
    pub ci: [Interval; 3],
    pub level: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
    /// Which components were estimated rather than held fixed.
    pub estimated: [bool; 3],
}

impl FitResult {
    pub fn std_errors(&self) -> Vec3 {
        [0, 1, 2].map(|i| self.cov_matrix[i][i].max(0.0).sqrt())
    }

    /// Number of estimated (non-fixed) components.
    pub fn free_parameters(&self) -> usize {
        self.estimated.iter().filter(|&&e| e).count()
    }
}

/// Deterministic starting points for the multi-start search, plus `user`.
pub fn initial_points(d: &Dataset, user: Option<Params>) -> Vec<Vec3> {
    let m = d.mean();
    let mut pts = vec![
        [1.0, 1.0 / m, NEAR_ZERO_BETA / (m * m)],
        [0.5, 0.5 / m, NEAR_ZERO_BETA / (m * m)],
        [2.0, 1.0 / m, 1.0 / (m * m)],
        // the likelihood can have a second mode with a dominant quadratic term
        [0.5, 0.5 / m, 10.0 / (m * m)],
        [0.2, 0.1 / m, 1.0 / (m * m)],
    ];
    if let Some(p) = user {
        pts.push(p.as_array());
    }
    pts
}

/// Standard normal quantile `z_{(1-level)/2}` for a two-sided interval.
pub fn normal_critical_value(level: f64) -> f64 {
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + level / 2.0)
}

struct Problem<'a> {
    xs: &'a [f64],
    fixed: [Option<f64>; 3],
    free: Vec<usize>,
    floors: Vec3,
}

impl Problem<'_> {
    fn assemble(&self, free_vals: &[f64]) -> Vec3 {
        let mut theta = [0.0; 3];
        for i in 0..3 {
            if let Some(v) = self.fixed[i] {
                theta[i] = v;
            }
        }
        for (k, &i) in self.free.iter().enumerate() {
            theta[i] = free_vals[k];
        }
        theta
    }

    /// Sup-norm of the score over free components, skipping rates at zero
    /// whose score is non-positive.
    fn projected_score_norm(&self, theta: &Vec3) -> f64 {
        let s = score_raw(theta, self.xs);
        self.free
            .iter()
            .map(|&i| if i > 0 && theta[i] == 0.0 && s[i] <= 0.0 { 0.0 } else { s[i].abs() })
            .fold(0.0, f64::max)
    }
}

pub fn fit_mle(d: &Dataset, opts: &FitOptions) -> Result<FitResult> {
    let xs = d.values();
    if xs.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: xs.len(),
        });
    }
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(Error::Config(format!(
            "confidence level must lie in (0, 1), got {}",
            opts.level
        )));
    }
    for (i, f) in opts.fixed.iter().enumerate() {
        if let Some(v) = f {
            let ok = v.is_finite() && if i == 0 { *v > 0.0 } else { *v >= 0.0 };
            if !ok {
                return Err(Error::InvalidParams(format!(
                    "fixed value {v} for component {i} is outside the parameter space"
                )));
            }
        }
    }

    let mean = d.mean();
    let problem = Problem {
        xs,
        fixed: opts.fixed,
        free: (0..3).filter(|&i| opts.fixed[i].is_none()).collect(),
        floors: [0.0, RATE_FLOOR / mean, RATE_FLOOR / (mean * mean)],
    };

    let lower: Vec<f64> = problem
        .free
        .iter()
        .map(|&i| if i == 0 { f64::NEG_INFINITY } else { problem.floors[i].ln() })
        .collect();
    let bfgs_opts = BfgsOptions {
        max_iter: opts.max_iter,
        grad_tol: 1e-10,
        lower: Some(lower),
        max_step: 2.0,
        ..BfgsOptions::default()
    };
    // per-observation scale keeps the first steps sensible for any n
    let inv_n = 1.0 / xs.len() as f64;

    let mut best: Option<(Vec3, f64)> = None;
    let mut iterations = 0;
    for start in initial_points(d, opts.init) {
        let x0: Vec<f64> = problem
            .free
            .iter()
            .map(|&i| start[i].max(problem.floors[i]).ln())
            .collect();
        let objective = |z: &[f64]| {
            let nat: Vec<f64> = z.iter().map(|v| v.exp()).collect();
            let theta = problem.assemble(&nat);
            let ll = log_likelihood_raw(&theta, xs);
            if !ll.is_finite() {
                return (f64::INFINITY, vec![0.0; z.len()]);
            }
            let s = score_raw(&theta, xs);
            let g = problem
                .free
                .iter()
                .zip(&nat)
                .map(|(&i, v)| -s[i] * v * inv_n)
                .collect();
            (-ll * inv_n, g)
        };
        let m = minimize_bfgs(objective, &x0, &bfgs_opts);
        iterations += m.iterations;
        let nat: Vec<f64> = m.x.iter().map(|v| v.exp()).collect();
        let theta = problem.assemble(&nat);
        let ll = log_likelihood_raw(&theta, xs);
        if ll.is_finite() && best.as_ref().is_none_or(|(_, b)| ll > *b) {
            best = Some((theta, ll));
        }
    }
    let (mut theta, _) = best.ok_or_else(|| {
        Error::Numeric("no starting point produced a finite log-likelihood".into())
    })?;

    // rates on their floor are zero
    for &i in &problem.free {
        if i > 0 && theta[i] <= problem.floors[i] * (1.0 + 1e-6) {
            theta[i] = 0.0;
        }
    }
    if theta[1] + theta[2] <= 0.0 {
        return Err(Error::Numeric("both rates collapsed to zero".into()));
    }

    let (theta, polish_iters) = newton_polish(&problem, theta);
    iterations += polish_iters;

    let loglik = log_likelihood_raw(&theta, xs);
    let gradient_norm = problem.projected_score_norm(&theta);
    let converged = gradient_norm < 1e-7 * loglik.abs().max(1.0);

    let h = hessian_raw(&theta, xs);
    let info = h.map(|row| row.map(|v| -v));
    let k = problem.free.len();
    let block = DMatrix::from_fn(k, k, |a, b| info[problem.free[a]][problem.free[b]]);
    let (inv, cov_reliable) = sym_inverse(&block);
    let mut cov = [[0.0; 3]; 3];
    for a in 0..k {
        for b in 0..k {
            cov[problem.free[a]][problem.free[b]] = inv[(a, b)];
        }
    }

    let z = normal_critical_value(opts.level);
    let ci = [0, 1, 2].map(|i| {
        let half = z * cov[i][i].max(0.0).sqrt();
        Interval {
            lower: (theta[i] - half).max(0.0),
            upper: theta[i] + half,
        }
    });

    Ok(FitResult {
        params_hat: Params::from_array(theta)?,
        loglik,
        gradient_norm,
        info_matrix: info,
        cov_matrix: cov,
        cov_reliable,
        ci,
        level: opts.level,
        converged,
        iterations,
        n: xs.len(),
        estimated: opts.fixed.map(|f| f.is_none()),
    })
}

/// Newton iterations in natural coordinates on the interior free components.
fn newton_polish(problem: &Problem<'_>, mut theta: Vec3) -> (Vec3, usize) {
    let xs = problem.xs;
    let mut ll = log_likelihood_raw(&theta, xs);
    let mut iters = 0;
    for _ in 0..MAX_POLISH {
        let tol = 1e-9 * ll.abs().max(1.0);
        if problem.projected_score_norm(&theta) < tol {
            break;
        }
        let active: Vec<usize> = problem
            .free
            .iter()
            .copied()
            .filter(|&i| i == 0 || theta[i] > 0.0)
            .collect();
        let k = active.len();
        if k == 0 {
            break;
        }
        let s = score_raw(&theta, xs);
        let h = hessian_raw(&theta, xs);
        let info = DMatrix::from_fn(k, k, |a, b| -h[active[a]][active[b]]);
        let grad = DVector::from_fn(k, |a, _| s[active[a]]);
        let Some(step) = solve_spd(&info, &grad) else {
            break;
        };
        // keep every coordinate strictly positive
        let mut t: f64 = 1.0;
        for (a, &i) in active.iter().enumerate() {
            if theta[i] + step[a] <= 0.0 {
                t = t.min(0.5 * theta[i] / -step[a]);
            }
        }
        let mut improved = false;
        for _ in 0..40 {
            let mut trial = theta;
            for (a, &i) in active.iter().enumerate() {
                trial[i] += t * step[a];
            }
            let lt = log_likelihood_raw(&trial, xs);
            if lt.is_finite() && lt >= ll - 1e-12 * ll.abs() {
                theta = trial;
                ll = lt;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        iters += 1;
        if !improved {
            break;
        }
    }
    (theta, iters)
}

/// Plug-in reliability `R̂(t)` at the fitted parameters.
pub fn plugin_reliability(fit: &FitResult, t: f64) -> f64 {
    fit.params_hat.survival(t)
}

/// Plug-in hazard `ĥ(t)` at the fitted parameters.
pub fn plugin_hazard(fit: &FitResult, t: f64) -> f64 {
    fit.params_hat.hazard(t)
}
