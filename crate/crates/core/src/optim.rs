//! Small dense quasi-Newton minimizer with simple lower bounds.

/// Outcome of [`minimize_bfgs`].
#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct BfgsOptions {
    pub max_iter: usize,
    /// Stop when the projected gradient sup-norm falls below this.
    pub grad_tol: f64,
    /// Stop when an accepted step changes the objective by less than this
    /// (relative to `max(1, |f|)`).
    pub f_tol: f64,
    pub lower: Option<Vec<f64>>,
    /// Largest sup-norm of a trial step.
    pub max_step: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        BfgsOptions {
            max_iter: 500,
            grad_tol: 1e-8,
            f_tol: 1e-15,
            lower: None,
            max_step: f64::INFINITY,
        }
    }
}

fn projected_sup_norm(x: &[f64], g: &[f64], lower: Option<&[f64]>) -> f64 {
    x.iter()
        .zip(g)
        .enumerate()
        .map(|(i, (&xi, &gi))| match lower {
            Some(lo) if xi <= lo[i] && gi > 0.0 => 0.0,
            _ => gi.abs(),
        })
        .fold(0.0, f64::max)
}

/// Minimizes `f`, which returns the objective and its gradient.
///
/// Infinite or NaN objective values are treated as infeasible and the line
/// search backs off from them.
pub fn minimize_bfgs<F>(mut f: F, x0: &[f64], opts: &BfgsOptions) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let lower = opts.lower.as_deref();
    let clamp = |x: &mut [f64]| {
        if let Some(lo) = lower {
            for (xi, &li) in x.iter_mut().zip(lo) {
                if *xi < li {
                    *xi = li;
                }
            }
        }
    };
    let mut x = x0.to_vec();
    clamp(&mut x);
    let (mut fx, mut g) = f(&x);
    let mut h = identity(n);
    let mut first_update = true;
    let mut iterations = 0;

    if !fx.is_finite() {
        return Minimum {
            x,
            value: fx,
            grad: g,
            iterations,
            converged: false,
        };
    }

    while iterations < opts.max_iter {
        if projected_sup_norm(&x, &g, lower) < opts.grad_tol {
            return Minimum {
                x,
                value: fx,
                grad: g,
                iterations,
                converged: true,
            };
        }
        iterations += 1;

        let active: Vec<bool> = (0..n)
            .map(|i| lower.is_some_and(|lo| x[i] <= lo[i] && g[i] > 0.0))
            .collect();
        let mut dir = vec![0.0; n];
        for i in 0..n {
            if active[i] {
                continue;
            }
            for j in 0..n {
                if !active[j] {
                    dir[i] -= h[i][j] * g[j];
                }
            }
        }
        let mut slope: f64 = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if slope >= 0.0 {
            // not a descent direction: fall back to steepest descent
            h = identity(n);
            first_update = true;
            for i in 0..n {
                dir[i] = if active[i] { 0.0 } else { -g[i] };
            }
            slope = dir.iter().zip(&g).map(|(d, gi)| d * gi).sum();
            if slope >= 0.0 {
                break;
            }
        }

        let dir_norm = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut step = if dir_norm > opts.max_step { opts.max_step / dir_norm } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let mut trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + step * di).collect();
            clamp(&mut trial);
            let (ft, gt) = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((x_new, f_new, g_new)) = accepted else {
            break;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let small_change = (fx - f_new).abs() <= opts.f_tol * fx.abs().max(1.0);
        x = x_new;
        fx = f_new;
        g = g_new;
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if first_update {
                // rescale the identity before the first update
                let gamma = sy / y.iter().map(|v| v * v).sum::<f64>();
                h = identity(n);
                h.iter_mut().enumerate().for_each(|(i, row)| row[i] = gamma);
                first_update = false;
            }
            bfgs_update(&mut h, &s, &y, sy);
        } else {
            h = identity(n);
            first_update = true;
        }
        if small_change && projected_sup_norm(&x, &g, lower) < opts.grad_tol.sqrt() {
            break;
        }
    }

    let converged = projected_sup_norm(&x, &g, lower) < opts.grad_tol;
    Minimum {
        x,
        value: fx,
        grad: g,
        iterations,
        converged,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Inverse-Hessian BFGS update `H ← (I - ρ s yᵀ) H (I - ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i][j] * y[j]).sum()).collect();
    let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// Golden-section search for the minimum of a unimodal function on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let v = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
            let g = vec![-2.0 * (1.0 - a) - 400.0 * a * (b - a * a), 200.0 * (b - a * a)];
            (v, g)
        };
        let m = minimize_bfgs(f, &[-1.2, 1.0], &BfgsOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn respects_lower_bound() {
        // unconstrained minimum at x = -2
        let f = |x: &[f64]| ((x[0] + 2.0).powi(2), vec![2.0 * (x[0] + 2.0)]);
        let opts = BfgsOptions {
            lower: Some(vec![0.5]),
            ..BfgsOptions::default()
        };
        let m = minimize_bfgs(f, &[3.0], &opts);
        assert!(m.converged);
        assert_eq!(m.x[0], 0.5);
    }

    #[test]
    fn golden_finds_parabola_vertex() {
        let x = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
