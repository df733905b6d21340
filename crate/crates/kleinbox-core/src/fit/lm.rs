//! Damped least-squares minimizer.
//!
//! Classic Levenberg-Marquardt with multiplicative lambda adaptation on
//! the Marquardt-scaled normal equations. Jacobians default to central
//! differences with step `1e-6 * scale(param)`; an analytic Jacobian can
//! be supplied instead. The engine is pure: identical inputs produce
//! identical iterates.

use serde::Serialize;

use crate::error::FitError;

#[derive(Debug, Clone)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the max-abs component of `J^T r` drops below this.
    pub gradient_tol: f64,
    /// Stop when the step norm drops below this.
    pub step_tol: f64,
    pub lambda_init: f64,
    pub lambda_max: f64,
    /// Record the accepted iterates in the result.
    pub keep_trace: bool,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            // Near-Gauss-Newton start: a linear problem solves in one
            // accepted step; hard starts escalate quickly below.
            lambda_init: 1e-14,
            lambda_max: 1e14,
            keep_trace: false,
        }
    }
}

/// Outcome of a least-squares minimization; serializes as a JSON fit
/// report.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    /// Euclidean norm of the residual vector at the solution.
    pub residual_norm: f64,
    pub iterations: usize,
    /// True when a gradient/step criterion was met and the normal
    /// equations were invertible at the solution.
    pub converged: bool,
    /// `sigma^2 (J^T J)^{-1}`; absent when the problem is degenerate.
    pub covariance: Option<Vec<Vec<f64>>>,
    /// Accepted iterates, when requested via `LmOptions::keep_trace`.
    pub iterate_trace: Option<Vec<Vec<f64>>>,
}

/// Minimize `|residual(p)|^2` with a numeric Jacobian.
pub fn lm_minimize<F>(residual: F, init: &[f64], options: &LmOptions) -> Result<FitResult, FitError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    minimize_impl(&residual, None::<&fn(&[f64]) -> Vec<Vec<f64>>>, init, options)
}

/// Minimize with a user-supplied Jacobian (`jac[i][j] = d r_i / d p_j`).
pub fn lm_minimize_with_jacobian<F, J>(
    residual: F,
    jacobian: J,
    init: &[f64],
    options: &LmOptions,
) -> Result<FitResult, FitError>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    minimize_impl(&residual, Some(&jacobian), init, options)
}

fn minimize_impl<F, J>(
    residual: &F,
    jacobian: Option<&J>,
    init: &[f64],
    options: &LmOptions,
) -> Result<FitResult, FitError>
where
    F: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    let n = init.len();
    let mut p = init.to_vec();
    let mut r = residual(&p);
    let m = r.len();
    if m < n {
        return Err(FitError::Underdetermined { residuals: m, params: n });
    }
    let mut cost: f64 = r.iter().map(|x| x * x).sum();
    let mut lambda = options.lambda_init;
    let mut iterations = 0;
    let mut converged = false;
    let mut hit_lambda_cap = false;
    let mut trace = options.keep_trace.then(|| vec![p.clone()]);

    while iterations < options.max_iterations {
        iterations += 1;
        let jac = match jacobian {
            Some(j) => j(&p),
            None => numeric_jacobian(residual, &p, m),
        };
        // g = J^T r, a = J^T J
        let mut g = vec![0.0; n];
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..m {
            for j in 0..n {
                g[j] += jac[i][j] * r[i];
                for k in j..n {
                    a[j][k] += jac[i][j] * jac[i][k];
                }
            }
        }
        for j in 0..n {
            for k in 0..j {
                a[j][k] = a[k][j];
            }
        }
        let g_inf = g.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if g_inf < options.gradient_tol {
            converged = true;
            break;
        }

        // Inner loop: grow lambda until a step reduces the cost.
        let mut accepted = false;
        while lambda <= options.lambda_max {
            let mut damped = a.clone();
            for j in 0..n {
                damped[j][j] = a[j][j] + lambda * a[j][j].max(1e-300);
            }
            let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
            let Some(step) = solve_dense(damped, rhs) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(&step).map(|(x, d)| x + d).collect();
            let r_trial = residual(&trial);
            if r_trial.len() != m {
                return Err(FitError::Underdetermined { residuals: r_trial.len(), params: n });
            }
            let cost_trial: f64 = r_trial.iter().map(|x| x * x).sum();
            if cost_trial < cost {
                let step_norm = step.iter().map(|d| d * d).sum::<f64>().sqrt();
                p = trial;
                r = r_trial;
                cost = cost_trial;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if let Some(t) = trace.as_mut() {
                    t.push(p.clone());
                }
                if step_norm < options.step_tol {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            hit_lambda_cap = true;
            break;
        }
        if converged {
            break;
        }
    }

    // Final gradient and covariance at the solution. A singular J^T J
    // marks the fit as degenerate regardless of how the iteration stopped;
    // conversely, stopping at the lambda cap still counts as convergence
    // when the gradient has reached the rounding floor of the problem
    // (relative to |J| |r|), which is where discretized residuals stall.
    let jac = match jacobian {
        Some(j) => j(&p),
        None => numeric_jacobian(residual, &p, m),
    };
    let mut a = vec![vec![0.0; n]; n];
    let mut g = vec![0.0; n];
    for (row, ri) in jac.iter().zip(&r) {
        for j in 0..n {
            g[j] += row[j] * ri;
            for k in 0..n {
                a[j][k] += row[j] * row[k];
            }
        }
    }
    let g_inf = g.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let col_scale = (0..n)
        .map(|j| a[j][j].sqrt())
        .fold(0.0f64, f64::max);
    let gradient_floor = 1e-8 * col_scale * cost.sqrt();
    if hit_lambda_cap {
        converged = g_inf <= gradient_floor.max(options.gradient_tol);
    } else if !converged {
        converged = g_inf < options.gradient_tol;
    }

    let sigma2 = if m > n { cost / (m - n) as f64 } else { cost.max(1.0) };
    let covariance = invert_dense(&a).map(|inv| {
        inv.into_iter()
            .map(|row| row.into_iter().map(|x| x * sigma2).collect())
            .collect::<Vec<Vec<f64>>>()
    });
    if covariance.is_none() {
        converged = false;
    }

    Ok(FitResult {
        params: p,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
        covariance,
        iterate_trace: trace,
    })
}

fn numeric_jacobian<F>(residual: &F, p: &[f64], m: usize) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = p.len();
    let mut jac = vec![vec![0.0; n]; m];
    let mut work = p.to_vec();
    for j in 0..n {
        let h = 1e-6 * p[j].abs().max(1.0);
        work[j] = p[j] + h;
        let r_plus = residual(&work);
        work[j] = p[j] - h;
        let r_minus = residual(&work);
        work[j] = p[j];
        for i in 0..m.min(r_plus.len()).min(r_minus.len()) {
            jac[i][j] = (r_plus[i] - r_minus[i]) / (2.0 * h);
        }
    }
    jac
}

/// Gaussian elimination with partial pivoting; `None` when singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|x| x.abs()))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

pub(crate) fn invert_dense(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_dense(a.to_vec(), e)?);
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}
