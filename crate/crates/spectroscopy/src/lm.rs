//! Damped Gauss-Newton minimizer for weighted least squares.
//!
//! Small and deliberately transparent: numeric central-difference Jacobian,
//! Levenberg-style multiplicative damping of the scaled normal equations,
//! and a monotone accept/reject loop.  The residual closure may return
//! `None` where the model is undefined (e.g. a trial step wanders into mode
//! softening); such steps are rejected like any cost increase.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LmError {
    #[error("model is undefined at the initial parameters")]
    UndefinedAtInitial,
    #[error("residual count changed from {expected} to {got} during iteration")]
    ResidualCountChanged { expected: usize, got: usize },
    #[error("{got} residuals cannot constrain {params} parameters")]
    TooFewResiduals { got: usize, params: usize },
    #[error(
        "Jacobian is rank-deficient: residuals are insensitive to parameter {param_index} \
         (iteration {iteration})"
    )]
    RankDeficient {
        param_index: usize,
        iteration: usize,
    },
    #[error("weights must be positive and match the residual count")]
    BadWeights,
}

/// Damping and termination settings.
#[derive(Debug, Clone, Copy)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Relative gradient tolerance for convergence.
    pub gradient_tol: f64,
    /// Relative step-size tolerance for convergence.
    pub step_tol: f64,
    pub lambda_init: f64,
    pub lambda_raise: f64,
    pub lambda_drop: f64,
    pub lambda_max: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            lambda_init: 1e-3,
            lambda_raise: 10.0,
            lambda_drop: 0.3,
            lambda_max: 1e12,
        }
    }
}

/// Fit outcome.  `converged == false` flags a best-so-far result that did
/// not meet the tolerances; callers must propagate that flag, not hide it.
#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub params: Vec<f64>,
    /// Final weighted cost `Σ w_i r_i²` with weights normalized to mean 1.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
    /// 1σ parameter uncertainties from the inverse scaled normal matrix;
    /// `None` when it is singular at the solution or the fit is
    /// under-determined.
    pub sigmas: Option<Vec<f64>>,
}

/// Minimizes `Σ w_i r_i(x)²` over `x` starting from `initial`.
///
/// `steps` are the absolute central-difference steps per parameter; they
/// set both the Jacobian discretization and the parameter scale used in the
/// termination tests.
pub fn minimize(
    residuals: impl Fn(&[f64]) -> Option<Vec<f64>>,
    weights: &[f64],
    initial: &[f64],
    steps: &[f64],
    config: &LmConfig,
) -> Result<LmOutcome, LmError> {
    let n_params = initial.len();
    assert_eq!(steps.len(), n_params, "one step per parameter");
    assert!(steps.iter().all(|s| *s > 0.0), "steps must be positive");

    let r0 = residuals(initial).ok_or(LmError::UndefinedAtInitial)?;
    let n_res = r0.len();
    if n_res < n_params {
        return Err(LmError::TooFewResiduals {
            got: n_res,
            params: n_params,
        });
    }
    if weights.len() != n_res || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(LmError::BadWeights);
    }
    // normalize weights to mean 1 so cost and covariance share one scale
    let mean_w: f64 = weights.iter().sum::<f64>() / n_res as f64;
    let w: Vec<f64> = weights.iter().map(|v| v / mean_w).collect();

    let eval = |x: &[f64]| -> Result<Option<(DVector<f64>, f64)>, LmError> {
        match residuals(x) {
            None => Ok(None),
            Some(r) => {
                if r.len() != n_res {
                    return Err(LmError::ResidualCountChanged {
                        expected: n_res,
                        got: r.len(),
                    });
                }
                let rv = DVector::from_vec(r);
                let cost = rv
                    .iter()
                    .zip(&w)
                    .map(|(ri, wi)| wi * ri * ri)
                    .sum::<f64>();
                Ok(Some((rv, cost)))
            }
        }
    };

    let jacobian = |x: &[f64], r_here: &DVector<f64>| -> Result<DMatrix<f64>, LmError> {
        let mut j = DMatrix::zeros(n_res, n_params);
        for p in 0..n_params {
            let h = steps[p];
            let mut forward = x.to_vec();
            forward[p] += h;
            let mut backward = x.to_vec();
            backward[p] -= h;
            let rf = residuals(&forward);
            let rb = residuals(&backward);
            let column: Vec<f64> = match (rf, rb) {
                (Some(rf), Some(rb)) => {
                    if rf.len() != n_res || rb.len() != n_res {
                        return Err(LmError::ResidualCountChanged {
                            expected: n_res,
                            got: rf.len().min(rb.len()),
                        });
                    }
                    rf.iter()
                        .zip(&rb)
                        .map(|(f, b)| (f - b) / (2.0 * h))
                        .collect()
                }
                // fall back to one-sided differences at a domain boundary
                (Some(rf), None) => rf
                    .iter()
                    .zip(r_here.iter())
                    .map(|(f, c)| (f - c) / h)
                    .collect(),
                (None, Some(rb)) => r_here
                    .iter()
                    .zip(rb.iter())
                    .map(|(c, b)| (c - b) / h)
                    .collect(),
                (None, None) => vec![0.0; n_res],
            };
            for (row, value) in column.into_iter().enumerate() {
                j[(row, p)] = value;
            }
        }
        Ok(j)
    };

    let mut x = initial.to_vec();
    let (mut r, mut cost) = eval(&x)?.expect("checked at initial");
    let mut lambda = config.lambda_init;
    let mut converged = false;
    let mut iterations = 0;
    let mut jtwj_final: Option<DMatrix<f64>> = None;

    while iterations < config.max_iterations {
        iterations += 1;
        let j = jacobian(&x, &r)?;

        // scaled normal equations: (JᵀWJ + λ diag(JᵀWJ)) δ = -JᵀW r
        let mut jtwj: DMatrix<f64> = DMatrix::zeros(n_params, n_params);
        let mut grad: DVector<f64> = DVector::zeros(n_params);
        for row in 0..n_res {
            let wi = w[row];
            for a in 0..n_params {
                grad[a] += wi * j[(row, a)] * r[row];
                for b in a..n_params {
                    jtwj[(a, b)] += wi * j[(row, a)] * j[(row, b)];
                }
            }
        }
        for a in 0..n_params {
            for b in 0..a {
                jtwj[(a, b)] = jtwj[(b, a)];
            }
        }

        for p in 0..n_params {
            if !(jtwj[(p, p)] > 0.0) {
                return Err(LmError::RankDeficient {
                    param_index: p,
                    iteration: iterations,
                });
            }
        }
        jtwj_final = Some(jtwj.clone());

        // relative gradient test: scale each component by its parameter
        // scale and the current cost
        let cost_scale = cost.max(1e-300);
        let grad_ok = (0..n_params).all(|p| {
            let scale = x[p].abs().max(steps[p]);
            (grad[p] * scale).abs() <= config.gradient_tol * cost_scale.max(1.0)
        });
        if grad_ok {
            converged = true;
            break;
        }

        // try steps, raising damping until one is accepted
        let mut accepted = false;
        while lambda <= config.lambda_max {
            let mut damped = jtwj.clone();
            for p in 0..n_params {
                damped[(p, p)] *= 1.0 + lambda;
            }
            let delta = match Cholesky::new(damped) {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    lambda *= config.lambda_raise;
                    continue;
                }
            };
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            match eval(&trial)? {
                Some((r_new, cost_new)) if cost_new <= cost => {
                    // accepted steps never increase the objective
                    assert!(
                        cost_new <= cost,
                        "accepted step raised the cost: {cost_new} > {cost}"
                    );
                    let step_small = delta
                        .iter()
                        .enumerate()
                        .all(|(p, d)| d.abs() <= config.step_tol * x[p].abs().max(steps[p]));
                    let cost_stalled = (cost - cost_new) <= 1e-14 * cost.max(1e-300);
                    x = trial;
                    r = r_new;
                    cost = cost_new;
                    lambda = (lambda * config.lambda_drop).max(1e-12);
                    accepted = true;
                    if step_small || cost_stalled {
                        converged = true;
                    }
                    break;
                }
                _ => {
                    lambda *= config.lambda_raise;
                }
            }
        }
        if converged || !accepted {
            break;
        }
    }

    // covariance from the undamped normal matrix at the solution
    let sigmas = jtwj_final.and_then(|jtwj| {
        if n_res <= n_params {
            return None;
        }
        Cholesky::new(jtwj).map(|ch| {
            let inverse = ch.inverse();
            let variance_scale = cost / (n_res - n_params) as f64;
            (0..n_params)
                .map(|p| (variance_scale * inverse[(p, p)]).max(0.0).sqrt())
                .collect()
        })
    });

    Ok(LmOutcome {
        params: x,
        cost,
        iterations,
        converged,
        sigmas,
    })
}
