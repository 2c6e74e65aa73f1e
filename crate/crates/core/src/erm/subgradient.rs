use nalgebra::{DMatrix, DVector};

use super::{Dataset, FitConfig, FitResult, LossFunction};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, Kernel};
use crate::rkhs::RkhsFunction;

/// `(1/n) Σ L(yᵢ, (Kα)ᵢ) + λ αᵀKα`.
pub fn pointwise_objective(
    gram: &DMatrix<f64>,
    alpha: &DVector<f64>,
    y: &[f64],
    loss: &LossFunction,
    lambda: f64,
) -> f64 {
    let f = gram * alpha;
    objective_from_values(&f, alpha, y, loss, lambda)
}

fn objective_from_values(
    f: &DVector<f64>,
    alpha: &DVector<f64>,
    y: &[f64],
    loss: &LossFunction,
    lambda: f64,
) -> f64 {
    let n = y.len() as f64;
    let data: f64 = y.iter().zip(f.iter()).map(|(y, t)| loss.value(*y, *t)).sum::<f64>() / n;
    data + lambda * alpha.dot(f).max(0.0)
}

/// Projected subgradient descent for `(1/n) Σ L(yᵢ, f(xᵢ)) + λ ‖f‖²_H`.
///
/// Steps are taken along the RKHS subgradient `(1/n) Σ gᵢ k(·, xᵢ) + 2λf`,
/// which in coefficients is `g/n + 2λα`, with step `step_size0/√t`. The
/// iterate is projected onto the ball `‖f‖²_H <= J(0)/λ`, which contains the
/// minimizer. The best iterate seen (starting with `α = 0`) is returned, so
/// the result is never worse than the zero function.
pub fn fit_lipschitz_erm(
    d: &Dataset,
    k: &Kernel,
    loss: &LossFunction,
    cfg: &FitConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    let gram = gram_matrix(k, d.inputs())?;
    let y = d.outputs();
    let n = d.len();
    let nf = n as f64;
    let lambda = cfg.lambda;

    let mut alpha = DVector::zeros(n);
    let mut f = DVector::zeros(n);
    let zero_objective = objective_from_values(&f, &alpha, y, loss, lambda);
    if !zero_objective.is_finite() {
        return Err(Error::numerical(format!(
            "objective at the zero function is {zero_objective}; outputs overflow the loss"
        )));
    }
    let radius_sq = zero_objective / lambda;

    let mut best_alpha = alpha.clone();
    let mut best_objective = zero_objective;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=cfg.max_iters {
        let mut dir = DVector::zeros(n);
        for i in 0..n {
            dir[i] = loss.derivative(y[i], f[i]) / nf + 2.0 * lambda * alpha[i];
        }
        grad_norm = dir.norm();
        if grad_norm <= cfg.tol {
            converged = true;
            break;
        }
        iterations = t;
        let eta = cfg.step_size0 / (t as f64).sqrt();
        alpha.axpy(-eta, &dir, 1.0);
        f = &gram * &alpha;
        let norm_sq = alpha.dot(&f);
        if norm_sq > radius_sq {
            let s = (radius_sq / norm_sq).sqrt();
            alpha *= s;
            f *= s;
        }
        let obj = objective_from_values(&f, &alpha, y, loss, lambda);
        if !obj.is_finite() {
            return Err(Error::numerical(format!(
                "subgradient objective became non-finite at iteration {t} (step {eta:e})"
            )));
        }
        if obj < best_objective {
            best_objective = obj;
            best_alpha.copy_from(&alpha);
        }
    }

    Ok(FitResult {
        function: RkhsFunction::new(
            k.clone(),
            d.inputs().to_vec(),
            best_alpha.iter().copied().collect(),
        )?,
        objective: best_objective,
        iterations,
        grad_norm,
        converged,
    })
}
