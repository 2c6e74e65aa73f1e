use nalgebra::DVector;

use super::{Dataset, FitConfig, FitResult};
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, Kernel};
use crate::rkhs::RkhsFunction;

/// Pairwise losses on `(yᵢ, yⱼ, f(xᵢ), f(xⱼ))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairwiseLoss {
    /// `((yᵢ - yⱼ) - (f(xᵢ) - f(xⱼ)))²`
    RankingSquared,
}

impl PairwiseLoss {
    pub fn value(&self, yi: f64, yj: f64, fi: f64, fj: f64) -> f64 {
        match self {
            PairwiseLoss::RankingSquared => {
                let e = (yi - yj) - (fi - fj);
                e * e
            }
        }
    }
}

/// Mean pairwise data term from residuals `r = y - f`, using
/// `Σᵢ Σⱼ (rᵢ - rⱼ)² = 2n Σᵢ (rᵢ - r̄)²`.
fn ranking_data_term(r: &DVector<f64>) -> f64 {
    let n = r.len() as f64;
    let mean = r.mean();
    let ss: f64 = r.iter().map(|v| (v - mean) * (v - mean)).sum();
    2.0 * ss / n
}

/// `(1/n²) Σᵢ Σⱼ L(yᵢ, yⱼ, f(xᵢ), f(xⱼ)) + λ ‖f‖²_H` for a function with
/// centers on the training inputs.
pub fn pairwise_objective(
    d: &Dataset,
    f: &RkhsFunction,
    ploss: &PairwiseLoss,
    lambda: f64,
) -> Result<f64> {
    let values = f.eval_many(d.inputs())?;
    let y = d.outputs();
    let n = d.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += ploss.value(y[i], y[j], values[i], values[j]);
        }
    }
    let norm_sq: f64 = f
        .coefficients()
        .iter()
        .zip(f.gram_times_coefficients())
        .map(|(a, ka)| a * ka)
        .sum();
    Ok(acc / (n * n) as f64 + lambda * norm_sq.max(0.0))
}

const MAX_HALVINGS: usize = 80;

/// Gradient descent for the pairwise ranking objective.
///
/// The step follows the RKHS gradient `-(4/n) Σ (rᵢ - r̄) k(·, xᵢ) + 2λf`
/// (coefficients `-(4/n)(r - r̄) + 2λα`). The step length starts at
/// `step_size0`, is halved until the objective does not increase, and grows
/// by 1.5× after each accepted step.
pub fn fit_pairwise(
    d: &Dataset,
    k: &Kernel,
    ploss: &PairwiseLoss,
    cfg: &FitConfig,
) -> Result<FitResult> {
    cfg.validate()?;
    if d.len() < 2 {
        return Err(Error::input("pairwise learning needs n >= 2"));
    }
    match ploss {
        PairwiseLoss::RankingSquared => {}
    }
    let gram = gram_matrix(k, d.inputs())?;
    let y = DVector::from_column_slice(d.outputs());
    let n = d.len();
    let nf = n as f64;
    let lambda = cfg.lambda;

    let objective = |alpha: &DVector<f64>, f: &DVector<f64>| -> f64 {
        let r = &y - f;
        ranking_data_term(&r) + lambda * alpha.dot(f).max(0.0)
    };

    let mut alpha = DVector::zeros(n);
    let mut f = DVector::zeros(n);
    let mut obj = objective(&alpha, &f);
    let mut step = cfg.step_size0;
    let mut grad_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for t in 1..=cfg.max_iters {
        let r = &y - &f;
        let mean = r.mean();
        let dir = r.map(|v| -4.0 * (v - mean) / nf) + &alpha * (2.0 * lambda);
        grad_norm = dir.norm();
        if grad_norm <= cfg.tol {
            converged = true;
            break;
        }
        iterations = t;
        let gdir = &gram * &dir;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let cand_alpha = &alpha - &dir * step;
            let cand_f = &f - &gdir * step;
            let cand = objective(&cand_alpha, &cand_f);
            if !cand.is_finite() {
                step *= 0.5;
                continue;
            }
            if cand <= obj {
                alpha = cand_alpha;
                f = cand_f;
                obj = cand;
                accepted = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            if !obj.is_finite() {
                return Err(Error::numerical(format!(
                    "pairwise objective is non-finite at iteration {t}"
                )));
            }
            // no decrease at any step length: stationary to working precision
            break;
        }
    }
    if !obj.is_finite() {
        return Err(Error::numerical("pairwise objective diverged"));
    }

    Ok(FitResult {
        function: RkhsFunction::new(k.clone(), d.inputs().to_vec(), alpha.iter().copied().collect())?,
        objective: obj,
        iterations,
        grad_norm,
        converged,
    })
}
