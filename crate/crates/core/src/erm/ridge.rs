use nalgebra::{DMatrix, DVector};

use super::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{gram_matrix, Kernel};
use crate::linalg::solve_spd;
use crate::rkhs::RkhsFunction;

fn regularized_gram(d: &Dataset, k: &Kernel, lambda: f64) -> Result<DMatrix<f64>> {
    let mut a = gram_matrix(k, d.inputs())?;
    let shift = d.len() as f64 * lambda;
    for i in 0..d.len() {
        a[(i, i)] += shift;
    }
    Ok(a)
}

/// Kernel ridge regression: the minimizer of
/// `(1/n) Σ (yᵢ - f(xᵢ))² + λ ‖f‖²_H`, i.e. `α` solving `(K + nλI) α = y`.
pub fn fit_kernel_ridge(d: &Dataset, k: &Kernel, lambda: f64) -> Result<RkhsFunction> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::input(format!("lambda must be > 0, got {lambda}")));
    }
    let a = regularized_gram(d, k, lambda)?;
    let y = DVector::from_column_slice(d.outputs());
    let solved = solve_spd(&a, &y)?;
    if solved.solution.iter().any(|v| !v.is_finite()) {
        return Err(Error::numerical("ridge solve produced non-finite coefficients"));
    }
    RkhsFunction::new(
        k.clone(),
        d.inputs().to_vec(),
        solved.solution.iter().copied().collect(),
    )
}

/// `‖(K + nλI) α - y‖` for a fitted function; the optimality certificate.
pub fn ridge_residual(d: &Dataset, f: &RkhsFunction, lambda: f64) -> Result<f64> {
    if f.centers() != d.inputs() {
        return Err(Error::input("function centers differ from dataset inputs"));
    }
    let a = regularized_gram(d, f.kernel(), lambda)?;
    let alpha = DVector::from_column_slice(f.coefficients());
    let y = DVector::from_column_slice(d.outputs());
    Ok((a * alpha - y).norm())
}
