//! Regularized empirical risk minimization over a kernel's RKHS.
//!
//! All solvers minimize objectives of the form
//!
//! ```text
//! data_term(f(x₁), …, f(x_n)) + λ ‖f‖²_H
//! ```
//!
//! over representer expansions `f = Σᵢ αᵢ k(·, xᵢ)` centered on the training
//! inputs. The pointwise data term is `(1/n) Σ L(yᵢ, f(xᵢ))`; the pairwise one
//! is `(1/n²) Σᵢ Σⱼ ((yᵢ - yⱼ) - (f(xᵢ) - f(xⱼ)))²`.

mod loss;
mod pairwise;
mod ridge;
mod subgradient;

pub use loss::{LossFunction, LossKind};
pub use pairwise::{fit_pairwise, pairwise_objective, PairwiseLoss};
pub use ridge::{fit_kernel_ridge, ridge_residual};
pub use subgradient::{fit_lipschitz_erm, pointwise_objective};

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::kernels::Point;
use crate::rkhs::RkhsFunction;

/// Training data `((x₁, y₁), …, (x_n, y_n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    inputs: Vec<Point>,
    outputs: Vec<f64>,
}

impl Dataset {
    pub fn new(inputs: Vec<Point>, outputs: Vec<f64>) -> Result<Self> {
        if inputs.is_empty() || inputs.len() != outputs.len() {
            return Err(Error::input(format!(
                "dataset needs n >= 1 inputs and outputs of equal length, got {} and {}",
                inputs.len(),
                outputs.len()
            )));
        }
        let d = inputs[0].dim();
        if let Some(p) = inputs.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        if outputs.iter().any(|y| !y.is_finite()) {
            return Err(Error::input("dataset outputs must be finite"));
        }
        Ok(Dataset { inputs, outputs })
    }

    pub fn inputs(&self) -> &[Point] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }
}

/// Iterative solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub lambda: f64,
    pub max_iters: usize,
    pub step_size0: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            lambda: 1e-2,
            max_iters: 5000,
            step_size0: 0.5,
            tol: 1e-8,
            seed: 0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::input(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::input(format!("tol must be > 0, got {}", self.tol)));
        }
        if !(self.step_size0.is_finite() && self.step_size0 > 0.0) {
            return Err(Error::input(format!(
                "step_size0 must be > 0, got {}",
                self.step_size0
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::input("max_iters must be >= 1"));
        }
        Ok(())
    }
}

/// Result of an iterative fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub function: RkhsFunction,
    /// Objective value of `function`.
    pub objective: f64,
    pub iterations: usize,
    /// Euclidean norm of the coefficient-space gradient at the last iterate.
    pub grad_norm: f64,
    /// `grad_norm <= tol` was reached before `max_iters`.
    pub converged: bool,
}

/// Pointwise projection of a function onto `[-M, M]`.
#[derive(Debug, Clone)]
pub struct Clipped<F> {
    inner: F,
    bound: f64,
}

impl<F> Clipped<F> {
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }
}

impl<F: RealFunction> RealFunction for Clipped<F> {
    fn eval(&self, x: &Point) -> Result<f64> {
        Ok(clip_value(self.inner.eval(x)?, self.bound))
    }
}

/// `max{-M, min{M, v}}`.
#[inline]
pub fn clip_value(v: f64, bound: f64) -> f64 {
    v.clamp(-bound, bound)
}

/// Clip `f` to `[-M, M]`.
pub fn clip<F: RealFunction>(f: F, bound: f64) -> Result<Clipped<F>> {
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::input(format!("clip bound must be > 0, got {bound}")));
    }
    Ok(Clipped { inner: f, bound })
}

/// `(1/n) Σ L(yᵢ, f(xᵢ))`.
pub fn empirical_risk<F: RealFunction + ?Sized>(
    f: &F,
    d: &Dataset,
    loss: &LossFunction,
) -> Result<f64> {
    let mut acc = 0.0;
    for (x, y) in d.inputs.iter().zip(&d.outputs) {
        acc += loss.value(*y, f.eval(x)?);
    }
    Ok(acc / d.len() as f64)
}
