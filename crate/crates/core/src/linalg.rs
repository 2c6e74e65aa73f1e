//! Dense symmetric linear algebra on top of nalgebra: SPD solves with jitter
//! escalation and extreme eigenvalues.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Number of jitter escalations tried after the plain factorization fails.
const JITTER_STEPS: usize = 3;
const JITTER_BASE: f64 = 1e-12;

/// Outcome of [`solve_spd`].
#[derive(Debug, Clone)]
pub struct SpdSolve {
    pub solution: DVector<f64>,
    /// Diagonal shift that was finally added (0 when none was needed).
    pub jitter: f64,
}

/// Solve `A x = b` for symmetric positive-definite `A` by Cholesky.
///
/// On factorization failure a diagonal jitter `1e-12 · trace(A)/n` is added
/// and multiplied by 10 on each retry, at most three times.
pub fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<SpdSolve> {
    let n = a.nrows();
    if n != a.ncols() || n != b.len() {
        return Err(Error::input(format!(
            "shape mismatch: {}x{} system with rhs of length {}",
            a.nrows(),
            a.ncols(),
            b.len()
        )));
    }
    if n == 0 {
        return Ok(SpdSolve {
            solution: DVector::zeros(0),
            jitter: 0.0,
        });
    }
    if let Some(chol) = Cholesky::new(a.clone()) {
        return Ok(SpdSolve {
            solution: chol.solve(b),
            jitter: 0.0,
        });
    }
    let scale = (a.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut jitter = JITTER_BASE * scale;
    for _ in 0..JITTER_STEPS {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] += jitter;
        }
        if let Some(chol) = Cholesky::new(shifted) {
            return Ok(SpdSolve {
                solution: chol.solve(b),
                jitter,
            });
        }
        jitter *= 10.0;
    }
    Err(Error::numerical(format!(
        "Cholesky factorization failed for {n}x{n} system even with jitter {:e}",
        jitter / 10.0
    )))
}

/// Eigenvalues of the symmetrized matrix `(A + Aᵀ)/2`, ascending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let sym = (a + a.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(a).first().copied().unwrap_or(f64::NAN)
}

/// Largest absolute entry.
pub fn max_abs_entry(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}
