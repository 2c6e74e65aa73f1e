//! Finite representer expansions `f = Σᵢ αᵢ k(·, cᵢ)`, their norms, and the
//! integral operator `S_k g(x) = ∫ k(x, x′) g(x′) dμ(x′)` under an empirical
//! measure.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::kernels::{gram_unchecked, EmpiricalMeasure, Kernel, Point};
use crate::linalg::min_eigenvalue;

/// A function in the RKHS of a point-level kernel, stored by its expansion
/// coefficients over a set of centers.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsFunction {
    kernel: Kernel,
    centers: Vec<Point>,
    coefficients: Vec<f64>,
}

impl RkhsFunction {
    pub fn new(kernel: Kernel, centers: Vec<Point>, coefficients: Vec<f64>) -> Result<Self> {
        kernel.validate()?;
        kernel.require_point_level()?;
        if centers.len() != coefficients.len() {
            return Err(Error::input(format!(
                "{} centers but {} coefficients",
                centers.len(),
                coefficients.len()
            )));
        }
        if let Some(first) = centers.first() {
            if let Some(c) = centers.iter().find(|c| c.dim() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: c.dim(),
                });
            }
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::input("coefficients must be finite"));
        }
        Ok(RkhsFunction {
            kernel,
            centers,
            coefficients,
        })
    }

    /// The zero function over the given centers.
    pub fn zero(kernel: Kernel, centers: Vec<Point>) -> Result<Self> {
        let n = centers.len();
        RkhsFunction::new(kernel, centers, vec![0.0; n])
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `a · f`.
    pub fn scaled(&self, a: f64) -> RkhsFunction {
        RkhsFunction {
            kernel: self.kernel.clone(),
            centers: self.centers.clone(),
            coefficients: self.coefficients.iter().map(|c| a * c).collect(),
        }
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &Point) -> f64 {
        let mut acc = 0.0;
        for (a, c) in self.coefficients.iter().zip(&self.centers) {
            acc += a * self.kernel.eval_unchecked(x, c);
        }
        acc
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        match self.centers.first() {
            Some(c) if c.dim() != x.dim() => Err(Error::DimensionMismatch {
                expected: c.dim(),
                got: x.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// Evaluate at many points in parallel; output order matches `pts`.
    pub fn eval_many(&self, pts: &[Point]) -> Result<Vec<f64>> {
        for x in pts {
            self.check_point(x)?;
        }
        Ok(pts.par_iter().map(|x| self.eval_unchecked(x)).collect())
    }

    /// `(Kα)ⱼ = ⟨f, k(·, cⱼ)⟩_H` for every center, computed along the same
    /// arithmetic path as [`eval_rkhs`] so the two agree bitwise.
    pub fn gram_times_coefficients(&self) -> Vec<f64> {
        self.centers.iter().map(|c| self.eval_unchecked(c)).collect()
    }
}

impl RealFunction for RkhsFunction {
    fn eval(&self, x: &Point) -> Result<f64> {
        eval_rkhs(self, x)
    }
}

/// `f(x) = Σᵢ αᵢ k(x, cᵢ)`.
pub fn eval_rkhs(f: &RkhsFunction, x: &Point) -> Result<f64> {
    f.check_point(x)?;
    Ok(f.eval_unchecked(x))
}

/// `αᵀKα` before clamping, exposed for diagnostics.
pub fn rkhs_norm_squared_raw(f: &RkhsFunction) -> f64 {
    if f.centers.is_empty() {
        return 0.0;
    }
    let k = gram_unchecked(&f.kernel, &f.centers);
    let a = DVector::from_column_slice(&f.coefficients);
    a.dot(&(&k * &a))
}

/// `‖f‖_H = sqrt(max(0, αᵀKα))`.
pub fn rkhs_norm(f: &RkhsFunction) -> f64 {
    rkhs_norm_squared_raw(f).max(0.0).sqrt()
}

/// Empirical stand-in for `μ` together with an exponent `p >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    measure: EmpiricalMeasure,
    p: f64,
}

impl QuadratureSpec {
    pub fn new(measure: EmpiricalMeasure, p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::input(format!("p must be >= 1, got {p}")));
        }
        Ok(QuadratureSpec { measure, p })
    }

    pub fn measure(&self) -> &EmpiricalMeasure {
        &self.measure
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// `(Σⱼ wⱼ |f(xⱼ)|^p)^{1/p}`.
pub fn lp_norm_estimate<F: RealFunction + ?Sized>(f: &F, q: &QuadratureSpec) -> Result<f64> {
    let mut acc = 0.0;
    for (x, w) in q.measure.atoms().iter().zip(q.measure.weights()) {
        acc += w * f.eval(x)?.abs().powf(q.p);
    }
    Ok(acc.powf(1.0 / q.p))
}

/// `(Σⱼ wⱼ k(xⱼ, xⱼ)^{p/2})^{1/p}`, the kernel's own `L_p(μ)` norm. Bounds
/// the inclusion `‖f‖_{L_p(μ)} <= ‖k‖_{L_p(μ)} ‖f‖_H`.
pub fn lp_norm_of_kernel(k: &Kernel, q: &QuadratureSpec) -> Result<f64> {
    k.require_point_level()?;
    let mut acc = 0.0;
    for (x, w) in q.measure.atoms().iter().zip(q.measure.weights()) {
        acc += w * k.eval_unchecked(x, x).powf(q.p / 2.0);
    }
    Ok(acc.powf(1.0 / q.p))
}

/// `S_k g(x) = Σⱼ wⱼ k(x, xⱼ) g(xⱼ)`.
pub fn apply_sk<G: RealFunction + ?Sized>(
    k: &Kernel,
    g: &G,
    q: &QuadratureSpec,
    x: &Point,
) -> Result<f64> {
    k.require_point_level()?;
    if x.dim() != q.measure.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.measure.dim(),
            got: x.dim(),
        });
    }
    let mut acc = 0.0;
    for (xj, w) in q.measure.atoms().iter().zip(q.measure.weights()) {
        acc += w * k.eval_unchecked(x, xj) * g.eval(xj)?;
    }
    Ok(acc)
}

/// Outcome of [`injectivity_probe`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InjectivityCertificate {
    pub min_eigenvalue: f64,
    /// `1e-12 · trace(K) / n`
    pub threshold: f64,
}

impl InjectivityCertificate {
    /// The Gram matrix is numerically positive definite, so `S_k` is
    /// injective on functions supported on the probe set. This says nothing
    /// about injectivity on all of `L_{p′}(μ)`.
    pub fn certified(&self) -> bool {
        self.min_eigenvalue > self.threshold
    }
}

/// Smallest eigenvalue of the Gram matrix at pairwise distinct points.
pub fn injectivity_probe(k: &Kernel, pts: &[Point]) -> Result<InjectivityCertificate> {
    k.require_point_level()?;
    if pts.is_empty() {
        return Err(Error::input("probe set must be nonempty"));
    }
    let d = pts[0].dim();
    if let Some(p) = pts.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: p.dim(),
        });
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        pts[a]
            .coords()
            .iter()
            .zip(pts[b].coords())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    if let Some(w) = order.windows(2).find(|w| pts[w[0]] == pts[w[1]]) {
        return Err(Error::input(format!(
            "probe points {} and {} coincide",
            w[0].min(w[1]),
            w[0].max(w[1])
        )));
    }
    let gram = gram_unchecked(k, pts);
    let n = pts.len() as f64;
    Ok(InjectivityCertificate {
        min_eigenvalue: min_eigenvalue(&gram),
        threshold: 1e-12 * gram.trace() / n,
    })
}
