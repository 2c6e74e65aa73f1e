//! Kernels on Euclidean points and on empirical probability measures.
//!
//! Point-level kernels are the Gaussian RBF
//!
//! ```text
//! k(x, y) = exp(-‖x - y‖² / γ²)
//! ```
//!
//! and the C² Wendland function `φ(r) = (1 - r)⁴₊ (4r + 1)` with
//! `r = ‖x - y‖ / R`. The measure-level kernel is a Gaussian-type kernel
//! applied to the RKHS distance between kernel mean embeddings,
//!
//! ```text
//! k_σ(P, Q) = exp(-MMD²(P, Q) / γ²)
//! ```
//!
//! where `MMD²` is evaluated under a point-level base kernel.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A point of `R^d`, `d >= 1`, with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::input("point must have dimension >= 1"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::input(format!("point coordinate {c} is not finite")));
        }
        Ok(Point(coords))
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Squared Euclidean distance; exactly symmetric in its arguments.
    pub fn sq_dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| {
                let d = a - b;
                d * d
            })
            .sum()
    }

    fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }

    fn total_cmp(&self, other: &Point) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Convert a slice of scalars into one-dimensional points.
pub fn points_1d(xs: &[f64]) -> Result<Vec<Point>> {
    xs.iter().map(|&x| Point::scalar(x)).collect()
}

/// Weighted finite point set standing in for a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<Point>,
    weights: Vec<f64>,
}

pub(crate) const WEIGHT_SUM_TOL: f64 = 1e-12;

impl EmpiricalMeasure {
    pub fn new(atoms: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::input("empirical measure needs at least one atom"));
        }
        if atoms.len() != weights.len() {
            return Err(Error::input(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let d = atoms[0].dim();
        if let Some(p) = atoms.iter().find(|p| p.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        check_weights(&weights)?;
        Ok(EmpiricalMeasure { atoms, weights })
    }

    /// Equal weights `1/m` on every atom.
    pub fn uniform(atoms: Vec<Point>) -> Result<Self> {
        let m = atoms.len();
        if m == 0 {
            return Err(Error::input("empirical measure needs at least one atom"));
        }
        common_dim(&atoms)?;
        // equal weights are valid by construction; summing 1/m can drift past
        // the tolerance for very large m
        let w = 1.0 / m as f64;
        Ok(EmpiricalMeasure {
            atoms,
            weights: vec![w; m],
        })
    }

    /// Point mass at `x`.
    pub fn dirac(x: Point) -> Self {
        EmpiricalMeasure {
            atoms: vec![x],
            weights: vec![1.0],
        }
    }

    pub fn atoms(&self) -> &[Point] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    fn total_cmp(&self, other: &EmpiricalMeasure) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            self.atoms
                .iter()
                .zip(&other.atoms)
                .map(|(a, b)| a.total_cmp(b))
                .chain(
                    self.weights
                        .iter()
                        .zip(&other.weights)
                        .map(|(a, b)| a.total_cmp(b)),
                )
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

/// Weights must be finite, nonnegative and sum to one.
pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::input(format!("weight {w} is negative or not finite")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::input(format!("weights sum to {total}, expected 1")));
    }
    Ok(())
}

/// A positive-definite kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    GaussianRbf { gamma: f64 },
    WendlandC2 { support_radius: f64 },
    /// Gaussian-type kernel on empirical measures built on a point-level base.
    MeasureGaussian { base: Box<Kernel>, gamma: f64 },
}

impl Kernel {
    pub fn gaussian(gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        Ok(Kernel::GaussianRbf { gamma })
    }

    pub fn wendland(support_radius: f64) -> Result<Self> {
        check_positive("support_radius", support_radius)?;
        Ok(Kernel::WendlandC2 { support_radius })
    }

    pub fn measure_gaussian(base: Kernel, gamma: f64) -> Result<Self> {
        check_positive("gamma", gamma)?;
        if !base.is_point_level() {
            return Err(Error::Variant(
                "measure kernel base must be a point-level kernel".into(),
            ));
        }
        Ok(Kernel::MeasureGaussian {
            base: Box::new(base),
            gamma,
        })
    }

    pub fn is_point_level(&self) -> bool {
        !matches!(self, Kernel::MeasureGaussian { .. })
    }

    /// Re-check the parameter invariants (useful for kernels built by hand).
    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::GaussianRbf { gamma } => check_positive("gamma", *gamma),
            Kernel::WendlandC2 { support_radius } => {
                check_positive("support_radius", *support_radius)
            }
            Kernel::MeasureGaussian { base, gamma } => {
                check_positive("gamma", *gamma)?;
                if !base.is_point_level() {
                    return Err(Error::Variant("nested measure kernel".into()));
                }
                base.validate()
            }
        }
    }

    /// Evaluate without validating dimensions or variant. Callers inside the
    /// crate guarantee both.
    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Kernel::GaussianRbf { gamma } => (-x.sq_dist(y) / (gamma * gamma)).exp(),
            Kernel::WendlandC2 { support_radius } => {
                wendland_c2(x.sq_dist(y).sqrt() / support_radius)
            }
            Kernel::MeasureGaussian { .. } => f64::NAN,
        }
    }

    pub(crate) fn require_point_level(&self) -> Result<()> {
        if self.is_point_level() {
            Ok(())
        } else {
            Err(Error::Variant(
                "measure-level kernel cannot be evaluated on points".into(),
            ))
        }
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::input(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `(1 - r)⁴₊ (4r + 1)`.
fn wendland_c2(r: f64) -> f64 {
    if r >= 1.0 {
        0.0
    } else {
        let s = 1.0 - r;
        let s2 = s * s;
        s2 * s2 * (4.0 * r + 1.0)
    }
}

/// `k(x, y)` for a point-level kernel.
pub fn eval_kernel(k: &Kernel, x: &Point, y: &Point) -> Result<f64> {
    k.require_point_level()?;
    x.check_dim(y)?;
    Ok(k.eval_unchecked(x, y))
}

fn common_dim(pts: &[Point]) -> Result<usize> {
    let first = pts
        .first()
        .ok_or_else(|| Error::input("point list must be nonempty"))?;
    for p in pts {
        first.check_dim(p)?;
    }
    Ok(first.dim())
}

/// Gram matrix `K[i][j] = k(pts[i], pts[j])`. Entries are computed once per
/// unordered pair so the result is exactly symmetric.
pub fn gram_matrix(k: &Kernel, pts: &[Point]) -> Result<DMatrix<f64>> {
    k.require_point_level()?;
    common_dim(pts)?;
    Ok(gram_unchecked(k, pts))
}

pub(crate) fn gram_unchecked(k: &Kernel, pts: &[Point]) -> DMatrix<f64> {
    let n = pts.len();
    let mut data = vec![0.0; n * n];
    // column-major: column j holds k(x_i, x_j) for all i
    data.par_chunks_mut(n).enumerate().for_each(|(j, col)| {
        for (i, v) in col.iter_mut().enumerate() {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            *v = k.eval_unchecked(&pts[a], &pts[b]);
        }
    });
    DMatrix::from_vec(n, n, data)
}

/// `max sqrt(k(x, x))` over the probe set.
pub fn sup_kernel_norm(k: &Kernel, probe: &[Point]) -> Result<f64> {
    k.require_point_level()?;
    if probe.is_empty() {
        return Err(Error::input("probe must be nonempty"));
    }
    Ok(probe
        .iter()
        .map(|x| k.eval_unchecked(x, x).sqrt())
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `max sqrt(k_σ(P, P))` over a probe set of measures.
pub fn sup_measure_kernel_norm(k: &Kernel, probe: &[EmpiricalMeasure]) -> Result<f64> {
    if probe.is_empty() {
        return Err(Error::input("probe must be nonempty"));
    }
    let mut best = f64::NEG_INFINITY;
    for p in probe {
        best = best.max(eval_measure_kernel(k, p, p)?.sqrt());
    }
    Ok(best)
}

static MMD_CLAMPS: AtomicU64 = AtomicU64::new(0);

/// Number of times a negative MMD² from roundoff has been clamped to zero
/// in this process.
pub fn mmd_clamp_count() -> u64 {
    MMD_CLAMPS.load(AtomicOrdering::Relaxed)
}

fn cross_term(base: &Kernel, p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> f64 {
    let mut acc = 0.0;
    for (x, w) in p.atoms.iter().zip(&p.weights) {
        let mut row = 0.0;
        for (y, v) in q.atoms.iter().zip(&q.weights) {
            row += v * base.eval_unchecked(x, y);
        }
        acc += w * row;
    }
    acc
}

/// Squared RKHS distance between the kernel mean embeddings of `p` and `q`.
///
/// The arguments are put in a canonical order before summing, so the result
/// is bitwise symmetric in `(p, q)`.
pub fn mmd_squared(base: &Kernel, p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> Result<f64> {
    base.require_point_level()?;
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let (p, q) = if q.total_cmp(p).is_lt() { (q, p) } else { (p, q) };
    let pp = cross_term(base, p, p);
    let qq = cross_term(base, q, q);
    let pq = cross_term(base, p, q);
    let raw = pp + qq - 2.0 * pq;
    if raw < 0.0 {
        debug_assert!(raw > -1e-8, "MMD² = {raw} is too negative to be roundoff");
        MMD_CLAMPS.fetch_add(1, AtomicOrdering::Relaxed);
        return Ok(0.0);
    }
    Ok(raw)
}

/// `k_σ(P, Q) = exp(-MMD²(P, Q) / γ²)`.
pub fn eval_measure_kernel(k: &Kernel, p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> Result<f64> {
    match k {
        Kernel::MeasureGaussian { base, gamma } => {
            let mmd2 = mmd_squared(base, p, q)?;
            Ok((-mmd2 / (gamma * gamma)).exp())
        }
        _ => Err(Error::Variant(
            "eval_measure_kernel needs a MeasureGaussian kernel".into(),
        )),
    }
}

/// Gram matrix of the measure kernel over a list of measures.
pub fn measure_gram_matrix(k: &Kernel, measures: &[EmpiricalMeasure]) -> Result<DMatrix<f64>> {
    let n = measures.len();
    if n == 0 {
        return Err(Error::input("measure list must be nonempty"));
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = eval_measure_kernel(k, &measures[i], &measures[j])?;
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}
