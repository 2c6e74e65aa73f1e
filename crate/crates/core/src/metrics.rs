//! Metrics for convergence in probability on sampled functions.
//!
//! Both metrics act on a [`PairedSample`]: the distances `d(f₁(ωⱼ), f₂(ωⱼ))`
//! at common sample points together with the probability weights of those
//! points. The integral defining `d_ψ` becomes the weighted mean
//! `Σⱼ wⱼ ψ(dⱼ)`, and the Ky Fan metric becomes the smallest `ε` for which
//! the weighted exceedance mass `Σ_{dⱼ > ε} wⱼ` is at most `ε`.

use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::kernels::{check_weights, Point};

/// A bounded transform `ψ: [0, ∞) → [0, 1]` defining a `d_ψ` metric.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiFunction {
    /// `x / (1 + x)`
    Psi1,
    /// `min{1, x}`
    Psi2,
    /// Piecewise-linear table. Beyond the last abscissa the last value is
    /// held constant.
    Custom { xs: Vec<f64>, ys: Vec<f64> },
}

impl PsiFunction {
    /// Tabulated ψ. Abscissae must start at 0 and increase strictly.
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::input(
                "tabulated psi needs at least two (x, y) pairs of equal length",
            ));
        }
        if xs[0] != 0.0 {
            return Err(Error::input("tabulated psi must start at x = 0"));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::input("tabulated psi values must be finite"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("tabulated psi abscissae must increase strictly"));
        }
        Ok(PsiFunction::Custom { xs, ys })
    }

    /// Value before the `[0, 1]` clamp that [`psi_apply`] performs. Only
    /// differs from `psi_apply` for tables that leave the unit interval.
    fn raw(&self, x: f64) -> f64 {
        match self {
            PsiFunction::Psi1 => x / (1.0 + x),
            PsiFunction::Psi2 => x.min(1.0),
            PsiFunction::Custom { xs, ys } => interpolate(xs, ys, x),
        }
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    // first index with xs[i] > x; x >= 0 = xs[0] so i >= 1
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// `ψ(x)` for `x >= 0`.
pub fn psi_apply(psi: &PsiFunction, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::input(format!("psi argument must be >= 0, got {x}")));
    }
    let v = psi.raw(x);
    Ok(match psi {
        PsiFunction::Custom { .. } => v.clamp(0.0, 1.0),
        _ => v,
    })
}

/// A single failed ψ axiom found on the validation grid.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiViolation {
    NonzeroAtZero { value: f64 },
    NotPositive { x: f64, value: f64 },
    OutOfRange { x: f64, value: f64 },
    NotMonotone { x_lo: f64, x_hi: f64, value_lo: f64, value_hi: f64 },
    NotSubadditive { a: f64, b: f64, value_sum: f64, bound: f64 },
}

/// Result of [`validate_psi`]: at most one entry (the first found) per axiom.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PsiValidation {
    pub violations: Vec<PsiViolation>,
}

impl PsiValidation {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails_subadditivity(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, PsiViolation::NotSubadditive { .. }))
    }

    pub fn fails_range(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, PsiViolation::OutOfRange { .. }))
    }
}

pub const DEFAULT_PSI_GRID_MAX: f64 = 10.0;
pub const DEFAULT_PSI_GRID_N: usize = 1000;

const SUBADDITIVE_SLACK: f64 = 1e-12;

/// Grid check of the ψ axioms: `ψ(0) = 0`, positivity, range in `[0, 1]`,
/// monotonicity and subadditivity over all grid pairs. Custom tables are
/// checked before clamping, so a table leaving `[0, 1]` is reported.
pub fn validate_psi(psi: &PsiFunction, grid_max: f64, grid_n: usize) -> PsiValidation {
    let mut report = PsiValidation::default();
    if grid_n < 2 || !(grid_max.is_finite() && grid_max > 0.0) {
        // degenerate grid: nothing beyond the origin can be checked
        let v = psi.raw(0.0);
        if v != 0.0 {
            report.violations.push(PsiViolation::NonzeroAtZero { value: v });
        }
        return report;
    }
    let step = grid_max / (grid_n - 1) as f64;
    let grid: Vec<f64> = (0..grid_n).map(|i| i as f64 * step).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| psi.raw(x)).collect();

    if vals[0] != 0.0 {
        report.violations.push(PsiViolation::NonzeroAtZero { value: vals[0] });
    }
    if let Some(i) = (1..grid_n).find(|&i| vals[i] <= 0.0) {
        report.violations.push(PsiViolation::NotPositive {
            x: grid[i],
            value: vals[i],
        });
    }
    if let Some(i) = (0..grid_n).find(|&i| !(0.0..=1.0).contains(&vals[i])) {
        report.violations.push(PsiViolation::OutOfRange {
            x: grid[i],
            value: vals[i],
        });
    }
    if let Some(i) = (1..grid_n).find(|&i| vals[i] < vals[i - 1]) {
        report.violations.push(PsiViolation::NotMonotone {
            x_lo: grid[i - 1],
            x_hi: grid[i],
            value_lo: vals[i - 1],
            value_hi: vals[i],
        });
    }
    'outer: for i in 0..grid_n {
        for j in i..grid_n {
            let sum = psi.raw(grid[i] + grid[j]);
            let bound = vals[i] + vals[j];
            if sum > bound + SUBADDITIVE_SLACK {
                report.violations.push(PsiViolation::NotSubadditive {
                    a: grid[i],
                    b: grid[j],
                    value_sum: sum,
                    bound,
                });
                break 'outer;
            }
        }
    }
    report
}

/// Distances between two functions at shared sample points, with weights.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample {
    distances: Vec<f64>,
    weights: Vec<f64>,
}

impl PairedSample {
    pub fn new(distances: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if distances.is_empty() || distances.len() != weights.len() {
            return Err(Error::input(format!(
                "paired sample needs equal nonzero lengths, got {} distances and {} weights",
                distances.len(),
                weights.len()
            )));
        }
        check_distances(&distances)?;
        check_weights(&weights)?;
        Ok(PairedSample { distances, weights })
    }

    /// Equal weights `1/m`.
    pub fn uniform(distances: Vec<f64>) -> Result<Self> {
        if distances.is_empty() {
            return Err(Error::input("paired sample must be nonempty"));
        }
        check_distances(&distances)?;
        let w = 1.0 / distances.len() as f64;
        let weights = vec![w; distances.len()];
        Ok(PairedSample { distances, weights })
    }

    /// Euclidean distances between vector-valued evaluations.
    pub fn from_vectors(a: &[Vec<f64>], b: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::input("vector samples differ in length"));
        }
        let mut distances = Vec::with_capacity(a.len());
        for (u, v) in a.iter().zip(b) {
            if u.len() != v.len() {
                return Err(Error::DimensionMismatch {
                    expected: u.len(),
                    got: v.len(),
                });
            }
            let sq: f64 = u.iter().zip(v).map(|(x, y)| (x - y) * (x - y)).sum();
            distances.push(sq.sqrt());
        }
        PairedSample::new(distances, weights)
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Weighted mass of `{d > eps}`.
    pub fn exceedance_mass(&self, eps: f64) -> f64 {
        self.distances
            .iter()
            .zip(&self.weights)
            .filter(|(d, _)| **d > eps)
            .map(|(_, w)| w)
            .sum()
    }
}

fn check_distances(distances: &[f64]) -> Result<()> {
    match distances.iter().find(|d| !d.is_finite() || **d < 0.0) {
        Some(d) => Err(Error::input(format!(
            "distance {d} is negative or not finite"
        ))),
        None => Ok(()),
    }
}

/// `d_ψ = Σⱼ wⱼ ψ(dⱼ)`.
pub fn d_psi(psi: &PsiFunction, s: &PairedSample) -> Result<f64> {
    let mut acc = 0.0;
    for (d, w) in s.distances.iter().zip(&s.weights) {
        acc += w * psi_apply(psi, *d)?;
    }
    Ok(acc)
}

/// Ky Fan metric `inf{ε >= 0 : P(d > ε) <= ε}` on the sample.
///
/// The exceedance mass is a right-continuous step function of `ε` that only
/// changes at the sample distances. Scanning the distinct distances from the
/// largest down, the level below distance `v_k` is the interval
/// `[v_{k+1}, v_k)` on which the mass is the cumulative weight `m_k` of all
/// distances `>= v_k`; its smallest feasible point is `max(v_{k+1}, m_k)`,
/// provided that is `< v_k`. The feasible set is an up-ray, so the scan stops
/// at the first infeasible level.
pub fn ky_fan(s: &PairedSample) -> f64 {
    let mut pairs: Vec<(f64, f64)> = s
        .distances
        .iter()
        .zip(&s.weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(d, w)| (*d, *w))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let Some(&(top, _)) = pairs.first() else {
        return 0.0;
    };
    if top == 0.0 {
        return 0.0;
    }
    // eps >= top has zero exceedance mass
    let mut best = top;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let level = pairs[i].0;
        if level == 0.0 {
            break;
        }
        while i < pairs.len() && pairs[i].0 == level {
            mass += pairs[i].1;
            i += 1;
        }
        let lower = pairs.get(i).map_or(0.0, |p| p.0);
        let candidate = lower.max(mass);
        if candidate < level {
            best = candidate;
        } else {
            break;
        }
    }
    best
}

/// Pointwise distances `|f(x) - g(x)|` at `pts`.
pub fn paired_sample<F, G>(f: &F, g: &G, pts: &[Point], weights: Vec<f64>) -> Result<PairedSample>
where
    F: RealFunction + ?Sized,
    G: RealFunction + ?Sized,
{
    let mut distances = Vec::with_capacity(pts.len());
    for x in pts {
        distances.push((f.eval(x)? - g.eval(x)?).abs());
    }
    PairedSample::new(distances, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::points_1d;

    #[test]
    fn psi_values() {
        assert_eq!(psi_apply(&PsiFunction::Psi1, 0.0).unwrap(), 0.0);
        assert_eq!(psi_apply(&PsiFunction::Psi1, 1.0).unwrap(), 0.5);
        assert_eq!(psi_apply(&PsiFunction::Psi2, 2.0).unwrap(), 1.0);
        assert_eq!(psi_apply(&PsiFunction::Psi2, 0.25).unwrap(), 0.25);
        assert!(psi_apply(&PsiFunction::Psi1, -0.1).is_err());
        assert!(psi_apply(&PsiFunction::Psi2, f64::NAN).is_err());
    }

    #[test]
    fn custom_table_interpolates_and_clamps() {
        let psi = PsiFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 4.0]).unwrap();
        assert_eq!(psi_apply(&psi, 0.5).unwrap(), 0.5);
        assert_eq!(psi_apply(&psi, 1.5).unwrap(), 1.0);
        assert_eq!(psi_apply(&psi, 7.0).unwrap(), 1.0);
        assert!(PsiFunction::tabulated(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PsiFunction::tabulated(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(PsiFunction::tabulated(vec![0.0], vec![0.0]).is_err());
    }

    #[test]
    fn validate_standard_psis() {
        assert!(validate_psi(&PsiFunction::Psi1, 10.0, 100).passed());
        assert!(validate_psi(&PsiFunction::Psi2, 10.0, 100).passed());
    }

    #[test]
    fn validate_square_table_fails() {
        let xs: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let psi = PsiFunction::tabulated(xs, ys).unwrap();
        let rep = validate_psi(&psi, 2.0, 21);
        assert!(!rep.passed());
        assert!(rep.fails_subadditivity());
        assert!(rep.fails_range());
    }

    #[test]
    fn validate_flags_nonzero_origin_and_decrease() {
        let psi = PsiFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.2, 0.9, 0.5]).unwrap();
        let rep = validate_psi(&psi, 2.0, 5);
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, PsiViolation::NonzeroAtZero { .. })));
        assert!(rep
            .violations
            .iter()
            .any(|v| matches!(v, PsiViolation::NotMonotone { .. })));
    }

    #[test]
    fn d_psi_examples() {
        let zero = PairedSample::uniform(vec![0.0; 7]).unwrap();
        assert_eq!(d_psi(&PsiFunction::Psi1, &zero).unwrap(), 0.0);
        assert_eq!(d_psi(&PsiFunction::Psi2, &zero).unwrap(), 0.0);

        let s = PairedSample::new(vec![0.3; 4], vec![0.25; 4]).unwrap();
        assert!((d_psi(&PsiFunction::Psi2, &s).unwrap() - 0.3).abs() < 1e-15);

        let s = PairedSample::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(d_psi(&PsiFunction::Psi1, &s).unwrap(), 0.25);
    }

    #[test]
    fn ky_fan_examples() {
        assert_eq!(ky_fan(&PairedSample::uniform(vec![0.0; 3]).unwrap()), 0.0);
        let s = PairedSample::uniform(vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(ky_fan(&s), 0.5);
        let s = PairedSample::new(vec![1.0; 3], vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(ky_fan(&s), 1.0);
    }

    #[test]
    fn ky_fan_small_distances_bound_result() {
        // every distance is 0.1: mass 1 > eps on [0, 0.1), so eps = 0.1
        let s = PairedSample::uniform(vec![0.1; 10]).unwrap();
        assert_eq!(ky_fan(&s), 0.1);
        // large distance on a small set: eps = mass
        let mut d = vec![0.0; 100];
        d[0] = 5.0;
        assert_eq!(ky_fan(&PairedSample::uniform(d).unwrap()), 0.01);
    }

    #[test]
    fn ky_fan_ignores_zero_weight_points() {
        let s = PairedSample::new(vec![9.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(ky_fan(&s), 0.0);
    }

    #[test]
    fn sample_validation() {
        assert!(PairedSample::new(vec![-1.0], vec![1.0]).is_err());
        assert!(PairedSample::new(vec![1.0, 2.0], vec![1.0]).is_err());
        assert!(PairedSample::new(vec![1.0], vec![0.5]).is_err());
        assert!(PairedSample::uniform(vec![]).is_err());
        assert!(PairedSample::uniform(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn paired_sample_examples() {
        let pts = points_1d(&[0.0, 1.0]).unwrap();
        let id = |x: &Point| x.coords()[0];
        let zero = |_: &Point| 0.0;
        let s = paired_sample(&id, &zero, &pts, vec![0.5, 0.5]).unwrap();
        assert_eq!(s.distances(), &[0.0, 1.0]);
        let s = paired_sample(&id, &id, &pts, vec![0.5, 0.5]).unwrap();
        assert_eq!(s.distances(), &[0.0, 0.0]);

        let m = 1000;
        let grid: Vec<f64> = (0..m).map(|i| i as f64 / (m - 1) as f64).collect();
        let pts = points_1d(&grid).unwrap();
        let ind = |x: &Point| if x.coords()[0] <= 0.5 { 1.0 } else { 0.0 };
        let s = paired_sample(&ind, &zero, &pts, vec![1.0 / m as f64; m]).unwrap();
        let ones = s.distances().iter().filter(|d| **d == 1.0).count();
        // i/999 <= 0.5  <=>  i <= 499
        assert_eq!(ones, 500);
    }

    #[test]
    fn vector_distances() {
        let a = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let b = vec![vec![3.0, 4.0], vec![1.0, 1.0]];
        let s = PairedSample::from_vectors(&a, &b, vec![0.5, 0.5]).unwrap();
        assert_eq!(s.distances(), &[5.0, 0.0]);
    }
}
