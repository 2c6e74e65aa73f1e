use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::sampler::{cell_rng, Purpose, Sampler, SamplerKind};
use super::target::{Domain, TargetFunction};
use crate::erm::{fit_kernel_ridge, Dataset};
use crate::error::{Error, Result};
use crate::function::RealFunction;
use crate::kernels::{Kernel, Point};
use crate::metrics::{d_psi, ky_fan, PairedSample, PsiFunction};
use crate::rkhs::RkhsFunction;

/// Power-law schedule `scale · n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub scale: f64,
    pub exponent: f64,
}

impl Schedule {
    pub fn value(&self, n: usize) -> f64 {
        self.scale * (n as f64).powf(self.exponent)
    }

    pub fn constant(value: f64) -> Self {
        Schedule {
            scale: value,
            exponent: 0.0,
        }
    }

    /// `γ(n) = n^(-1/(d+2))`.
    pub fn default_bandwidth(dim: usize) -> Self {
        Schedule {
            scale: 1.0,
            exponent: -1.0 / (dim as f64 + 2.0),
        }
    }

    /// `λ(n) = 1/n`.
    pub fn default_lambda() -> Self {
        Schedule {
            scale: 1.0,
            exponent: -1.0,
        }
    }
}

/// Kernel family whose width follows the bandwidth schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
    Wendland,
}

impl KernelFamily {
    pub fn with_width(&self, width: f64) -> Result<Kernel> {
        match self {
            KernelFamily::Gaussian => Kernel::gaussian(width),
            KernelFamily::Wendland => Kernel::wendland(width),
        }
    }
}

pub const DEFAULT_SAMPLE_SIZES: [usize; 4] = [64, 256, 1024, 4096];
pub const DEFAULT_GRID_RESOLUTION: usize = 10_001;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub target: TargetFunction,
    pub kernel_family: KernelFamily,
    pub bandwidth: Schedule,
    pub lambda: Schedule,
    pub sample_sizes: Vec<usize>,
    pub psi: PsiFunction,
    /// `None` means `10 · max(sample_sizes)`.
    pub eval_sample_size: Option<usize>,
    pub grid_resolution: usize,
    pub seed: u64,
    pub replicates: usize,
    pub sampler: SamplerKind,
    /// Standard deviation of additive Gaussian label noise (0 = noise free).
    pub noise_std: f64,
    /// Record fit wall time. Off by default because timings make reports
    /// irreproducible.
    pub record_wall_time: bool,
}

impl StudyConfig {
    /// Defaults: Gaussian kernel, `γ(n) = n^(-1/(d+2))`, `λ(n) = 1/n`,
    /// sizes 64..4096, `ψ₂`, uniform `P_X`, one replicate, seed 0.
    pub fn new(target: TargetFunction) -> Self {
        let dim = target.domain.dim();
        StudyConfig {
            target,
            kernel_family: KernelFamily::Gaussian,
            bandwidth: Schedule::default_bandwidth(dim),
            lambda: Schedule::default_lambda(),
            sample_sizes: DEFAULT_SAMPLE_SIZES.to_vec(),
            psi: PsiFunction::Psi2,
            eval_sample_size: None,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            seed: 0,
            replicates: 1,
            sampler: SamplerKind::Uniform,
            noise_std: 0.0,
            record_wall_time: false,
        }
    }

    pub fn resolved_eval_sample_size(&self) -> usize {
        self.eval_sample_size
            .unwrap_or_else(|| 10 * self.sample_sizes.iter().copied().max().unwrap_or(1))
    }

    pub fn sampler(&self) -> Sampler {
        Sampler {
            domain: self.target.domain.clone(),
            kind: self.sampler.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.target.validate()?;
        if self.sample_sizes.is_empty() {
            return Err(Error::input("sample_sizes must be nonempty"));
        }
        if self.sample_sizes[0] == 0 || self.sample_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::input("sample_sizes must be positive and strictly increasing"));
        }
        if self.replicates == 0 {
            return Err(Error::input("replicates must be >= 1"));
        }
        if self.grid_resolution < 2 {
            return Err(Error::input("grid_resolution must be >= 2"));
        }
        if self.eval_sample_size == Some(0) {
            return Err(Error::input("eval_sample_size must be >= 1"));
        }
        for s in [&self.bandwidth, &self.lambda] {
            if !(s.scale.is_finite() && s.scale > 0.0 && s.exponent.is_finite()) {
                return Err(Error::input(format!(
                    "schedule scale must be > 0 and exponent finite, got {s:?}"
                )));
            }
        }
        if self.lambda.exponent > 0.0 {
            return Err(Error::input("lambda schedule must be non-increasing in n"));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::input("noise_std must be >= 0"));
        }
        if let SamplerKind::TruncatedGaussian { mean, std } = self.sampler {
            Sampler::truncated_gaussian(self.target.domain.clone(), mean, std)?;
        }
        Ok(())
    }
}

/// Metrics of one `(n, replicate)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    pub d_psi: f64,
    pub ky_fan: f64,
    pub sup_gap: f64,
    pub l1_gap: f64,
    pub risk_gap: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellRecord {
    pub n: usize,
    pub replicate: usize,
    /// Failure message if any stage of the cell failed.
    pub outcome: std::result::Result<CellMetrics, String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    /// Ordered by `(n, replicate)`.
    pub cells: Vec<CellRecord>,
}

impl ConvergenceReport {
    /// Some cell failed and is missing its metrics.
    pub fn is_partial(&self) -> bool {
        self.cells.iter().any(|c| c.outcome.is_err())
    }

    /// Successful cells as `(n, replicate, metrics)`.
    pub fn successful(&self) -> impl Iterator<Item = (usize, usize, &CellMetrics)> {
        self.cells
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok().map(|m| (c.n, c.replicate, m)))
    }

    pub fn replicates(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.cells.iter().map(|c| c.replicate).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    pub fn sample_sizes(&self) -> Vec<usize> {
        let mut n: Vec<usize> = self.cells.iter().map(|c| c.n).collect();
        n.sort_unstable();
        n.dedup();
        n
    }

    pub fn cell(&self, n: usize, replicate: usize) -> Option<&CellMetrics> {
        self.cells
            .iter()
            .find(|c| c.n == n && c.replicate == replicate)
            .and_then(|c| c.outcome.as_ref().ok())
    }
}

/// Draw `n` inputs, label them by `target` and fit kernel ridge regression.
pub fn fit_approximant<F: RealFunction + ?Sized>(
    target: &F,
    n: usize,
    k: &Kernel,
    lambda: f64,
    sampler: &Sampler,
    seed: u64,
) -> Result<RkhsFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fit_on_sample(target, n, k, lambda, sampler, 0.0, &mut rng)
}

fn noisy_labels<F, R>(target: &F, pts: &[Point], noise_std: f64, rng: &mut R) -> Result<Vec<f64>>
where
    F: RealFunction + ?Sized,
    R: Rng + ?Sized,
{
    let clean: Vec<f64> = pts.iter().map(|x| target.eval(x)).collect::<Result<_>>()?;
    if noise_std == 0.0 {
        return Ok(clean);
    }
    let normal = Normal::new(0.0, noise_std).map_err(|e| Error::input(e.to_string()))?;
    Ok(clean.into_iter().map(|v| v + normal.sample(rng)).collect())
}

fn fit_on_sample<F, R>(
    target: &F,
    n: usize,
    k: &Kernel,
    lambda: f64,
    sampler: &Sampler,
    noise_std: f64,
    rng: &mut R,
) -> Result<RkhsFunction>
where
    F: RealFunction + ?Sized,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::input("n must be >= 1"));
    }
    let xs = sampler.sample(n, rng)?;
    let ys = noisy_labels(target, &xs, noise_std, rng)?;
    fit_kernel_ridge(&Dataset::new(xs, ys)?, k, lambda)
}

/// Grid along the first coordinate (others at the domain midpoint), with
/// extra points at each jump location and one grid spacing either side.
pub fn sup_gap_grid(domain: &Domain, grid_resolution: usize, jumps: &[f64]) -> Result<Vec<Point>> {
    if grid_resolution < 2 {
        return Err(Error::input("grid_resolution must be >= 2"));
    }
    let (lo, hi) = (domain.lo()[0], domain.hi()[0]);
    let h = (hi - lo) / (grid_resolution - 1) as f64;
    let mut xs: Vec<f64> = (0..grid_resolution).map(|i| lo + i as f64 * h).collect();
    xs[grid_resolution - 1] = hi;
    for &j in jumps {
        for v in [j - h, j, j + h] {
            if lo <= v && v <= hi {
                xs.push(v);
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mid = domain.midpoint();
    xs.into_iter()
        .map(|x| {
            let mut c = mid.clone();
            c[0] = x;
            Point::new(c)
        })
        .collect()
}

/// `max |f - g|` over the jump-straddling grid. A lower bound on the true
/// sup-norm distance.
pub fn sup_gap_estimate<F, G>(
    f: &F,
    g: &G,
    domain: &Domain,
    grid_resolution: usize,
    jumps: &[f64],
) -> Result<f64>
where
    F: RealFunction + ?Sized,
    G: RealFunction + ?Sized,
{
    let grid = sup_gap_grid(domain, grid_resolution, jumps)?;
    let gaps: Vec<f64> = grid
        .par_iter()
        .map(|x| Ok((f.eval(x)? - g.eval(x)?).abs()))
        .collect::<Result<_>>()?;
    Ok(gaps.into_iter().fold(0.0, f64::max))
}

fn run_cell(cfg: &StudyConfig, n: usize, replicate: usize) -> Result<CellMetrics> {
    let sampler = cfg.sampler();
    let kernel = cfg.kernel_family.with_width(cfg.bandwidth.value(n))?;
    let lambda = cfg.lambda.value(n);

    let mut train_rng = cell_rng(cfg.seed, n, replicate, Purpose::Training);
    let start = Instant::now();
    let g = fit_on_sample(&cfg.target, n, &kernel, lambda, &sampler, cfg.noise_std, &mut train_rng)?;
    let wall_time_s = if cfg.record_wall_time {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };

    let m = cfg.resolved_eval_sample_size();
    let mut eval_rng = cell_rng(cfg.seed, n, replicate, Purpose::Evaluation);
    let eval_pts = sampler.sample(m, &mut eval_rng)?;
    let truth: Vec<f64> = eval_pts
        .iter()
        .map(|x| cfg.target.eval(x))
        .collect::<Result<_>>()?;
    let labels = noisy_labels(&cfg.target, &eval_pts, cfg.noise_std, &mut eval_rng)?;
    let pred = g.eval_many(&eval_pts)?;

    let distances: Vec<f64> = pred.iter().zip(&truth).map(|(p, t)| (p - t).abs()).collect();
    let mf = m as f64;
    let l1_gap = distances.iter().sum::<f64>() / mf;
    let sample = PairedSample::uniform(distances)?;
    let d_psi_value = d_psi(&cfg.psi, &sample)?;
    let ky_fan_value = ky_fan(&sample);

    // absolute-loss risks against the evaluation labels
    let risk_g = labels.iter().zip(&pred).map(|(y, p)| (y - p).abs()).sum::<f64>() / mf;
    let risk_f0 = labels.iter().zip(&truth).map(|(y, t)| (y - t).abs()).sum::<f64>() / mf;
    let risk_gap = (risk_g - risk_f0).abs();

    let jumps: Vec<f64> = cfg.target.jumps().into_iter().map(|j| j.0).collect();
    let sup_gap = sup_gap_estimate(&cfg.target, &g, &cfg.target.domain, cfg.grid_resolution, &jumps)?;

    let metrics = CellMetrics {
        d_psi: d_psi_value,
        ky_fan: ky_fan_value,
        sup_gap,
        l1_gap,
        risk_gap,
        wall_time_s,
    };
    let all = [d_psi_value, ky_fan_value, sup_gap, l1_gap, risk_gap, wall_time_s];
    if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::numerical(format!("non-finite cell metrics {metrics:?}")));
    }
    Ok(metrics)
}

/// Fit and evaluate every `(n, replicate)` cell. Cells run in parallel and
/// are independent; a failed cell is recorded and the rest still run. The
/// report is in `(n, replicate)` order and is a deterministic function of
/// the config when wall times are not recorded.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..cfg.replicates).map(move |r| (n, r)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(n, replicate)| CellRecord {
            n,
            replicate,
            outcome: run_cell(cfg, n, replicate).map_err(|e| e.to_string()),
        })
        .collect();
    Ok(ConvergenceReport { cells })
}

/// Outcome of [`risk_convergence_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskCheck {
    pub passed: bool,
    /// `min over cells of (L · l1_gap - risk_gap)`; `+inf` for an empty report.
    pub worst_margin: f64,
    pub cells_checked: usize,
}

pub const RISK_CHECK_SLACK: f64 = 1e-10;

/// Check `risk_gap <= L · l1_gap + 1e-10` in every successful cell.
pub fn risk_convergence_check(report: &ConvergenceReport, lipschitz_constant: f64) -> RiskCheck {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for (_, _, m) in report.successful() {
        worst = worst.min(lipschitz_constant * m.l1_gap - m.risk_gap);
        count += 1;
    }
    RiskCheck {
        passed: worst >= -RISK_CHECK_SLACK,
        worst_margin: worst,
        cells_checked: count,
    }
}
