use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::target::Domain;
use crate::error::{Error, Result};
use crate::kernels::Point;

/// Input distribution `P_X` on a domain box.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerKind {
    Uniform,
    /// Independent normal coordinates, each conditioned on its domain side.
    TruncatedGaussian { mean: f64, std: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    pub domain: Domain,
    pub kind: SamplerKind,
}

const MAX_REJECTIONS: usize = 10_000;

impl Sampler {
    pub fn uniform(domain: Domain) -> Self {
        Sampler {
            domain,
            kind: SamplerKind::Uniform,
        }
    }

    pub fn truncated_gaussian(domain: Domain, mean: f64, std: f64) -> Result<Self> {
        if !(mean.is_finite() && std.is_finite() && std > 0.0) {
            return Err(Error::input(format!(
                "truncated gaussian needs finite mean and std > 0, got ({mean}, {std})"
            )));
        }
        Ok(Sampler {
            domain,
            kind: SamplerKind::TruncatedGaussian { mean, std },
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<Point>> {
        let d = self.domain.dim();
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let mut coords = Vec::with_capacity(d);
            for (lo, hi) in self.domain.lo().iter().zip(self.domain.hi()) {
                coords.push(self.sample_coord(*lo, *hi, rng)?);
            }
            pts.push(Point::new(coords)?);
        }
        Ok(pts)
    }

    fn sample_coord<R: Rng + ?Sized>(&self, lo: f64, hi: f64, rng: &mut R) -> Result<f64> {
        match &self.kind {
            SamplerKind::Uniform => Ok(rng.random_range(lo..=hi)),
            SamplerKind::TruncatedGaussian { mean, std } => {
                let normal = Normal::new(*mean, *std)
                    .map_err(|e| Error::input(format!("normal distribution: {e}")))?;
                for _ in 0..MAX_REJECTIONS {
                    let v = normal.sample(rng);
                    if lo <= v && v <= hi {
                        return Ok(v);
                    }
                }
                Err(Error::numerical(format!(
                    "truncated gaussian N({mean}, {std}²) has too little mass on [{lo}, {hi}]"
                )))
            }
        }
    }
}

/// What a random stream is used for inside a study cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Training = 1,
    Evaluation = 2,
}

/// Independent RNG for `(seed, n, replicate, purpose)`.
///
/// All streams share the ChaCha key derived from `seed` and differ in the
/// 64-bit stream id `n << 24 | replicate << 8 | purpose`, so training and
/// evaluation draws never overlap.
pub fn cell_rng(seed: u64, n: usize, replicate: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(n, replicate, purpose));
    rng
}

pub(crate) fn stream_id(n: usize, replicate: usize, purpose: Purpose) -> u64 {
    debug_assert!(replicate < (1 << 16) && (n as u64) < (1 << 40));
    ((n as u64) << 24) | ((replicate as u64) << 8) | purpose as u64
}
