//! Kernel quantile regression with the pinball loss.

use denselab::erm::{fit_lipschitz_erm, Dataset, FitConfig, LossFunction};
use denselab::kernels::{Kernel, Point};
use denselab::{RealFunction, Result};
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let noise = Exp::new(2.0).unwrap();
    let n = 150;
    let xs: Vec<Point> = (0..n).map(|_| Point::scalar(rng.random())).collect::<Result<_>>()?;
    let ys: Vec<f64> = xs
        .iter()
        .map(|p| (3.0 * p.coords()[0]).sin() + noise.sample(&mut rng))
        .collect();
    let data = Dataset::new(xs, ys)?;
    let k = Kernel::gaussian(0.25)?;
    let cfg = FitConfig {
        lambda: 1e-4,
        max_iters: 20_000,
        step_size0: 1.0,
        ..FitConfig::default()
    };

    println!("{:>5} {:>10} {:>10} {:>10}", "tau", "objective", "coverage", "iters");
    for tau in [0.1, 0.5, 0.9] {
        let fit = fit_lipschitz_erm(&data, &k, &LossFunction::pinball(tau)?, &cfg)?;
        let below = data
            .inputs()
            .iter()
            .zip(data.outputs())
            .filter(|(x, y)| fit.function.eval(x).map(|v| **y <= v).unwrap_or(false))
            .count();
        println!(
            "{tau:>5} {:>10.5} {:>10.3} {:>10}",
            fit.objective,
            below as f64 / n as f64,
            fit.iterations
        );
    }
    Ok(())
}
