//! Pairwise ranking with the squared ranking loss. The loss only sees
//! differences, so the fit recovers the target up to a constant.

use denselab::erm::{fit_pairwise, pairwise_objective, Dataset, FitConfig, PairwiseLoss};
use denselab::kernels::{Kernel, Point};
use denselab::{RealFunction, Result};

fn main() -> Result<()> {
    let xs: Vec<Point> = (0..40).map(|i| Point::scalar(i as f64 / 39.0)).collect::<Result<_>>()?;
    let ys: Vec<f64> = xs.iter().map(|p| 5.0 + 2.0 * p.coords()[0].powi(2)).collect();
    let data = Dataset::new(xs, ys)?;
    let k = Kernel::gaussian(0.4)?;
    let cfg = FitConfig {
        lambda: 1e-5,
        max_iters: 20_000,
        tol: 1e-9,
        ..FitConfig::default()
    };
    let fit = fit_pairwise(&data, &k, &PairwiseLoss::RankingSquared, &cfg)?;
    println!(
        "objective {:.3e} after {} iterations (converged: {}), check {:.3e}",
        fit.objective,
        fit.iterations,
        fit.converged,
        pairwise_objective(&data, &fit.function, &PairwiseLoss::RankingSquared, cfg.lambda)?
    );
    let offset = data.outputs()[0] - fit.function.eval(&data.inputs()[0])?;
    println!("{:>6} {:>8} {:>14}", "x", "y", "f(x) + offset");
    for i in (0..40).step_by(8) {
        let x = &data.inputs()[i];
        println!("{:>6.3} {:>8.4} {:>14.4}", x.coords()[0], data.outputs()[i], fit.function.eval(x)? + offset);
    }
    Ok(())
}
