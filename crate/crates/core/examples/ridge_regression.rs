//! Kernel ridge regression and its optimality residual.

use denselab::erm::{fit_kernel_ridge, ridge_residual, Dataset};
use denselab::kernels::{Kernel, Point};
use denselab::rkhs::rkhs_norm;
use denselab::{RealFunction, Result};
use rand::{Rng, SeedableRng};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let n = 200;
    let xs: Vec<Point> = (0..n).map(|_| Point::scalar(rng.random())).collect::<Result<_>>()?;
    let truth = |x: f64| (2.0 * std::f64::consts::PI * x).sin();
    let ys: Vec<f64> = xs.iter().map(|p| truth(p.coords()[0]) + 0.2 * (rng.random::<f64>() - 0.5)).collect();
    let data = Dataset::new(xs, ys)?;
    let k = Kernel::gaussian(0.2)?;

    let grid: Vec<Point> = (0..=100).map(|i| Point::scalar(i as f64 / 100.0)).collect::<Result<_>>()?;
    println!("{:>8} {:>12} {:>10} {:>12}", "lambda", "residual", "||f||_H", "max error");
    for lambda in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
        let f = fit_kernel_ridge(&data, &k, lambda)?;
        let err = grid
            .iter()
            .map(|x| Ok((f.eval(x)? - truth(x.coords()[0])).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!(
            "{lambda:>8.0e} {:>12.3e} {:>10.3} {:>12.4}",
            ridge_residual(&data, &f, lambda)?,
            rkhs_norm(&f),
            err
        );
    }
    Ok(())
}
