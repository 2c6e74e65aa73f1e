//! Clipping a predictor to the output range never increases the risk, and
//! risk differences are bounded by the Lipschitz constant times the L1 gap.

use denselab::erm::{clip, empirical_risk, fit_kernel_ridge, Dataset, LossFunction};
use denselab::kernels::{Kernel, Point};
use denselab::{RealFunction, Result};
use rand::{Rng, SeedableRng};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let m = 1.0;
    let sign = |x: f64| if x < 0.5 { -m } else { m };
    let xs: Vec<Point> = (0..80).map(|_| Point::scalar(rng.random())).collect::<Result<_>>()?;
    let ys: Vec<f64> = xs.iter().map(|p| sign(p.coords()[0])).collect();
    let train = Dataset::new(xs, ys)?;
    // a weakly regularized narrow-kernel fit overshoots near the jump
    let f = fit_kernel_ridge(&train, &Kernel::gaussian(0.05)?, 1e-7)?;
    let clipped = clip(f.clone(), m)?;

    let xt: Vec<Point> = (0..2000).map(|_| Point::scalar(rng.random())).collect::<Result<_>>()?;
    let yt: Vec<f64> = xt.iter().map(|p| sign(p.coords()[0])).collect();
    let test = Dataset::new(xt.clone(), yt)?;

    for (name, loss) in [
        ("squared", LossFunction::squared(m)?),
        ("absolute", LossFunction::absolute()),
        ("pinball 0.7", LossFunction::pinball(0.7)?),
    ] {
        let raw = empirical_risk(&f, &test, &loss)?;
        let cl = empirical_risk(&clipped, &test, &loss)?;
        println!("{name:<12} raw risk {raw:.5}  clipped risk {cl:.5}");
    }

    let l1 = xt
        .iter()
        .map(|x| Ok((f.eval(x)? - clipped.eval(x)?).abs()))
        .sum::<Result<f64>>()?
        / xt.len() as f64;
    let loss = LossFunction::absolute();
    let gap = (empirical_risk(&f, &test, &loss)? - empirical_risk(&clipped, &test, &loss)?).abs();
    println!("absolute loss: risk gap {gap:.5} <= |L| * L1 gap = {:.5}", loss.lipschitz_constant() * l1);
    Ok(())
}
