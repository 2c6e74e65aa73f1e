//! Gram matrices, spectra and injectivity checks for the point kernels.

use denselab::kernels::{gram_matrix, sup_kernel_norm, Kernel, Point};
use denselab::linalg::{max_abs_entry, min_eigenvalue};
use denselab::rkhs::injectivity_probe;
use denselab::Result;
use rand::{Rng, SeedableRng};

fn main() -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let pts: Vec<Point> = (0..150)
        .map(|_| Point::new((0..3).map(|_| rng.random_range(0.0..4.0)).collect()))
        .collect::<Result<_>>()?;

    println!("{:<36} {:>12} {:>12} {:>10} {:>10}", "kernel", "lambda_min", "max entry", "sup norm", "certified");
    for k in [
        Kernel::gaussian(0.5)?,
        Kernel::gaussian(2.0)?,
        Kernel::wendland(1.0)?,
        Kernel::wendland(3.0)?,
    ] {
        let g = gram_matrix(&k, &pts)?;
        let cert = injectivity_probe(&k, &pts)?;
        println!(
            "{:<36} {:>12.3e} {:>12.3} {:>10.3} {:>10}",
            format!("{k:?}"),
            min_eigenvalue(&g),
            max_abs_entry(&g),
            sup_kernel_norm(&k, &pts)?,
            cert.certified()
        );
    }

    // wide Gaussians on clustered points are numerically singular
    let close: Vec<Point> = (0..100).map(|i| Point::scalar(i as f64 / 99.0)).collect::<Result<_>>()?;
    let cert = injectivity_probe(&Kernel::gaussian(0.2)?, &close)?;
    println!(
        "\n100 points in [0,1], gamma = 0.2: lambda_min = {:.3e}, threshold = {:.3e}, certified = {}",
        cert.min_eigenvalue,
        cert.threshold,
        cert.certified()
    );

    let mut dup = pts[..5].to_vec();
    dup.push(pts[0].clone());
    println!("duplicate points: {}", injectivity_probe(&Kernel::gaussian(1.0)?, &dup).unwrap_err());
    Ok(())
}
