//! The Gaussian-type kernel on empirical measures, `exp(-MMD²/γ²)`.

use denselab::kernels::{eval_measure_kernel, measure_gram_matrix, mmd_squared, EmpiricalMeasure, Kernel, Point};
use denselab::linalg::min_eigenvalue;
use denselab::Result;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

fn sample(mean: f64, n: usize, rng: &mut impl Rng) -> Result<EmpiricalMeasure> {
    let normal = Normal::new(mean, 1.0).unwrap();
    let atoms = (0..n).map(|_| Point::scalar(normal.sample(rng))).collect::<Result<_>>()?;
    EmpiricalMeasure::uniform(atoms)
}

fn main() -> Result<()> {
    let base = Kernel::gaussian(1.0)?;
    let k = Kernel::measure_gaussian(base.clone(), 1.0)?;

    let p = EmpiricalMeasure::dirac(Point::scalar(0.0)?);
    let q = EmpiricalMeasure::dirac(Point::scalar(1.0)?);
    let closed = 2.0 - 2.0 * (-1.0f64).exp();
    println!("two Diracs: MMD² = {:.15} (closed form {closed:.15})", mmd_squared(&base, &p, &q)?);
    println!("            k(P, Q) = {:.7}", eval_measure_kernel(&k, &p, &q)?);

    // MMD between samples of N(0,1) and N(shift,1) grows with the shift
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let reference = sample(0.0, 200, &mut rng)?;
    for shift in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let other = sample(shift, 200, &mut rng)?;
        println!(
            "shift {shift:4}: MMD² = {:.4}, k = {:.4}",
            mmd_squared(&base, &reference, &other)?,
            eval_measure_kernel(&k, &reference, &other)?
        );
    }

    let measures: Vec<EmpiricalMeasure> = (0..20)
        .map(|i| sample(i as f64 * 0.2, 30, &mut rng))
        .collect::<Result<_>>()?;
    let g = measure_gram_matrix(&k, &measures)?;
    println!("20 x 20 measure Gram: lambda_min = {:.3e}", min_eigenvalue(&g));
    Ok(())
}
