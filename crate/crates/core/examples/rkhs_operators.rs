//! RKHS norms, empirical L_p norms and the integral operator S_k.

use denselab::kernels::{EmpiricalMeasure, Kernel, Point};
use denselab::rkhs::{apply_sk, lp_norm_estimate, lp_norm_of_kernel, rkhs_norm, QuadratureSpec, RkhsFunction};
use denselab::Result;

fn main() -> Result<()> {
    let k = Kernel::gaussian(0.3)?;
    let centers: Vec<Point> = [0.1, 0.4, 0.8].iter().map(|&x| Point::scalar(x)).collect::<Result<_>>()?;
    let f = RkhsFunction::new(k.clone(), centers, vec![1.0, -2.0, 0.5])?;

    let atoms: Vec<Point> = (0..500).map(|i| Point::scalar((i as f64 + 0.5) / 500.0)).collect::<Result<_>>()?;
    let mu = EmpiricalMeasure::uniform(atoms)?;
    println!("||f||_H = {:.5}", rkhs_norm(&f));
    for p in [1.0, 2.0, 4.0] {
        let q = QuadratureSpec::new(mu.clone(), p)?;
        println!(
            "p = {p}: ||f||_Lp = {:.5} <= ||k||_Lp * ||f||_H = {:.5}",
            lp_norm_estimate(&f, &q)?,
            lp_norm_of_kernel(&k, &q)? * rkhs_norm(&f)
        );
    }

    let q = QuadratureSpec::new(mu, 2.0)?;
    let g = |x: &Point| if x.coords()[0] < 0.5 { 1.0 } else { -1.0 };
    println!("\nS_k applied to a sign function:");
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("  (S_k g)({x:.2}) = {:+.5}", apply_sk(&k, &g, &q, &Point::scalar(x)?)?);
    }
    Ok(())
}
