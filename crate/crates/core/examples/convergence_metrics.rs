//! `d_ψ` and Ky Fan distances: small where functions differ on little mass,
//! large for a uniform offset, whatever the size of the discrepancy.

use denselab::metrics::{d_psi, ky_fan, paired_sample, validate_psi, PsiFunction};
use denselab::{Point, Result};

fn main() -> Result<()> {
    let m = 10_000;
    let pts: Vec<Point> = (0..m).map(|i| Point::scalar((i as f64 + 0.5) / m as f64)).collect::<Result<_>>()?;
    let w = vec![1.0 / m as f64; m];
    let f = |x: &Point| (6.0 * x.coords()[0]).cos();

    println!("{:>6} {:>12} {:>12} {:>12}", "n", "d_psi1", "d_psi2", "ky_fan");
    for n in [10, 100, 1000] {
        // a spike of height 100 on a set of mass 1/n
        let spiked = move |x: &Point| f(x) + if x.coords()[0] < 1.0 / n as f64 { 100.0 } else { 0.0 };
        let s = paired_sample(&f, &spiked, &pts, w.clone())?;
        println!(
            "{n:>6} {:>12.6} {:>12.6} {:>12.6}",
            d_psi(&PsiFunction::Psi1, &s)?,
            d_psi(&PsiFunction::Psi2, &s)?,
            ky_fan(&s)
        );
    }

    let shifted = |x: &Point| f(x) + 0.3;
    let s = paired_sample(&f, &shifted, &pts, w)?;
    println!("constant offset 0.3: d_psi2 = {:.6}, ky_fan = {:.6}", d_psi(&PsiFunction::Psi2, &s)?, ky_fan(&s));

    let xs: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    for (name, ys) in [
        ("sqrt", xs.iter().map(|x| x.sqrt()).collect::<Vec<_>>()),
        ("square", xs.iter().map(|x| x * x).collect()),
    ] {
        let psi = PsiFunction::tabulated(xs.clone(), ys)?;
        let v = validate_psi(&psi, 3.0, 300);
        println!("tabulated {name}: passed = {}, violations = {:?}", v.passed(), v.violations);
    }
    Ok(())
}
