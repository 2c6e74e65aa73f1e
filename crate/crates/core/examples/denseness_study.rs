//! Convergence study: kernel ridge fits of a discontinuous and a continuous
//! target. For the indicator, d_ψ and Ky Fan shrink with n while the sup gap
//! stays near half the jump. For the sine, everything shrinks.
//!
//! `cargo run --release --example denseness_study [full]`; `full` adds
//! n = 4096.

use denselab::lab::{run_study, Domain, StudyConfig, TargetFunction, TargetKind};
use denselab::Result;

fn main() -> Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let sizes = if full { vec![64, 256, 1024, 4096] } else { vec![64, 256, 1024] };
    for kind in [
        TargetKind::IndicatorInterval { a: 0.0, b: 0.5 },
        TargetKind::ContinuousSine { frequency: 1.0 },
    ] {
        let target = TargetFunction::new(kind.clone(), Domain::unit_interval())?;
        let cfg = StudyConfig {
            sample_sizes: sizes.clone(),
            replicates: 2,
            seed: 2024,
            ..StudyConfig::new(target)
        };
        let report = run_study(&cfg)?;
        println!("\n{kind:?}");
        println!("{:>6} {:>4} {:>10} {:>10} {:>10}", "n", "rep", "d_psi2", "ky_fan", "sup_gap");
        for (n, rep, m) in report.successful() {
            println!("{n:>6} {rep:>4} {:>10.5} {:>10.5} {:>10.5}", m.d_psi, m.ky_fan, m.sup_gap);
        }
    }
    Ok(())
}
