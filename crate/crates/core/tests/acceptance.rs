//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any failed.

mod common;

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use denselab::erm::{
    clip, empirical_risk, fit_kernel_ridge, fit_lipschitz_erm, pointwise_objective, Dataset,
    FitConfig, LossFunction,
};
use denselab::kernels::{
    eval_measure_kernel, gram_matrix, measure_gram_matrix, mmd_squared, EmpiricalMeasure, Kernel,
    Point,
};
use denselab::lab::{risk_convergence_check, run_study, Domain, StudyConfig, TargetFunction, TargetKind};
use denselab::metrics::{d_psi, ky_fan, paired_sample, PairedSample, PsiFunction};
use denselab::report::read_report_csv;
use denselab::rkhs::{injectivity_probe, RkhsFunction};
use denselab::RealFunction;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed_0000 + tag)
}

fn to_row_major(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    (0..n * n).map(|k| m[(k / n, k % n)]).collect()
}

/// `Σ aₖ sin(2π k x + φₖ) + c · 1{x < t}` with random parameters.
struct RandomFunction {
    amps: Vec<f64>,
    phases: Vec<f64>,
    step: f64,
    at: f64,
}

impl RandomFunction {
    fn draw(r: &mut ChaCha8Rng) -> Self {
        let k = r.random_range(1..6);
        let scale = 10f64.powf(r.random_range(-2.0..1.0));
        RandomFunction {
            amps: (0..k).map(|_| scale * r.random_range(-1.0..1.0)).collect(),
            phases: (0..k).map(|_| r.random_range(0.0..2.0 * PI)).collect(),
            step: if r.random_bool(0.5) { r.random_range(-3.0..3.0) } else { 0.0 },
            at: r.random(),
        }
    }
}

impl RealFunction for RandomFunction {
    fn eval(&self, x: &Point) -> denselab::Result<f64> {
        let t = x.coords()[0];
        let mut v: f64 = self
            .amps
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(k, (a, p))| a * (2.0 * PI * (k + 1) as f64 * t + p).sin())
            .sum();
        if t < self.at {
            v += self.step;
        }
        Ok(v)
    }
}

fn criterion_1() -> Outcome {
    let mut r = rng(1);
    let mut violations = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let pts: Vec<Point> = (0..500).map(|_| Point::scalar(r.random()).unwrap()).collect();
        let w = vec![1.0 / 500.0; 500];
        let fs: Vec<RandomFunction> = (0..3).map(|_| RandomFunction::draw(&mut r)).collect();
        let s = |a: usize, b: usize| paired_sample(&fs[a], &fs[b], &pts, w.clone()).unwrap();
        let (fg, gf, gh, fh) = (s(0, 1), s(1, 0), s(1, 2), s(0, 2));
        for psi in [PsiFunction::Psi1, PsiFunction::Psi2] {
            let d = |p: &PairedSample| d_psi(&psi, p).unwrap();
            if d(&fg) != d(&gf) {
                violations += 1;
            }
            let gap = d(&fh) - (d(&fg) + d(&gh));
            worst_gap = worst_gap.max(gap);
            if gap > 1e-12 {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations; max d(f,h) - d(f,g) - d(g,h) = {worst_gap:.3e}"),
    )
}

fn criterion_2() -> Outcome {
    let m = 10_000;
    let pts: Vec<Point> = (0..m)
        .map(|i| Point::scalar((i as f64 + 0.5) / m as f64).unwrap())
        .collect();
    let w = vec![1.0 / m as f64; m];
    let f = |x: &Point| (2.0 * PI * x.coords()[0]).sin();
    let n = 1000.0;
    let fn_ = |x: &Point| f(x) + if x.coords()[0] < 1.0 / n { 1.0 } else { 0.0 };
    let s = paired_sample(&f, &fn_, &pts, w.clone()).unwrap();
    let (dp, kf) = (d_psi(&PsiFunction::Psi2, &s).unwrap(), ky_fan(&s));
    let mut ok = dp <= 0.002 && kf <= 0.002;
    let mut detail = format!("n=1000: d_psi2={dp:.6} ky_fan={kf:.6}");
    // the offset sample does not depend on n
    let shifted = |x: &Point| f(x) + 1.0;
    let s = paired_sample(&f, &shifted, &pts, w).unwrap();
    let (dp, kf) = (d_psi(&PsiFunction::Psi2, &s).unwrap(), ky_fan(&s));
    ok &= (dp - 1.0).abs() <= 1e-12 && (kf - 1.0).abs() <= 1e-12;
    detail.push_str(&format!("; offset: d_psi2={dp} ky_fan={kf}"));
    outcome(ok, detail)
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let mut violations = 0;
    let mut oracle_mismatch = 0;
    for _ in 0..1000 {
        let m = r.random_range(1..200);
        let ties = r.random_bool(0.3);
        let d: Vec<f64> = (0..m)
            .map(|_| {
                let v = r.random_range(0.0..2.0) * r.random::<f64>();
                if ties {
                    (v * 4.0).round() / 4.0
                } else {
                    v
                }
            })
            .collect();
        let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let head: f64 = w[..m - 1].iter().sum();
        w[m - 1] = 1.0 - head;
        let Ok(s) = PairedSample::new(d.clone(), w.clone()) else {
            continue;
        };
        let eps = ky_fan(&s);
        if s.exceedance_mass(eps) > eps + 1e-12 {
            violations += 1;
        }
        let below = eps - 1e-6;
        if below >= 0.0 && s.exceedance_mass(below) <= below {
            violations += 1;
        }
        if (eps - common::ky_fan(&d, &w)).abs() > 1e-12 {
            oracle_mismatch += 1;
        }
    }
    outcome(
        violations == 0 && oracle_mismatch == 0,
        format!("{violations} violations, {oracle_mismatch} disagreements with the brute-force oracle"),
    )
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let k = Kernel::gaussian(0.5).unwrap();
    let mut violations = 0;
    let mut min_seen = f64::INFINITY;
    for _ in 0..100 {
        let n = r.random_range(2..=200);
        let raw: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| r.random_range(0.0..4.0)).collect())
            .collect();
        let pts: Vec<Point> = raw.iter().map(|c| Point::new(c.clone()).unwrap()).collect();
        let g = to_row_major(&gram_matrix(&k, &pts).unwrap());
        let max_entry = g.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let lmin = common::jacobi_eigenvalues(&g, n)[0];
        min_seen = min_seen.min(lmin);
        let cert = injectivity_probe(&k, &pts).unwrap();
        if !(lmin > 0.0 && lmin >= -1e-8 * max_entry && cert.certified()) {
            violations += 1;
        }
        let mut dup = pts.clone();
        dup.push(pts[r.random_range(0..n)].clone());
        if injectivity_probe(&k, &dup).is_ok() {
            violations += 1;
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations; smallest lambda_min {min_seen:.3e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let mut worst_ratio = 0.0f64;
    let mut ok = true;
    for _ in 0..100 {
        let n = r.random_range(1..=300);
        let dim = r.random_range(1..=3);
        let gamma = r.random_range(0.1..2.0);
        let lambda = 10f64.powf(r.random_range(-4.0..0.0));
        let xs: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| r.random()).collect()).collect();
        let ys: Vec<f64> = (0..n).map(|_| r.random_range(-3.0..3.0)).collect();
        let d = Dataset::new(xs.iter().map(|c| Point::new(c.clone()).unwrap()).collect(), ys.clone())
            .unwrap();
        let f = fit_kernel_ridge(&d, &Kernel::gaussian(gamma).unwrap(), lambda).unwrap();
        let mut a = common::gaussian_gram(&xs, gamma);
        for i in 0..n {
            a[i * n + i] += n as f64 * lambda;
        }
        let ax = common::matvec(&a, f.coefficients(), n);
        let res: Vec<f64> = ax.iter().zip(&ys).map(|(p, y)| p - y).collect();
        let ratio = common::norm(&res) / (common::norm(&ys) + 1.0);
        worst_ratio = worst_ratio.max(ratio);
        ok &= ratio <= 1e-8;
    }

    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let n = r.random_range(10..=100);
        let dim = r.random_range(1..=3);
        let pts: Vec<Point> = (0..n)
            .map(|_| Point::new((0..dim).map(|_| r.random()).collect()).unwrap())
            .collect();
        let ys: Vec<f64> = pts
            .iter()
            .map(|p| (5.0 * p.coords()[0]).sin() + 0.3 * (r.random::<f64>() - 0.5))
            .collect();
        let k = Kernel::gaussian(r.random_range(0.2..1.0)).unwrap();
        let lambda = 10f64.powf(r.random_range(-3.0..-1.0));
        let d = Dataset::new(pts.clone(), ys.clone()).unwrap();
        let ridge = fit_kernel_ridge(&d, &k, lambda).unwrap();
        let loss = LossFunction::squared(2.0).unwrap();
        let gram = gram_matrix(&k, &pts).unwrap();
        let target = pointwise_objective(
            &gram,
            &DVector::from_column_slice(ridge.coefficients()),
            &ys,
            &loss,
            lambda,
        );
        let cfg = FitConfig {
            lambda,
            max_iters: 200_000,
            step_size0: 1.0,
            tol: 1e-12,
            seed: 0,
        };
        let fit = fit_lipschitz_erm(&d, &k, &loss, &cfg).unwrap();
        let rel = ((fit.objective - target) / target).abs();
        worst_rel = worst_rel.max(rel);
        ok &= rel <= 1e-4;
    }
    outcome(
        ok,
        format!("worst residual/(|y|+1) = {worst_ratio:.3e}; worst subgradient vs ridge = {worst_rel:.3e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut mono_violations = 0;
    let mut lip_violations = 0;
    let random_rkhs = |r: &mut ChaCha8Rng, scale: f64| -> RkhsFunction {
        let m = r.random_range(1..15);
        let centers: Vec<Point> = (0..m).map(|_| Point::scalar(r.random()).unwrap()).collect();
        let coef: Vec<f64> = (0..m).map(|_| scale * r.random_range(-1.0..1.0)).collect();
        RkhsFunction::new(Kernel::gaussian(r.random_range(0.05..1.0)).unwrap(), centers, coef).unwrap()
    };
    for _ in 0..1000 {
        let bound = r.random_range(0.1..3.0);
        let n = r.random_range(1..60);
        let xs: Vec<Point> = (0..n).map(|_| Point::scalar(r.random()).unwrap()).collect();
        let ys: Vec<f64> = (0..n).map(|_| r.random_range(-bound..=bound)).collect();
        let d = Dataset::new(xs, ys).unwrap();
        let f = random_rkhs(&mut r, 4.0 * bound);
        let tau = r.random_range(0.01..0.99);
        for loss in [
            LossFunction::squared(bound).unwrap(),
            LossFunction::absolute(),
            LossFunction::pinball(tau).unwrap(),
        ] {
            let clipped = clip(f.clone(), bound).unwrap();
            if empirical_risk(&clipped, &d, &loss).unwrap() > empirical_risk(&f, &d, &loss).unwrap() + 1e-12 {
                mono_violations += 1;
            }
        }
    }
    for _ in 0..1000 {
        let n = r.random_range(1..60);
        let xs: Vec<Point> = (0..n).map(|_| Point::scalar(r.random()).unwrap()).collect();
        let ys: Vec<f64> = (0..n).map(|_| r.random_range(-5.0..5.0)).collect();
        let d = Dataset::new(xs.clone(), ys).unwrap();
        let f = random_rkhs(&mut r, 3.0);
        let g = random_rkhs(&mut r, 3.0);
        let l1: f64 = xs
            .iter()
            .map(|x| (f.eval(x).unwrap() - g.eval(x).unwrap()).abs())
            .sum::<f64>()
            / n as f64;
        for loss in [LossFunction::absolute(), LossFunction::pinball(r.random_range(0.01..0.99)).unwrap()] {
            let gap = (empirical_risk(&f, &d, &loss).unwrap() - empirical_risk(&g, &d, &loss).unwrap()).abs();
            if gap > loss.lipschitz_constant() * l1 + 1e-12 {
                lip_violations += 1;
            }
        }
    }
    outcome(
        mono_violations == 0 && lip_violations == 0,
        format!("{mono_violations} clipping violations, {lip_violations} Lipschitz-bound violations"),
    )
}

fn write_study_config(dir: &std::path::Path, kind: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{kind}.toml"));
    let target = match kind {
        "indicator" => "kind = \"indicator\"\na = 0.0\nb = 0.5\n",
        _ => "kind = \"sine\"\nfrequency = 1.0\n",
    };
    let body = format!(
        "[target]\n{target}\n[study]\nsample_sizes = [64, 256, 1024, 4096]\nreplicates = 3\nseed = 2024\n"
    );
    std::fs::write(&path, body).unwrap();
    path
}

fn run_cli_study(config: &std::path::Path, out: &std::path::Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_denselab"))
        .args(["study", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .status()
        .expect("run denselab");
    assert!(status.success(), "denselab study exited with {status}");
    std::fs::read(out).unwrap()
}

fn criterion_7_and_10(dir: &std::path::Path) -> (Outcome, Outcome) {
    let cfg = write_study_config(dir, "indicator");
    let first = run_cli_study(&cfg, &dir.join("indicator-1.csv"));
    let report = read_report_csv(&dir.join("indicator-1.csv")).unwrap();

    let mut ok = !report.cells.is_empty() && report.cells.len() == 12;
    let mut ratios = Vec::new();
    let mut at_4096 = Vec::new();
    for rep in report.replicates() {
        let small = report.cell(64, rep).expect("n=64 cell");
        let large = report.cell(4096, rep).expect("n=4096 cell");
        ok &= large.d_psi < 0.1 && large.d_psi < 0.5 * small.d_psi;
        ratios.push(large.d_psi / small.d_psi);
        at_4096.push(large.d_psi);
    }
    let sup_min = report
        .successful()
        .map(|(_, _, m)| m.sup_gap)
        .fold(f64::INFINITY, f64::min);
    ok &= sup_min >= 0.45;
    let risk = risk_convergence_check(&report, 1.0);
    ok &= risk.passed && risk.worst_margin >= 0.0;
    let c7 = outcome(
        ok,
        format!(
            "d_psi2(4096) = {at_4096:.4?}, ratio to n=64 = {ratios:.3?}; min sup_gap = {sup_min:.4}; risk margin = {:.3e}",
            risk.worst_margin
        ),
    );

    let second = run_cli_study(&cfg, &dir.join("indicator-2.csv"));
    let c10 = outcome(
        first == second,
        format!("two CLI runs, {} bytes each, identical = {}", first.len(), first == second),
    );
    (c7, c10)
}

fn criterion_8() -> Outcome {
    let target = TargetFunction::new(TargetKind::ContinuousSine { frequency: 1.0 }, Domain::unit_interval())
        .unwrap();
    let cfg = StudyConfig {
        replicates: 3,
        seed: 2024,
        ..StudyConfig::new(target)
    };
    let report = run_study(&cfg).unwrap();
    let mut ok = !report.is_partial();
    let mut pairs = Vec::new();
    for rep in report.replicates() {
        let small = report.cell(64, rep).unwrap().sup_gap;
        let large = report.cell(4096, rep).unwrap().sup_gap;
        ok &= large < 0.5 * small;
        pairs.push((small, large));
    }
    outcome(ok, format!("(sup_gap(64), sup_gap(4096)) per replicate = {pairs:.4?}"))
}

fn criterion_9() -> Outcome {
    let mut r = rng(9);
    let base = Kernel::gaussian(1.0).unwrap();
    let k = Kernel::measure_gaussian(base.clone(), 1.0).unwrap();
    let random_measure = |r: &mut ChaCha8Rng| {
        let m = r.random_range(1..12);
        let dim = 2;
        let atoms: Vec<Point> = (0..m)
            .map(|_| Point::new((0..dim).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap())
            .collect();
        let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let head: f64 = w[..m - 1].iter().sum();
        w[m - 1] = 1.0 - head;
        EmpiricalMeasure::new(atoms, w).unwrap()
    };
    let mut ok = true;
    let mut self_fail = 0;
    for _ in 0..100 {
        let p = random_measure(&mut r);
        if eval_measure_kernel(&k, &p, &p).unwrap() != 1.0 {
            self_fail += 1;
        }
    }
    ok &= self_fail == 0;

    let p = EmpiricalMeasure::dirac(Point::scalar(0.0).unwrap());
    let q = EmpiricalMeasure::dirac(Point::scalar(1.0).unwrap());
    let closed = 2.0 - 2.0 * (-1.0f64).exp();
    let mmd = mmd_squared(&base, &p, &q).unwrap();
    let kv = eval_measure_kernel(&k, &p, &q).unwrap();
    let oracle = common::mmd2(&[(vec![0.0], 1.0)], &[(vec![1.0], 1.0)], 1.0);
    ok &= (mmd - closed).abs() <= 1e-12 && (oracle - closed).abs() <= 1e-12;
    ok &= (kv - (-closed).exp()).abs() <= 1e-12;

    let measures: Vec<EmpiricalMeasure> = (0..20).map(|_| random_measure(&mut r)).collect();
    let g = to_row_major(&measure_gram_matrix(&k, &measures).unwrap());
    let ev = common::jacobi_eigenvalues(&g, 20);
    let spectral = ev.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    ok &= ev[0] >= -1e-8 * spectral;
    outcome(
        ok,
        format!(
            "{self_fail} self-similarity failures; MMD^2 = {mmd:.15}, closed form {closed:.15}; gram lambda_min = {:.3e}",
            ev[0]
        ),
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, o: Outcome| {
        println!(
            "[{}] {id:>2}. {name}: {} ({:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        let _ = std::io::stdout().flush();
        results.push((id, name, o));
    };

    report(1, "metric axioms", criterion_1());
    report(2, "convergence equivalence", criterion_2());
    report(3, "Ky Fan defining inequality", criterion_3());
    report(4, "Gram PSD and injectivity witness", criterion_4());
    report(5, "ridge optimality", criterion_5());
    report(6, "clipping and risk bounds", criterion_6());
    let (c7, c10) = criterion_7_and_10(dir.path());
    report(7, "denseness study (indicator target)", c7);
    report(8, "continuous control (sine target)", criterion_8());
    report(9, "measure kernel", criterion_9());
    report(10, "determinism", c10);

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.passed).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: FAILED criteria {failed:?}");
        std::process::exit(1);
    }
}
