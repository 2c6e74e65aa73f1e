mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;

use denselab::erm::{clip, clip_value, empirical_risk, Dataset, LossFunction};
use denselab::kernels::{
    eval_kernel, eval_measure_kernel, gram_matrix, mmd_squared, EmpiricalMeasure, Kernel, Point,
};
use denselab::metrics::{d_psi, ky_fan, validate_psi, PairedSample, PsiFunction};
use denselab::rkhs::{
    apply_sk, lp_norm_estimate, lp_norm_of_kernel, rkhs_norm, QuadratureSpec, RkhsFunction,
};
use denselab::RealFunction;

fn coords(dim: usize, n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0..3.0f64, dim), n)
}

fn points(raw: &[Vec<f64>]) -> Vec<Point> {
    raw.iter().map(|c| Point::new(c.clone()).unwrap()).collect()
}

fn row_major(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    (0..n * n).map(|k| m[(k / n, k % n)]).collect()
}

fn distances() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..5.0f64, 0.0..0.01f64], 1..80)
}

fn uniform(d: Vec<f64>) -> PairedSample {
    PairedSample::uniform(d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_gram_matches_oracle_and_is_psd(raw in coords(2, 1..30), gamma in 0.1..3.0f64) {
        let g = gram_matrix(&Kernel::gaussian(gamma).unwrap(), &points(&raw)).unwrap();
        let n = raw.len();
        let oracle = common::gaussian_gram(&raw, gamma);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(g[(i, j)], g[(j, i)]);
                prop_assert!((g[(i, j)] - oracle[i * n + j]).abs() <= 1e-14);
            }
        }
        let ev = common::jacobi_eigenvalues(&row_major(&g), n);
        prop_assert!(ev[0] >= -1e-10 * ev[n - 1].max(1.0));
    }

    #[test]
    fn wendland_gram_is_psd_and_local(raw in coords(3, 1..30), radius in 0.2..4.0f64) {
        let k = Kernel::wendland(radius).unwrap();
        let pts = points(&raw);
        let g = gram_matrix(&k, &pts).unwrap();
        let n = raw.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert!((g[(i, j)] - common::wendland(&raw[i], &raw[j], radius)).abs() <= 1e-14);
                if pts[i].sq_dist(&pts[j]).sqrt() >= radius {
                    prop_assert_eq!(g[(i, j)], 0.0);
                }
            }
        }
        let ev = common::jacobi_eigenvalues(&row_major(&g), n);
        prop_assert!(ev[0] >= -1e-10 * ev[n - 1].max(1.0));
    }

    #[test]
    fn kernels_are_symmetric(x in coords(2, 2..3), gamma in 0.1..2.0f64) {
        let p = points(&x);
        for k in [Kernel::gaussian(gamma).unwrap(), Kernel::wendland(gamma).unwrap()] {
            prop_assert_eq!(eval_kernel(&k, &p[0], &p[1]).unwrap(), eval_kernel(&k, &p[1], &p[0]).unwrap());
            prop_assert_eq!(eval_kernel(&k, &p[0], &p[0]).unwrap(), 1.0);
        }
    }

    #[test]
    fn mmd_matches_oracle(a in coords(1, 1..8), b in coords(1, 1..8), gamma in 0.2..2.0f64) {
        let base = Kernel::gaussian(gamma).unwrap();
        let p = EmpiricalMeasure::uniform(points(&a)).unwrap();
        let q = EmpiricalMeasure::uniform(points(&b)).unwrap();
        let wp: Vec<(Vec<f64>, f64)> = a.iter().map(|x| (x.clone(), 1.0 / a.len() as f64)).collect();
        let wq: Vec<(Vec<f64>, f64)> = b.iter().map(|x| (x.clone(), 1.0 / b.len() as f64)).collect();
        let m = mmd_squared(&base, &p, &q).unwrap();
        prop_assert!(m >= 0.0);
        prop_assert!((m - common::mmd2(&wp, &wq, gamma).max(0.0)).abs() <= 1e-12);
        prop_assert_eq!(m, mmd_squared(&base, &q, &p).unwrap());
        let k = Kernel::measure_gaussian(base, 1.0).unwrap();
        prop_assert_eq!(eval_measure_kernel(&k, &p, &q).unwrap(), eval_measure_kernel(&k, &q, &p).unwrap());
    }

    #[test]
    fn d_psi_is_a_pseudometric(
        f in prop::collection::vec(-5.0..5.0f64, 50),
        g in prop::collection::vec(-5.0..5.0f64, 50),
        h in prop::collection::vec(-5.0..5.0f64, 50),
    ) {
        let s = |a: &[f64], b: &[f64]| uniform(a.iter().zip(b).map(|(x, y)| (x - y).abs()).collect());
        for psi in [PsiFunction::Psi1, PsiFunction::Psi2] {
            let d = |a: &[f64], b: &[f64]| d_psi(&psi, &s(a, b)).unwrap();
            prop_assert_eq!(d(&f, &f), 0.0);
            prop_assert_eq!(d(&f, &g), d(&g, &f));
            prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-12);
            prop_assert!((0.0..=1.0).contains(&d(&f, &g)));
        }
    }

    #[test]
    fn d_psi_matches_direct_sum(d in distances()) {
        let w = vec![1.0 / d.len() as f64; d.len()];
        let s = uniform(d.clone());
        assert_relative_eq!(
            d_psi(&PsiFunction::Psi1, &s).unwrap(),
            common::d_psi(&d, &w, |x| x / (1.0 + x)),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            d_psi(&PsiFunction::Psi2, &s).unwrap(),
            common::d_psi(&d, &w, |x| x.min(1.0)),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ky_fan_matches_oracle_and_dominates_d_psi2(d in distances()) {
        let w = vec![1.0 / d.len() as f64; d.len()];
        let s = uniform(d.clone());
        let eps = ky_fan(&s);
        prop_assert!((eps - common::ky_fan(&d, &w)).abs() <= 1e-12);
        prop_assert!(s.exceedance_mass(eps) <= eps + 1e-12);
        prop_assert!(d_psi(&PsiFunction::Psi2, &s).unwrap() <= 2.0 * eps + 1e-12);
        prop_assert!(eps <= 1.0);
    }

    #[test]
    fn sk_is_linear(
        atoms in coords(1, 1..20),
        x in -3.0..3.0f64,
        a in -2.0..2.0f64,
        b in -2.0..2.0f64,
    ) {
        let k = Kernel::gaussian(0.7).unwrap();
        let q = QuadratureSpec::new(EmpiricalMeasure::uniform(points(&atoms)).unwrap(), 2.0).unwrap();
        let g1 = |p: &Point| p.coords()[0].sin();
        let g2 = |p: &Point| p.coords()[0] * p.coords()[0];
        let combo = |p: &Point| a * g1(p) + b * g2(p);
        let x = Point::scalar(x).unwrap();
        let lhs = apply_sk(&k, &combo, &q, &x).unwrap();
        let rhs = a * apply_sk(&k, &g1, &q, &x).unwrap() + b * apply_sk(&k, &g2, &q, &x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn norm_scaling_and_inclusion(
        centers in coords(2, 1..15),
        coef in prop::collection::vec(-2.0..2.0f64, 15),
        atoms in coords(2, 1..40),
        a in -4.0..4.0f64,
        p in 1.0..4.0f64,
    ) {
        let n = centers.len();
        let k = Kernel::gaussian(0.8).unwrap();
        let f = RkhsFunction::new(k.clone(), points(&centers), coef[..n].to_vec()).unwrap();
        assert_relative_eq!(rkhs_norm(&f.scaled(a)), a.abs() * rkhs_norm(&f), epsilon = 1e-10, max_relative = 1e-8);
        let q = QuadratureSpec::new(EmpiricalMeasure::uniform(points(&atoms)).unwrap(), p).unwrap();
        let lp = lp_norm_estimate(&f, &q).unwrap();
        prop_assert!(lp <= lp_norm_of_kernel(&k, &q).unwrap() * rkhs_norm(&f) + 1e-9);
    }

    #[test]
    fn clipping_never_increases_risk(
        xs in prop::collection::vec(0.0..1.0f64, 1..30),
        ys in prop::collection::vec(-1.0..1.0f64, 30),
        amp in 0.1..10.0f64,
        tau in 0.01..0.99f64,
        bound in 0.5..2.0f64,
    ) {
        let n = xs.len();
        let ys: Vec<f64> = ys[..n].iter().map(|y| y * bound).collect();
        let d = Dataset::new(xs.iter().map(|x| Point::scalar(*x).unwrap()).collect(), ys).unwrap();
        let f = move |p: &Point| amp * (9.0 * p.coords()[0]).sin();
        for loss in [LossFunction::squared(bound).unwrap(), LossFunction::absolute(), LossFunction::pinball(tau).unwrap()] {
            let c = clip(f, bound).unwrap();
            prop_assert!(empirical_risk(&c, &d, &loss).unwrap() <= empirical_risk(&f, &d, &loss).unwrap() + 1e-12);
        }
        prop_assert_eq!(clip_value(clip_value(amp, bound), bound), clip_value(amp, bound));
    }

    #[test]
    fn lipschitz_risk_bound(
        xs in prop::collection::vec(-1.0..1.0f64, 1..30),
        ys in prop::collection::vec(-3.0..3.0f64, 30),
        shift in -2.0..2.0f64,
        tau in 0.01..0.99f64,
    ) {
        let n = xs.len();
        let d = Dataset::new(xs.iter().map(|x| Point::scalar(*x).unwrap()).collect(), ys[..n].to_vec()).unwrap();
        let f = |p: &Point| p.coords()[0].exp();
        let g = move |p: &Point| p.coords()[0] * 2.0 + shift;
        let l1: f64 = d.inputs().iter().map(|x| (f.eval(x).unwrap() - g.eval(x).unwrap()).abs()).sum::<f64>() / n as f64;
        for loss in [LossFunction::absolute(), LossFunction::pinball(tau).unwrap()] {
            let gap = (empirical_risk(&f, &d, &loss).unwrap() - empirical_risk(&g, &d, &loss).unwrap()).abs();
            prop_assert!(gap <= loss.lipschitz_constant() * l1 + 1e-12);
        }
    }
}

#[test]
fn psi_validation_known_cases() {
    assert!(validate_psi(&PsiFunction::Psi1, 10.0, 500).passed());
    assert!(validate_psi(&PsiFunction::Psi2, 10.0, 500).passed());
    let xs: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let sqrt = PsiFunction::tabulated(xs.clone(), xs.iter().map(|x| x.sqrt()).collect()).unwrap();
    assert!(validate_psi(&sqrt, 2.0, 400).passed());
    let square = PsiFunction::tabulated(xs.clone(), xs.iter().map(|x| x * x).collect()).unwrap();
    assert!(validate_psi(&square, 2.0, 400).fails_subadditivity());
}
