//! Reference implementations used as oracles by the integration tests.
//! They share no code with the library.
#![allow(dead_code)]

/// Eigenvalues of a symmetric matrix (row-major `n × n`) by cyclic Jacobi
/// rotations, sorted ascending.
pub fn jacobi_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = s;
            m[j * n + i] = s;
        }
    }
    let frob: f64 = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * frob.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn gaussian(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (gamma * gamma)).exp()
}

/// Row-major Gaussian Gram matrix.
pub fn gaussian_gram(pts: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    let n = pts.len();
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = gaussian(&pts[i], &pts[j], gamma);
        }
    }
    g
}

pub fn wendland(x: &[f64], y: &[f64], support: f64) -> f64 {
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() / support;
    if r >= 1.0 {
        0.0
    } else {
        (1.0 - r).powi(4) * (4.0 * r + 1.0)
    }
}

/// Squared MMD between weighted point sets under a Gaussian base kernel.
pub fn mmd2(p: &[(Vec<f64>, f64)], q: &[(Vec<f64>, f64)], gamma: f64) -> f64 {
    let cross = |a: &[(Vec<f64>, f64)], b: &[(Vec<f64>, f64)]| -> f64 {
        a.iter()
            .flat_map(|(x, wx)| b.iter().map(move |(y, wy)| wx * wy * gaussian(x, y, gamma)))
            .sum()
    };
    cross(p, p) + cross(q, q) - 2.0 * cross(p, q)
}

/// `Σ w ψ(d)` computed directly.
pub fn d_psi(d: &[f64], w: &[f64], psi: impl Fn(f64) -> f64) -> f64 {
    d.iter().zip(w).map(|(x, wx)| wx * psi(*x)).sum()
}

/// Weighted mass strictly above `eps`.
pub fn exceedance(d: &[f64], w: &[f64], eps: f64) -> f64 {
    d.iter().zip(w).filter(|(x, _)| **x > eps).map(|(_, wx)| wx).sum()
}

/// Ky Fan metric by exhaustive search over the candidate set
/// `{0} ∪ {dⱼ} ∪ {exceedance values}`, which contains the infimum.
pub fn ky_fan(d: &[f64], w: &[f64]) -> f64 {
    let mut cands: Vec<f64> = vec![0.0];
    cands.extend_from_slice(d);
    cands.extend(d.iter().map(|&x| exceedance(d, w, x)));
    cands.push(exceedance(d, w, 0.0));
    cands
        .into_iter()
        .filter(|&c| c >= 0.0 && exceedance(d, w, c) <= c)
        .fold(f64::INFINITY, f64::min)
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .unwrap();
        if p != c {
            for k in 0..n {
                m.swap(c * n + k, p * n + k);
            }
            x.swap(c, p);
        }
        for r in c + 1..n {
            let f = m[r * n + c] / m[c * n + c];
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
            x[r] -= f * x[c];
        }
    }
    for c in (0..n).rev() {
        let s: f64 = (c + 1..n).map(|k| m[c * n + k] * x[k]).sum();
        x[c] = (x[c] - s) / m[c * n + c];
    }
    x
}

pub fn matvec(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (0..n).map(|j| a[i * n + j] * x[j]).sum())
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
