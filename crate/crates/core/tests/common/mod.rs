//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's numerics.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<f64>>;

pub fn from_nalgebra(a: &nalgebra::DMatrix<f64>) -> Dense {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut s: Dense) -> Vec<f64> {
    let n = s.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i][j] * s[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if s[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (s[q][q] - s[p][p]) / (2.0 * s[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let (skp, skq) = (s[k][p], s[k][q]);
                    s[k][p] = c * skp - sn * skq;
                    s[k][q] = sn * skp + c * skq;
                }
                for k in 0..n {
                    let (spk, sqk) = (s[p][k], s[q][k]);
                    s[p][k] = c * spk - sn * sqk;
                    s[q][k] = sn * spk + c * sqk;
                }
            }
        }
    }
    (0..n).map(|i| s[i][i]).collect()
}

fn gram_of_columns(a: &Dense, cols: &[usize]) -> Dense {
    cols.iter()
        .map(|&i| {
            cols.iter()
                .map(|&j| a.iter().map(|row| row[i] * row[j]).sum())
                .collect()
        })
        .collect()
}

fn subsets(n: usize, s: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == s {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, s, i + 1, cur, out);
        cur.pop();
    }
}

/// Standard RIP constant of order `s` by enumerating column subsets.
pub fn standard_rip(a: &Dense, s: usize) -> f64 {
    let mut all = Vec::new();
    subsets(a[0].len(), s, 0, &mut Vec::new(), &mut all);
    all.iter()
        .map(|cols| {
            let eig = jacobi_eigenvalues(gram_of_columns(a, cols));
            let hi = eig.iter().cloned().fold(f64::MIN, f64::max);
            let lo = eig.iter().cloned().fold(f64::MAX, f64::min);
            (hi - 1.0).max(1.0 - lo)
        })
        .fold(0.0, f64::max)
}

/// Largest `|‖Ax‖² − 1|` over random unit vectors supported on `s` blocks of
/// length `d`; a lower bound on the block-RIP constant.
pub fn monte_carlo_block_rip<R: Rng>(
    a: &Dense,
    d: usize,
    s: usize,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let n_cols = a[0].len();
    let m = n_cols / d;
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let mut blocks: Vec<usize> = Vec::with_capacity(s);
        while blocks.len() < s {
            let b = rng.random_range(0..m);
            if !blocks.contains(&b) {
                blocks.push(b);
            }
        }
        let mut x = vec![0.0; n_cols];
        for &b in &blocks {
            for c in b * d..(b + 1) * d {
                x[c] = rng.sample(StandardNormal);
            }
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        let energy: f64 = a
            .iter()
            .map(|row| row.iter().zip(&x).map(|(r, v)| r * v).sum::<f64>().powi(2))
            .sum();
        best = best.max((energy - 1.0).abs());
    }
    best
}

/// Solves `G x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut g: Dense, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs()))
            .unwrap();
        g.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = g[row][col] / g[col][col];
            for k in col..n {
                g[row][k] -= f * g[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| g[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / g[i][i];
    }
    x
}

fn transpose_times(a: &Dense, y: &[f64]) -> Vec<f64> {
    (0..a[0].len())
        .map(|j| a.iter().zip(y).map(|(row, v)| row[j] * v).sum())
        .collect()
}

/// Scalar IRLS (block length one, unit weights) written directly from the
/// iteration: `x0 = A'(AA')⁻¹y`, `W = diag((ε² + x_i²)^{-1/4})`,
/// `x ← W⁻¹((AW⁻¹)'(AW⁻¹) + τI)⁻¹(AW⁻¹)'y`, `ε ← min(ε, ν r_{k+1}/N)`.
pub fn scalar_irls(
    a: &Dense,
    y: &[f64],
    k_hat: usize,
    tau: f64,
    nu: f64,
    max_iters: usize,
) -> Vec<f64> {
    let (n, big_n) = (a.len(), a[0].len());
    let aat: Dense = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..big_n).map(|c| a[i][c] * a[j][c]).sum())
                .collect()
        })
        .collect();
    let mut x = transpose_times(a, &gauss_solve(aat, y.to_vec()));
    let mut eps = 1.0f64;
    for _ in 0..max_iters {
        let winv: Vec<f64> = x.iter().map(|v| (eps * eps + v * v).powf(0.25)).collect();
        let b: Dense = a
            .iter()
            .map(|row| row.iter().zip(&winv).map(|(r, w)| r * w).collect())
            .collect();
        let mut g = gram_of_columns(&b, &(0..big_n).collect::<Vec<_>>());
        for (i, row) in g.iter_mut().enumerate() {
            row[i] += tau;
        }
        let u = gauss_solve(g, transpose_times(&b, y));
        let next: Vec<f64> = u.iter().zip(&winv).map(|(u, w)| u * w).collect();
        let mut mags: Vec<f64> = next.iter().map(|v| v.abs()).collect();
        mags.sort_by(|p, q| q.total_cmp(p));
        eps = eps.min(nu * mags[k_hat] / big_n as f64);
        let step = next
            .iter()
            .zip(&x)
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        x = next;
        if eps < 1e-7 || step < 1e-8 {
            break;
        }
    }
    x
}

/// Pooled standard error of the difference of two binomial frequencies
/// observed over `trials` each.
pub fn pooled_se(p1: f64, p2: f64, trials: usize) -> f64 {
    let p = 0.5 * (p1 + p2);
    (2.0 * p * (1.0 - p) / trials as f64).sqrt()
}

/// Measurement count bound evaluated straight from its closed form.
pub fn measurement_bound_oracle(t: f64, k: f64, m: f64, ups: f64, d: f64) -> f64 {
    let r = (t - d) / (t - d + ups * ups);
    t * k * (m / k).ln() / (r / 16.0 - r * r.sqrt() / 48.0)
}
