//! Reference computations that share no code path with the library.
#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn zeros(dim: usize) -> Matrix {
    vec![vec![Complex64::new(0.0, 0.0); dim]; dim]
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let dim = a.len();
    let mut out = zeros(dim);
    for i in 0..dim {
        for k in 0..dim {
            if a[i][k] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dim {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, x: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(m, v)| m * v).sum())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[i * nb + k][j * nb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// `exp(−iβX)` from its power series, truncated well past convergence.
pub fn rx_series(beta: f64) -> Matrix {
    let x: Matrix = vec![
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    ];
    let mut term: Matrix = vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    let mut sum = term.clone();
    let step = Complex64::new(0.0, -beta);
    for k in 1..60 {
        term = matmul(&term, &x);
        for row in term.iter_mut() {
            for v in row.iter_mut() {
                *v *= step / k as f64;
            }
        }
        for (srow, trow) in sum.iter_mut().zip(&term) {
            for (s, t) in srow.iter_mut().zip(trow) {
                *s += t;
            }
        }
    }
    sum
}

/// Full `2ⁿ × 2ⁿ` mixer; the first Kronecker factor acts on qubit 0.
pub fn dense_mixer(n: usize, beta: f64) -> Matrix {
    let single = rx_series(beta);
    let mut m = single.clone();
    for _ in 1..n {
        m = kron(&m, &single);
    }
    m
}

pub fn dense_cost(energies: &[f64], gamma: f64) -> Matrix {
    let mut m = zeros(energies.len());
    for (x, &e) in energies.iter().enumerate() {
        m[x][x] = Complex64::from_polar(1.0, -gamma * e);
    }
    m
}

/// Product of the explicit layer unitaries applied to `initial`.
pub fn dense_circuit(
    energies: &[f64],
    gammas: &[f64],
    betas: &[f64],
    initial: &[Complex64],
) -> Vec<Complex64> {
    let n = energies.len().trailing_zeros() as usize;
    let dim = energies.len();
    let mut total: Matrix = zeros(dim);
    for (i, row) in total.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    for (&g, &b) in gammas.iter().zip(betas) {
        let layer = matmul(&dense_mixer(n, b), &dense_cost(energies, g));
        total = matmul(&layer, &total);
    }
    matvec(&total, initial)
}

/// Plain Gaussian elimination with partial pivoting on a dense copy.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i][k].abs().partial_cmp(&m[j][k].abs()).unwrap())
            .unwrap();
        m.swap(k, p);
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..=n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
        x[i] = (m[i][n] - s) / m[i][i];
    }
    x
}

pub fn squared_residual(a: &[Vec<f64>], b: &[f64], s: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, bk)| {
            let r: f64 = row.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() - bk;
            r * r
        })
        .sum()
}

/// Values of bitstring `bits` (variable-major, smallest weight first).
pub fn decode_direct(bits: &[bool], weights: &[f64]) -> Vec<f64> {
    bits.chunks(weights.len())
        .map(|block| {
            block
                .iter()
                .zip(weights)
                .map(|(&q, &w)| if q { w } else { 0.0 })
                .sum()
        })
        .collect()
}

/// Bit `k` of the bitstring is bit `n − 1 − k` of the index.
pub fn bits_of(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|k| (index >> (n - 1 - k)) & 1 == 1).collect()
}

pub fn random_dense(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect()
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|a| a / norm).collect()
}
