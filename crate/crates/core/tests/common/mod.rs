//! Random instances shared by the property and acceptance suites.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinid_core::linsys::{unit, LinearSystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    uniform_matrix(rng, n, n, -1.0, 1.0).qr().q()
}

/// `Q1 diag(s) Q2` with singular values in `[1, cond]`.
pub fn conditioned_transform(rng: &mut ChaCha8Rng, n: usize, cond: f64) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        rng.random_range(1.0..cond)
    }));
    q1 * s * q2
}

/// `(A, b, c)` with entries in `[-1, 1]` scaled by `1/sqrt(n)`.
pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> LinearSystem {
    let s = 1.0 / (n as f64).sqrt();
    let a = uniform_matrix(rng, n, n, -1.0, 1.0) * s;
    let b = uniform_matrix(rng, n, 1, -1.0, 1.0).column(0).into_owned();
    let c = uniform_matrix(rng, 1, n, -1.0, 1.0).row(0).into_owned();
    LinearSystem::new(a, b, c).unwrap()
}

/// Staircase system with `m` minimal, `u` uncontrollable and `o` unobservable
/// states, mixed by a random orthogonal change of basis.
pub fn nonminimal_system(rng: &mut ChaCha8Rng, m: usize, u: usize, o: usize) -> LinearSystem {
    let n = m + u + o;
    let mut a = uniform_matrix(rng, n, n, -1.0, 1.0) / (n as f64).sqrt();
    // Order: [unobservable | minimal | uncontrollable]. Upper block triangular
    // keeps the uncontrollable part unreachable and the unobservable part silent.
    for i in 0..n {
        for j in 0..n {
            let block = |k: usize| {
                if k < o {
                    0
                } else if k < o + m {
                    1
                } else {
                    2
                }
            };
            if block(i) > block(j) {
                a[(i, j)] = 0.0;
            }
        }
    }
    let mut b = uniform_matrix(rng, n, 1, 0.5, 1.0).column(0).into_owned();
    let mut c = uniform_matrix(rng, 1, n, 0.5, 1.0).row(0).into_owned();
    for k in o + m..n {
        b[k] = 0.0;
    }
    for k in 0..o {
        c[k] = 0.0;
    }
    let q = random_orthogonal(rng, n);
    LinearSystem::new(&q * a * q.transpose(), &q * b, c * q.transpose()).unwrap()
}

/// Probe system for `A[row, col]` of an `n`-state matrix that hides an
/// `m`-dimensional minimal part. The minimal part holds the probed entry with
/// `|A_jk| in [0.5, 1.5]`; the rest is mixed in by a transform that fixes
/// `e_col` and `e_row^T`.
pub fn embedded_probe(rng: &mut ChaCha8Rng, n: usize, m: usize) -> (LinearSystem, usize, usize) {
    assert!(m >= 2 && m <= n);
    let u = (n - m) / 2;
    let mut a = DMatrix::zeros(n, n);
    // Coordinates: 0 = output, 1 = input, [2, m) minimal, [m, m+u) uncontrollable, rest unobservable.
    let block = |k: usize| {
        if k < m {
            0
        } else if k < m + u {
            1
        } else {
            2
        }
    };
    for i in 0..n {
        for j in 0..n {
            let allowed = matches!((block(i), block(j)), (0, 0) | (0, 1) | (1, 1) | (2, _));
            if allowed {
                a[(i, j)] = rng.random_range(-1.0..1.0) / (n as f64).sqrt();
            }
        }
    }
    let entry = rng.random_range(0.5..1.5) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    a[(0, 1)] = entry;
    let mut t = DMatrix::<f64>::identity(n, n);
    for i in 2..n {
        t[(i, 0)] = rng.random_range(-0.3..0.3);
        for j in 2..n {
            t[(i, j)] += rng.random_range(-0.2..0.2);
        }
    }
    let t_inv = t.clone().try_inverse().unwrap();
    let mixed = &t * a * &t_inv;
    // Scatter the probe coordinates to random positions.
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    // New index of old state k.
    let mut place = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        place[old] = new;
    }
    let permuted = DMatrix::from_fn(n, n, |i, j| mixed[(order[i], order[j])]);
    let (row, col) = (place[0], place[1]);
    let sys = LinearSystem::new(permuted, unit(n, col), unit(n, row).transpose()).unwrap();
    (sys, row, col)
}

/// `det(CM)` predicted for the chain without field.
pub fn chain_determinant(theta: &[f64]) -> f64 {
    let mut det = 1.0;
    let mut prefix = 1.0;
    for (k, t) in theta.iter().enumerate() {
        prefix *= t;
        det *= if (k + 1) % 2 == 1 { -prefix } else { prefix };
    }
    det
}

/// `|M_k - M'_k| <= tol * rho^k` for the first `count` Markov parameters.
pub fn markov_close(
    reference: &LinearSystem,
    other: &LinearSystem,
    count: usize,
    tol: f64,
) -> Result<(), String> {
    let rho = reference.a.singular_values().max().max(1.0);
    let m1 = reference.markov_parameters(count);
    let m2 = other.markov_parameters(count);
    let mut scale = 1.0;
    for (k, (a, b)) in m1.iter().zip(&m2).enumerate() {
        if (a - b).abs() > tol * scale {
            return Err(format!("M_{k}: {a} vs {b} (scale {scale})"));
        }
        scale *= rho;
    }
    Ok(())
}
