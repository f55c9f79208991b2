//! Seeded sampling helpers. Every stochastic routine in the crate goes through these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{Matrix, Vector};
use crate::math;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal(rng: &mut dyn rand::RngCore, n: usize) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(rng)))
}

pub fn uniform_box(rng: &mut dyn rand::RngCore, n: usize, lo: f64, hi: f64) -> Vector {
    Vector::from_iterator(n, (0..n).map(|_| rng.random_range(lo..hi)))
}

/// Uniform sample from the Euclidean ball of `radius` around `center`.
pub fn uniform_ball(rng: &mut dyn rand::RngCore, center: &Vector, radius: f64) -> Vector {
    let n = center.len();
    if n == 0 {
        return center.clone();
    }
    let dir = standard_normal(rng, n);
    let norm = dir.norm();
    let u: f64 = rng.random_range(0.0..1.0);
    let r = radius * libm::pow(u, 1.0 / n as f64);
    if norm == 0.0 {
        return center.clone();
    }
    center + dir * (r / norm)
}

pub fn gaussian_matrix(rng: &mut dyn rand::RngCore, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthogonal matrix from the QR factorisation of a Gaussian matrix.
pub fn orthogonal(rng: &mut dyn rand::RngCore, n: usize) -> Matrix {
    let qr = gaussian_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

pub fn unit_vector(rng: &mut dyn rand::RngCore, n: usize) -> Vector {
    let v = standard_normal(rng, n);
    let norm = v.norm();
    if norm == 0.0 {
        let mut e = Vector::zeros(n);
        if n > 0 {
            e[0] = 1.0;
        }
        e
    } else {
        v / norm
    }
}

pub fn uniform(rng: &mut dyn rand::RngCore, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

#[allow(dead_code)]
pub(crate) fn normal_scalar(rng: &mut dyn rand::RngCore, mean: f64, var: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mean + math::sqrt(var) * z
}
