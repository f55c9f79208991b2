//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::math;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// Largest singular value.
pub fn spectral_norm(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

/// Smallest singular value of a square or rectangular matrix.
pub fn smallest_singular_value(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(f64::INFINITY, |acc, &s| acc.min(s))
}

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: &Matrix) -> Matrix {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn symmetric_eigenvalues(m: &Matrix) -> Vector {
    let mut values: alloc::vec::Vec<f64> = symmetrize(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    Vector::from_vec(values)
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    symmetric_eigenvalues(m)[0]
}

/// Moore-Penrose pseudo-inverse, discarding singular values below `rcond * σ_max`.
pub fn pseudo_inverse(m: &Matrix, rcond: f64) -> Matrix {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let cutoff = rcond * smax;
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut out = Matrix::zeros(m.ncols(), m.nrows());
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            out += (vt.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    out
}

/// Largest |eigenvalue| of a symmetric linear operator by power iteration.
///
/// The operator error short-circuits the iteration.
pub fn power_iteration<E>(
    mut apply: impl FnMut(&Vector) -> Result<Vector, E>,
    start: Vector,
    max_iters: usize,
    rel_tol: f64,
) -> Result<f64, E> {
    let n0 = start.norm();
    if n0 == 0.0 {
        return Ok(0.0);
    }
    let mut v = start / n0;
    let mut estimate = 0.0;
    for _ in 0..max_iters {
        let w = apply(&v)?;
        let norm = w.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Ok(norm);
        }
        let converged = (norm - estimate).abs() <= rel_tol * norm;
        estimate = norm;
        v = w / norm;
        if converged {
            break;
        }
    }
    Ok(estimate)
}

/// Relative difference `‖a − b‖ / (1 + ‖b‖)`.
pub fn relative_gap(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

pub fn frobenius_inner(a: &Matrix, b: &Matrix) -> f64 {
    a.component_mul(b).sum()
}

pub(crate) fn norm_sq(v: &Vector) -> f64 {
    v.dot(v)
}

#[allow(dead_code)]
pub(crate) fn norm(v: &Vector) -> f64 {
    math::sqrt(norm_sq(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_inverse_of_rank_deficient_matrix() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = pseudo_inverse(&m, 1e-12);
        assert_eq!(p, m);
    }

    #[test]
    fn eigenvalues_are_sorted() {
        let m = Matrix::from_diagonal(&Vector::from_vec(alloc::vec![3.0, -1.0, 2.0]));
        let e = symmetric_eigenvalues(&m);
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[2] - 3.0).abs() < 1e-14);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn power_iteration_finds_largest_magnitude() {
        let m = Matrix::from_diagonal(&Vector::from_vec(alloc::vec![1.0, -4.0, 2.0]));
        let est = power_iteration::<()>(|v| Ok(&m * v), Vector::from_element(3, 1.0), 500, 1e-13).unwrap();
        assert!((est - 4.0).abs() < 1e-9);
    }
}
