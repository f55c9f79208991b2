use alloc::vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::{Game, GameClass};
use crate::linalg::{self, Matrix, Vector};
use crate::rng;

/// Two-player zero-sum game `f_1 = x_1ᵀQx_2 + q_1ᵀx_1 + q_2ᵀx_2 = −f_2`.
#[derive(Debug, Clone)]
pub struct BilinearGame {
    q: Matrix,
    q1: Vector,
    q2: Vector,
    structure: BlockStructure,
    coupling_norm: f64,
}

/// Minimum-norm equilibrium candidate from the pseudo-inverse of `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearNashPoint {
    pub point: Vector,
    /// False when `q_2 ∉ range(Qᵀ)` or `q_1 ∉ range(Q)`; the point is then only a
    /// least-squares minimizer of the residuals.
    pub exact: bool,
}

impl BilinearGame {
    pub fn new(q: Matrix, q1: Vector, q2: Vector) -> Result<Self> {
        if q.nrows() != q1.len() || q.ncols() != q2.len() {
            return Err(Error::InvalidParameter(alloc::format!(
                "Q is {}x{} but q1 has {} and q2 has {} entries",
                q.nrows(),
                q.ncols(),
                q1.len(),
                q2.len()
            )));
        }
        let structure = BlockStructure::new(vec![q.nrows(), q.ncols()])?;
        let coupling_norm = linalg::spectral_norm(&q);
        Ok(BilinearGame {
            q,
            q1,
            q2,
            structure,
            coupling_norm,
        })
    }

    /// Seeded instance whose singular values are drawn from `[0.5, 1.5]`, with
    /// standard normal `q_1`, `q_2`.
    pub fn random(n1: usize, n2: usize, seed: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidParameter("bilinear blocks must be non-empty".into()));
        }
        let mut r = rng::seeded(seed);
        let u = rng::orthogonal(&mut r, n1);
        let v = rng::orthogonal(&mut r, n2);
        let k = n1.min(n2);
        let s = rng::uniform_box(&mut r, k, 0.5, 1.5);
        let q = u.columns(0, k) * Matrix::from_diagonal(&s) * v.columns(0, k).transpose();
        let q1 = rng::standard_normal(&mut r, n1);
        let q2 = rng::standard_normal(&mut r, n2);
        Self::new(q, q1, q2)
    }

    pub fn coupling(&self) -> &Matrix {
        &self.q
    }

    pub fn q1(&self) -> &Vector {
        &self.q1
    }

    pub fn q2(&self) -> &Vector {
        &self.q2
    }

    pub fn coupling_norm(&self) -> f64 {
        self.coupling_norm
    }

    fn blocks(&self, x: &Vector) -> (Vector, Vector) {
        (self.structure.select(0, x), self.structure.select(1, x))
    }

    fn f1(&self, x: &Vector) -> f64 {
        let (x1, x2) = self.blocks(x);
        x1.dot(&(&self.q * &x2)) + self.q1.dot(&x1) + self.q2.dot(&x2)
    }

    /// `(Qᵀx_1 + q_2, Qx_2 + q_1)`.
    pub fn residuals(&self, x: &Vector) -> (Vector, Vector) {
        let (x1, x2) = self.blocks(x);
        (self.q.tr_mul(&x1) + &self.q2, &self.q * x2 + &self.q1)
    }

    /// Closed-form `V(x;η) = η(‖Qᵀx_1 + q_2‖² + ‖Qx_2 + q_1‖²)`.
    pub fn gni_closed_form(&self, x: &Vector, eta: f64) -> f64 {
        let (a, b) = self.residuals(x);
        eta * (a.norm_squared() + b.norm_squared())
    }

    /// `x_1* = −(Qᵀ)†q_2`, `x_2* = −Q†q_1`.
    pub fn nash_point(&self) -> BilinearNashPoint {
        let pinv = linalg::pseudo_inverse(&self.q, 1e-12);
        let x1 = -(pinv.transpose() * &self.q2);
        let x2 = -(&pinv * &self.q1);
        let point = self
            .structure
            .assemble(&[x1, x2])
            .expect("blocks match the structure");
        let (a, b) = self.residuals(&point);
        let scale = 1.0 + self.q1.norm().max(self.q2.norm());
        let exact = a.norm() <= 1e-10 * scale && b.norm() <= 1e-10 * scale;
        BilinearNashPoint { point, exact }
    }

    pub fn hessian_f1(&self) -> Matrix {
        let (n1, n2) = (self.q.nrows(), self.q.ncols());
        let mut h = Matrix::zeros(n1 + n2, n1 + n2);
        h.view_mut((0, n1), (n1, n2)).copy_from(&self.q);
        h.view_mut((n1, 0), (n2, n1)).copy_from(&self.q.transpose());
        h
    }
}

impl Game for BilinearGame {
    fn name(&self) -> &str {
        "bilinear"
    }

    fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        self.structure.check_len(x)?;
        let f1 = self.f1(x);
        Ok(if player == 0 { f1 } else { -f1 })
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        self.structure.check_len(x)?;
        let (x1, x2) = self.blocks(x);
        let g1 = &self.q * x2 + &self.q1;
        let g2 = self.q.tr_mul(&x1) + &self.q2;
        let g = self.structure.assemble(&[g1, g2])?;
        Ok(if player == 0 { g } else { -g })
    }

    fn hessian_action(&self, player: usize, _x: &Vector, d: &Vector) -> Result<Vector> {
        self.structure.check_len(d)?;
        let (d1, d2) = self.blocks(d);
        let h = self.structure.assemble(&[&self.q * d2, self.q.tr_mul(&d1)])?;
        Ok(if player == 0 { h } else { -h })
    }

    fn analytic_lipschitz(&self) -> Option<f64> {
        Some(self.coupling_norm)
    }

    fn class(&self) -> GameClass {
        GameClass::Bilinear {
            coupling_norm: self.coupling_norm,
        }
    }

    fn constant_hessian(&self, player: usize) -> Option<Matrix> {
        let h = self.hessian_f1();
        Some(if player == 0 { h } else { -h })
    }

    fn player_convex(&self) -> bool {
        true
    }

    fn known_equilibrium(&self) -> Option<Vector> {
        let nash = self.nash_point();
        nash.exact.then_some(nash.point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(q: f64, q1: f64, q2: f64) -> BilinearGame {
        BilinearGame::new(
            Matrix::from_row_slice(1, 1, &[q]),
            Vector::from_vec(vec![q1]),
            Vector::from_vec(vec![q2]),
        )
        .unwrap()
    }

    #[test]
    fn payoffs_and_gradient_at_three_two() {
        let g = scalar(1.0, 0.0, 0.0);
        let x = Vector::from_vec(vec![3.0, 2.0]);
        assert_eq!(g.payoff(0, &x).unwrap(), 6.0);
        assert_eq!(g.payoff(1, &x).unwrap(), -6.0);
        assert_eq!(g.gradient(0, &x).unwrap(), Vector::from_vec(vec![2.0, 3.0]));
        assert_eq!(g.analytic_lipschitz(), Some(1.0));
    }

    #[test]
    fn scalar_nash_point() {
        let nash = scalar(2.0, 4.0, 6.0).nash_point();
        assert!(nash.exact);
        assert!((nash.point[0] + 3.0).abs() < 1e-14);
        assert!((nash.point[1] + 2.0).abs() < 1e-14);
        let zero = scalar(1.5, 0.0, 0.0).nash_point();
        assert_eq!(zero.point, Vector::zeros(2));
    }

    #[test]
    fn singular_coupling_without_exact_equilibrium_is_flagged() {
        let q = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let g = BilinearGame::new(q, Vector::from_vec(vec![0.0, 1.0]), Vector::zeros(2)).unwrap();
        let nash = g.nash_point();
        assert!(!nash.exact);
        assert!(g.known_equilibrium().is_none());
    }

    #[test]
    fn closed_form_matches_hand_value() {
        let g = scalar(1.0, 0.0, 0.0);
        assert_eq!(g.gni_closed_form(&Vector::from_vec(vec![1.0, 1.0]), 0.5), 1.0);
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        assert!(BilinearGame::new(Matrix::zeros(2, 3), Vector::zeros(2), Vector::zeros(2)).is_err());
    }
}
