use alloc::vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::Game;
use crate::linalg::{self, Matrix, Vector};
use crate::math;
use crate::rng;

/// Probes are kept inside this ball so the Hessian bound below holds.
pub const PROBE_RADIUS: f64 = 5.0;

/// Min-max game `min_{X_1} max_{X_2} X_2 • (UUᵀ − X_1X_1ᵀ)` with symmetric `X_2`.
///
/// Player 1 owns `X_1 ∈ R^{n×p}` stored column-major. Player 2 owns the
/// upper triangle of `X_2`, column by column, with off-diagonal entries scaled
/// by `√2` so that the Euclidean inner product is the trace inner product.
#[derive(Debug, Clone)]
pub struct CovarianceGame {
    u: Matrix,
    target: Matrix,
    structure: BlockStructure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceGni {
    pub value: f64,
    /// Whether `I + ηX_2 ⪰ 0`.
    pub in_convex_region: bool,
}

impl CovarianceGame {
    pub fn new(u: Matrix) -> Result<Self> {
        let (n, p) = u.shape();
        if n == 0 || p == 0 {
            return Err(Error::InvalidParameter("U must be non-empty".into()));
        }
        let target = &u * u.transpose();
        Ok(CovarianceGame {
            u,
            target,
            structure: BlockStructure::new(vec![n * p, n * (n + 1) / 2])?,
        })
    }

    pub fn random(n: usize, p: usize, seed: u64) -> Result<Self> {
        let mut r = rng::seeded(seed);
        Self::new(rng::gaussian_matrix(&mut r, n, p))
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    fn n(&self) -> usize {
        self.u.nrows()
    }

    fn p(&self) -> usize {
        self.u.ncols()
    }

    pub fn x1(&self, x: &Vector) -> Matrix {
        let len = self.n() * self.p();
        Matrix::from_column_slice(self.n(), self.p(), x.rows(0, len).as_slice())
    }

    pub fn x2(&self, x: &Vector) -> Matrix {
        let off = self.structure.offsets()[1];
        unpack_symmetric(self.n(), &x.rows(off, self.structure.size(1)).into_owned())
    }

    pub fn pack(&self, x1: &Matrix, x2: &Matrix) -> Result<Vector> {
        if x1.shape() != self.u.shape() || x2.shape() != (self.n(), self.n()) {
            return Err(Error::InvalidParameter("matrix shapes do not match the game".into()));
        }
        let b1 = Vector::from_column_slice(x1.as_slice());
        self.structure.assemble(&[b1, pack_symmetric(x2)])
    }

    /// `4η(X_2(I + ηX_2)X_2) • X_1X_1ᵀ + η‖UUᵀ − X_1X_1ᵀ‖_F²`.
    pub fn gni_closed_form(&self, x: &Vector, eta: f64) -> CovarianceGni {
        let x1 = self.x1(x);
        let x2 = self.x2(x);
        let n = self.n();
        let shifted = Matrix::identity(n, n) + &x2 * eta;
        let gram = &x1 * x1.transpose();
        let first = 4.0 * eta * linalg::frobenius_inner(&(&x2 * &shifted * &x2), &gram);
        let second = eta * (&self.target - &gram).norm_squared();
        CovarianceGni {
            value: first + second,
            in_convex_region: linalg::min_eigenvalue(&shifted) >= -1e-12,
        }
    }

    pub fn equilibrium(&self) -> Vector {
        self.pack(&self.u, &Matrix::zeros(self.n(), self.n()))
            .expect("shapes match")
    }

    /// `(∇_{X_1} f_1, ∇_{X_2} f_1)` packed in joint layout.
    fn f1_gradient(&self, x1: &Matrix, x2: &Matrix) -> Vector {
        let g1 = x2 * x1 * -2.0;
        let g2 = &self.target - x1 * x1.transpose();
        let mut out = Vector::zeros(self.structure.total());
        let len = g1.len();
        out.rows_mut(0, len).copy_from_slice(g1.as_slice());
        out.rows_mut(len, self.structure.size(1)).copy_from(&pack_symmetric(&g2));
        out
    }
}

fn pack_symmetric(m: &Matrix) -> Vector {
    let n = m.nrows();
    let mut out = Vector::zeros(n * (n + 1) / 2);
    let mut k = 0;
    for j in 0..n {
        for i in 0..=j {
            out[k] = if i == j {
                m[(i, j)]
            } else {
                core::f64::consts::SQRT_2 * 0.5 * (m[(i, j)] + m[(j, i)])
            };
            k += 1;
        }
    }
    out
}

fn unpack_symmetric(n: usize, v: &Vector) -> Matrix {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    let inv = 1.0 / math::sqrt(2.0);
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                m[(i, j)] = v[k] * inv;
                m[(j, i)] = v[k] * inv;
            }
            k += 1;
        }
    }
    m
}

impl Game for CovarianceGame {
    fn name(&self) -> &str {
        "covariance"
    }

    fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        self.structure.check_len(x)?;
        let x1 = self.x1(x);
        let f1 = linalg::frobenius_inner(&self.x2(x), &(&self.target - &x1 * x1.transpose()));
        Ok(if player == 0 { f1 } else { -f1 })
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        self.structure.check_len(x)?;
        let g = self.f1_gradient(&self.x1(x), &self.x2(x));
        Ok(if player == 0 { g } else { -g })
    }

    fn hessian_action(&self, player: usize, x: &Vector, d: &Vector) -> Result<Vector> {
        self.structure.check_len(x)?;
        self.structure.check_len(d)?;
        let (x1, x2) = (self.x1(x), self.x2(x));
        let (d1, d2) = (self.x1(d), self.x2(d));
        let h1 = (&x2 * &d1 + &d2 * &x1) * -2.0;
        let h2 = -(&d1 * x1.transpose() + &x1 * d1.transpose());
        let h = self.structure.assemble(&[Vector::from_column_slice(h1.as_slice()), pack_symmetric(&h2)])?;
        Ok(if player == 0 { h } else { -h })
    }

    /// Valid on the probe ball: `‖∇²f_i‖ ≤ 2(2‖D_1‖ + ‖D_2‖)R ≤ 2√5 R` for unit `(D_1, D_2)`.
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(2.0 * math::sqrt(5.0) * PROBE_RADIUS)
    }

    fn known_equilibrium(&self) -> Option<Vector> {
        Some(self.equilibrium())
    }

    fn probe_point(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Vector {
        rng::uniform_ball(rng, &Vector::zeros(self.structure.total()), radius.min(PROBE_RADIUS))
    }
}
