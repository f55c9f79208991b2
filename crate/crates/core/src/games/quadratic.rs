use alloc::vec::Vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::{Game, GameClass};
use crate::games::bilinear::BilinearGame;
use crate::linalg::{self, Matrix, Vector};
use crate::rng;

/// `f_i(x) = ½ xᵀQ_i x + r_iᵀx` over the joint vector, one symmetric `Q_i` per player.
#[derive(Debug, Clone)]
pub struct QuadraticGame {
    structure: BlockStructure,
    q: Vec<Matrix>,
    r: Vec<Vector>,
    lipschitz: f64,
    player_convex: bool,
}

/// Sign pattern of the random spectra drawn by [`QuadraticGame::random`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Definiteness {
    Definite,
    Indefinite,
}

/// Conditions under which SNPs of a quadratic game are GNI minimizers and NE.
#[derive(Debug, Clone, PartialEq)]
pub struct StationarityCertificate {
    /// Smallest singular value of the stacked own-block Jacobian.
    pub jacobian_min_singular_value: f64,
    pub jacobian_nonsingular: bool,
    /// Whether each own-block Hessian `F_iᵀQ_iF_i` is PSD (to −1e-10).
    pub player_convex: Vec<bool>,
    /// Smallest eigenvalue of `2I_i − ηF_iᵀQ_iF_i` per player.
    pub d_margins: Vec<f64>,
}

impl StationarityCertificate {
    pub fn holds(&self) -> bool {
        self.jacobian_nonsingular
            && self.player_convex.iter().all(|&c| c)
            && self.d_margins.iter().all(|&m| m > 0.0)
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

impl QuadraticGame {
    pub fn new(structure: BlockStructure, q: Vec<Matrix>, r: Vec<Vector>) -> Result<Self> {
        let n = structure.total();
        let players = structure.players();
        if q.len() != players || r.len() != players {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} players but {} matrices and {} linear terms",
                players,
                q.len(),
                r.len()
            )));
        }
        for (i, (qi, ri)) in q.iter().zip(&r).enumerate() {
            if qi.nrows() != n || qi.ncols() != n || ri.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: if ri.len() != n { ri.len() } else { qi.nrows().max(qi.ncols()) },
                });
            }
            let scale = 1.0 + qi.amax();
            if (qi - qi.transpose()).amax() > SYMMETRY_TOL * scale {
                return Err(Error::InvalidParameter(alloc::format!("Q_{} is not symmetric", i + 1)));
            }
            if qi.iter().chain(ri.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(alloc::format!("data of player {} is not finite", i + 1)));
            }
        }
        let lipschitz = q.iter().map(linalg::spectral_norm).fold(0.0, f64::max);
        let player_convex = (0..players).all(|i| linalg::min_eigenvalue(&own_block(&structure, &q[i], i)) >= -1e-10);
        Ok(QuadraticGame {
            structure,
            q,
            r,
            lipschitz,
            player_convex,
        })
    }

    /// Embeds a bilinear game: `Q_1 = [[0, Q], [Qᵀ, 0]]`, `Q_2 = −Q_1`.
    pub fn from_bilinear(game: &BilinearGame) -> Result<Self> {
        let h = game.hessian_f1();
        let lin = game.structure().assemble(&[game.q1().clone(), game.q2().clone()])?;
        Self::new(game.structure().clone(), alloc::vec![h.clone(), -h], alloc::vec![lin.clone(), -lin])
    }

    /// Seeded instance with `Q_i = U_i diag(s_i) U_iᵀ`, `|s| ~ U[0.5, 1.5]` and
    /// standard normal `r_i`. Indefinite spectra carry both signs.
    pub fn random(structure: BlockStructure, definiteness: Definiteness, seed: u64) -> Result<Self> {
        let n = structure.total();
        if definiteness == Definiteness::Indefinite && n < 2 {
            return Err(Error::InvalidParameter("an indefinite spectrum needs n >= 2".into()));
        }
        let mut g = rng::seeded(seed);
        let mut q = Vec::with_capacity(structure.players());
        let mut r = Vec::with_capacity(structure.players());
        for _ in 0..structure.players() {
            let u = rng::orthogonal(&mut g, n);
            let mut s = rng::uniform_box(&mut g, n, 0.5, 1.5);
            if definiteness == Definiteness::Indefinite {
                for k in 0..n {
                    if rng::uniform(&mut g, 0.0, 1.0) < 0.5 {
                        s[k] = -s[k];
                    }
                }
                if s.iter().all(|&v| v > 0.0) {
                    s[0] = -s[0];
                }
                if s.iter().all(|&v| v < 0.0) {
                    s[n - 1] = -s[n - 1];
                }
            }
            q.push(symmetric_from_spectrum(&u, &s));
            r.push(rng::standard_normal(&mut g, n));
        }
        Self::new(structure, q, r)
    }

    /// Every player shares `Q = U diag(s) Uᵀ` with `λ_min(Q) = β`, so the
    /// stacked own-block gradient is `β`-strongly monotone.
    pub fn strongly_monotone(structure: BlockStructure, beta: f64, seed: u64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(alloc::format!("beta must be positive, got {}", beta)));
        }
        let n = structure.total();
        let mut g = rng::seeded(seed);
        let u = rng::orthogonal(&mut g, n);
        let hi = beta.max(1.5);
        let mut s = Vector::zeros(n);
        s[0] = beta;
        for k in 1..n {
            s[k] = if hi > beta { rng::uniform(&mut g, beta, hi) } else { beta };
        }
        let shared = symmetric_from_spectrum(&u, &s);
        let q = (0..structure.players()).map(|_| shared.clone()).collect();
        let r = (0..structure.players()).map(|_| rng::standard_normal(&mut g, n)).collect();
        Self::new(structure, q, r)
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.q
    }

    pub fn linear_terms(&self) -> &[Vector] {
        &self.r
    }

    /// Jacobian of the stacked own-block gradient: block row `i` is `F_iᵀQ_i`.
    pub fn jacobian(&self) -> Matrix {
        let n = self.structure.total();
        let mut j = Matrix::zeros(n, n);
        for i in 0..self.structure.players() {
            let rg = self.structure.range(i);
            j.rows_mut(rg.start, rg.len()).copy_from(&self.q[i].rows(rg.start, rg.len()));
        }
        j
    }

    fn stacked_linear(&self) -> Vector {
        let mut out = Vector::zeros(self.structure.total());
        for i in 0..self.structure.players() {
            out += self.structure.mask(i, &self.r[i]);
        }
        out
    }

    /// Solves `J x = −r` when the Jacobian is nonsingular.
    pub fn nash_point(&self) -> Option<Vector> {
        let j = self.jacobian();
        if !self.certificate_jacobian(&j).1 {
            return None;
        }
        j.lu().solve(&(-self.stacked_linear()))
    }

    fn certificate_jacobian(&self, j: &Matrix) -> (f64, bool) {
        let smin = linalg::smallest_singular_value(j);
        let smax = linalg::spectral_norm(j);
        (smin, smin > 1e-10 * (1.0 + smax))
    }

    pub fn stationarity_certificate(&self, eta: f64) -> StationarityCertificate {
        let (smin, nonsingular) = self.certificate_jacobian(&self.jacobian());
        let mut player_convex = Vec::new();
        let mut d_margins = Vec::new();
        for i in 0..self.structure.players() {
            let own = own_block(&self.structure, &self.q[i], i);
            player_convex.push(linalg::min_eigenvalue(&own) >= -1e-10);
            let ni = own.nrows();
            let d = Matrix::identity(ni, ni) * 2.0 - own * eta;
            d_margins.push(linalg::min_eigenvalue(&d));
        }
        StationarityCertificate {
            jacobian_min_singular_value: smin,
            jacobian_nonsingular: nonsingular,
            player_convex,
            d_margins,
        }
    }

    /// Closed-form GNI value, summed player by player:
    /// `½xᵀ(Q_i − Q̂_iᵀQ_iQ̂_i)x + η r_iᵀE_iQ_i(I + Q̂_i)x + ½η r_iᵀ(2E_i − ηE_iQ_iE_i)r_i`
    /// with `Q̂_i = I − ηE_iQ_i`.
    pub fn gni_closed_form(&self, x: &Vector, eta: f64) -> f64 {
        let n = self.structure.total();
        let id = Matrix::identity(n, n);
        let mut total = 0.0;
        for i in 0..self.structure.players() {
            let e = mask_matrix(&self.structure, i);
            let qi = &self.q[i];
            let ri = &self.r[i];
            let qhat = &id - &e * qi * eta;
            let quad = qi - qhat.transpose() * qi * &qhat;
            let lin = (&e * qi * (&id + &qhat)).tr_mul(ri) * eta;
            let cst = (&e * 2.0 - &e * qi * &e * eta) * ri;
            total += 0.5 * x.dot(&(quad * x)) + lin.dot(x) + 0.5 * eta * ri.dot(&cst);
        }
        total
    }
}

fn symmetric_from_spectrum(u: &Matrix, s: &Vector) -> Matrix {
    linalg::symmetrize(&(u * Matrix::from_diagonal(s) * u.transpose()))
}

fn own_block(s: &BlockStructure, q: &Matrix, i: usize) -> Matrix {
    let r = s.range(i);
    q.view((r.start, r.start), (r.len(), r.len())).into_owned()
}

fn mask_matrix(s: &BlockStructure, i: usize) -> Matrix {
    let mut diag = Vector::zeros(s.total());
    for k in s.range(i) {
        diag[k] = 1.0;
    }
    Matrix::from_diagonal(&diag)
}

impl Game for QuadraticGame {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        self.structure.check_len(x)?;
        Ok(0.5 * x.dot(&(&self.q[player] * x)) + self.r[player].dot(x))
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        self.structure.check_len(x)?;
        Ok(&self.q[player] * x + &self.r[player])
    }

    fn hessian_action(&self, player: usize, _x: &Vector, d: &Vector) -> Result<Vector> {
        self.structure.check_len(d)?;
        Ok(&self.q[player] * d)
    }

    fn analytic_lipschitz(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn class(&self) -> GameClass {
        GameClass::Quadratic
    }

    fn constant_hessian(&self, player: usize) -> Option<Matrix> {
        Some(self.q[player].clone())
    }

    fn player_convex(&self) -> bool {
        self.player_convex
    }

    fn known_equilibrium(&self) -> Option<Vector> {
        if self.player_convex {
            self.nash_point()
        } else {
            None
        }
    }
}
