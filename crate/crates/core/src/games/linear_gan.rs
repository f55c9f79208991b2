use alloc::vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::{estimate_lipschitz, Game};
use crate::linalg::{Matrix, Vector};
use crate::math;
use crate::rng;

/// Floor applied to every log argument.
pub const LOG_FLOOR: f64 = 1e-12;

/// Default size of the frozen sample batch.
pub const DEFAULT_BATCH: usize = 512;

/// Probes for diagnostics stay this close to the `e/d` initializer.
pub const PROBE_RADIUS: f64 = 0.02;

/// Linear discriminator `x_1` against a linear generator `x_2`:
///
/// `f_1 = −E log(x_1ᵀθ) − E log(1 − x_1ᵀdiag(x_2)z)`,
/// `f_2 = −E log(x_2ᵀdiag(x_1)z)`,
///
/// with `θ ~ N(μ, diag(σ))`, `z ~ N(0, I)` and expectations taken over a
/// batch frozen at construction.
#[derive(Debug, Clone)]
pub struct LinearGan {
    mu: Vector,
    sigma_diag: Vector,
    seed: u64,
    /// One sample per row.
    thetas: Matrix,
    zs: Matrix,
    structure: BlockStructure,
    lipschitz: f64,
}

/// Per-sample quantities shared by payoffs and gradients.
struct Terms {
    real: Vector,
    fake: Vector,
}

impl LinearGan {
    pub fn new(mu: Vector, sigma_diag: Vector, m_samples: usize, seed: u64) -> Result<Self> {
        let d = mu.len();
        if d == 0 {
            return Err(Error::InvalidParameter("linear GAN dimension must be positive".into()));
        }
        if sigma_diag.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: sigma_diag.len(),
            });
        }
        if sigma_diag.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter("sigma_diag must be positive".into()));
        }
        if m_samples == 0 {
            return Err(Error::InvalidParameter("linear GAN needs at least one sample".into()));
        }
        let mut r = rng::seeded(seed);
        let (thetas, zs) = draw_batch(&mut r, &mu, &sigma_diag, m_samples);
        let mut game = LinearGan {
            mu,
            sigma_diag,
            seed,
            thetas,
            zs,
            structure: BlockStructure::new(vec![d, d])?,
            lipschitz: f64::NAN,
        };
        game.lipschitz = estimate_lipschitz(&game, 64, PROBE_RADIUS, 0)?;
        Ok(game)
    }

    /// `P_r = N(μ, I)`.
    pub fn isotropic(mu: Vector, m_samples: usize, seed: u64) -> Result<Self> {
        let d = mu.len();
        Self::new(mu, Vector::from_element(d, 1.0), m_samples, seed)
    }

    /// `P_r = N(μ, diag(ξ))` with `ξ ~ U(0, 1]` drawn from `seed`.
    pub fn random_diagonal(mu: Vector, m_samples: usize, seed: u64) -> Result<Self> {
        let d = mu.len();
        let mut r = rng::seeded(seed ^ 0x5eed_d1a6);
        let xi = Vector::from_iterator(d, (0..d).map(|_| 1.0 - rng::uniform(&mut r, 0.0, 1.0)));
        Self::new(mu, xi, m_samples, seed)
    }

    pub fn dimension(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &Vector {
        &self.mu
    }

    pub fn sigma_diag(&self) -> &Vector {
        &self.sigma_diag
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn batch_size(&self) -> usize {
        self.thetas.nrows()
    }

    /// The frozen real and noise samples, one per row.
    pub fn batch(&self) -> (&Matrix, &Matrix) {
        (&self.thetas, &self.zs)
    }

    /// A fresh batch of `m` real and noise samples from its own seed.
    pub fn sample_batch(&self, m: usize, seed: u64) -> (Matrix, Matrix) {
        let mut r = rng::seeded(seed);
        draw_batch(&mut r, &self.mu, &self.sigma_diag, m)
    }

    /// The `x_1 = x_2 = e/d` starting point.
    pub fn uniform_start(&self) -> Vector {
        let d = self.dimension();
        Vector::from_element(2 * d, 1.0 / d as f64)
    }

    /// Number of log arguments that fell below [`LOG_FLOOR`] at `x`.
    pub fn clamped_terms(&self, x: &Vector) -> Result<usize> {
        let t = self.terms(x)?;
        let real = t.real.iter().filter(|&&a| a < LOG_FLOOR).count();
        let fake = t.fake.iter().filter(|&&w| w < LOG_FLOOR).count();
        let complement = t.fake.iter().filter(|&&w| 1.0 - w < LOG_FLOOR).count();
        Ok(real + fake + complement)
    }

    fn terms(&self, x: &Vector) -> Result<Terms> {
        self.structure.check_len(x)?;
        let d = self.dimension();
        let x1 = x.rows(0, d);
        let x2 = x.rows(d, d);
        let real = &self.thetas * x1;
        let gen = x1.component_mul(&x2);
        let fake = &self.zs * gen;
        Ok(Terms { real, fake })
    }
}

fn draw_batch(r: &mut dyn rand::RngCore, mu: &Vector, sigma_diag: &Vector, m: usize) -> (Matrix, Matrix) {
    let d = mu.len();
    let scale = sigma_diag.map(math::sqrt);
    let mut thetas = Matrix::zeros(m, d);
    for i in 0..m {
        let eps = rng::standard_normal(r, d);
        thetas.row_mut(i).copy_from(&(mu + scale.component_mul(&eps)).transpose());
    }
    let zs = rng::gaussian_matrix(r, m, d);
    (thetas, zs)
}

fn clamped_log(t: f64) -> f64 {
    math::ln(t.max(LOG_FLOOR))
}

/// `d/dt log(max(t, floor))`, zero on the clamped side.
fn clamped_log_slope(t: f64) -> f64 {
    if t >= LOG_FLOOR {
        1.0 / t
    } else {
        0.0
    }
}

fn clamped_log_curvature(t: f64) -> f64 {
    let s = clamped_log_slope(t);
    s * s
}

impl Game for LinearGan {
    fn name(&self) -> &str {
        "linear_gan"
    }

    fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        let t = self.terms(x)?;
        let m = self.batch_size() as f64;
        Ok(if player == 0 {
            let real: f64 = t.real.iter().map(|&a| clamped_log(a)).sum();
            let fake: f64 = t.fake.iter().map(|&w| clamped_log(1.0 - w)).sum();
            -(real + fake) / m
        } else {
            -t.fake.iter().map(|&w| clamped_log(w)).sum::<f64>() / m
        })
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        let t = self.terms(x)?;
        let d = self.dimension();
        let m = self.batch_size() as f64;
        let x1 = x.rows(0, d);
        let x2 = x.rows(d, d);
        // Both players see the noise term through `w = Σ_k x_1k x_2k z_k`.
        let (dw, real_weights) = if player == 0 {
            let dw = t.fake.map(|w| clamped_log_slope(1.0 - w));
            let real = t.real.map(clamped_log_slope);
            (dw, Some(real))
        } else {
            (t.fake.map(|w| -clamped_log_slope(w)), None)
        };
        let zw = self.zs.tr_mul(&dw);
        let mut g1 = zw.component_mul(&x2);
        let g2 = zw.component_mul(&x1);
        if let Some(w) = real_weights {
            g1 -= self.thetas.tr_mul(&w);
        }
        let mut g = Vector::zeros(2 * d);
        g.rows_mut(0, d).copy_from(&(g1 / m));
        g.rows_mut(d, d).copy_from(&(g2 / m));
        Ok(g)
    }

    /// Exact action of the Hessian of the clamped payoff; clamped terms contribute nothing.
    fn hessian_action(&self, player: usize, x: &Vector, d: &Vector) -> Result<Vector> {
        let t = self.terms(x)?;
        self.structure.check_len(d)?;
        let dim = self.dimension();
        let m = self.batch_size() as f64;
        let (x1, x2) = (x.rows(0, dim), x.rows(dim, dim));
        let (d1, d2) = (d.rows(0, dim), d.rows(dim, dim));
        // Noise term φ(w): `−log(1 − w)` for the discriminator, `−log w` for the generator.
        let (slope, curvature): (Vector, Vector) = if player == 0 {
            (
                t.fake.map(|w| clamped_log_slope(1.0 - w)),
                t.fake.map(|w| clamped_log_curvature(1.0 - w)),
            )
        } else {
            (t.fake.map(|w| -clamped_log_slope(w)), t.fake.map(clamped_log_curvature))
        };
        let dw = &self.zs * (x2.component_mul(&d1) + x1.component_mul(&d2));
        let zc = self.zs.tr_mul(&curvature.component_mul(&dw));
        let zs = self.zs.tr_mul(&slope);
        let mut h1 = x2.component_mul(&zc) + zs.component_mul(&d2);
        let h2 = x1.component_mul(&zc) + zs.component_mul(&d1);
        if player == 0 {
            let da = &self.thetas * d1;
            let coef = t.real.zip_map(&da, |a, da| clamped_log_curvature(a) * da);
            h1 += self.thetas.tr_mul(&coef);
        }
        let mut h = Vector::zeros(2 * dim);
        h.rows_mut(0, dim).copy_from(&(h1 / m));
        h.rows_mut(dim, dim).copy_from(&(h2 / m));
        Ok(h)
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        Some(self.lipschitz)
    }

    fn probe_point(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Vector {
        rng::uniform_ball(rng, &self.uniform_start(), radius.min(PROBE_RADIUS))
    }

    fn initial_point(&self, _rng: &mut dyn rand::RngCore) -> Vector {
        self.uniform_start()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn game() -> LinearGan {
        LinearGan::isotropic(Vector::from_element(4, 2.0), 64, 3).unwrap()
    }

    #[test]
    fn batch_is_reproducible() {
        let a = game();
        let b = game();
        assert_eq!(a.batch(), b.batch());
        let x = a.uniform_start();
        assert_eq!(a.payoff(0, &x).unwrap().to_bits(), b.payoff(0, &x).unwrap().to_bits());
    }

    #[test]
    fn clamped_payoffs_stay_finite() {
        let g = game();
        let x = Vector::from_element(8, -1.0);
        assert!(g.payoff(0, &x).unwrap().is_finite());
        assert!(g.payoff(1, &x).unwrap().is_finite());
        assert!(g.clamped_terms(&x).unwrap() > 0);
    }

    #[test]
    fn gradient_matches_differences_at_start() {
        let g = game();
        let x = g.uniform_start() + Vector::from_fn(8, |i, _| 0.01 * i as f64);
        for p in 0..2 {
            let grad = g.gradient(p, &x).unwrap();
            let h = 1e-7;
            for k in 0..8 {
                let mut e = Vector::zeros(8);
                e[k] = h;
                let fd = (g.payoff(p, &(&x + &e)).unwrap() - g.payoff(p, &(&x - &e)).unwrap()) / (2.0 * h);
                assert!((fd - grad[k]).abs() <= 1e-5 * (1.0 + grad[k].abs()), "p{} k{}: {} vs {}", p, k, fd, grad[k]);
            }
        }
    }

    #[test]
    fn hessian_action_matches_gradient_differences() {
        let g = game();
        let x = Vector::from_fn(8, |i, _| 0.3 + 0.05 * i as f64);
        let d = Vector::from_fn(8, |i, _| if i % 2 == 0 { 1.0 } else { -0.5 });
        for p in 0..2 {
            let hv = g.hessian_action(p, &x, &d).unwrap();
            let h = 1e-6;
            let fd = (g.gradient(p, &(&x + &d * h)).unwrap() - g.gradient(p, &(&x - &d * h)).unwrap()) / (2.0 * h);
            assert!((&hv - &fd).norm() <= 1e-5 * (1.0 + hv.norm()), "{}: {} vs {}", p, hv, fd);
        }
    }

    #[test]
    fn rejects_nonpositive_variance() {
        assert!(LinearGan::new(Vector::zeros(2), Vector::from_vec(vec![1.0, 0.0]), 8, 0).is_err());
    }
}
