//! Concrete games with closed-form oracles.

mod bilinear;
mod covariance;
mod dirac;
mod linear_gan;
mod quadratic;

pub use bilinear::{BilinearGame, BilinearNashPoint};
pub use covariance::{CovarianceGame, CovarianceGni};
pub use dirac::{DiracDeltaGan, DIRAC_INIT_BOX};
pub use linear_gan::{LinearGan, DEFAULT_BATCH, LOG_FLOOR};
pub use quadratic::{Definiteness, QuadraticGame, StationarityCertificate};

use alloc::vec;
use alloc::vec::Vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::{Game, GameClass};
use crate::linalg::{Matrix, Vector};
use crate::rng;

/// Spectrum used by [`GameKind::Quadratic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticSpectrum {
    Definite,
    Indefinite,
    StronglyMonotone { beta: f64 },
}

/// Real-data covariance of the linear GAN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GanCovariance {
    Identity,
    /// `diag(ξ)` with `ξ ~ U(0, 1]`.
    RandomDiagonal,
}

/// A game family together with its size parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GameKind {
    Bilinear { n1: usize, n2: usize },
    Quadratic { block_sizes: Vec<usize>, spectrum: QuadraticSpectrum },
    DiracDelta { theta: f64 },
    LinearGan { d: usize, mu_scale: f64, covariance: GanCovariance, m_samples: usize },
    Covariance { n: usize, p: usize },
}

impl GameKind {
    pub fn label(&self) -> &'static str {
        match self {
            GameKind::Bilinear { .. } => "bilinear",
            GameKind::Quadratic { .. } => "quadratic",
            GameKind::DiracDelta { .. } => "dirac_delta",
            GameKind::LinearGan { .. } => "linear_gan",
            GameKind::Covariance { .. } => "covariance",
        }
    }

    /// Default sizes for each family, keyed by label.
    pub fn default_for(label: &str) -> Option<GameKind> {
        Some(match label {
            "bilinear" => GameKind::Bilinear { n1: 10, n2: 10 },
            "quadratic" => GameKind::Quadratic {
                block_sizes: vec![20, 20],
                spectrum: QuadraticSpectrum::Definite,
            },
            "dirac_delta" => GameKind::DiracDelta { theta: -2.0 },
            "linear_gan" => GameKind::LinearGan {
                d: 10,
                mu_scale: 2.0,
                covariance: GanCovariance::Identity,
                m_samples: DEFAULT_BATCH,
            },
            "covariance" => GameKind::Covariance { n: 3, p: 2 },
            _ => return None,
        })
    }

    pub const LABELS: [&'static str; 5] = ["bilinear", "quadratic", "dirac_delta", "linear_gan", "covariance"];
}

/// A constructed game of any built-in family.
#[derive(Debug, Clone)]
pub enum GameInstance {
    Bilinear(BilinearGame),
    Quadratic(QuadraticGame),
    DiracDelta(DiracDeltaGan),
    LinearGan(LinearGan),
    Covariance(CovarianceGame),
}

pub fn make_game(kind: &GameKind, seed: u64) -> Result<GameInstance> {
    Ok(match kind {
        GameKind::Bilinear { n1, n2 } => GameInstance::Bilinear(BilinearGame::random(*n1, *n2, seed)?),
        GameKind::Quadratic { block_sizes, spectrum } => {
            let s = BlockStructure::new(block_sizes.clone())?;
            GameInstance::Quadratic(match spectrum {
                QuadraticSpectrum::Definite => QuadraticGame::random(s, Definiteness::Definite, seed)?,
                QuadraticSpectrum::Indefinite => QuadraticGame::random(s, Definiteness::Indefinite, seed)?,
                QuadraticSpectrum::StronglyMonotone { beta } => QuadraticGame::strongly_monotone(s, *beta, seed)?,
            })
        }
        GameKind::DiracDelta { theta } => GameInstance::DiracDelta(DiracDeltaGan::new(*theta)?),
        GameKind::LinearGan {
            d,
            mu_scale,
            covariance,
            m_samples,
        } => {
            if *d == 0 {
                return Err(Error::InvalidParameter("linear GAN dimension must be positive".into()));
            }
            let mu = Vector::from_element(*d, *mu_scale);
            GameInstance::LinearGan(match covariance {
                GanCovariance::Identity => LinearGan::isotropic(mu, *m_samples, seed)?,
                GanCovariance::RandomDiagonal => LinearGan::random_diagonal(mu, *m_samples, seed)?,
            })
        }
        GameKind::Covariance { n, p } => GameInstance::Covariance(CovarianceGame::random(*n, *p, seed)?),
    })
}

/// How starting points of a multi-start study are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum InitDistribution {
    /// The family's own initializer.
    GameDefault,
    StandardNormal,
    UniformBox { lo: f64, hi: f64 },
    Fixed(Vec<f64>),
}

impl InitDistribution {
    pub fn sample<G: Game + ?Sized>(&self, game: &G, rng: &mut dyn rand::RngCore) -> Result<Vector> {
        let n = game.structure().total();
        match self {
            InitDistribution::GameDefault => Ok(game.initial_point(rng)),
            InitDistribution::StandardNormal => Ok(rng::standard_normal(rng, n)),
            InitDistribution::UniformBox { lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::InvalidConfig(alloc::format!("empty init box [{}, {}]", lo, hi)));
                }
                Ok(rng::uniform_box(rng, n, *lo, *hi))
            }
            InitDistribution::Fixed(v) => {
                if v.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: v.len(),
                    });
                }
                Ok(Vector::from_column_slice(v))
            }
        }
    }
}

macro_rules! delegate {
    ($self:ident, $g:ident => $e:expr) => {
        match $self {
            GameInstance::Bilinear($g) => $e,
            GameInstance::Quadratic($g) => $e,
            GameInstance::DiracDelta($g) => $e,
            GameInstance::LinearGan($g) => $e,
            GameInstance::Covariance($g) => $e,
        }
    };
}

impl Game for GameInstance {
    fn name(&self) -> &str {
        delegate!(self, g => g.name())
    }

    fn structure(&self) -> &BlockStructure {
        delegate!(self, g => g.structure())
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        delegate!(self, g => g.payoff(player, x))
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        delegate!(self, g => g.gradient(player, x))
    }

    fn hessian_action(&self, player: usize, x: &Vector, d: &Vector) -> Result<Vector> {
        delegate!(self, g => g.hessian_action(player, x, d))
    }

    fn check_domain(&self, x: &Vector) -> Result<()> {
        delegate!(self, g => g.check_domain(x))
    }

    fn analytic_lipschitz(&self) -> Option<f64> {
        delegate!(self, g => g.analytic_lipschitz())
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        delegate!(self, g => g.lipschitz_bound())
    }

    fn class(&self) -> GameClass {
        delegate!(self, g => g.class())
    }

    fn constant_hessian(&self, player: usize) -> Option<Matrix> {
        delegate!(self, g => g.constant_hessian(player))
    }

    fn player_convex(&self) -> bool {
        delegate!(self, g => g.player_convex())
    }

    fn known_equilibrium(&self) -> Option<Vector> {
        delegate!(self, g => g.known_equilibrium())
    }

    fn probe_point(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Vector {
        delegate!(self, g => g.probe_point(rng, radius))
    }

    fn initial_point(&self, rng: &mut dyn rand::RngCore) -> Vector {
        delegate!(self, g => g.initial_point(rng))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_kind_builds() {
        for label in GameKind::LABELS {
            let kind = GameKind::default_for(label).unwrap();
            let g = make_game(&kind, 0).unwrap();
            assert_eq!(g.name(), label);
            assert_eq!(kind.label(), label);
        }
        assert!(GameKind::default_for("nope").is_none());
    }

    #[test]
    fn default_initializers() {
        let mut r = rng::seeded(0);
        let dirac = make_game(&GameKind::DiracDelta { theta: -2.0 }, 0).unwrap();
        let x = InitDistribution::GameDefault.sample(&dirac, &mut r).unwrap();
        assert!(x.iter().all(|&v| (0.0..4.0).contains(&v)));
        let gan = make_game(&GameKind::default_for("linear_gan").unwrap(), 0).unwrap();
        let x = InitDistribution::GameDefault.sample(&gan, &mut r).unwrap();
        assert!(x.iter().all(|&v| v == 0.1));
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(make_game(&GameKind::Bilinear { n1: 0, n2: 3 }, 0).is_err());
        assert!(make_game(
            &GameKind::Quadratic {
                block_sizes: vec![],
                spectrum: QuadraticSpectrum::Definite
            },
            0
        )
        .is_err());
        let bad = InitDistribution::Fixed(vec![1.0]);
        let g = make_game(&GameKind::Bilinear { n1: 1, n2: 1 }, 0).unwrap();
        assert!(bad.sample(&g, &mut rng::seeded(0)).is_err());
    }
}
