use crate::diagnostics::{estimate_map_lipschitz, GRADV_PAIRS};
use crate::error::{Error, Result};
use crate::game::{lipschitz_constant, Game, GameClass};
use crate::gni::{gni_gradient, GniParams, StepSetting};
use crate::linalg::{self, Matrix};
use crate::residual::residual_gradient;

use super::{Method, SolverConfig};

/// Which bound sets `ρ` on quadratic games.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadraticRule {
    /// `ρ = 1/(3L_f²N)`.
    Theorem,
    /// `ρ = 1/(3L_f N)`, used when every player is convex in its own block.
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepProvenance {
    BilinearTheorem,
    QuadraticTheorem,
    QuadraticCorollary,
    Generic,
    Secant,
    Residual,
    Baseline,
    Manual,
}

impl StepProvenance {
    pub fn label(self) -> &'static str {
        match self {
            StepProvenance::BilinearTheorem => "bilinear_theorem",
            StepProvenance::QuadraticTheorem => "quadratic_theorem",
            StepProvenance::QuadraticCorollary => "quadratic_corollary",
            StepProvenance::Generic => "generic",
            StepProvenance::Secant => "secant",
            StepProvenance::Residual => "residual",
            StepProvenance::Baseline => "baseline",
            StepProvenance::Manual => "manual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPolicy {
    /// Lipschitz constant of the descended map's gradient, when one was used.
    pub lipschitz_v: Option<f64>,
    pub rho: f64,
    pub provenance: StepProvenance,
}

/// `ρ = α/L` with a zero `L` falling back to `ρ = α`.
fn inverse(alpha: f64, l: f64) -> f64 {
    if l > 0.0 {
        alpha / l
    } else {
        alpha
    }
}

pub fn step_policy<G: Game + ?Sized>(game: &G, config: &SolverConfig, params: &GniParams) -> Result<StepPolicy> {
    if let StepSetting::Fixed(rho) = config.rho {
        return Ok(StepPolicy {
            lipschitz_v: None,
            rho,
            provenance: StepProvenance::Manual,
        });
    }
    let alpha = config.alpha;
    let policy = match config.method {
        Method::Gni | Method::GniSecant => merit_policy(game, config, params)?,
        Method::Residual => {
            let l = residual_lipschitz(game)?;
            StepPolicy {
                lipschitz_v: Some(l),
                rho: inverse(alpha, l),
                provenance: StepProvenance::Residual,
            }
        }
        _ => {
            let l = lipschitz_constant(game)?;
            StepPolicy {
                lipschitz_v: Some(l),
                rho: inverse(alpha, l),
                provenance: StepProvenance::Baseline,
            }
        }
    };
    if !(policy.rho > 0.0) || !policy.rho.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("derived step {} is not usable", policy.rho)));
    }
    Ok(policy)
}

fn merit_policy<G: Game + ?Sized>(game: &G, config: &SolverConfig, params: &GniParams) -> Result<StepPolicy> {
    let alpha = config.alpha;
    let eta = params.eta;
    let players = game.structure().players() as f64;
    let base = match game.class() {
        GameClass::Bilinear { coupling_norm } => {
            let q2 = coupling_norm * coupling_norm;
            StepPolicy {
                lipschitz_v: Some(2.0 * eta * q2),
                rho: inverse(alpha, 2.0 * q2),
                provenance: StepProvenance::BilinearTheorem,
            }
        }
        GameClass::Quadratic => {
            let l = lipschitz_constant(game)?;
            if config.quadratic_rule == QuadraticRule::Corollary && game.player_convex() {
                StepPolicy {
                    lipschitz_v: Some(3.0 * l * players),
                    rho: inverse(alpha, 3.0 * l * players),
                    provenance: StepProvenance::QuadraticCorollary,
                }
            } else {
                StepPolicy {
                    lipschitz_v: Some(3.0 * eta * l * l * players),
                    rho: inverse(alpha, 3.0 * l * l * players),
                    provenance: StepProvenance::QuadraticTheorem,
                }
            }
        }
        GameClass::Generic => {
            let l = estimate_map_lipschitz(game, |x| gni_gradient(game, x, params), GRADV_PAIRS, 0)?;
            StepPolicy {
                lipschitz_v: Some(l),
                rho: inverse(alpha, l),
                provenance: StepProvenance::Generic,
            }
        }
    };
    if config.method == Method::GniSecant {
        let tau = config.secant_tau;
        return Ok(StepPolicy {
            lipschitz_v: base.lipschitz_v,
            rho: base.rho * (1.0 - tau) / ((1.0 + tau) * (1.0 + tau)),
            provenance: StepProvenance::Secant,
        });
    }
    Ok(base)
}

/// Lipschitz constant of `∇Φ`: `‖J‖²` for constant Hessians, an estimate otherwise.
fn residual_lipschitz<G: Game + ?Sized>(game: &G) -> Result<f64> {
    let s = game.structure();
    let n = s.total();
    let hessians: Option<alloc::vec::Vec<Matrix>> = (0..s.players()).map(|i| game.constant_hessian(i)).collect();
    match hessians {
        Some(hs) => {
            let mut j = Matrix::zeros(n, n);
            for (i, h) in hs.iter().enumerate() {
                let r = s.range(i);
                j.rows_mut(r.start, r.len()).copy_from(&h.rows(r.start, r.len()));
            }
            let norm = linalg::spectral_norm(&j);
            Ok(norm * norm)
        }
        None => estimate_map_lipschitz(game, |x| residual_gradient(game, x), GRADV_PAIRS, 0),
    }
}
