//! The gradient-based Nikaido-Isoda merit function
//!
//! `V(x;η) = Σ_i f_i(x) − f_i(y(x;i,η))` where the Cauchy point
//! `y(x;i,η)` moves only block `i` one steepest-descent step of length `η`.
//! `V ≥ 0` for `0 < η ≤ 1/L_f` and it vanishes exactly on stationary Nash
//! points.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{lipschitz_constant, Game};
use crate::linalg::{self, Matrix, Vector};

/// How `η` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSetting {
    /// Derived from the game (for `η`: `1/L_f`).
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GniParams {
    pub eta: f64,
    /// Set when a manual `η` exceeds `1/L_f`, where the error bounds no longer hold.
    pub exceeds_lipschitz_bound: bool,
}

impl GniParams {
    /// Unchecked parameters, for callers that know `L_f` themselves.
    pub fn new(eta: f64) -> Self {
        GniParams {
            eta,
            exceeds_lipschitz_bound: false,
        }
    }

    pub fn resolve<G: Game + ?Sized>(game: &G, setting: StepSetting) -> Result<Self> {
        match setting {
            StepSetting::Auto => {
                let l = lipschitz_constant(game)?;
                if !(l > 0.0) || !l.is_finite() {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "cannot derive eta from Lipschitz constant {}",
                        l
                    )));
                }
                Ok(GniParams::new(1.0 / l))
            }
            StepSetting::Fixed(eta) => {
                if !(eta >= 0.0) || !eta.is_finite() {
                    return Err(Error::InvalidParameter(alloc::format!("eta must be finite and >= 0, got {}", eta)));
                }
                let exceeds = match game.lipschitz_bound() {
                    Some(l) => eta * l > 1.0 + 1e-12,
                    None => false,
                };
                Ok(GniParams {
                    eta,
                    exceeds_lipschitz_bound: exceeds,
                })
            }
        }
    }
}

/// `V`, its per-player parts `V_i` and the Cauchy points they were measured at.
#[derive(Debug, Clone, PartialEq)]
pub struct GniEvaluation {
    pub total: f64,
    pub components: Vec<f64>,
    pub cauchy_points: Vec<Vector>,
}

/// `y(x;i,η)`: block `i` replaced by `x_i − η∇_i f_i(x)`.
pub fn cauchy_point<G: Game + ?Sized>(game: &G, player: usize, x: &Vector, params: &GniParams) -> Result<Vector> {
    let g = crate::game::evaluate_gradient(game, player, x)?;
    Ok(cauchy_from_gradient(game, player, x, &g, params.eta))
}

fn cauchy_from_gradient<G: Game + ?Sized>(game: &G, player: usize, x: &Vector, g: &Vector, eta: f64) -> Vector {
    x - game.structure().mask(player, g) * eta
}

pub fn gni_value<G: Game + ?Sized>(game: &G, x: &Vector, params: &GniParams) -> Result<GniEvaluation> {
    let s = game.structure();
    game.check_domain(x)?;
    let mut components = Vec::with_capacity(s.players());
    let mut cauchy_points = Vec::with_capacity(s.players());
    for i in 0..s.players() {
        let g = game.gradient(i, x).map_err(|e| e.for_player(i))?;
        let y = cauchy_from_gradient(game, i, x, &g, params.eta);
        game.check_domain(&y).map_err(|e| e.for_player(i))?;
        let fx = game.payoff(i, x).map_err(|e| e.for_player(i))?;
        let fy = game.payoff(i, &y).map_err(|e| e.for_player(i))?;
        components.push(fx - fy);
        cauchy_points.push(y);
    }
    Ok(GniEvaluation {
        total: components.iter().sum(),
        components,
        cauchy_points,
    })
}

/// `∇V = Σ_i ∇f_i(x) − g_y + η ∇²f_i(x) E_i g_y` with `g_y = ∇f_i(y(x;i,η))`.
pub fn gni_gradient<G: Game + ?Sized>(game: &G, x: &Vector, params: &GniParams) -> Result<Vector> {
    let s = game.structure();
    game.check_domain(x)?;
    let mut total = Vector::zeros(s.total());
    for i in 0..s.players() {
        let gx = game.gradient(i, x).map_err(|e| e.for_player(i))?;
        let y = cauchy_from_gradient(game, i, x, &gx, params.eta);
        game.check_domain(&y).map_err(|e| e.for_player(i))?;
        let gy = game.gradient(i, &y).map_err(|e| e.for_player(i))?;
        let hv = game
            .hessian_action(i, x, &s.mask(i, &gy))
            .map_err(|e| e.for_player(i))?;
        total += gx - &gy + hv * params.eta;
    }
    Ok(total)
}

/// Hessian-free secant direction `Σ_i ∇f_i(x + ηE_i∇f_i(y)) − ∇f_i(y)`.
///
/// Coincides with [`gni_gradient`] whenever the payoffs are quadratic.
pub fn gni_gradient_secant<G: Game + ?Sized>(game: &G, x: &Vector, params: &GniParams) -> Result<Vector> {
    let s = game.structure();
    game.check_domain(x)?;
    let mut total = Vector::zeros(s.total());
    for i in 0..s.players() {
        let gx = game.gradient(i, x).map_err(|e| e.for_player(i))?;
        let y = cauchy_from_gradient(game, i, x, &gx, params.eta);
        game.check_domain(&y).map_err(|e| e.for_player(i))?;
        let gy = game.gradient(i, &y).map_err(|e| e.for_player(i))?;
        let ahead = x + s.mask(i, &gy) * params.eta;
        game.check_domain(&ahead).map_err(|e| e.for_player(i))?;
        let g_ahead = game.gradient(i, &ahead).map_err(|e| e.for_player(i))?;
        total += g_ahead - gy;
    }
    Ok(total)
}

/// Dense-Hessian diagnostics are limited to this many coordinates.
pub const DENSE_HESSIAN_LIMIT: usize = 200;

/// Symmetric `∇²V(x;η)`.
///
/// Games with constant payoff Hessians `H_i` use the exact form
/// `Σ_i η (H_i E_i)(2I − ηH_i)(E_i H_i)`. Everything else differentiates
/// [`gni_gradient`] column by column and symmetrizes the result.
pub fn gni_hessian_dense<G: Game + ?Sized>(game: &G, x: &Vector, params: &GniParams) -> Result<Matrix> {
    let s = game.structure();
    let n = s.total();
    if n > DENSE_HESSIAN_LIMIT {
        return Err(Error::TooLarge {
            dimension: n,
            limit: DENSE_HESSIAN_LIMIT,
        });
    }
    s.check_len(x)?;
    let constant: Option<Vec<Matrix>> = (0..s.players()).map(|i| game.constant_hessian(i)).collect();
    if let Some(hessians) = constant {
        let mut total = Matrix::zeros(n, n);
        for (i, h) in hessians.iter().enumerate() {
            total += quadratic_gni_hessian(s, i, h, params.eta);
        }
        return Ok(linalg::symmetrize(&total));
    }
    let step = 1e-5 * (1.0 + x.norm());
    let mut h = Matrix::zeros(n, n);
    for j in 0..n {
        let mut xp = x.clone();
        xp[j] += step;
        let mut xm = x.clone();
        xm[j] -= step;
        let col = (gni_gradient(game, &xp, params)? - gni_gradient(game, &xm, params)?) / (2.0 * step);
        h.set_column(j, &col);
    }
    Ok(linalg::symmetrize(&h))
}

/// `η (H E_i)(2I − ηH)(E_i H)` for a single player with constant Hessian `H`.
pub fn quadratic_gni_hessian(s: &crate::blocks::BlockStructure, player: usize, h: &Matrix, eta: f64) -> Matrix {
    let n = s.total();
    let r = s.range(player);
    let mut he = Matrix::zeros(n, n);
    he.columns_mut(r.start, r.len()).copy_from(&h.columns(r.start, r.len()));
    let middle = Matrix::identity(n, n) * 2.0 - h * eta;
    &he * middle * he.transpose() * eta
}
