//! Residual merit function `Φ(x) = ½ Σ_i ‖∇_i f_i(x)‖²`.

use crate::error::{Error, Result};
use crate::game::{own_gradients, Game};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEvaluation {
    pub phi: f64,
    /// `F(x) = (∇_1 f_1, ..., ∇_N f_N)` in joint layout.
    pub stacked_residual: Vector,
}

pub fn residual_value<G: Game + ?Sized>(game: &G, x: &Vector) -> Result<ResidualEvaluation> {
    let stacked_residual = own_gradients(game, x)?;
    Ok(ResidualEvaluation {
        phi: 0.5 * stacked_residual.dot(&stacked_residual),
        stacked_residual,
    })
}

/// `∇Φ(x) = Σ_i ∇²f_i(x) E_i ∇f_i(x)`, using Hessian actions only.
pub fn residual_gradient<G: Game + ?Sized>(game: &G, x: &Vector) -> Result<Vector> {
    let s = game.structure();
    game.check_domain(x)?;
    let mut total = Vector::zeros(s.total());
    for i in 0..s.players() {
        let g = game.gradient(i, x).map_err(|e| e.for_player(i))?;
        let own = s.mask(i, &g);
        total += game.hessian_action(i, x, &own).map_err(|e| e.for_player(i))?;
    }
    Ok(total)
}

/// PL constant `μ = β²` of `Φ` when `F` is `β`-strongly monotone.
pub fn strong_monotonicity_mu(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!("beta must be positive, got {}", beta)));
    }
    Ok(beta * beta)
}
