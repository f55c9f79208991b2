use crate::error::Result;
use crate::game::{own_gradients, Game};
use crate::linalg::Vector;
use crate::math;

use super::{Method, SolverConfig};

/// Memory carried between steps of the baseline dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineState {
    method: Method,
    beta1: f64,
    beta2: f64,
    eps: f64,
    /// Adam moments and step count.
    m: Vector,
    v: Vector,
    t: i32,
    /// Previous `F` for OMD, the stored look-ahead gradient for extrapolation.
    previous: Vector,
}

impl BaselineState {
    /// Initial state given `F(x^0)`.
    pub fn new(config: &SolverConfig, f0: &Vector) -> Self {
        let n = f0.len();
        BaselineState {
            method: config.method,
            beta1: config.adam_beta1,
            beta2: config.adam_beta2,
            eps: config.adam_eps,
            m: Vector::zeros(n),
            v: Vector::zeros(n),
            t: 0,
            previous: f0.clone(),
        }
    }
}

/// Direction `d` of the step `x ← x − ρd`, updating `state`. `f` is `F(x)`.
pub fn baseline_direction<G: Game + ?Sized>(
    game: &G,
    state: &mut BaselineState,
    x: &Vector,
    f: &Vector,
    rho: f64,
) -> Result<Vector> {
    Ok(match state.method {
        Method::Adam => {
            state.t += 1;
            state.m = &state.m * state.beta1 + f * (1.0 - state.beta1);
            state.v = &state.v * state.beta2 + f.component_mul(f) * (1.0 - state.beta2);
            let c1 = 1.0 - libm::pow(state.beta1, state.t as f64);
            let c2 = 1.0 - libm::pow(state.beta2, state.t as f64);
            let eps = state.eps;
            state
                .m
                .zip_map(&state.v, |m, v| (m / c1) / (math::sqrt(v / c2) + eps))
        }
        Method::Omd => {
            let d = f * 2.0 - &state.previous;
            state.previous = f.clone();
            d
        }
        Method::Extragradient => {
            let lookahead = x - f * rho;
            game.check_domain(&lookahead)?;
            own_gradients(game, &lookahead)?
        }
        Method::Extrapolation => {
            let lookahead = x - &state.previous * rho;
            game.check_domain(&lookahead)?;
            let d = own_gradients(game, &lookahead)?;
            state.previous = d.clone();
            d
        }
        // Simultaneous gradient descent; the descent methods never reach here.
        _ => f.clone(),
    })
}
