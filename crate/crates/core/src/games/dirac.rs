use alloc::vec;

use crate::blocks::BlockStructure;
use crate::error::{Error, Result};
use crate::game::{estimate_lipschitz, Game, DEFAULT_PROBE_RADIUS};
use crate::linalg::Vector;
use crate::math::{sigmoid, softplus};
use crate::rng;

/// One-dimensional GAN against a point mass at `θ`:
/// `f_1 = softplus(θx_1) + softplus(x_1x_2)`, `f_2 = −softplus(x_1x_2)`.
#[derive(Debug, Clone)]
pub struct DiracDeltaGan {
    theta: f64,
    structure: BlockStructure,
}

/// Initial points and probes are drawn from `[0, 4]²`.
pub const DIRAC_INIT_BOX: (f64, f64) = (0.0, 4.0);

/// Upper bound on `t σ'(t)` over the real line.
const MAX_T_SIGMOID_SLOPE: f64 = 0.2241;

impl DiracDeltaGan {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        Ok(DiracDeltaGan {
            theta,
            structure: BlockStructure::new(vec![1, 1])?,
        })
    }

    /// Empirical `L_f` from power iteration at 64 probes in the initialization box.
    pub fn estimated_lipschitz(&self) -> Result<f64> {
        estimate_lipschitz(self, 64, DEFAULT_PROBE_RADIUS, 0)
    }

    /// Row-sum bound on `‖∇²f_i‖` for `x_2 ∈ [0, B]` and `x_1 ∈ [0, B]`:
    /// `θ²/4 + B²/4 + 1 + max_t tσ'(t)`. The own-block curvature of each
    /// player stays below it along the whole Cauchy segment.
    pub fn box_lipschitz_bound(&self) -> f64 {
        let b = DIRAC_INIT_BOX.1;
        0.25 * self.theta * self.theta + 0.25 * b * b + 1.0 + MAX_T_SIGMOID_SLOPE
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The stationary point `(0, −θ)`.
    pub fn stationary_point(&self) -> Vector {
        Vector::from_vec(vec![0.0, -self.theta])
    }
}

impl Game for DiracDeltaGan {
    fn name(&self) -> &str {
        "dirac_delta"
    }

    fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64> {
        self.structure.check_len(x)?;
        let coupling = softplus(x[0] * x[1]);
        Ok(if player == 0 {
            softplus(self.theta * x[0]) + coupling
        } else {
            -coupling
        })
    }

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector> {
        self.structure.check_len(x)?;
        let s = sigmoid(x[0] * x[1]);
        Ok(if player == 0 {
            Vector::from_vec(vec![self.theta * sigmoid(self.theta * x[0]) + x[1] * s, x[0] * s])
        } else {
            Vector::from_vec(vec![-x[1] * s, -x[0] * s])
        })
    }

    fn lipschitz_bound(&self) -> Option<f64> {
        Some(self.box_lipschitz_bound())
    }

    fn known_equilibrium(&self) -> Option<Vector> {
        Some(self.stationary_point())
    }

    fn probe_point(&self, rng: &mut dyn rand::RngCore, _radius: f64) -> Vector {
        rng::uniform_box(rng, 2, DIRAC_INIT_BOX.0, DIRAC_INIT_BOX.1)
    }

    fn initial_point(&self, rng: &mut dyn rand::RngCore) -> Vector {
        rng::uniform_box(rng, 2, DIRAC_INIT_BOX.0, DIRAC_INIT_BOX.1)
    }
}
