//! The N-player game abstraction.
//!
//! Every player minimizes its own payoff `f_i(x)` over its block `x_i` with
//! the other blocks fixed. Maximizing players are encoded by negating their
//! payoff when the game is constructed.

use alloc::vec::Vec;

use crate::blocks::{BlockStructure, JointPoint};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::rng;

/// Coarse classification used to pick step-size policies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GameClass {
    /// Two-player zero-sum bilinear game with the spectral norm of its coupling matrix.
    Bilinear { coupling_norm: f64 },
    /// Every payoff is quadratic (constant Hessians).
    Quadratic,
    Generic,
}

/// A smooth N-player game.
///
/// `gradient` returns the gradient of `f_i` with respect to the *whole* joint
/// vector, not only the player's own block. Implementations must be pure and
/// immutable after construction.
pub trait Game: Send + Sync {
    fn name(&self) -> &str;

    fn structure(&self) -> &BlockStructure;

    fn payoff(&self, player: usize, x: &Vector) -> Result<f64>;

    fn gradient(&self, player: usize, x: &Vector) -> Result<Vector>;

    /// `∇²f_i(x) d`. The default is a central difference of `gradient` along `d`.
    fn hessian_action(&self, player: usize, x: &Vector, d: &Vector) -> Result<Vector> {
        central_hessian_action(self, player, x, d)
    }

    /// Domain predicate. The default accepts every finite point.
    fn check_domain(&self, x: &Vector) -> Result<()> {
        self.structure().check_len(x)?;
        if x.iter().all(|c| c.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain("non-finite coordinate"))
        }
    }

    /// Exact gradient Lipschitz constant when it is available in closed form.
    fn analytic_lipschitz(&self) -> Option<f64> {
        None
    }

    /// `L_f`, either analytic or an estimate cached at construction.
    fn lipschitz_bound(&self) -> Option<f64> {
        self.analytic_lipschitz()
    }

    fn class(&self) -> GameClass {
        GameClass::Generic
    }

    /// `∇²f_i` when it does not depend on `x`.
    fn constant_hessian(&self, _player: usize) -> Option<Matrix> {
        None
    }

    /// True when every `f_i` is convex in the player's own block, so SNPs are NE.
    fn player_convex(&self) -> bool {
        false
    }

    /// A known stationary Nash point, when one is available in closed form.
    fn known_equilibrium(&self) -> Option<Vector> {
        None
    }

    /// Probe distribution for diagnostics. The default is the uniform ball of
    /// `radius` around the origin.
    fn probe_point(&self, rng: &mut dyn rand::RngCore, radius: f64) -> Vector {
        rng::uniform_ball(rng, &Vector::zeros(self.structure().total()), radius)
    }

    /// Default initializer for experiments.
    fn initial_point(&self, rng: &mut dyn rand::RngCore) -> Vector {
        rng::standard_normal(rng, self.structure().total())
    }
}

/// Radius of the default probe ball used by estimators and diagnostics.
pub const DEFAULT_PROBE_RADIUS: f64 = 5.0;

/// Step used by central differences of the gradient: `1e-6 · (1 + ‖x‖)`.
pub fn gradient_fd_step(x: &Vector) -> f64 {
    1e-6 * (1.0 + x.norm())
}

pub fn central_hessian_action<G: Game + ?Sized>(
    game: &G,
    player: usize,
    x: &Vector,
    d: &Vector,
) -> Result<Vector> {
    game.structure().check_len(d)?;
    let dn = d.norm();
    if dn == 0.0 {
        return Ok(Vector::zeros(x.len()));
    }
    let step = 1e-6 * (1.0 + x.norm()) / (1.0 + dn);
    let plus = game.gradient(player, &(x + d * step))?;
    let minus = game.gradient(player, &(x - d * step))?;
    Ok((plus - minus) / (2.0 * step))
}

fn check_player<G: Game + ?Sized>(game: &G, player: usize) -> Result<()> {
    let n = game.structure().players();
    if player >= n {
        return Err(Error::InvalidParameter(alloc::format!(
            "player index {} out of range for a {}-player game",
            player,
            n
        )));
    }
    Ok(())
}

pub fn evaluate_payoff<G: Game + ?Sized>(game: &G, player: usize, x: &Vector) -> Result<f64> {
    check_player(game, player)?;
    game.check_domain(x).map_err(|e| e.for_player(player))?;
    game.payoff(player, x).map_err(|e| e.for_player(player))
}

pub fn evaluate_gradient<G: Game + ?Sized>(game: &G, player: usize, x: &Vector) -> Result<Vector> {
    check_player(game, player)?;
    game.check_domain(x).map_err(|e| e.for_player(player))?;
    game.gradient(player, x).map_err(|e| e.for_player(player))
}

pub fn evaluate_hessian_action<G: Game + ?Sized>(
    game: &G,
    player: usize,
    x: &Vector,
    d: &Vector,
) -> Result<Vector> {
    check_player(game, player)?;
    game.check_domain(x).map_err(|e| e.for_player(player))?;
    game.hessian_action(player, x, d).map_err(|e| e.for_player(player))
}

/// `F(x) = (∇_1 f_1(x), ..., ∇_N f_N(x))` stacked in joint layout.
pub fn own_gradients<G: Game + ?Sized>(game: &G, x: &Vector) -> Result<Vector> {
    let s = game.structure();
    game.check_domain(x)?;
    let mut out = Vector::zeros(s.total());
    for i in 0..s.players() {
        let g = game.gradient(i, x).map_err(|e| e.for_player(i))?;
        let r = s.range(i);
        out.rows_mut(r.start, r.len()).copy_from(&g.rows(r.start, r.len()));
    }
    Ok(out)
}

/// Per-player stationarity residuals `‖∇_i f_i(x)‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryReport {
    pub per_player_grad_norms: Vec<f64>,
    pub joint_grad_norm: f64,
}

impl StationaryReport {
    pub fn is_snp_at(&self, tol: f64) -> bool {
        self.joint_grad_norm <= tol
    }
}

pub fn stationarity<G: Game + ?Sized>(game: &G, x: &Vector) -> Result<StationaryReport> {
    let f = own_gradients(game, x)?;
    Ok(report_from_stacked(game.structure(), &f))
}

pub(crate) fn report_from_stacked(s: &BlockStructure, stacked: &Vector) -> StationaryReport {
    let per_player_grad_norms: Vec<f64> = (0..s.players())
        .map(|i| {
            let r = s.range(i);
            stacked.rows(r.start, r.len()).norm()
        })
        .collect();
    StationaryReport {
        joint_grad_norm: stacked.norm(),
        per_player_grad_norms,
    }
}

pub fn stationarity_at<G: Game + ?Sized>(game: &G, x: &JointPoint) -> Result<StationaryReport> {
    stationarity(game, x.coords())
}

/// Largest `|λ(∇²f_i)|` over seeded probes and players, by power iteration on
/// Hessian actions. Games with an analytic constant return it directly.
pub fn estimate_lipschitz<G: Game + ?Sized>(
    game: &G,
    probes: usize,
    radius: f64,
    seed: u64,
) -> Result<f64> {
    if probes == 0 {
        return Err(Error::InvalidParameter("estimate_lipschitz needs at least one probe".into()));
    }
    if let Some(l) = game.analytic_lipschitz() {
        return Ok(l);
    }
    let mut rng = rng::seeded(seed);
    let n = game.structure().total();
    let mut best: Option<f64> = None;
    for _ in 0..probes {
        let x = game.probe_point(&mut rng, radius);
        if game.check_domain(&x).is_err() {
            continue;
        }
        for i in 0..game.structure().players() {
            let start = rng::unit_vector(&mut rng, n);
            match crate::linalg::power_iteration(|v| game.hessian_action(i, &x, v), start, 200, 1e-10) {
                Ok(l) if l.is_finite() => best = Some(best.map_or(l, |b: f64| b.max(l))),
                Ok(_) => {}
                Err(e) if e.is_domain() => {}
                Err(e) => return Err(e),
            }
        }
    }
    best.ok_or(Error::NoQualifyingSamples("every Lipschitz probe left the domain"))
}

/// `L_f` from the game, falling back to the default estimate (64 probes, radius 5).
pub fn lipschitz_constant<G: Game + ?Sized>(game: &G) -> Result<f64> {
    match game.lipschitz_bound() {
        Some(l) => Ok(l),
        None => estimate_lipschitz(game, 64, DEFAULT_PROBE_RADIUS, 0),
    }
}
