//! Descent on the merit functions and the baseline game dynamics.

mod baseline;
mod policy;

pub use baseline::{baseline_direction, BaselineState};
pub use policy::{step_policy, QuadraticRule, StepPolicy, StepProvenance};

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{own_gradients, report_from_stacked, Game};
use crate::gni::{gni_gradient, gni_gradient_secant, gni_value, GniParams, StepSetting};
use crate::linalg::Vector;
use crate::residual::{residual_gradient, residual_value};

/// Retries with a halved `ρ` before a step is reported as a domain error.
pub const MAX_HALVINGS: usize = 30;

/// Divergence is declared once `‖F‖` exceeds this factor times `1 + ‖F(x^0)‖`.
pub const DIVERGENCE_FACTOR: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gni,
    GniSecant,
    Residual,
    SimGd,
    Adam,
    Omd,
    Extragradient,
    Extrapolation,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Gni,
        Method::GniSecant,
        Method::Residual,
        Method::SimGd,
        Method::Adam,
        Method::Omd,
        Method::Extragradient,
        Method::Extrapolation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Gni => "gni",
            Method::GniSecant => "gni_secant",
            Method::Residual => "residual",
            Method::SimGd => "sim_gd",
            Method::Adam => "adam",
            Method::Omd => "omd",
            Method::Extragradient => "extragradient",
            Method::Extrapolation => "extrapolation",
        }
    }

    pub fn is_gni(self) -> bool {
        matches!(self, Method::Gni | Method::GniSecant)
    }

    pub fn is_baseline(self) -> bool {
        !self.is_gni() && self != Method::Residual
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::InvalidConfig(alloc::format!("unknown method '{}'", s)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    pub rho: StepSetting,
    pub eta: StepSetting,
    /// Scale applied to every automatic `ρ`.
    pub alpha: f64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Relative secant error assumed by the secant step policy.
    pub secant_tau: f64,
    pub quadratic_rule: QuadraticRule,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            rho: StepSetting::Auto,
            eta: StepSetting::Auto,
            alpha: 1.0,
            max_iters: 10_000,
            grad_tol: 1e-6,
            seed: 0,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            secant_tau: 0.0,
            quadratic_rule: QuadraticRule::Theorem,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(alloc::format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.grad_tol > 0.0) || !self.grad_tol.is_finite() {
            return bad(alloc::format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        for (name, b) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(0.0..1.0).contains(&b) {
                return bad(alloc::format!("{} must lie in [0, 1), got {}", name, b));
            }
        }
        if !(self.adam_eps > 0.0) || !self.adam_eps.is_finite() {
            return bad(alloc::format!("adam_eps must be positive, got {}", self.adam_eps));
        }
        if !(0.0..1.0).contains(&self.secant_tau) {
            return bad(alloc::format!("secant_tau must lie in [0, 1), got {}", self.secant_tau));
        }
        if let StepSetting::Fixed(r) = self.rho {
            if !(r > 0.0) || !r.is_finite() {
                return bad(alloc::format!("rho must be positive, got {}", r));
            }
        }
        if let StepSetting::Fixed(e) = self.eta {
            if !(e > 0.0) || !e.is_finite() {
                return bad(alloc::format!("eta must be positive, got {}", e));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
    DomainError,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Converged => "converged",
            Status::MaxIters => "max_iters",
            Status::Diverged => "diverged",
            Status::DomainError => "domain_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    /// The merit being tracked: `V(x;η)`, or `Φ(x)` for the residual method.
    pub merit: f64,
    pub merit_grad_norm: f64,
    pub grad_norm: f64,
    pub per_player: Vec<f64>,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub method: Method,
    pub records: Vec<TraceRecord>,
    pub final_point: Vector,
    pub status: Status,
    pub policy: StepPolicy,
    pub gni: GniParams,
    /// Total number of `ρ` halvings over the run.
    pub halvings: usize,
}

impl Trace {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    /// First iteration with `‖F‖ ≤ tol`.
    pub fn first_below(&self, tol: f64) -> Option<usize> {
        self.records.iter().find(|r| r.grad_norm <= tol).map(|r| r.iter)
    }

    pub fn final_grad_norm(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.grad_norm)
    }

    pub fn merits(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.merit)
    }
}

/// Everything measured at one iterate.
struct Evaluation {
    stacked: Vector,
    merit: f64,
    merit_grad: Option<Vector>,
}

struct Solver<'a, G: Game + ?Sized> {
    game: &'a G,
    config: &'a SolverConfig,
    params: GniParams,
}

impl<G: Game + ?Sized> Solver<'_, G> {
    /// Fails only when the iterate itself cannot be evaluated. Merit
    /// failures of the baseline methods are recorded as NaN.
    fn evaluate(&self, x: &Vector) -> Result<Evaluation> {
        let stacked = own_gradients(self.game, x)?;
        let method = self.config.method;
        let merit = match method {
            Method::Residual => residual_value(self.game, x).map(|e| e.phi),
            _ => gni_value(self.game, x, &self.params).map(|e| e.total),
        };
        let merit_grad = match method {
            Method::Gni => gni_gradient(self.game, x, &self.params),
            Method::GniSecant => gni_gradient_secant(self.game, x, &self.params),
            Method::Residual => residual_gradient(self.game, x),
            _ => gni_gradient(self.game, x, &self.params),
        };
        if method.is_baseline() {
            return Ok(Evaluation {
                stacked,
                merit: merit.unwrap_or(f64::NAN),
                merit_grad: merit_grad.ok(),
            });
        }
        Ok(Evaluation {
            stacked,
            merit: merit?,
            merit_grad: Some(merit_grad?),
        })
    }
}

pub fn solve<G: Game + ?Sized>(game: &G, config: &SolverConfig, x0: &Vector) -> Result<Trace> {
    solve_with_clock(game, config, x0, None)
}

/// As [`solve`], stamping each record with `clock()` in milliseconds since the start.
pub fn solve_with_clock<G: Game + ?Sized>(
    game: &G,
    config: &SolverConfig,
    x0: &Vector,
    mut clock: Option<&mut dyn FnMut() -> f64>,
) -> Result<Trace> {
    config.validate()?;
    game.check_domain(x0)?;
    let params = GniParams::resolve(game, config.eta)?;
    let policy = step_policy(game, config, &params)?;
    let solver = Solver { game, config, params };
    let start_ms = clock.as_mut().map_or(0.0, |c| c());

    let mut x = x0.clone();
    let mut eval = solver.evaluate(&x)?;
    let mut state = BaselineState::new(config, &eval.stacked);
    let initial = eval.stacked.norm();
    let mut records = Vec::new();
    let mut halvings = 0;
    let structure = game.structure();

    let status = loop {
        let k = records.len();
        let report = report_from_stacked(structure, &eval.stacked);
        let grad_norm = report.joint_grad_norm;
        records.push(TraceRecord {
            iter: k,
            merit: eval.merit,
            merit_grad_norm: eval.merit_grad.as_ref().map_or(f64::NAN, |g| g.norm()),
            grad_norm,
            per_player: report.per_player_grad_norms,
            wall_ms: clock.as_mut().map_or(0.0, |c| c() - start_ms),
        });
        if grad_norm <= config.grad_tol {
            break Status::Converged;
        }
        if !grad_norm.is_finite() || grad_norm > DIVERGENCE_FACTOR * (1.0 + initial) || !x.iter().all(|v| v.is_finite()) {
            break Status::Diverged;
        }
        if k >= config.max_iters {
            break Status::MaxIters;
        }

        let mut rho = policy.rho;
        let mut accepted = None;
        for attempt in 0..=MAX_HALVINGS {
            if attempt > 0 {
                rho *= 0.5;
                halvings += 1;
            }
            match try_step(&solver, &x, &eval, &state, rho) {
                Ok(next) => {
                    accepted = Some(next);
                    break;
                }
                Err(e) if e.is_domain() => continue,
                Err(e) => return Err(e),
            }
        }
        match accepted {
            Some((x_next, eval_next, state_next)) => {
                x = x_next;
                eval = eval_next;
                state = state_next;
            }
            None => break Status::DomainError,
        }
    };

    Ok(Trace {
        method: config.method,
        records,
        final_point: x,
        status,
        policy,
        gni: params,
        halvings,
    })
}

fn try_step<G: Game + ?Sized>(
    solver: &Solver<'_, G>,
    x: &Vector,
    eval: &Evaluation,
    state: &BaselineState,
    rho: f64,
) -> Result<(Vector, Evaluation, BaselineState)> {
    let mut next_state = state.clone();
    let direction = if solver.config.method.is_baseline() {
        baseline_direction(solver.game, &mut next_state, x, &eval.stacked, rho)?
    } else {
        eval.merit_grad.clone().expect("merit gradient is always present for descent methods")
    };
    let x_next = x - direction * rho;
    solver.game.check_domain(&x_next)?;
    let eval_next = solver.evaluate(&x_next)?;
    Ok((x_next, eval_next, next_state))
}

#[cfg(test)]
mod tests;
