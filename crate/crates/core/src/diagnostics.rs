//! Runnable certificates for the merit-function bounds, plus empirical estimators.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::game::{lipschitz_constant, own_gradients, Game, DEFAULT_PROBE_RADIUS};
use crate::games::LinearGan;
use crate::gni::{gni_gradient, gni_gradient_secant, gni_hessian_dense, gni_value, GniParams};
use crate::linalg::{self, Vector};
use crate::residual::{residual_gradient, residual_value};
use crate::rng;
use crate::solvers::Trace;

/// Point pairs used when `L_V` has to be estimated.
pub const GRADV_PAIRS: usize = 64;

/// Default discriminator threshold of the GAN accuracy metric.
pub const DEFAULT_ZETA: f64 = 0.7;

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Vector,
    pub player: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub worst_case: f64,
    pub threshold: f64,
    pub witness: Option<Witness>,
    /// False when the check's precondition failed; such a report never passes.
    pub applicable: bool,
    pub probes: usize,
    pub probe_domain: String,
}

impl CheckReport {
    fn new(name: &'static str, threshold: f64, probe_domain: String) -> Self {
        CheckReport {
            name,
            passed: false,
            worst_case: f64::NEG_INFINITY,
            threshold,
            witness: None,
            applicable: true,
            probes: 0,
            probe_domain,
        }
    }

    /// NaN observations stick, so a broken probe can never pass.
    fn observe(&mut self, value: f64, point: &Vector, player: Option<usize>) {
        self.probes += 1;
        if self.worst_case.is_nan() {
            return;
        }
        if value.is_nan() || value > self.worst_case {
            self.worst_case = value;
            self.witness = Some(Witness {
                point: point.clone(),
                player,
            });
        }
    }

    fn finish(mut self) -> Self {
        if self.probes == 0 {
            self.worst_case = f64::NAN;
        }
        self.passed = self.applicable && self.worst_case <= self.threshold;
        self
    }

    fn not_applicable(mut self) -> Self {
        self.applicable = false;
        self.worst_case = f64::NAN;
        self.passed = false;
        self
    }
}

fn probe_label<G: Game + ?Sized>(game: &G, radius: f64) -> String {
    format!("{} probe distribution, radius {}", game.name(), radius)
}

/// Seeded probe points, skipping those outside the domain.
fn probes<G: Game + ?Sized>(game: &G, count: usize, seed: u64) -> impl Iterator<Item = Vector> + '_ {
    let mut r = rng::seeded(seed);
    (0..count)
        .map(move |_| game.probe_point(&mut r, DEFAULT_PROBE_RADIUS))
        .filter(move |x| game.check_domain(x).is_ok())
}

/// Central-difference gradient of a scalar map with step `h`.
pub fn fd_gradient(mut f: impl FnMut(&Vector) -> Result<f64>, x: &Vector, h: f64) -> Result<Vector> {
    let mut g = Vector::zeros(x.len());
    let mut xp = x.clone();
    for k in 0..x.len() {
        let c = x[k];
        xp[k] = c + h;
        let up = f(&xp)?;
        xp[k] = c - h;
        let down = f(&xp)?;
        xp[k] = c;
        g[k] = (up - down) / (2.0 * h);
    }
    Ok(g)
}

/// Ridders' extrapolated central difference of `f` at `t = 0`.
///
/// Starts from step `h0`, shrinks it by 1.4 per stage and returns the tableau
/// entry with the smallest internal error estimate, together with that estimate.
pub fn ridders(mut f: impl FnMut(f64) -> Result<Vector>, h0: f64) -> Result<(Vector, f64)> {
    const SHRINK: f64 = 1.4;
    const STAGES: usize = 16;
    let shrink2 = SHRINK * SHRINK;
    let mut central = |h: f64| -> Result<Vector> { Ok((f(h)? - f(-h)?) / (2.0 * h)) };
    let mut h = h0;
    let mut prev: Vec<Vector> = alloc::vec![central(h)?];
    let mut best = prev[0].clone();
    let mut err = f64::INFINITY;
    for _ in 1..STAGES {
        h /= SHRINK;
        let mut row = alloc::vec![central(h)?];
        let mut fac = shrink2;
        for j in 1..=prev.len() {
            let next = (&row[j - 1] * fac - &prev[j - 1]) / (fac - 1.0);
            fac *= shrink2;
            let e = (&next - &row[j - 1]).norm().max((&next - &prev[j - 1]).norm());
            if e <= err {
                err = e;
                best = next.clone();
            }
            row.push(next);
        }
        let diverging = (&row[row.len() - 1] - &prev[prev.len() - 1]).norm() >= 2.0 * err;
        prev = row;
        if diverging {
            break;
        }
    }
    Ok((best, err))
}

/// [`ridders`] restarted from initial steps `10^{-3}, 10^{-5}, 10^{-7}, 10^{-9}`
/// times `scale`, keeping the estimate with the smallest error relative to
/// `1 + ‖estimate‖`. Small starting steps resolve payoffs with sharp features;
/// large ones limit round-off.
pub fn ridders_adaptive(mut f: impl FnMut(f64) -> Result<Vector>, scale: f64) -> Result<Vector> {
    let mut best: Option<(Vector, f64)> = None;
    for h0 in [1e-3, 1e-5, 1e-7, 1e-9] {
        let (d, err) = ridders(&mut f, h0 * scale)?;
        let err = err / (1.0 + d.norm());
        if best.as_ref().is_none_or(|(_, e)| err < *e) {
            best = Some((d, err));
        }
    }
    Ok(best.expect("at least one starting step").0)
}

/// Finite-difference gradient oracle. Quadratic maps are differentiated
/// exactly by one central difference with a large step; everything else goes
/// through [`ridders`] per coordinate.
fn oracle_gradient<G: Game + ?Sized>(game: &G, mut f: impl FnMut(&Vector) -> Result<f64>, x: &Vector) -> Result<Vector> {
    let scale = 1.0 + x.norm();
    if game.constant_hessian(0).is_some() {
        return fd_gradient(f, x, 1e-3 * scale);
    }
    let mut g = Vector::zeros(x.len());
    let mut xp = x.clone();
    for k in 0..x.len() {
        let c = x[k];
        let d = ridders_adaptive(
            |t| {
                xp[k] = c + t;
                let v = f(&xp);
                xp[k] = c;
                Ok(Vector::from_element(1, v?))
            },
            scale,
        )?;
        g[k] = d[0];
    }
    Ok(g)
}

fn relative(a: &Vector, b: &Vector) -> f64 {
    (a - b).norm() / (1.0 + a.norm())
}

/// Analytic payoff gradients against central differences of the payoffs.
pub fn check_payoff_gradients<G: Game + ?Sized>(game: &G, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("payoff_gradient", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    for x in probes(game, count, seed) {
        for i in 0..game.structure().players() {
            let (Ok(g), Ok(fd)) = (game.gradient(i, &x), oracle_gradient(game, |p| game.payoff(i, p), &x)) else {
                continue;
            };
            report.observe(relative(&g, &fd), &x, Some(i));
        }
    }
    report.finish()
}

/// Hessian actions against central differences of the gradient along random directions.
pub fn check_hessian_actions<G: Game + ?Sized>(game: &G, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("hessian_action", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    let mut dirs = rng::seeded(seed ^ 0xd1_4ec7);
    let n = game.structure().total();
    for x in probes(game, count, seed) {
        for i in 0..game.structure().players() {
            let d = rng::unit_vector(&mut dirs, n);
            let Ok(hv) = game.hessian_action(i, &x, &d) else { continue };
            let Ok(fd) = ridders_adaptive(|t| game.gradient(i, &(&x + &d * t)), 1.0 + x.norm()) else {
                continue;
            };
            report.observe(relative(&hv, &fd), &x, Some(i));
        }
    }
    report.finish()
}

/// `∇V` against central differences of `V`.
pub fn check_gni_gradient<G: Game + ?Sized>(game: &G, params: &GniParams, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("gni_gradient", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    for x in probes(game, count, seed) {
        let (Ok(g), Ok(fd)) = (
            gni_gradient(game, &x, params),
            oracle_gradient(game, |p| gni_value(game, p, params).map(|e| e.total), &x),
        ) else {
            continue;
        };
        report.observe(relative(&g, &fd), &x, None);
    }
    report.finish()
}

/// Secant direction against central differences of `V`.
pub fn check_secant_gradient<G: Game + ?Sized>(game: &G, params: &GniParams, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("gni_gradient_secant", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    for x in probes(game, count, seed) {
        let (Ok(g), Ok(fd)) = (
            gni_gradient_secant(game, &x, params),
            oracle_gradient(game, |p| gni_value(game, p, params).map(|e| e.total), &x),
        ) else {
            continue;
        };
        report.observe(relative(&g, &fd), &x, None);
    }
    report.finish()
}

/// `∇Φ` against central differences of `Φ`.
pub fn check_residual_gradient<G: Game + ?Sized>(game: &G, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("residual_gradient", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    for x in probes(game, count, seed) {
        let (Ok(g), Ok(fd)) = (
            residual_gradient(game, &x),
            oracle_gradient(game, |p| residual_value(game, p).map(|e| e.phi), &x),
        ) else {
            continue;
        };
        report.observe(relative(&g, &fd), &x, None);
    }
    report.finish()
}

/// `‖∇V̂ − ∇V‖ ≤ tol·(1 + ‖∇V‖)` at every probe.
pub fn check_secant_exactness<G: Game + ?Sized>(game: &G, params: &GniParams, count: usize, seed: u64, tol: f64) -> CheckReport {
    let mut report = CheckReport::new("secant_exactness", tol, probe_label(game, DEFAULT_PROBE_RADIUS));
    for x in probes(game, count, seed) {
        let (Ok(exact), Ok(secant)) = (gni_gradient(game, &x, params), gni_gradient_secant(game, &x, params)) else {
            continue;
        };
        report.observe(relative(&exact, &secant), &x, None);
    }
    report.finish()
}

/// `η/2‖∇_i f_i‖² ≤ V_i ≤ 3η/2‖∇_i f_i‖²` up to `1e-10·(1 + ‖∇_i f_i‖²)`.
///
/// The worst case is the largest violation divided by `1 + ‖∇_i f_i‖²`.
pub fn check_lemma1_sandwich<G: Game + ?Sized>(game: &G, eta: f64, count: usize, seed: u64) -> Result<CheckReport> {
    let report = CheckReport::new("lemma1_sandwich", 1e-10, probe_label(game, DEFAULT_PROBE_RADIUS));
    let l = lipschitz_constant(game)?;
    if !(eta > 0.0) || eta * l > 1.0 + 1e-12 {
        return Ok(report.not_applicable());
    }
    let mut report = report;
    let s = game.structure();
    for x in probes(game, count, seed) {
        let (Ok(v), Ok(f)) = (gni_value(game, &x, &GniParams::new(eta)), own_gradients(game, &x)) else {
            continue;
        };
        for i in 0..s.players() {
            let r = s.range(i);
            let g2 = f.rows(r.start, r.len()).norm_squared();
            let vi = v.components[i];
            let violation = (0.5 * eta * g2 - vi).max(vi - 1.5 * eta * g2);
            report.observe(violation / (1.0 + g2), &x, Some(i));
        }
    }
    Ok(report.finish())
}

/// Smallest eigenvalue of `∇²V` at a stationary point, as `−λ_min/(1 + ‖H‖)`
/// against `1e-8`.
pub fn check_snp_hessian_psd<G: Game + ?Sized>(game: &G, snp: &Vector, eta: f64) -> Result<CheckReport> {
    let grad_norm = own_gradients(game, snp)?.norm();
    if grad_norm > 1e-8 {
        return Err(Error::NotStationary { grad_norm });
    }
    let h = gni_hessian_dense(game, snp, &GniParams::new(eta))?;
    let eigen = linalg::symmetric_eigenvalues(&h);
    let lmin = eigen.iter().copied().fold(0.0_f64, f64::min);
    let scale = eigen.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut report = CheckReport::new("snp_hessian_psd", 1e-8, String::from("the supplied stationary point"));
    report.observe(-lmin / (1.0 + scale), snp, None);
    Ok(report.finish())
}

/// `τ̂ = max ‖∇V̂ − ∇V‖/‖∇V‖` over probes with `‖∇V‖ > 1e-12`.
pub fn measure_secant_tau<G: Game + ?Sized>(game: &G, eta: f64, count: usize, seed: u64) -> Result<f64> {
    let params = GniParams::new(eta);
    let mut worst: Option<f64> = None;
    for x in probes(game, count, seed) {
        let (Ok(exact), Ok(secant)) = (gni_gradient(game, &x, &params), gni_gradient_secant(game, &x, &params)) else {
            continue;
        };
        let norm = exact.norm();
        if norm <= 1e-12 {
            continue;
        }
        let tau = (secant - &exact).norm() / norm;
        worst = Some(worst.map_or(tau, |w: f64| w.max(tau)));
    }
    worst.ok_or(Error::NoQualifyingSamples("every probe had a vanishing merit gradient"))
}

/// `μ̂ = min ‖∇V‖²/(2V)` over records with `V > 1e-14`.
pub fn estimate_pl_constant(merits: &[f64], merit_grad_norms: &[f64]) -> Result<f64> {
    if merits.len() != merit_grad_norms.len() {
        return Err(Error::DimensionMismatch {
            expected: merits.len(),
            found: merit_grad_norms.len(),
        });
    }
    merits
        .iter()
        .zip(merit_grad_norms)
        .filter(|(&v, g)| v > 1e-14 && g.is_finite())
        .map(|(&v, &g)| g * g / (2.0 * v))
        .reduce(f64::min)
        .ok_or(Error::NoQualifyingSamples("no record has a positive merit"))
}

pub fn trace_pl_constant(trace: &Trace) -> Result<f64> {
    let merits: Vec<f64> = trace.records.iter().map(|r| r.merit).collect();
    let grads: Vec<f64> = trace.records.iter().map(|r| r.merit_grad_norm).collect();
    estimate_pl_constant(&merits, &grads)
}

/// Largest `‖g(x) − g(x′)‖/‖x − x′‖` over seeded pairs of probe points.
pub fn estimate_map_lipschitz<G: Game + ?Sized>(
    game: &G,
    mut map: impl FnMut(&Vector) -> Result<Vector>,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    let mut r = rng::seeded(seed);
    let mut best = 0.0_f64;
    for _ in 0..pairs {
        let a = game.probe_point(&mut r, DEFAULT_PROBE_RADIUS);
        let b = game.probe_point(&mut r, DEFAULT_PROBE_RADIUS);
        let dist = (&a - &b).norm();
        if dist == 0.0 {
            continue;
        }
        match (map(&a), map(&b)) {
            (Ok(ga), Ok(gb)) => best = best.max((ga - gb).norm() / dist),
            (Err(e), _) | (_, Err(e)) if !e.is_domain() => return Err(e),
            _ => {}
        }
    }
    Ok(best)
}

/// Empirical Lipschitz constant of `∇V(·;η)`.
pub fn estimate_gradv_lipschitz<G: Game + ?Sized>(game: &G, eta: f64, pairs: usize, seed: u64) -> Result<f64> {
    let params = GniParams::new(eta);
    estimate_map_lipschitz(game, |x| gni_gradient(game, x, &params), pairs, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GanMetrics {
    pub dist_acc: f64,
    pub dist_mean: f64,
    pub zeta: f64,
    pub m: usize,
}

/// Thresholded discriminator accuracy and first-moment distance, on a fresh
/// batch of `m` samples drawn from `seed`.
pub fn gan_metrics(game: &LinearGan, x: &Vector, zeta: f64, m: usize, seed: u64) -> Result<GanMetrics> {
    if m == 0 {
        return Err(Error::InvalidParameter("gan_metrics needs m >= 1".into()));
    }
    game.structure().check_len(x)?;
    let d = game.dimension();
    let x1 = x.rows(0, d);
    let x2 = x.rows(d, d);
    let (thetas, zs) = game.sample_batch(m, seed);
    let real_scores = &thetas * x1;
    let fake_scores = &zs * x1.component_mul(&x2);
    let hits = real_scores.iter().filter(|&&s| s >= zeta).count() + fake_scores.iter().filter(|&&s| s <= 1.0 - zeta).count();
    let mf = m as f64;
    let generated_mean = zs.row_mean().transpose().component_mul(&x2);
    let real_mean = thetas.row_mean().transpose();
    Ok(GanMetrics {
        dist_acc: hits as f64 / (2.0 * mf),
        dist_mean: (generated_mean - real_mean).norm(),
        zeta,
        m,
    })
}

/// The diagnostics suite run by the `check` command.
pub fn run_suite<G: Game + ?Sized>(game: &G, count: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let l = lipschitz_constant(game)?;
    let eta = if l > 0.0 { 1.0 / l } else { 1.0 };
    let params = GniParams::new(eta);
    let quadratic = game.constant_hessian(0).is_some();
    let grad_tol = if quadratic { 1e-8 } else { 1e-5 };
    let mut reports = alloc::vec![
        check_payoff_gradients(game, count, seed, 1e-5),
        check_hessian_actions(game, count, seed, 1e-4),
        check_gni_gradient(game, &params, count, seed, grad_tol),
        check_residual_gradient(game, count, seed, grad_tol),
        check_lemma1_sandwich(game, eta, count, seed)?,
    ];
    if quadratic {
        reports.push(check_secant_gradient(game, &params, count, seed, grad_tol));
        reports.push(check_secant_exactness(game, &params, count, seed, 1e-10));
    }
    if let Some(snp) = game.known_equilibrium() {
        if game.structure().total() <= crate::gni::DENSE_HESSIAN_LIMIT {
            if let Ok(report) = check_snp_hessian_psd(game, &snp, eta) {
                reports.push(report);
            }
        }
    }
    Ok(reports)
}
