use super::*;
use crate::blocks::BlockStructure;
use crate::games::{BilinearGame, Definiteness, QuadraticGame};
use crate::linalg::Matrix;
use alloc::vec;

fn unit_bilinear() -> BilinearGame {
    BilinearGame::new(Matrix::identity(1, 1), Vector::zeros(1), Vector::zeros(1)).unwrap()
}

fn identity_quadratic() -> QuadraticGame {
    let s = BlockStructure::new(vec![1, 1]).unwrap();
    QuadraticGame::new(s, vec![Matrix::identity(2, 2); 2], vec![Vector::zeros(2); 2]).unwrap()
}

/// One player minimizing `x² − ln x` on `x > 0`, or `−x` on `x ≤ 1`.
struct Bounded {
    structure: BlockStructure,
    log_barrier: bool,
}

impl Bounded {
    fn new(log_barrier: bool) -> Self {
        Bounded {
            structure: BlockStructure::new(vec![1]).unwrap(),
            log_barrier,
        }
    }
}

impl Game for Bounded {
    fn name(&self) -> &str {
        "bounded"
    }
    fn structure(&self) -> &BlockStructure {
        &self.structure
    }
    fn check_domain(&self, x: &Vector) -> Result<()> {
        let ok = if self.log_barrier { x[0] > 0.0 } else { x[0] <= 1.0 };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("outside the test domain"))
        }
    }
    fn payoff(&self, _: usize, x: &Vector) -> Result<f64> {
        Ok(if self.log_barrier { x[0] * x[0] - libm::log(x[0]) } else { -x[0] })
    }
    fn gradient(&self, _: usize, x: &Vector) -> Result<Vector> {
        Ok(Vector::from_vec(vec![if self.log_barrier { 2.0 * x[0] - 1.0 / x[0] } else { -1.0 }]))
    }
    fn analytic_lipschitz(&self) -> Option<f64> {
        Some(1.0)
    }
}

fn config(method: Method) -> SolverConfig {
    SolverConfig::new(method)
}

#[test]
fn method_labels_round_trip() {
    for m in Method::ALL {
        assert_eq!(m.label().parse::<Method>().unwrap(), m);
    }
    assert!("newton".parse::<Method>().is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let base = config(Method::Gni);
    let cases = [
        SolverConfig { alpha: 0.0, ..base.clone() },
        SolverConfig { alpha: 1.5, ..base.clone() },
        SolverConfig { max_iters: 0, ..base.clone() },
        SolverConfig { grad_tol: 0.0, ..base.clone() },
        SolverConfig { adam_beta1: 1.0, ..base.clone() },
        SolverConfig { adam_beta2: -0.1, ..base.clone() },
        SolverConfig { rho: StepSetting::Fixed(-1.0), ..base.clone() },
        SolverConfig { secant_tau: 1.0, ..base.clone() },
    ];
    for c in cases {
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{:?}", c);
        assert!(solve(&unit_bilinear(), &c, &Vector::zeros(2)).is_err());
    }
}

#[test]
fn policy_examples() {
    let g = unit_bilinear();
    let p = step_policy(&g, &config(Method::Gni), &GniParams::new(1.0)).unwrap();
    assert_eq!(p.rho, 0.5);
    assert_eq!(p.provenance, StepProvenance::BilinearTheorem);
    assert_eq!(p.lipschitz_v, Some(2.0));

    let q = identity_quadratic();
    let p = step_policy(&q, &config(Method::Gni), &GniParams::new(1.0)).unwrap();
    assert!((p.rho - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(p.provenance, StepProvenance::QuadraticTheorem);
    let corollary = SolverConfig {
        quadratic_rule: QuadraticRule::Corollary,
        ..config(Method::Gni)
    };
    let p = step_policy(&q, &corollary, &GniParams::new(1.0)).unwrap();
    assert!((p.rho - 1.0 / 6.0).abs() < 1e-15);
    assert_eq!(p.provenance, StepProvenance::QuadraticCorollary);

    let secant = SolverConfig {
        secant_tau: 0.5,
        ..config(Method::GniSecant)
    };
    let p = step_policy(&g, &secant, &GniParams::new(1.0)).unwrap();
    assert!((p.rho - 0.5 * 0.5 / 2.25).abs() < 1e-15);
    assert_eq!(p.provenance, StepProvenance::Secant);

    let manual = SolverConfig {
        rho: StepSetting::Fixed(0.01),
        ..config(Method::Gni)
    };
    let p = step_policy(&g, &manual, &GniParams::new(1.0)).unwrap();
    assert_eq!((p.rho, p.provenance, p.lipschitz_v), (0.01, StepProvenance::Manual, None));
}

#[test]
fn corollary_requires_player_convexity() {
    let s = BlockStructure::new(vec![2, 2]).unwrap();
    let q = QuadraticGame::random(s, Definiteness::Indefinite, 3).unwrap();
    let c = SolverConfig {
        quadratic_rule: QuadraticRule::Corollary,
        ..config(Method::Gni)
    };
    if !q.player_convex() {
        let p = step_policy(&q, &c, &GniParams::new(0.5)).unwrap();
        assert_eq!(p.provenance, StepProvenance::QuadraticTheorem);
    }
}

#[test]
fn extragradient_lookahead_example() {
    let g = unit_bilinear();
    let x = Vector::from_vec(vec![1.0, 1.0]);
    let f = own_gradients(&g, &x).unwrap();
    let mut state = BaselineState::new(&config(Method::Extragradient), &f);
    let d = baseline_direction(&g, &mut state, &x, &f, 0.1).unwrap();
    assert!((d - Vector::from_vec(vec![1.1, -0.9])).norm() < 1e-15);
}

#[test]
fn omd_first_direction_is_gradient() {
    let g = unit_bilinear();
    let x = Vector::from_vec(vec![0.3, -2.0]);
    let f = own_gradients(&g, &x).unwrap();
    let mut state = BaselineState::new(&config(Method::Omd), &f);
    assert_eq!(baseline_direction(&g, &mut state, &x, &f, 0.1).unwrap(), f);
}

#[test]
fn adam_first_step_has_gradient_sign() {
    let g = unit_bilinear();
    let x = Vector::from_vec(vec![0.3, -2.0]);
    let f = own_gradients(&g, &x).unwrap();
    let c = config(Method::Adam);
    let mut state = BaselineState::new(&c, &f);
    let d = baseline_direction(&g, &mut state, &x, &f, 0.1).unwrap();
    for k in 0..2 {
        let expected = f[k].signum() * f[k].abs() / (f[k].abs() + c.adam_eps);
        assert!((d[k] - expected).abs() < 1e-12);
    }
}

#[test]
fn extrapolation_uses_stored_gradient() {
    let g = unit_bilinear();
    let x = Vector::from_vec(vec![1.0, 1.0]);
    let f = own_gradients(&g, &x).unwrap();
    let mut state = BaselineState::new(&config(Method::Extrapolation), &f);
    let d0 = baseline_direction(&g, &mut state, &x, &f, 0.1).unwrap();
    assert!((&d0 - Vector::from_vec(vec![1.1, -0.9])).norm() < 1e-15);
    let x1 = &x - &d0 * 0.1;
    let f1 = own_gradients(&g, &x1).unwrap();
    let d1 = baseline_direction(&g, &mut state, &x1, &f1, 0.1).unwrap();
    let lookahead = &x1 - d0 * 0.1;
    assert_eq!(d1, own_gradients(&g, &lookahead).unwrap());
}

#[test]
fn start_at_snp_converges_immediately() {
    let g = BilinearGame::random(3, 3, 1).unwrap();
    let x = g.nash_point().point;
    for m in Method::ALL {
        let c = SolverConfig {
            grad_tol: 1e-8,
            ..config(m)
        };
        let t = solve(&g, &c, &x).unwrap();
        assert_eq!(t.status, Status::Converged, "{}", m);
        assert_eq!(t.records.len(), 1);
    }
}

#[test]
fn snp_is_a_fixed_point_of_every_method() {
    let s = BlockStructure::new(vec![3, 2]).unwrap();
    let random = QuadraticGame::random(s.clone(), Definiteness::Indefinite, 2).unwrap();
    let g = QuadraticGame::new(s, random.matrices().to_vec(), vec![Vector::zeros(5); 2]).unwrap();
    let x = Vector::zeros(5);
    for m in Method::ALL {
        let c = SolverConfig {
            grad_tol: 1e-300,
            max_iters: 1,
            ..config(m)
        };
        let t = solve(&g, &c, &x).unwrap();
        assert!((&t.final_point - &x).norm() <= 1e-12, "{}", m);
    }
}

#[test]
fn gni_descends_on_random_bilinear() {
    let g = BilinearGame::random(4, 4, 7).unwrap();
    let c = SolverConfig {
        eta: StepSetting::Fixed(1.0 / g.coupling_norm()),
        max_iters: 2000,
        ..config(Method::Gni)
    };
    let x0 = Vector::from_element(8, 1.0);
    let t = solve(&g, &c, &x0).unwrap();
    let v0 = t.records[0].merit;
    for w in t.records.windows(2) {
        assert!(w[1].merit <= w[0].merit + 1e-12 * (1.0 + v0));
    }
    assert_eq!(t.status, Status::Converged);
}

#[test]
fn secant_trace_matches_exact_trace_on_quadratics() {
    let s = BlockStructure::new(vec![2, 3]).unwrap();
    let g = QuadraticGame::random(s, Definiteness::Indefinite, 11).unwrap();
    let x0 = Vector::from_element(5, 0.7);
    let exact = solve(&g, &SolverConfig { max_iters: 300, ..config(Method::Gni) }, &x0).unwrap();
    let secant = solve(&g, &SolverConfig { max_iters: 300, ..config(Method::GniSecant) }, &x0).unwrap();
    assert_eq!(exact.records.len(), secant.records.len());
    for (a, b) in exact.records.iter().zip(&secant.records) {
        assert!((a.merit - b.merit).abs() <= 1e-8 * (1.0 + a.merit.abs()));
    }
    assert!((exact.final_point - secant.final_point).norm() <= 1e-8);
}

#[test]
fn identical_runs_are_bit_identical() {
    let g = BilinearGame::random(3, 2, 5).unwrap();
    for m in Method::ALL {
        let c = SolverConfig { max_iters: 50, ..config(m) };
        let x0 = Vector::from_element(5, 0.3);
        let a = solve(&g, &c, &x0).unwrap();
        let b = solve(&g, &c, &x0).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn simultaneous_gradient_diverges_on_bilinear() {
    let g = unit_bilinear();
    let c = SolverConfig {
        rho: StepSetting::Fixed(0.5),
        max_iters: 100_000,
        ..config(Method::SimGd)
    };
    let t = solve(&g, &c, &Vector::from_vec(vec![1.0, 1.0])).unwrap();
    assert_eq!(t.status, Status::Diverged);
}

#[test]
fn domain_violations_halve_the_step() {
    let g = Bounded::new(true);
    let c = SolverConfig {
        rho: StepSetting::Fixed(1.0),
        eta: StepSetting::Fixed(0.01),
        max_iters: 200,
        ..config(Method::SimGd)
    };
    let t = solve(&g, &c, &Vector::from_vec(vec![10.0])).unwrap();
    assert!(t.halvings > 0);
    assert_ne!(t.status, Status::DomainError);
}

#[test]
fn persistent_violations_report_domain_error() {
    let g = Bounded::new(false);
    let c = SolverConfig {
        rho: StepSetting::Fixed(1.0),
        eta: StepSetting::Fixed(0.01),
        ..config(Method::SimGd)
    };
    let t = solve(&g, &c, &Vector::from_vec(vec![1.0])).unwrap();
    assert_eq!(t.status, Status::DomainError);
    assert_eq!(t.halvings, MAX_HALVINGS);
    assert_eq!(t.records.len(), 1);
}

#[test]
fn start_outside_domain_is_an_error() {
    let g = Bounded::new(true);
    assert!(solve(&g, &config(Method::SimGd), &Vector::from_vec(vec![-1.0])).unwrap_err().is_domain());
}

#[test]
fn clock_stamps_records() {
    let g = unit_bilinear();
    let mut now = 0.0;
    let mut clock = || {
        now += 1.0;
        now
    };
    let c = SolverConfig { max_iters: 3, ..config(Method::Gni) };
    let t = solve_with_clock(&g, &c, &Vector::from_vec(vec![1.0, 1.0]), Some(&mut clock)).unwrap();
    assert!(t.records.iter().zip(t.records.iter().skip(1)).all(|(a, b)| b.wall_ms > a.wall_ms));
}
