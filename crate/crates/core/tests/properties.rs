use gni_core::diagnostics::check_lemma1_sandwich;
use gni_core::game::{lipschitz_constant, own_gradients, stationarity};
use gni_core::games::{BilinearGame, CovarianceGame, Definiteness, GameInstance, QuadraticGame};
use gni_core::gni::{gni_value, GniParams};
use gni_core::linalg::Vector;
use gni_core::math::softplus;
use gni_core::residual::residual_value;
use gni_core::{solve, BlockStructure, Game, JointPoint, Method, SolverConfig, StepSetting, Trace};
use proptest::prelude::*;

fn point(n: usize, seed: u64, scale: f64) -> Vector {
    let mut r = gni_core::rng::seeded(seed);
    gni_core::rng::standard_normal(&mut r, n) * scale
}

fn smooth_game(kind: u8, seed: u64) -> GameInstance {
    match kind % 3 {
        0 => GameInstance::Bilinear(BilinearGame::random(3, 4, seed).unwrap()),
        1 => GameInstance::Quadratic(
            QuadraticGame::random(BlockStructure::new(vec![2, 3, 2]).unwrap(), Definiteness::Indefinite, seed).unwrap(),
        ),
        _ => GameInstance::Covariance(CovarianceGame::random(3, 2, seed).unwrap()),
    }
}

fn trace_bits(t: &Trace) -> Vec<u64> {
    t.records
        .iter()
        .flat_map(|r| {
            [r.merit, r.merit_grad_norm, r.grad_norm]
                .into_iter()
                .chain(r.per_player.iter().copied())
                .map(f64::to_bits)
        })
        .chain(t.final_point.iter().map(|v| v.to_bits()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merit_is_nonnegative(kind in 0u8..3, seed in 0u64..1000, scale in 0.01f64..3.0, frac in 0.05f64..=1.0) {
        let g = smooth_game(kind, seed);
        let eta = frac / lipschitz_constant(&g).unwrap();
        let x = point(g.structure().total(), seed ^ 0xabc, scale);
        let v = gni_value(&g, &x, &GniParams::new(eta)).unwrap();
        let fscale: f64 = (0..g.structure().players()).map(|i| g.payoff(i, &x).unwrap().abs()).sum();
        prop_assert!(v.total >= -1e-12 * (1.0 + fscale));
        for c in &v.components {
            prop_assert!(*c >= -1e-12 * (1.0 + fscale));
        }
        let sum: f64 = v.components.iter().sum();
        prop_assert!((sum - v.total).abs() <= 1e-12 * (1.0 + v.total.abs()));
    }

    #[test]
    fn zero_set_equivalence(kind in 0u8..3, seed in 0u64..1000, scale in 1e-6f64..2.0) {
        let g = smooth_game(kind, seed);
        let eta = 1.0 / lipschitz_constant(&g).unwrap();
        let x = point(g.structure().total(), seed ^ 0x5e7, scale);
        let v = gni_value(&g, &x, &GniParams::new(eta)).unwrap().total;
        let rep = stationarity(&g, &x).unwrap();
        let max_sq = rep.per_player_grad_norms.iter().map(|n| n * n).fold(0.0, f64::max);
        let n = g.structure().players() as f64;
        let slack = 1.0 + 1e-9;
        // V ≤ ε forces every own gradient small.
        for eps in [v, 2.0 * v, 10.0 * v] {
            prop_assert!(max_sq <= slack * 2.0 * eps / eta + 1e-300);
        }
        // Small own gradients force V small, with a factor-3 slack per player.
        let eps = 1.5 * eta * n * max_sq;
        prop_assert!(v <= slack * eps + 1e-300);
    }

    #[test]
    fn bilinear_game_is_zero_sum(n1 in 1usize..6, n2 in 1usize..6, seed in 0u64..1000, scale in 0.1f64..100.0) {
        let g = BilinearGame::random(n1, n2, seed).unwrap();
        let x = point(n1 + n2, seed + 1, scale);
        let f1 = g.payoff(0, &x).unwrap();
        let f2 = g.payoff(1, &x).unwrap();
        prop_assert!((f1 + f2).abs() <= 1e-12 * (1.0 + f1.abs()));
    }

    #[test]
    fn joint_norm_is_the_sum_of_player_norms(kind in 0u8..3, seed in 0u64..1000, scale in 0.01f64..10.0) {
        let g = smooth_game(kind, seed);
        let x = point(g.structure().total(), seed, scale);
        let rep = stationarity(&g, &x).unwrap();
        let sum: f64 = rep.per_player_grad_norms.iter().map(|n| n * n).sum();
        let joint = rep.joint_grad_norm * rep.joint_grad_norm;
        prop_assert!((joint - sum).abs() <= 1e-12 * (1.0 + joint));
    }

    #[test]
    fn block_masks_are_idempotent(kind in 0u8..3, seed in 0u64..1000) {
        let g = smooth_game(kind, seed);
        let s = g.structure();
        let x = point(s.total(), seed, 1.0);
        for i in 0..s.players() {
            let once = s.mask(i, &g.gradient(i, &x).unwrap());
            let twice = s.mask(i, &once);
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(s.select(i, &once), s.select(i, &own_gradients(&g, &x).unwrap()));
        }
    }

    #[test]
    fn blocks_round_trip(sizes in prop::collection::vec(1usize..5, 1..5), seed in 0u64..1000) {
        let s = BlockStructure::new(sizes).unwrap();
        let x = point(s.total(), seed, 1.0);
        let p = JointPoint::new(s.clone(), x.clone()).unwrap();
        let back = JointPoint::from_blocks(s, &p.blocks()).unwrap();
        prop_assert_eq!(back.coords(), &x);
    }

    #[test]
    fn residual_merit_is_half_squared_norm(kind in 0u8..3, seed in 0u64..1000, scale in 0.01f64..10.0) {
        let g = smooth_game(kind, seed);
        let x = point(g.structure().total(), seed, scale);
        let r = residual_value(&g, &x).unwrap();
        let half = 0.5 * r.stacked_residual.norm_squared();
        prop_assert!(r.phi >= 0.0);
        prop_assert!((r.phi - half).abs() <= 1e-12 * (1.0 + half));
    }

    #[test]
    fn softplus_is_stable(t in -700.0f64..700.0) {
        let s = softplus(t);
        prop_assert!(s.is_finite());
        let gap = s - t.max(0.0);
        prop_assert!((0.0..=core::f64::consts::LN_2 + 1e-15).contains(&gap));
    }

    #[test]
    fn covariance_second_block_is_symmetric(seed in 0u64..1000) {
        let g = CovarianceGame::random(3, 2, seed).unwrap();
        let x = point(g.structure().total(), seed, 1.0);
        let x2 = g.x2(&x);
        prop_assert_eq!(&x2, &x2.transpose());
        let packed = g.pack(&g.x1(&x), &x2).unwrap();
        prop_assert!((packed - &x).amax() <= 1e-14 * (1.0 + x.amax()));
    }

    #[test]
    fn check_reports_pass_iff_worst_case_is_within_threshold(kind in 0u8..3, seed in 0u64..200, frac in 0.1f64..2.5) {
        let g = smooth_game(kind, seed);
        let eta = frac / lipschitz_constant(&g).unwrap();
        let r = check_lemma1_sandwich(&g, eta, 20, seed).unwrap();
        if r.applicable {
            prop_assert_eq!(r.passed, r.worst_case <= r.threshold);
        } else {
            prop_assert!(frac > 1.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solver_runs_are_deterministic(kind in 0u8..3, seed in 0u64..1000, m in 0usize..8) {
        let g = smooth_game(kind, seed);
        let method = Method::ALL[m];
        let mut c = SolverConfig::new(method);
        c.max_iters = 40;
        c.seed = seed;
        if !method.is_gni() && method != Method::Residual {
            c.rho = StepSetting::Fixed(0.01);
        }
        let x0 = point(g.structure().total(), seed, 1.0);
        let a = solve(&g, &c, &x0).unwrap();
        let b = solve(&g, &c, &x0).unwrap();
        prop_assert_eq!(trace_bits(&a), trace_bits(&b));
        prop_assert_eq!(a.status, b.status);
        prop_assert!(a.records.iter().enumerate().all(|(k, r)| r.iter == k));
    }

    #[test]
    fn gni_descent_decreases_the_merit(kind in 0u8..2, seed in 0u64..1000, alpha in 0.1f64..=1.0) {
        let g = smooth_game(kind, seed);
        let mut c = SolverConfig::new(Method::Gni);
        c.max_iters = 200;
        c.alpha = alpha;
        let x0 = point(g.structure().total(), seed, 2.0);
        let t = solve(&g, &c, &x0).unwrap();
        let v0 = t.records[0].merit;
        for w in t.records.windows(2) {
            prop_assert!(w[1].merit <= w[0].merit + 1e-12 * (1.0 + v0));
        }
    }
}
