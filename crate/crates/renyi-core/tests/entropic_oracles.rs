mod common;

use common::{bloch_grid_min, cq_state, lay, sandwiched};
use proptest::prelude::*;
use renyi_core::divergence::{renyi_divergence, RenyiOrder};
use renyi_core::entropic::{
    cmi_vn, cond_entropy_down, cond_entropy_up, cond_entropy_vn, cqmi_diff, hmin_up, imax_family, mutual_info_down,
    mutual_info_downdown, mutual_info_plain, mutual_info_vn, ImaxVariant, OptimizerConfig,
};
use renyi_core::linalg::{self, Mat};
use renyi_core::operator::{DensityOperator, QOperator};
use renyi_core::random::{random_density, rng_from_seed};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn order(a: f64) -> RenyiOrder {
    RenyiOrder::new(a).unwrap()
}

fn ab_state(seed: u64, da: usize) -> DensityOperator {
    random_density(&mut rng_from_seed(seed), lay(&[("A", da), ("B", 2)]))
}

#[test]
fn up_entropy_and_down_information_match_a_bloch_grid() {
    let cfg = OptimizerConfig::default();
    for (k, alpha) in [0.7, 1.5, 2.5, 4.0].into_iter().enumerate() {
        let rho = ab_state(100 + k as u64, 2 + k % 2);
        let da = rho.layout().dim_of("A").unwrap();
        let m = rho.matrix();
        let rho_a = rho.reduce(&["A"]).unwrap().into_base().into_matrix();

        let h = cond_entropy_up(&rho, &["A"], &["B"], order(alpha), &cfg).unwrap().value;
        let (g, _) = bloch_grid_min(|s| sandwiched(m, &linalg::kron(&linalg::identity(da), s), alpha));
        assert!((h + g).abs() <= 1e-5, "H_up {h} vs grid {}", -g);

        let i = mutual_info_down(&rho, &["A"], &["B"], order(alpha), &cfg).unwrap().value;
        let (g, _) = bloch_grid_min(|s| sandwiched(m, &linalg::kron(&rho_a, s), alpha));
        assert!((i - g).abs() <= 1e-5, "I_down {i} vs grid {g}");
    }
}

#[test]
fn von_neumann_agreement_at_order_one() {
    let cfg = OptimizerConfig::default();
    for seed in 0..10 {
        let rho = random_density(&mut rng_from_seed(seed), lay(&[("A", 2), ("B", 3)]));
        let vn = cond_entropy_vn(&rho, &["A"], &["B"]).unwrap();
        assert!((cond_entropy_down(&rho, &["A"], &["B"], RenyiOrder::one()).unwrap() - vn).abs() <= 1e-6);
        assert!((cond_entropy_up(&rho, &["A"], &["B"], RenyiOrder::one(), &cfg).unwrap().value - vn).abs() <= 1e-6);
        let vn = mutual_info_vn(&rho, &["A"], &["B"]).unwrap();
        assert!((mutual_info_plain(&rho, &["A"], &["B"], RenyiOrder::one()).unwrap() - vn).abs() <= 1e-6);
        assert!((mutual_info_down(&rho, &["A"], &["B"], RenyiOrder::one(), &cfg).unwrap().value - vn).abs() <= 1e-6);
        assert!(
            (mutual_info_downdown(&rho, &["A"], &["B"], RenyiOrder::one(), &cfg)
                .unwrap()
                .value
                - vn)
                .abs()
                <= 1e-6
        );
    }
}

#[test]
fn conditional_information_difference_near_order_one() {
    let cfg = OptimizerConfig::default();
    for seed in 0..4 {
        let rho = random_density(&mut rng_from_seed(seed), lay(&[("A", 2), ("B", 2), ("C", 2)]));
        let vn = cmi_vn(&rho, &["A"], &["B"], &["C"]).unwrap();
        let at_one = cqmi_diff(&rho, &["A"], &["B"], &["C"], RenyiOrder::one(), &cfg)
            .unwrap()
            .value;
        assert!((at_one - vn).abs() <= 1e-6, "{at_one} vs {vn}");
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            let v = cqmi_diff(&rho, &["A"], &["B"], &["C"], order(a), &cfg).unwrap().value;
            assert!((v - vn).abs() <= 1e-2, "alpha {a}: {v} vs {vn}");
        }
    }
}

#[test]
fn min_entropy_duality_gaps() {
    let bell = {
        let mut m = linalg::zeros(4, 4);
        for i in [0, 3] {
            for j in [0, 3] {
                m[(i, j)] = linalg::c(0.5);
            }
        }
        DensityOperator::new(lay(&[("A", 2), ("B", 2)]), m, true).unwrap()
    };
    let r = hmin_up(&bell, &["A"], &["B"]).unwrap();
    assert!((r.value + 1.0).abs() <= 1e-6);
    for seed in 0..20 {
        let rho = random_density(&mut rng_from_seed(seed), lay(&[("A", 2), ("B", 3)]));
        let r = hmin_up(&rho, &["A"], &["B"]).unwrap();
        assert!(r.residual <= 1e-7, "gap {}", r.residual);
        // the dual witness certifies 1⊗σ ⪰ ρ with tr σ = 2^{−H}
        let s = &r.witnesses[0].state;
        let lhs = linalg::kron(&linalg::identity(2), s.matrix()).scale(2f64.powf(-r.value)) - rho.matrix();
        assert!(linalg::eigh(&lhs).min() >= -1e-7);
        let im = imax_family(&rho, &["A"], &["B"], ImaxVariant::Down).unwrap();
        assert!(im.residual <= 1e-7);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn classical_mixture_identities(seed in any::<u64>(), ai in 0usize..4) {
        let a = [0.6, 0.9, 1.5, 3.0][ai];
        let mut rng = rng_from_seed(seed);
        let rho = cq_state(&mut rng, &[("C", 3)], &[("Q", 2), ("R", 2)]);
        let cfg = OptimizerConfig::default();
        let mut down = 0.0;
        let mut up = 0.0;
        let g = (1.0 - a) / a;
        for k in 0..3 {
            let blk = Mat::from_fn(4, 4, |i, j| rho.matrix()[(4 * k + i, 4 * k + j)]);
            let p = linalg::trace_re(&blk);
            let b = DensityOperator::new(lay(&[("Q", 2), ("R", 2)]), blk.scale(1.0 / p), true).unwrap();
            down += p * ((1.0 - a) * cond_entropy_down(&b, &["Q"], &["R"], order(a)).unwrap()).exp2();
            up += p * (g * cond_entropy_up(&b, &["Q"], &["R"], order(a), &cfg).unwrap().value).exp2();
        }
        let lhs = cond_entropy_down(&rho, &["Q"], &["C", "R"], order(a)).unwrap();
        prop_assert!((lhs - down.log2() / (1.0 - a)).abs() <= 1e-8);
        let lhs = cond_entropy_up(&rho, &["Q"], &["C", "R"], order(a), &cfg).unwrap().value;
        prop_assert!((lhs - up.log2() / g).abs() <= 1e-8);
    }

    #[test]
    fn up_entropy_witness_is_optimal_along_random_directions(seed in any::<u64>(), ai in 0usize..4) {
        let a = [0.6, 1.5, 2.0, 3.0][ai];
        let rho = ab_state(seed, 2);
        let cfg = OptimizerConfig::default();
        let r = cond_entropy_up(&rho, &["A"], &["B"], order(a), &cfg).unwrap();
        let sigma = r.witnesses[0].state.matrix().clone();
        let value_at = |s: &Mat| {
            let op = QOperator::new(lay(&[("A", 2), ("B", 2)]), linalg::kron(&linalg::identity(2), s)).unwrap();
            -renyi_divergence(&rho, &op, order(a)).unwrap()
        };
        prop_assert!((value_at(&sigma) - r.value).abs() <= 1e-9);
        let mut rng = rng_from_seed(seed ^ 77);
        for _ in 0..50 {
            let tau = random_density(&mut rng, lay(&[("B", 2)])).into_base().into_matrix();
            for t in [1e-3, 1e-2, 1e-1] {
                let moved = sigma.scale(1.0 - t) + tau.scale(t);
                prop_assert!(value_at(&moved) <= r.value + cfg.tol_objective);
            }
        }
    }

    #[test]
    fn information_ordering(seed in any::<u64>(), ai in 0usize..4) {
        let a = [0.5, 0.8, 1.5, 2.0][ai];
        let rho = ab_state(seed, 3);
        let cfg = OptimizerConfig::default();
        let i = mutual_info_plain(&rho, &["A"], &["B"], order(a)).unwrap();
        let id = mutual_info_down(&rho, &["A"], &["B"], order(a), &cfg).unwrap().value;
        let idd = mutual_info_downdown(&rho, &["A"], &["B"], order(a), &cfg).unwrap().value;
        prop_assert!(idd <= id + 1e-7 && id <= i + 1e-7);
        let h = cond_entropy_down(&rho, &["A"], &["B"], order(a)).unwrap();
        let hu = cond_entropy_up(&rho, &["A"], &["B"], order(a), &cfg).unwrap().value;
        prop_assert!(h <= hu + 1e-7);
    }
}
