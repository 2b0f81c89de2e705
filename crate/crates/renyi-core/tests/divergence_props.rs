mod common;

use common::{lay, sandwiched};
use proptest::prelude::*;
use renyi_core::channel::apply_channel;
use renyi_core::divergence::{
    block_divergence, classical_divergence, renyi_divergence, Block, ClassicalDistribution, RenyiOrder,
};
use renyi_core::linalg::{self, c, eigh, Mat};
use renyi_core::operator::{DensityOperator, QOperator};
use renyi_core::random::{
    random_channel, random_density, random_density_rank, random_isometry, random_probabilities, rng_from_seed,
};

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

fn d(rho: &DensityOperator, sigma: &DensityOperator, a: f64) -> f64 {
    renyi_divergence(rho, sigma.base(), order(a)).unwrap()
}

/// Random pair on `A(2) B(2)` with full-rank `rho` and `sigma` of rank `sigma_rank`.
fn pair(seed: u64, sigma_rank: usize) -> (DensityOperator, DensityOperator) {
    let mut rng = rng_from_seed(seed);
    let l = lay(&[("A", 2), ("B", 2)]);
    let sigma = random_density_rank(&mut rng, l.clone(), sigma_rank);
    let rho = random_density(&mut rng, l);
    (rho, sigma)
}

/// Smallest λ with `λσ − ρ ⪰ 0` by bisection on the smallest eigenvalue.
fn dmax_bisection(rho: &Mat, sigma: &Mat) -> f64 {
    let ok = |l: f64| eigh(&(sigma.scale(l) - rho)).min() >= -1e-13;
    let (mut lo, mut hi) = (0.0, 1.0);
    while !ok(hi) {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi.log2()
}

const ALPHAS: [f64; 5] = [0.6, 1.0, 1.5, 2.0, f64::INFINITY];

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn data_processing(seed in any::<u64>(), ai in 0usize..5, env in 1usize..4) {
        let a = ALPHAS[ai];
        let (rho, sigma) = pair(seed, 4);
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let ch = random_channel(&mut rng, lay(&[("A", 2)]), lay(&[("C", 3)]), env);
        let before = d(&rho, &sigma, a);
        let after = d(&apply_channel(&ch, &rho).unwrap(), &apply_channel(&ch, &sigma).unwrap(), a);
        prop_assert!(before >= after - 1e-8, "{before} < {after} at alpha {a}");
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn nondecreasing_in_alpha(seed in any::<u64>()) {
        let (rho, sigma) = pair(seed, 4);
        let grid = [0.6, 0.9, 1.0, 1.3, 2.0, 5.0, f64::INFINITY];
        let vals: Vec<f64> = grid.iter().map(|&a| d(&rho, &sigma, a)).collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-8, "{vals:?}");
        }
    }

    #[test]
    fn continuity_at_one(seed in any::<u64>()) {
        let (rho, sigma) = pair(seed, 4);
        let one = d(&rho, &sigma, 1.0);
        for a in [1.0 - 1e-4, 1.0 + 1e-4] {
            prop_assert!((d(&rho, &sigma, a) - one).abs() <= 1e-2);
        }
    }

    #[test]
    fn isometric_invariance(seed in any::<u64>(), ai in 0usize..5) {
        let a = ALPHAS[ai];
        let (rho, sigma) = pair(seed, 4);
        let mut rng = rng_from_seed(seed.wrapping_add(3));
        let v = random_isometry(&mut rng, 6, 4);
        let up = |x: &DensityOperator| {
            DensityOperator::new(lay(&[("C", 6)]), &v * x.matrix() * v.adjoint(), true).unwrap()
        };
        prop_assert!((d(&up(&rho), &up(&sigma), a) - d(&rho, &sigma, a)).abs() <= 1e-9);
    }

    #[test]
    fn scaling_the_reference(seed in any::<u64>(), ai in 0usize..5, t in 0.05f64..1.0) {
        let a = ALPHAS[ai];
        let (rho, sigma) = pair(seed, 4);
        let scaled = QOperator::new(sigma.layout().clone(), sigma.matrix().scale(t)).unwrap();
        let v = renyi_divergence(&rho, &scaled, order(a)).unwrap();
        prop_assert!((v - (d(&rho, &sigma, a) - t.log2())).abs() <= 1e-9);
    }

    #[test]
    fn matches_the_explicit_formula(seed in any::<u64>(), a in prop_oneof![0.5f64..0.99, 1.01f64..6.0]) {
        let (rho, sigma) = pair(seed, 4);
        let want = sandwiched(rho.matrix(), sigma.matrix(), a);
        prop_assert!((d(&rho, &sigma, a) - want).abs() <= 1e-9 * want.abs().max(1.0));
    }

    #[test]
    fn max_divergence_matches_bisection(seed in any::<u64>(), rank in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let l = lay(&[("A", 4)]);
        let sigma = random_density(&mut rng, l.clone());
        let rho = random_density_rank(&mut rng, l, rank);
        let v = d(&rho, &sigma, f64::INFINITY);
        prop_assert!((v - dmax_bisection(rho.matrix(), sigma.matrix())).abs() <= 1e-9);
    }

    #[test]
    fn support_conditions(seed in any::<u64>(), ai in 0usize..5) {
        let a = ALPHAS[ai];
        let (rho, sigma) = pair(seed, 2);
        let v = d(&rho, &sigma, a);
        if a < 1.0 {
            prop_assert!(v.is_finite());
        } else {
            prop_assert!(v == f64::INFINITY);
        }
    }

    #[test]
    fn classical_agrees_with_diagonal_embedding(seed in any::<u64>(), ai in 0usize..5, zeros in 0usize..3) {
        let a = ALPHAS[ai];
        let mut rng = rng_from_seed(seed);
        let mut p = random_probabilities(&mut rng, 4);
        let q = random_probabilities(&mut rng, 4);
        for w in p.iter_mut().take(zeros) {
            *w = 0.0;
        }
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|w| *w /= s);
        let pc = ClassicalDistribution::new(p.clone()).unwrap();
        let qc = ClassicalDistribution::new(q.clone()).unwrap();
        let cl = classical_divergence(&pc, &qc, order(a)).unwrap();
        let l = lay(&[("X", 4)]);
        let dp = DensityOperator::classical(l.clone(), &p).unwrap();
        let dq = DensityOperator::classical(l, &q).unwrap();
        prop_assert!((cl - d(&dp, &dq, a)).abs() <= 1e-10);
    }

    #[test]
    fn block_divergence_matches_the_assembled_matrix(seed in any::<u64>(), ai in 0usize..5) {
        let a = ALPHAS[ai];
        let mut rng = rng_from_seed(seed);
        let l = lay(&[("Q", 2)]);
        let pr = random_probabilities(&mut rng, 3);
        let ps = random_probabilities(&mut rng, 3);
        let mut big_r = linalg::zeros(6, 6);
        let mut big_s = linalg::zeros(6, 6);
        let mut blocks = Vec::new();
        for k in 0..3 {
            let r = random_density(&mut rng, l.clone());
            let s = random_density(&mut rng, l.clone());
            for i in 0..2 {
                for j in 0..2 {
                    big_r[(2 * k + i, 2 * k + j)] = r.matrix()[(i, j)] * c(pr[k]);
                    big_s[(2 * k + i, 2 * k + j)] = s.matrix()[(i, j)] * c(ps[k]);
                }
            }
            blocks.push(Block { p_rho: pr[k], p_sigma: ps[k], rho: r, sigma: s.into_base() });
        }
        let bl = block_divergence(&blocks, order(a)).unwrap();
        let big = lay(&[("X", 3), ("Q", 2)]);
        let full = renyi_divergence(
            &DensityOperator::new(big.clone(), big_r, true).unwrap(),
            &QOperator::new(big, big_s).unwrap(),
            order(a),
        )
        .unwrap();
        prop_assert!((bl - full).abs() <= 1e-9, "{bl} vs {full}");
    }
}
