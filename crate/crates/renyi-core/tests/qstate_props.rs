mod common;

use common::{cq_state, lay};
use proptest::prelude::*;
use renyi_core::channel::apply_channel;
use renyi_core::linalg;
use renyi_core::operator::{
    condition_on_event, matrix_power, partial_trace, purified_distance, purify, tensor_product, ClassicalEvent, EventMode,
};
use renyi_core::random::{random_channel, random_density, random_density_rank, rng_from_seed};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn subset(mask: u8, d: usize) -> Vec<usize> {
    let s: Vec<usize> = (0..d).filter(|k| mask & (1 << k) != 0).collect();
    if s.is_empty() {
        vec![0]
    } else {
        s
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn event_conditioning_commutes_and_associates(seed in any::<u64>(), m1 in any::<u8>(), m2 in any::<u8>(), m3 in any::<u8>()) {
        let mut rng = rng_from_seed(seed);
        let rho = cq_state(&mut rng, &[("X", 3), ("Y", 2)], &[("Q", 2)]);
        let ex = ClassicalEvent::new("X", subset(m1, 3)).unwrap();
        let ey = ClassicalEvent::new("Y", subset(m2, 2)).unwrap();
        let a = condition_on_event(&condition_on_event(&rho, &ex, EventMode::Partial).unwrap(), &ey, EventMode::Partial).unwrap();
        let b = condition_on_event(&condition_on_event(&rho, &ey, EventMode::Partial).unwrap(), &ex, EventMode::Partial).unwrap();
        prop_assert!(linalg::max_abs_diff(a.matrix(), b.matrix()) <= 1e-12);

        // repeated events on one register act as their intersection
        let ex2 = ClassicalEvent::new("X", subset(m3, 3)).unwrap();
        let twice = condition_on_event(&condition_on_event(&rho, &ex, EventMode::Partial).unwrap(), &ex2, EventMode::Partial).unwrap();
        match ex.and(&ex2) {
            Some(both) => {
                let once = condition_on_event(&rho, &both, EventMode::Partial).unwrap();
                prop_assert!(linalg::max_abs_diff(twice.matrix(), once.matrix()) <= 1e-12);
            }
            None => prop_assert!(twice.trace().abs() <= 1e-15),
        }
    }

    #[test]
    fn event_and_complement_sum_to_the_state(seed in any::<u64>(), mask in 1u8..7) {
        let mut rng = rng_from_seed(seed);
        let rho = cq_state(&mut rng, &[("X", 3)], &[("Q", 2), ("R", 2)]);
        let acc = subset(mask, 3);
        let rest: Vec<usize> = (0..3).filter(|k| !acc.contains(k)).collect();
        let on = condition_on_event(&rho, &ClassicalEvent::new("X", acc).unwrap(), EventMode::Partial).unwrap();
        let sum = if rest.is_empty() {
            on.matrix().clone()
        } else {
            on.matrix() + condition_on_event(&rho, &ClassicalEvent::new("X", rest).unwrap(), EventMode::Partial).unwrap().matrix()
        };
        prop_assert!(linalg::max_abs_diff(&sum, rho.matrix()) <= 1e-15);
    }

    #[test]
    fn matrix_power_round_trips_on_the_support(seed in any::<u64>(), rank in 1usize..=4, pi in 0usize..3) {
        let p = [1.0 / 3.0, 0.5, 2.0][pi];
        let mut rng = rng_from_seed(seed);
        let m = random_density_rank(&mut rng, lay(&[("A", 2), ("B", 2)]), rank);
        let back = matrix_power(&matrix_power(m.base(), p, true).unwrap(), 1.0 / p, true).unwrap();
        prop_assert!(linalg::max_abs_diff(back.matrix(), m.matrix()) <= 1e-9);
    }

    #[test]
    fn purified_distance_triangle_inequality(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let l = lay(&[("A", 3)]);
        let r: Vec<_> = (0..3).map(|_| random_density_rank(&mut rng, l.clone(), 1 + (seed % 3) as usize)).collect();
        let d = |i: usize, j: usize| purified_distance(&r[i], &r[j]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        prop_assert!(d(0, 0) <= 1e-7);
        prop_assert!((d(0, 1) - d(1, 0)).abs() <= 1e-9);
    }

    #[test]
    fn composed_channels_match_sequential_application(seed in any::<u64>(), env in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_channel(&mut rng, lay(&[("A", 2)]), lay(&[("B", 3)]), env);
        let b = random_channel(&mut rng, lay(&[("B", 3)]), lay(&[("C", 2)]), 2);
        let rho = random_density(&mut rng, lay(&[("A", 2), ("R", 2)]));
        let seq = apply_channel(&b, &apply_channel(&a, &rho).unwrap()).unwrap();
        let comp = apply_channel(&a.then(&b).unwrap(), &rho).unwrap();
        prop_assert!(linalg::max_abs_diff(seq.matrix(), comp.reorder(seq.layout()).unwrap().matrix()) <= 1e-10);
        prop_assert!((comp.trace() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn partial_trace_inverts_tensor_products(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = random_density(&mut rng, lay(&[("A", 2)]));
        let b = random_density(&mut rng, lay(&[("B", 3)]));
        let ab = tensor_product(a.base(), b.base()).unwrap();
        let back = partial_trace(&ab, &["A"]).unwrap();
        prop_assert!(linalg::max_abs_diff(back.matrix(), a.matrix()) <= 1e-14);
        let back = partial_trace(&ab, &["B"]).unwrap();
        prop_assert!(linalg::max_abs_diff(back.matrix(), b.matrix()) <= 1e-14);
    }

    #[test]
    fn purification_reduces_to_the_state(seed in any::<u64>(), rank in 1usize..=3) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_rank(&mut rng, lay(&[("A", 3)]), rank);
        let psi = purify(&rho, "P").unwrap();
        prop_assert!(linalg::max_abs_diff(psi.reduce(&["A"]).unwrap().matrix(), rho.matrix()) <= 1e-12);
        let e = linalg::eigh(psi.matrix());
        prop_assert!((e.max() - 1.0).abs() <= 1e-12);
    }
}
