//! Independent oracles and state generators shared by the integration tests.
#![allow(dead_code)]

use renyi_core::layout::RegisterLayout;
use renyi_core::linalg::{self, c, eigh, Mat, C64};
use renyi_core::operator::{DensityOperator, QOperator};
use renyi_core::random::{random_density, random_probabilities, SeededRng};

pub fn lay(spec: &[(&str, usize)]) -> RegisterLayout {
    RegisterLayout::new(spec).unwrap()
}

/// `Σ_c p(c) |c⟩⟨c| ⊗ ρ_c` with the classical registers first.
pub fn cq_state(rng: &mut SeededRng, classical: &[(&str, usize)], quantum: &[(&str, usize)]) -> DensityOperator {
    let dc: usize = classical.iter().map(|x| x.1).product();
    let q = lay(quantum);
    let dq = q.total_dim();
    let p = random_probabilities(rng, dc);
    let mut m = linalg::zeros(dc * dq, dc * dq);
    for (k, &pk) in p.iter().enumerate() {
        let r = random_density(rng, q.clone());
        for i in 0..dq {
            for j in 0..dq {
                m[(k * dq + i, k * dq + j)] = r.matrix()[(i, j)] * pk;
            }
        }
    }
    let mut all = classical.to_vec();
    all.extend_from_slice(quantum);
    DensityOperator::from_operator(QOperator::new(lay(&all), m).unwrap(), true).unwrap()
}

fn power(m: &Mat, p: f64) -> Mat {
    let e = eigh(m);
    e.apply(|x| if x > 0.0 { x.powf(p) } else { 0.0 })
}

/// `tr[(σ^{γ/2} ρ σ^{γ/2})^α]`, with `γ = (1−α)/α` and the plain eigenvalue-wise power.
pub fn sandwich_trace(rho: &Mat, sigma: &Mat, alpha: f64) -> f64 {
    let s = power(sigma, 0.5 * (1.0 - alpha) / alpha);
    let m = &s * rho * &s;
    eigh(&m).values.iter().map(|v| v.max(0.0).powf(alpha)).sum()
}

/// `D_α(ρ‖σ)` in bits for full-rank `σ`, finite `α ≠ 1`.
pub fn sandwiched(rho: &Mat, sigma: &Mat, alpha: f64) -> f64 {
    (sandwich_trace(rho, sigma, alpha) / linalg::trace_re(rho)).log2() / (alpha - 1.0)
}

/// `(1 + r·σ⃗)/2`.
pub fn bloch(r: [f64; 3]) -> Mat {
    let mut m = Mat::from_element(2, 2, c(0.0));
    m[(0, 0)] = c(0.5 * (1.0 + r[2]));
    m[(1, 1)] = c(0.5 * (1.0 - r[2]));
    m[(0, 1)] = C64::new(0.5 * r[0], -0.5 * r[1]);
    m[(1, 0)] = C64::new(0.5 * r[0], 0.5 * r[1]);
    m
}

const BALL: f64 = 0.9999;

/// Minimum of `f` over the Bloch ball: a 0.05 lattice over the whole ball, a
/// 0.01 lattice over the ±0.1 cube around its best point, then three passes
/// each five times finer over ±5 cells. Coarse-to-fine suffices for convex `f`.
pub fn bloch_grid_min(f: impl Fn(&Mat) -> f64) -> (f64, [f64; 3]) {
    let mut best = (f64::INFINITY, [0.0; 3]);
    let visit = |r: [f64; 3], best: &mut (f64, [f64; 3])| {
        if r.iter().map(|x| x * x).sum::<f64>() > BALL * BALL {
            return;
        }
        let v = f(&bloch(r));
        if v < best.0 {
            *best = (v, r);
        }
    };
    let n = 20i32;
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let h = 1.0 / n as f64;
                visit([i as f64 * h, j as f64 * h, k as f64 * h], &mut best);
            }
        }
    }
    let mut step = 0.01;
    let mut radius = 10i32;
    for _ in 0..4 {
        let centre = best.1;
        for i in -radius..=radius {
            for j in -radius..=radius {
                for k in -radius..=radius {
                    let r = [
                        centre[0] + i as f64 * step,
                        centre[1] + j as f64 * step,
                        centre[2] + k as f64 * step,
                    ];
                    visit(r, &mut best);
                }
            }
        }
        step /= 5.0;
        radius = 5;
    }
    best
}

/// `H^f_α(Q C̄|Ĉ Q′)` evaluated block by block from the defining trace formula with
/// explicit matrix powers, for a state whose first two registers are the score
/// registers (`C̄` then `Ĉ`) followed by `Q`, `Q′`.
pub fn qes_blockwise(rho: &DensityOperator, dims: [usize; 4], scores: &[Vec<f64>], alpha: f64) -> f64 {
    let [ds, dp, dq, dq2] = dims;
    let block = dq * dq2;
    let m = rho.matrix();
    let gamma = (1.0 - alpha) / alpha;
    let mut total = 0.0;
    for cp in 0..dp {
        // ρ_{Q′∧ĉ} = Σ_c̄ tr_Q ρ_{c̄ĉ}
        let mut side = linalg::zeros(dq2, dq2);
        let mut blocks = Vec::new();
        for cs in 0..ds {
            let off = (cs * dp + cp) * block;
            let b = Mat::from_fn(block, block, |i, j| m[(off + i, off + j)]);
            for q in 0..dq {
                for i in 0..dq2 {
                    for j in 0..dq2 {
                        side[(i, j)] += b[(q * dq2 + i, q * dq2 + j)];
                    }
                }
            }
            blocks.push(b);
        }
        let s = linalg::kron(&linalg::identity(dq), &power(&side, gamma / 2.0));
        for (cs, b) in blocks.iter().enumerate() {
            if linalg::trace_re(b) <= 1e-14 {
                continue;
            }
            let inner = &s * b * &s;
            let t: f64 = eigh(&inner).values.iter().map(|v| v.max(0.0).powf(alpha)).sum();
            total += (-(1.0 - alpha) * scores[cs][cp]).exp2() * t;
        }
    }
    total.log2() / (1.0 - alpha)
}
