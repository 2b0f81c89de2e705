//! Gradients of the sandwiched trace functional `Q(ρ,σ) = tr[(σ^{γ/2} ρ σ^{γ/2})^α]`.
//!
//! Used by the searches over channel inputs, where the objective is a
//! closed-form divergence of a state that depends linearly on the input.

use crate::entropic::sandwich::ptrace_first;
use crate::linalg::{self, divided_differences, eigh, Mat, LN2};

pub struct TraceFunctional {
    pub q: f64,
    /// `∂Q/∂ρ`.
    pub d_rho: Mat,
    /// `∂Q/∂σ`.
    pub d_sigma: Mat,
}

/// `Q` and both Euclidean gradients for α > 1, with powers of σ taken on its support.
///
/// For singular σ this is the derivative along perturbations that keep the rank
/// of σ and the support of ρ inside it, which is all a fixed-rank family of
/// channel outputs can reach.
pub fn trace_functional(rho: &Mat, sigma: &Mat, alpha: f64) -> Option<TraceFunctional> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return None;
    }
    let gamma = (1.0 - alpha) / alpha;
    let se = eigh(sigma);
    if !(se.max() > 0.0) {
        return None;
    }
    let fl = se.floor();
    let live: Vec<bool> = se.values.iter().map(|&v| v > fl).collect();
    let lam = &se.values;
    let u = &se.vectors;
    let z = se.apply_on_support(|x| x.powf(0.5 * gamma));
    let zinv = se.apply_on_support(|x| x.powf(-0.5 * gamma));
    let x = linalg::hermitize(&(&z * rho * &z));
    let xe = eigh(&x);
    let q: f64 = xe.values.iter().map(|&v| v.max(0.0).powf(alpha)).sum();
    let xa1 = xe.apply(|v| v.max(0.0).powf(alpha - 1.0));
    let xa = xe.apply(|v| v.max(0.0).powf(alpha));
    let d_rho = linalg::hermitize(&(&z * xa1 * &z).scale(alpha));
    let t = u.adjoint() * (&zinv * xa * &zinv) * u;
    let dd = divided_differences(lam, gamma);
    let n = lam.len();
    let g = Mat::from_fn(n, n, |i, j| {
        if live[i] && live[j] {
            t[(i, j)] * (alpha * dd[(i, j)])
        } else {
            linalg::c(0.0)
        }
    });
    let d_sigma = linalg::hermitize(&(u * g * u.adjoint()));
    Some(TraceFunctional { q, d_rho, d_sigma })
}

/// `H_α(A|B)_τ` in bits for τ on `A ⊗ B` (any trace), with its gradient in τ.
pub fn cond_entropy_down_grad(tau: &Mat, da: usize, db: usize, alpha: f64) -> Option<(f64, Mat)> {
    let tb = ptrace_first(tau, da, db);
    let sigma = linalg::kron(&linalg::identity(da), &tb);
    let tf = trace_functional(tau, &sigma, alpha)?;
    let tr = linalg::trace_re(tau);
    if !(tf.q > 0.0 && tr > 0.0) {
        return None;
    }
    let am1 = alpha - 1.0;
    let h = -(tf.q / tr).ln() / (am1 * LN2);
    let reduced = ptrace_first(&tf.d_sigma, da, db);
    let dq = tf.d_rho + linalg::kron(&linalg::identity(da), &reduced);
    let n = tau.nrows();
    let grad = (dq.scale(1.0 / tf.q) - linalg::identity(n).scale(1.0 / tr)).scale(-1.0 / (am1 * LN2));
    Some((h, linalg::hermitize(&grad)))
}
