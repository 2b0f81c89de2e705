//! Entropy of order α weighted by a score function on classical test registers.

use serde::{Deserialize, Serialize};

use crate::divergence::{divergence_matrix, RenyiOrder};
use crate::error::{Error, Result};
use crate::linalg::{self, EIG_FLOOR};
use crate::operator::{classicality_defect, condition_on_event, ClassicalEvent, DensityOperator, EventMode, CLASSICAL_TOL};

/// Score table `f(c̄, ĉ)` with the registers it reads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QesSpec {
    /// Secret score register `C̄`.
    pub secret: String,
    /// Public score register `Ĉ`; absent means a trivial public register.
    pub public: Option<String>,
    /// `scores[c̄][ĉ]`.
    pub scores: Vec<Vec<f64>>,
}

impl QesSpec {
    fn score(&self, cs: usize, cp: usize) -> Result<f64> {
        self.scores
            .get(cs)
            .and_then(|row| row.get(cp))
            .copied()
            .filter(|v| v.is_finite())
            .ok_or_else(|| Error::InvalidArgument(format!("score table has no finite entry for ({cs}, {cp})")))
    }
}

fn restrict(rho: &DensityOperator, label: &str, value: usize) -> Result<DensityOperator> {
    condition_on_event(rho, &ClassicalEvent::new(label, [value])?, EventMode::Partial)
}

/// `H^f_α(Q C̄|Ĉ Q′)` in bits via
/// `1/(1−α) log₂ Σ 2^{−(1−α)f(c̄ĉ)} tr[(ρ_{Q′∧ĉ}^{γ/2} ρ_{QQ′∧c̄ĉ} ρ_{Q′∧ĉ}^{γ/2})^α]`,
/// summing over score pairs of nonzero probability. Registers outside
/// `target`, `given` and the score registers are traced out.
pub fn qes_entropy(state: &DensityOperator, spec: &QesSpec, target: &[&str], given: &[&str], order: RenyiOrder) -> Result<f64> {
    if order.is_umegaki() || order.is_infinite() {
        return Err(Error::UnsupportedOrder(format!(
            "QES entropy needs a finite order other than 1, got {order}"
        )));
    }
    let alpha = order.value();
    let layout = state.layout();
    let mut scored = vec![spec.secret.as_str()];
    if let Some(p) = &spec.public {
        scored.push(p.as_str());
    }
    for l in &scored {
        if target.contains(l) || given.contains(l) {
            return Err(Error::InvalidArgument(format!("score register {l} cannot also be quantum")));
        }
        if classicality_defect(state, l)? > CLASSICAL_TOL {
            return Err(Error::Classicality(l.to_string()));
        }
    }
    let mut qq: Vec<&str> = target.to_vec();
    qq.extend_from_slice(given);
    layout.check_labels(&qq)?;
    let ds = layout.dim_of(&spec.secret)?;
    let dp = match &spec.public {
        Some(p) => layout.dim_of(p)?,
        None => 1,
    };
    let dq = layout.select(target)?.total_dim();
    let total = state.trace();
    let mut sum = 0.0;
    for cp in 0..dp {
        let rho_p = match &spec.public {
            Some(p) => restrict(state, p, cp)?,
            None => state.clone(),
        };
        if rho_p.trace() <= EIG_FLOOR * total {
            continue;
        }
        let side = rho_p.reduce(given)?.into_base().into_matrix();
        let sigma = linalg::kron(&linalg::identity(dq), &side);
        for cs in 0..ds {
            let block = restrict(&rho_p, &spec.secret, cs)?;
            let p = block.trace();
            if p <= EIG_FLOOR * total {
                continue;
            }
            let f = spec.score(cs, cp)?;
            let m = block.reduce(&qq)?.into_base().into_matrix();
            let d = divergence_matrix(&m, &sigma, order)?;
            if d == f64::INFINITY {
                if alpha > 1.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                continue;
            }
            // tr[(σ^{γ/2} ρ σ^{γ/2})^α] = tr ρ · 2^{(α−1) D_α(ρ‖σ)}
            sum += (-(1.0 - alpha) * f).exp2() * p * ((alpha - 1.0) * d).exp2();
        }
    }
    if sum <= 0.0 {
        return Ok(if alpha < 1.0 { f64::NEG_INFINITY } else { f64::INFINITY });
    }
    Ok(sum.log2() / (1.0 - alpha))
}
