//! Per-round leakage suprema `sup_ω I^↓_α(Z̃;L)` over channel inputs.

use serde::Serialize;

use crate::channel::{ChannelTag, QuantumChannel};
use crate::channel_opt::{mutual_info_down_at_input, sup_mutual_info_down};
use crate::divergence::RenyiOrder;
use crate::entropic::OptimizerConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::search::{minimize_fd, SearchOptions};

use super::leakage::{prob_leakage_bound, LeakageModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimateStatus {
    /// Best value found by local search; the true supremum may be larger.
    LowerEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelSup {
    pub estimate: f64,
    pub status: EstimateStatus,
    pub converged: bool,
    pub restarts: usize,
    /// Closed-form upper bound when the channel carries a probabilistic-leakage tag and α allows it.
    pub closed_form: Option<f64>,
    #[serde(skip)]
    pub input: Mat,
}

/// Leakage model implied by a channel's tags, with `ζ = 1` for pinched inputs.
pub fn tagged_model(leak: &QuantumChannel) -> Option<LeakageModel> {
    let zeta = if leak.tags().contains(&ChannelTag::PinchedInput) {
        1
    } else {
        2
    };
    leak.tags().iter().find_map(|t| match *t {
        ChannelTag::ProbabilisticLeakage { delta, dim_r } => LeakageModel::new(delta, dim_r, zeta).ok(),
        _ => None,
    })
}

/// Closed-form `ξ` for a tagged channel, `None` when untagged or α outside (1, 3/2).
pub fn closed_form_sup(leak: &QuantumChannel, alpha: f64) -> Option<f64> {
    let model = tagged_model(leak)?;
    prob_leakage_bound(&model, alpha, leak.in_layout().total_dim()).ok()
}

/// `sup_ω I^↓_α(Z̃;L)_{L̃(ω)}` with `Z̃` a copy of the whole channel input.
pub fn channel_sup_mi(leak: &QuantumChannel, l_labels: &[&str], order: RenyiOrder, cfg: &OptimizerConfig) -> Result<ChannelSup> {
    let d = leak.in_layout().total_dim();
    let seeds = [linalg::identity(d).scale(1.0 / d as f64)];
    let found = sup_mutual_info_down(leak, l_labels, order, cfg, &seeds)?;
    Ok(ChannelSup {
        estimate: found.value,
        status: EstimateStatus::LowerEstimate,
        converged: found.converged,
        restarts: found.restarts,
        closed_form: closed_form_sup(leak, order.value()),
        input: found.input,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReductionReport {
    pub general: f64,
    pub classical: f64,
    /// `general − classical`.
    pub gap: f64,
    pub tolerance: f64,
    /// Optimal classical weights `λ_j`.
    pub weights: Vec<f64>,
    pub pass: bool,
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let m = x.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let e: Vec<f64> = x.iter().map(|v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn logits(w: &[f64]) -> Vec<f64> {
    w.iter().map(|v| v.max(1e-300).ln()).collect()
}

/// Compares the general supremum with the supremum over classically correlated
/// inputs `Σ λ_j |jj⟩⟨jj|`, each search seeded with the other's optimum.
pub fn classical_reduction_check(
    leak: &QuantumChannel,
    l_labels: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<ClassicalReductionReport> {
    if !leak.tags().contains(&ChannelTag::PinchedInput) {
        return Err(Error::InvalidArgument(
            "classical reduction needs a channel that pinches its input".into(),
        ));
    }
    cfg.validate()?;
    let d = leak.in_layout().total_dim();
    let tolerance = 2.0 * cfg.tol_objective;
    let opts = SearchOptions {
        max_iters: cfg.max_iters.min(200),
        grad_tol: 1e-8,
        f_tol: 1e-13,
        max_step: 1.0,
    };

    let classical_search = |starts: Vec<Vec<f64>>| -> Result<(f64, Vec<f64>)> {
        let eval = |x: &[f64]| -> Option<f64> {
            let w = softmax(x);
            let v = mutual_info_down_at_input(leak, l_labels, &linalg::diag(&w), order, cfg).ok()?;
            v.is_finite().then_some(-v)
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for x0 in starts {
            let Some(out) = minimize_fd(eval, x0, 1e-6, &opts) else {
                continue;
            };
            if best.as_ref().map_or(true, |b| -out.f > b.0) {
                best = Some((-out.f, softmax(&out.x)));
            }
        }
        best.ok_or_else(|| Error::NumericalFailure("classical search failed".into()))
    };

    let mut starts = vec![vec![0.0; d]];
    for k in 0..cfg.restarts.min(4) {
        starts.push((0..d).map(|j| ((k * 7 + j * 3) % 5) as f64 * 0.4 - 0.8).collect());
    }
    let (c1, w1) = classical_search(starts)?;
    let general = sup_mutual_info_down(leak, l_labels, order, cfg, &[linalg::diag(&w1)])?;
    let diag: Vec<f64> = (0..d).map(|j| general.input[(j, j)].re.max(0.0)).collect();
    let (c2, w2) = classical_search(vec![logits(&diag)])?;
    let (classical, weights) = if c2 > c1 { (c2, w2) } else { (c1, w1) };
    let gap = general.value - classical;
    Ok(ClassicalReductionReport {
        general: general.value,
        classical,
        gap,
        tolerance,
        weights,
        pass: gap.abs() <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accumulation::leakage::prob_leakage_channel;
    use crate::layout::RegisterLayout;
    use crate::operator::DensityOperator;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 2,
            ..Default::default()
        }
    }

    #[test]
    fn constant_channel_leaks_nothing() {
        let l = RegisterLayout::new(&[("R", 2)]).unwrap();
        let tau = DensityOperator::maximally_mixed(RegisterLayout::new(&[("L", 2)]).unwrap());
        let ch = QuantumChannel::replacer(l, &tau).unwrap();
        let out = channel_sup_mi(&ch, &["L"], RenyiOrder::new(1.3).unwrap(), &quick()).unwrap();
        assert!(out.estimate.abs() < 1e-8, "{}", out.estimate);
        assert!(out.closed_form.is_none());
    }

    #[test]
    fn estimate_is_bracketed_by_the_closed_form() {
        let m = LeakageModel::new(0.2, 2, 2).unwrap();
        let ch = prob_leakage_channel(&m).unwrap();
        let out = channel_sup_mi(&ch, &["L"], RenyiOrder::new(1.2).unwrap(), &quick()).unwrap();
        let bound = out.closed_form.unwrap();
        assert!(out.estimate <= bound + 1e-6, "{} > {bound}", out.estimate);
        assert!(out.estimate > 0.0);
    }

    #[test]
    fn pinched_embedding_prefers_uniform_weights() {
        let m = LeakageModel::new(1.0, 3, 1).unwrap();
        let r = RegisterLayout::new(&[("R", 3)]).unwrap();
        let ch = QuantumChannel::pinching(r).then(&prob_leakage_channel(&m).unwrap()).unwrap();
        let rep = classical_reduction_check(&ch, &["L"], RenyiOrder::new(1.3).unwrap(), &quick()).unwrap();
        assert!(rep.pass, "{rep:?}");
        for w in &rep.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-4, "{:?}", rep.weights);
        }
    }
}
