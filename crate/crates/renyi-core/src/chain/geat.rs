//! One round of the leakage-aware entropy accumulation bound on random instances.
//!
//! Registers: `ρ_SRE`; a leakage map `L̃: R → L R̂`; a channel `N: L R̂ E → S′ E′`
//! built as `A: L E → E′ X` followed by `B: R̂ X → S′`. The `E′` marginal of `N`
//! only depends on `L` and `E`, so `N` is non-signalling from `R̂` by construction.
//! The checked bound is
//!
//! ```text
//! H↑_α(SS′|E′) ≥ H↑_α(S|E) − sup_ω I↓_α(Z̃;L)_{L̃(ω)} + inf_ω H_α̂(S′|E′Ẽ)_{N(ω)},   α̂ = 1/(2−α).
//! ```
//!
//! The sup and the inf are local-search estimates, so the estimated right-hand
//! side is never above the true one: a pass is sound, a failure may be a search miss.

use serde::Serialize;

use crate::channel::{apply_channel, QuantumChannel};
use crate::channel_opt::{inf_cond_entropy_down, sup_mutual_info_down};
use crate::divergence::RenyiOrder;
use crate::entropic::{cond_entropy_up, OptimizerConfig};
use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::linalg;
use crate::operator::{partial_trace, DensityOperator};
use crate::random::{random_channel, random_density, rng_from_seed};

#[derive(Clone, Debug, Serialize)]
pub struct GeatTrialOutcome {
    pub lhs: f64,
    pub h_initial: f64,
    pub sup_leakage: f64,
    pub inf_entropy: f64,
    pub slack: f64,
    /// Both searches met their stopping criteria.
    pub certified: bool,
    /// The leakage term was supplied by the caller instead of searched.
    pub sup_supplied: bool,
}

fn lay(spec: &[(&str, usize)]) -> RegisterLayout {
    RegisterLayout::new(spec).expect("static layout")
}

/// Fewest restarts used by the channel searches in this check.
pub const MIN_RESTARTS: usize = 16;

/// `ρ_SRE`, a leakage map `R → L R̂` (labels `L`, `Rh`) and the NS channel
/// `L R̂ E → S′ E′` (labels `Sp`, `Ep`).
#[derive(Clone, Debug)]
pub struct GeatInstance {
    pub rho: DensityOperator,
    pub leak: QuantumChannel,
    pub n: QuantumChannel,
}

impl GeatInstance {
    /// `dims = [d_S, d_R, d_E]`; `leak` defaults to a random channel into qubits `L`, `Rh`.
    pub fn random(seed: u64, dims: &[usize], leak: Option<QuantumChannel>) -> Result<Self> {
        let [ds, dr, de] = dims else {
            return Err(Error::InvalidArgument(format!(
                "expected three dimensions, got {}",
                dims.len()
            )));
        };
        let (ds, dr, de) = (*ds, *dr, *de);
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&mut rng, RegisterLayout::new(&[("S", ds), ("R", dr), ("E", de)])?);
        let random_leak = random_channel(&mut rng, lay(&[("R", dr)]), lay(&[("L", 2), ("Rh", 2)]), 2);
        let leak = leak.unwrap_or(random_leak);
        let out = leak.out_layout();
        if leak.in_layout().labels() != ["R"] || !out.contains("L") || !out.contains("Rh") || out.len() != 2 {
            return Err(Error::Layout(format!(
                "leakage map must be R -> L Rh, got {} -> {out}",
                leak.in_layout()
            )));
        }
        let (dl, drh) = (out.dim_of("L")?, out.dim_of("Rh")?);
        let a = random_channel(&mut rng, lay(&[("L", dl), ("E", de)]), lay(&[("Ep", 2), ("X", 2)]), 4.max(de));
        let b = random_channel(&mut rng, lay(&[("Rh", drh), ("X", 2)]), lay(&[("Sp", 2)]), 2);
        let n = a
            .tensor(&QuantumChannel::identity(lay(&[("Rh", drh)])))?
            .then(&b.tensor(&QuantumChannel::identity(lay(&[("Ep", 2)])))?)?;
        Ok(GeatInstance { rho, leak, n })
    }
}

/// Checks one step on `inst`. `sup_leakage` replaces the searched leakage term,
/// e.g. with a closed-form upper bound.
pub fn geat_leakage_step(
    inst: &GeatInstance,
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    sup_leakage: Option<f64>,
) -> Result<GeatTrialOutcome> {
    let alpha = order.value();
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::UnsupportedOrder(format!(
            "the leakage step needs alpha in (1, 2), got {alpha}"
        )));
    }
    let alpha_hat = RenyiOrder::new(1.0 / (2.0 - alpha))?;
    let mid = apply_channel(&inst.leak, &inst.rho)?;
    let fin = apply_channel(&inst.n, &mid)?;
    let lhs = cond_entropy_up(&fin, &["S", "Sp"], &["Ep"], order, cfg)?.value;
    let h_initial = cond_entropy_up(&inst.rho, &["S"], &["E"], order, cfg)?.value;

    let search_cfg = OptimizerConfig {
        restarts: cfg.restarts.max(MIN_RESTARTS),
        ..cfg.clone()
    };
    let (sup, sup_converged) = match sup_leakage {
        Some(v) => (v, true),
        None => {
            let dr = inst.leak.in_layout().total_dim();
            let rho_r = partial_trace(&inst.rho, &["R"])?.into_matrix();
            let mixed = linalg::identity(dr).scale(1.0 / dr as f64);
            let found = sup_mutual_info_down(&inst.leak, &["L"], order, &search_cfg, &[rho_r, mixed])?;
            (found.value, found.converged)
        }
    };
    let in_labels = inst.n.in_layout().labels();
    let actual = partial_trace(&mid, &in_labels)?.reorder(inst.n.in_layout())?.into_matrix();
    let inf = inf_cond_entropy_down(&inst.n, &["Sp"], &["Ep"], alpha_hat, &search_cfg, &[actual])?;

    let rhs = h_initial - sup + inf.value;
    Ok(GeatTrialOutcome {
        lhs,
        h_initial,
        sup_leakage: sup,
        inf_entropy: inf.value,
        slack: lhs - rhs,
        certified: sup_converged && inf.converged,
        sup_supplied: sup_leakage.is_some(),
    })
}

/// A random instance with a random qubit leakage map, `dims = [d_S, d_R, d_E]`.
pub fn geat_leakage_trial(seed: u64, order: RenyiOrder, dims: &[usize], cfg: &OptimizerConfig) -> Result<GeatTrialOutcome> {
    geat_leakage_step(&GeatInstance::random(seed, dims, None)?, order, cfg, None)
}
