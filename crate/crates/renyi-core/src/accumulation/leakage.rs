//! Probabilistic leakage: with probability `1−δ` the leaked register holds a
//! fixed flag `|⊥⟩`, otherwise it carries the input embedded orthogonally to it.

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelTag, QuantumChannel};
use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::linalg::{c, Mat, LN2};

#[derive(Clone, Debug)]
pub struct LeakageModel {
    pub delta: f64,
    pub dim_r: usize,
    /// 1 when the purifying side or the leaked register is classical, 2 otherwise.
    pub zeta: u8,
    /// Explicit realization of the leaking branch, when it is not the plain embedding.
    pub leak_channel: Option<QuantumChannel>,
}

impl LeakageModel {
    pub fn new(delta: f64, dim_r: usize, zeta: u8) -> Result<Self> {
        let m = LeakageModel {
            delta,
            dim_r,
            zeta,
            leak_channel: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::InvalidArgument(format!(
                "leakage probability {} outside [0,1]",
                self.delta
            )));
        }
        if self.dim_r == 0 {
            return Err(Error::InvalidArgument("memory dimension must be at least 1".into()));
        }
        if self.zeta != 1 && self.zeta != 2 {
            return Err(Error::InvalidArgument(format!("zeta must be 1 or 2, got {}", self.zeta)));
        }
        Ok(())
    }
}

/// `R → L` with `dim L = dim_r + 1`; basis state 0 of `L` is `⊥`.
pub fn prob_leakage_channel(model: &LeakageModel) -> Result<QuantumChannel> {
    model.validate()?;
    let d = model.dim_r;
    let dl = d + 1;
    let keep = (1.0 - model.delta).sqrt();
    let leak = model.delta.sqrt();
    let mut kraus = Vec::new();
    if keep > 0.0 {
        for i in 0..d {
            let mut k = Mat::zeros(dl, d);
            k[(0, i)] = c(keep);
            kraus.push(k);
        }
    }
    if leak > 0.0 {
        let mut k = Mat::zeros(dl, d);
        for i in 0..d {
            k[(i + 1, i)] = c(leak);
        }
        kraus.push(k);
    }
    let ch = QuantumChannel::new(RegisterLayout::new(&[("R", d)])?, RegisterLayout::new(&[("L", dl)])?, kraus)?;
    Ok(ch.with_tag(ChannelTag::ProbabilisticLeakage {
        delta: model.delta,
        dim_r: d,
    }))
}

fn log_min_dim(model: &LeakageModel, dim_z: usize) -> Result<f64> {
    model.validate()?;
    if dim_z == 0 {
        return Err(Error::InvalidArgument("purifying dimension must be at least 1".into()));
    }
    Ok((dim_z.min(model.dim_r + 1) as f64).log2())
}

/// `(1/(α−1)) log₂((1−δ) + δ·2^{(α−1)ζ log₂ m})` with `m = min(dim_z, dim_r+1)`, for α ∈ (1, 3/2).
pub fn prob_leakage_bound(model: &LeakageModel, alpha: f64, dim_z: usize) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 1.5) {
        return Err(Error::UnsupportedOrder(format!(
            "closed-form leakage bound needs alpha in (1, 1.5), got {alpha}"
        )));
    }
    let cap = f64::from(model.zeta) * log_min_dim(model, dim_z)?;
    let am1 = alpha - 1.0;
    let x = am1 * cap * LN2;
    let d = model.delta;
    // two algebraically equal forms; each avoids cancellation on its half of [0,1]
    let v = if d >= 0.5 {
        cap + ((1.0 - d) * (-x).exp_m1()).ln_1p() / (am1 * LN2)
    } else {
        (d * x.exp_m1()).ln_1p() / (am1 * LN2)
    };
    Ok(v)
}

/// `δ ζ log₂ m`, the `α → 1⁺` limit of [`prob_leakage_bound`].
pub fn prob_leakage_vn_limit(model: &LeakageModel, dim_z: usize) -> Result<f64> {
    Ok(model.delta * f64::from(model.zeta) * log_min_dim(model, dim_z)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub delta: f64,
    pub alpha: f64,
    pub bound: f64,
    pub vn_limit: f64,
}

/// Bound and von Neumann limit on a `δ × α` grid, rows ordered by α then δ.
/// `dim` is the common dimension of the memory and its purification.
pub fn leakage_curve(deltas: &[f64], alphas: &[f64], dim: usize, zeta: u8) -> Result<Vec<CurveRow>> {
    if deltas.is_empty() || alphas.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut rows = Vec::with_capacity(deltas.len() * alphas.len());
    for &alpha in alphas {
        for &delta in deltas {
            let model = LeakageModel::new(delta, dim, zeta)?;
            rows.push(CurveRow {
                delta,
                alpha,
                bound: prob_leakage_bound(&model, alpha, dim)?,
                vn_limit: prob_leakage_vn_limit(&model, dim)?,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_channel;
    use crate::random::{random_density, rng_from_seed};

    fn model(delta: f64, dim_r: usize) -> LeakageModel {
        LeakageModel::new(delta, dim_r, 1).unwrap()
    }

    #[test]
    fn flag_population_is_one_minus_delta() {
        let mut rng = rng_from_seed(3);
        for delta in [0.0, 0.3, 1.0] {
            let ch = prob_leakage_channel(&model(delta, 3)).unwrap();
            let rho = random_density(&mut rng, RegisterLayout::new(&[("R", 3)]).unwrap());
            let out = apply_channel(&ch, &rho).unwrap();
            assert!((out.matrix()[(0, 0)].re - (1.0 - delta)).abs() < 1e-14);
            for i in 1..4 {
                assert!(out.matrix()[(0, i)].norm() < 1e-15);
            }
            if delta == 0.0 {
                assert_eq!(ch.kraus().len(), 3);
            }
            if delta == 1.0 {
                let want = rho.matrix();
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((out.matrix()[(i + 1, j + 1)] - want[(i, j)]).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn bound_reference_values() {
        assert_eq!(prob_leakage_bound(&model(0.0, 32), 1.2, 32).unwrap(), 0.0);
        for alpha in [1.000001, 1.1, 1.25, 1.49] {
            assert_eq!(prob_leakage_bound(&model(1.0, 32), alpha, 32).unwrap(), 5.0);
        }
        let want = (0.9 + 0.1 * 2f64.sqrt()).log2() / 0.1;
        let got = prob_leakage_bound(&model(0.1, 32), 1.1, 32).unwrap();
        assert!((got - want).abs() < 1e-13 && (got - 0.5855).abs() < 1e-4, "{got}");
        assert!((prob_leakage_vn_limit(&model(0.01, 32), 32).unwrap() - 0.05).abs() < 1e-15);
    }

    #[test]
    fn order_outside_range_is_rejected() {
        for alpha in [1.0, 0.9, 1.5, 2.0] {
            assert!(matches!(
                prob_leakage_bound(&model(0.1, 2), alpha, 2),
                Err(Error::UnsupportedOrder(_))
            ));
        }
        assert!(LeakageModel::new(1.5, 2, 1).is_err());
        assert!(LeakageModel::new(0.5, 2, 3).is_err());
    }
}
