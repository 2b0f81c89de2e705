//! Arithmetic of the accumulated bounds: leakage sums, smoothing and event
//! conditioning corrections, and empirical frequencies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::divergence::{g_epsilon, ClassicalDistribution, SmoothingParam};
use crate::error::{Error, Result};

/// Neumaier-compensated sum, so that e.g. a hundred copies of 0.01 add to 1.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = s + v;
        if s.abs() >= v.abs() {
            comp += (s - t) + v;
        } else {
            comp += (v - t) + s;
        }
        s = t;
    }
    s + comp
}

fn check_xi(xi: &[f64]) -> Result<()> {
    if xi.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = xi.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "per-round leakage {v} must be finite and nonnegative"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundBounds {
    /// `ξ_j` in bits.
    pub per_round_mi: Vec<f64>,
    pub alpha: f64,
    pub epsilon: SmoothingParam,
}

/// `Σ ξ_j − g(ε)/(α−1)`.
pub fn info_bounding_aggregate(b: &RoundBounds) -> Result<f64> {
    check_xi(&b.per_round_mi)?;
    if !(b.alpha > 1.0 && b.alpha.is_finite()) {
        return Err(Error::UnsupportedOrder(format!(
            "aggregation needs a finite alpha > 1, got {}",
            b.alpha
        )));
    }
    Ok(compensated_sum(&b.per_round_mi) - g_epsilon(b.epsilon)? / (b.alpha - 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyInput {
    pub n: usize,
    /// Worst-case single-round rate `min_j h_{α̂,j}` in bits.
    pub h_min: f64,
    /// One `ξ_j` per round.
    pub xi: Vec<f64>,
    pub alpha: f64,
    pub p_omega: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyBreakdown {
    /// `n · h`.
    pub rate: f64,
    /// `Σ ξ_j`.
    pub leakage: f64,
    /// `(α/(α−1)) log₂(1/p_Ω)`.
    pub conditioning: f64,
    pub total: f64,
}

impl PenaltyInput {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("at least one round is required".into()));
        }
        check_xi(&self.xi)?;
        if self.xi.len() != self.n {
            return Err(Error::InvalidArgument(format!(
                "{} leakage terms for {} rounds",
                self.xi.len(),
                self.n
            )));
        }
        if !self.h_min.is_finite() {
            return Err(Error::InvalidArgument("rate must be finite".into()));
        }
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return Err(Error::UnsupportedOrder(format!("alpha {} outside (1, 2)", self.alpha)));
        }
        if !(self.p_omega > 0.0 && self.p_omega <= 1.0) {
            return Err(Error::InvalidArgument(format!("p_omega {} outside (0, 1]", self.p_omega)));
        }
        Ok(())
    }
}

/// `n·h − Σ ξ_j − (α/(α−1)) log₂(1/p_Ω)` with its three terms.
pub fn keyrate_penalty(inp: &PenaltyInput) -> Result<PenaltyBreakdown> {
    inp.validate()?;
    let rate = inp.n as f64 * inp.h_min;
    let leakage = compensated_sum(&inp.xi);
    let conditioning = inp.alpha / (inp.alpha - 1.0) * (0.0 - inp.p_omega.log2());
    Ok(PenaltyBreakdown {
        rate,
        leakage,
        conditioning,
        total: rate - leakage - conditioning,
    })
}

/// Empirical distribution of a string: counts over the symbols that occur, in symbol order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Frequencies<T: Ord> {
    pub counts: BTreeMap<T, usize>,
    pub n: usize,
}

impl<T: Ord + Clone> Frequencies<T> {
    /// `(count, n)`, the exact frequency of `symbol`.
    pub fn ratio(&self, symbol: &T) -> (usize, usize) {
        (self.counts.get(symbol).copied().unwrap_or(0), self.n)
    }

    /// Weights in symbol order.
    pub fn distribution(&self) -> Result<ClassicalDistribution> {
        ClassicalDistribution::new(self.counts.values().map(|&k| k as f64 / self.n as f64).collect())
    }
}

pub fn freq<T: Ord + Clone>(outcomes: &[T]) -> Result<Frequencies<T>> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut counts = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o.clone()).or_insert(0) += 1;
    }
    Ok(Frequencies {
        counts,
        n: outcomes.len(),
    })
}

pub fn freq_str(outcomes: &str) -> Result<Frequencies<char>> {
    freq(&outcomes.chars().collect::<Vec<_>>())
}
