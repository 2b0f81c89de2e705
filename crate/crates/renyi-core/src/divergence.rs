//! Sandwiched Rényi divergence and its classical specializations.
//!
//! `D_α(ρ‖σ) = 1/(α−1) · log₂ tr[(σ^γ/2 ρ σ^γ/2)^α] / tr ρ` with `γ = (1−α)/α`,
//! the Umegaki divergence at α = 1 and the max-divergence at α = ∞. All logs are base 2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ExtReal;
use crate::linalg::{self, eigh, Eigh, Mat, EIG_FLOOR};
use crate::operator::{DensityOperator, QOperator, PSD_TOL};

/// Orders this close to 1 are evaluated on the Umegaki branch.
pub const NEAR_ONE_EPS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ExtReal", into = "ExtReal")]
pub struct RenyiOrder {
    alpha: f64,
}

impl TryFrom<f64> for RenyiOrder {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        RenyiOrder::new(a)
    }
}

impl From<RenyiOrder> for f64 {
    fn from(o: RenyiOrder) -> f64 {
        o.alpha
    }
}

impl TryFrom<ExtReal> for RenyiOrder {
    type Error = Error;
    fn try_from(e: ExtReal) -> Result<Self> {
        RenyiOrder::new(f64::try_from(e)?)
    }
}

impl From<RenyiOrder> for ExtReal {
    fn from(o: RenyiOrder) -> ExtReal {
        ExtReal::from(o.alpha)
    }
}

impl RenyiOrder {
    /// Accepts `α ∈ (0,∞]`; `f64::INFINITY` selects the max-divergence.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(Error::UnsupportedOrder(format!("alpha = {alpha}")));
        }
        if (alpha - 1.0).abs() < NEAR_ONE_EPS {
            return Ok(RenyiOrder { alpha: 1.0 });
        }
        Ok(RenyiOrder { alpha })
    }

    pub fn one() -> Self {
        RenyiOrder { alpha: 1.0 }
    }

    pub fn infinity() -> Self {
        RenyiOrder { alpha: f64::INFINITY }
    }

    pub fn value(&self) -> f64 {
        self.alpha
    }

    pub fn is_umegaki(&self) -> bool {
        self.alpha == 1.0
    }

    pub fn is_infinite(&self) -> bool {
        self.alpha.is_infinite()
    }

    /// `(1−α)/α`; −1 at α = ∞.
    pub fn gamma(&self) -> f64 {
        if self.is_infinite() {
            -1.0
        } else {
            (1.0 - self.alpha) / self.alpha
        }
    }
}

impl std::fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.alpha)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParam {
    epsilon: f64,
}

impl SmoothingParam {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidArgument(format!("epsilon = {epsilon} outside [0,1)")));
        }
        Ok(SmoothingParam { epsilon })
    }

    pub fn value(&self) -> f64 {
        self.epsilon
    }
}

/// Nonnegative weights over a finite alphabet, total at most one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalDistribution {
    weights: Vec<f64>,
}

impl ClassicalDistribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput);
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument("weights must be finite and nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if s > 1.0 + 1e-9 {
            return Err(Error::Normalization(format!("weights sum to {s}")));
        }
        Ok(ClassicalDistribution { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Indices whose weight clears the relative eigenvalue floor.
    pub fn support(&self) -> Vec<usize> {
        let fl = EIG_FLOOR * self.weights.iter().fold(0.0f64, |a, &b| a.max(b));
        (0..self.weights.len()).filter(|&i| self.weights[i] > fl).collect()
    }
}

fn check_psd(e: &Eigh) -> Result<()> {
    let scale = e.spectral_norm().max(1.0);
    if e.min() < -PSD_TOL * scale {
        return Err(Error::NotPositive(e.min()));
    }
    Ok(())
}

/// `tr(Π_a Π_b)` for support projectors given as eigendecompositions.
fn support_overlap(a: &Eigh, b: &Eigh) -> f64 {
    let pa = a.support_projector();
    let pb = b.support_projector();
    linalg::inner_re(&pa, &pb)
}

/// `tr(Π_ρ (1 − Π_σ))`: zero when supp ρ ⊆ supp σ.
fn support_excess(rho: &Eigh, sigma: &Eigh) -> f64 {
    let pr = rho.support_projector();
    let rank = rho.rank() as f64;
    rank - linalg::inner_re(&pr, &sigma.support_projector())
}

/// Divergence on bare matrices of equal size, both PSD.
pub fn divergence_matrix(rho: &Mat, sigma: &Mat, order: RenyiOrder) -> Result<f64> {
    if rho.nrows() != sigma.nrows() {
        return Err(Error::Layout("divergence arguments have different dimensions".into()));
    }
    let tr = linalg::trace_re(rho);
    if tr <= 0.0 {
        return Err(Error::ZeroState);
    }
    let er = eigh(rho);
    check_psd(&er)?;
    let es = eigh(sigma);
    check_psd(&es)?;
    if er.rank() == 0 {
        return Err(Error::ZeroState);
    }
    let alpha = order.value();
    let nested = support_excess(&er, &es) <= EIG_FLOOR;
    if order.is_umegaki() {
        if !nested {
            return Ok(f64::INFINITY);
        }
        let fl = er.floor();
        let rlogr: f64 = er.values.iter().filter(|&&v| v > fl).map(|&v| v * v.log2()).sum();
        let logs = es.apply_on_support(f64::log2);
        let rlogs = linalg::inner_re(rho, &logs);
        return Ok((rlogr - rlogs) / tr);
    }
    if order.is_infinite() {
        if !nested {
            return Ok(f64::INFINITY);
        }
        let s = es.apply_on_support(|x| 1.0 / x.sqrt());
        let m = &s * rho * &s;
        let top = eigh(&m).max();
        return Ok(top.log2());
    }
    if alpha < 1.0 {
        if support_overlap(&er, &es) <= EIG_FLOOR {
            return Ok(f64::INFINITY);
        }
    } else if !nested {
        return Ok(f64::INFINITY);
    }
    let g = order.gamma();
    let s = es.apply_on_support(|x| x.powf(0.5 * g));
    let m = &s * rho * &s;
    let q: f64 = eigh(&m).values.iter().map(|&v| v.max(0.0).powf(alpha)).sum();
    Ok((q / tr).log2() / (alpha - 1.0))
}

/// Sandwiched Rényi divergence `D_α(ρ‖σ)` in bits, `+∞` when the support condition fails.
pub fn renyi_divergence(rho: &DensityOperator, sigma: &QOperator, order: RenyiOrder) -> Result<f64> {
    if rho.layout() == sigma.layout() {
        return divergence_matrix(rho.matrix(), sigma.matrix(), order);
    }
    let r = rho.canonical();
    let s = sigma.reorder(r.layout())?;
    divergence_matrix(r.matrix(), s.matrix(), order)
}

/// Rényi divergence of two distributions, identical to the diagonal-matrix path.
pub fn classical_divergence(p: &ClassicalDistribution, q: &ClassicalDistribution, order: RenyiOrder) -> Result<f64> {
    if p.weights.len() != q.weights.len() {
        return Err(Error::InvalidArgument("distributions over different alphabets".into()));
    }
    let tp = p.total();
    if tp <= 0.0 {
        return Err(Error::ZeroState);
    }
    let sp = p.support();
    let sq = q.support();
    let nested = sp.iter().all(|i| sq.contains(i));
    let alpha = order.value();
    if order.is_umegaki() {
        if !nested {
            return Ok(f64::INFINITY);
        }
        let s: f64 = sp.iter().map(|&i| p.weights[i] * (p.weights[i] / q.weights[i]).log2()).sum();
        return Ok(s / tp);
    }
    if order.is_infinite() {
        if !nested {
            return Ok(f64::INFINITY);
        }
        let m = sp
            .iter()
            .map(|&i| p.weights[i] / q.weights[i])
            .fold(f64::NEG_INFINITY, f64::max);
        return Ok(m.log2());
    }
    if alpha > 1.0 && !nested {
        return Ok(f64::INFINITY);
    }
    let common: Vec<usize> = sp.iter().copied().filter(|i| sq.contains(i)).collect();
    if common.is_empty() {
        return Ok(f64::INFINITY);
    }
    let s: f64 = common
        .iter()
        .map(|&i| p.weights[i].powf(alpha) * q.weights[i].powf(1.0 - alpha))
        .sum();
    Ok((s / tp).log2() / (alpha - 1.0))
}

/// One classical block: weights `ρ(c)`, `σ(c)` and normalized block states.
#[derive(Clone, Debug)]
pub struct Block {
    pub p_rho: f64,
    pub p_sigma: f64,
    pub rho: DensityOperator,
    pub sigma: QOperator,
}

/// Divergence of block-diagonal operators assembled from per-block data.
pub fn block_divergence(blocks: &[Block], order: RenyiOrder) -> Result<f64> {
    let total: f64 = blocks.iter().map(|b| b.p_rho).sum();
    if total <= 0.0 {
        return Err(Error::ZeroState);
    }
    let alpha = order.value();
    let live = blocks.iter().filter(|b| b.p_rho > 0.0);
    if order.is_umegaki() {
        let mut s = 0.0;
        for b in live {
            if b.p_sigma <= 0.0 {
                return Ok(f64::INFINITY);
            }
            s += b.p_rho * ((b.p_rho / b.p_sigma).log2() + renyi_divergence(&b.rho, &b.sigma, order)?);
        }
        return Ok(s / total);
    }
    if order.is_infinite() {
        let mut m = f64::NEG_INFINITY;
        for b in live {
            if b.p_sigma <= 0.0 {
                return Ok(f64::INFINITY);
            }
            m = m.max((b.p_rho / b.p_sigma).log2() + renyi_divergence(&b.rho, &b.sigma, order)?);
        }
        return Ok(m);
    }
    let mut s = 0.0;
    for b in live {
        if b.p_sigma <= 0.0 {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        let d = renyi_divergence(&b.rho, &b.sigma, order)?;
        if d.is_infinite() {
            if alpha > 1.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        s += b.p_rho.powf(alpha) * b.p_sigma.powf(1.0 - alpha) * ((alpha - 1.0) * d).exp2();
    }
    if s <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((s / total).log2() / (alpha - 1.0))
}

/// `g(ε) = log₂(1 − √(1−ε²))`, evaluated without cancellation for small ε.
pub fn g_epsilon(eps: SmoothingParam) -> Result<f64> {
    let e = eps.value();
    if e == 0.0 {
        return Err(Error::DivergentCorrection);
    }
    let r = (1.0 - e * e).sqrt();
    Ok((e * e / (1.0 + r)).log2())
}

/// `D_α(ρ‖σ) + g(ε)/(α−1)`, an upper bound on the ε-smooth max-divergence.
pub fn smooth_max_divergence_upper(
    rho: &DensityOperator,
    sigma: &QOperator,
    eps: SmoothingParam,
    order: RenyiOrder,
) -> Result<f64> {
    rho.require_normalized()?;
    let a = order.value();
    if !(a > 1.0) || order.is_infinite() {
        return Err(Error::UnsupportedOrder(format!(
            "smoothing conversion needs 1 < alpha < inf, got {order}"
        )));
    }
    let g = g_epsilon(eps)?;
    let d = renyi_divergence(rho, sigma, order)?;
    Ok(d + g / (a - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::RegisterLayout;
    use crate::random::{random_density, rng_from_seed};

    fn q1() -> RegisterLayout {
        RegisterLayout::new(&[("A", 2)]).unwrap()
    }

    fn cd(w: &[f64]) -> ClassicalDistribution {
        ClassicalDistribution::new(w.to_vec()).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(RenyiOrder::new(0.0).is_err());
        assert!(RenyiOrder::new(-1.0).is_err());
        assert!(RenyiOrder::new(1.0 + 1e-7).unwrap().is_umegaki());
        assert!(!RenyiOrder::new(1.0 + 1e-4).unwrap().is_umegaki());
        assert!(RenyiOrder::new(f64::INFINITY).unwrap().is_infinite());
    }

    #[test]
    fn self_divergence_is_zero() {
        let mut rng = rng_from_seed(1);
        let rho = random_density(&mut rng, RegisterLayout::new(&[("A", 3)]).unwrap());
        for a in [0.5, 0.8, 1.0, 1.5, 3.0, f64::INFINITY] {
            let d = renyi_divergence(&rho, &rho, RenyiOrder::new(a).unwrap()).unwrap();
            assert!(d.abs() < 1e-10, "alpha {a}: {d}");
        }
    }

    #[test]
    fn max_divergence_example() {
        let rho = DensityOperator::classical(q1(), &[0.8, 0.2]).unwrap();
        let sigma = DensityOperator::classical(q1(), &[0.5, 0.5]).unwrap();
        let d = renyi_divergence(&rho, &sigma, RenyiOrder::infinity()).unwrap();
        // smallest λ on a fine grid with diag(0.8,0.2) ≤ λ·diag(0.5,0.5)
        let lam = (0..=40000)
            .map(|k| k as f64 * 1e-4)
            .find(|l| 0.8 <= l * 0.5 + 1e-12 && 0.2 <= l * 0.5)
            .unwrap();
        assert!((d - lam.log2()).abs() < 1e-9);
    }

    #[test]
    fn support_conditions() {
        let p = DensityOperator::classical(q1(), &[1.0, 0.0]).unwrap();
        let q = DensityOperator::classical(q1(), &[0.0, 1.0]).unwrap();
        let mix = DensityOperator::classical(q1(), &[0.5, 0.5]).unwrap();
        assert_eq!(
            renyi_divergence(&p, &q, RenyiOrder::new(0.5).unwrap()).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            renyi_divergence(&mix, &p, RenyiOrder::new(2.0).unwrap()).unwrap(),
            f64::INFINITY
        );
        assert!(renyi_divergence(&mix, &p, RenyiOrder::new(0.5).unwrap()).unwrap().is_finite());
        assert_eq!(renyi_divergence(&mix, &p, RenyiOrder::one()).unwrap(), f64::INFINITY);
        let zero = QOperator::diagonal(q1(), &[0.0, 0.0]).unwrap();
        assert_eq!(
            divergence_matrix(zero.matrix(), mix.matrix(), RenyiOrder::one()),
            Err(Error::ZeroState)
        );
    }

    #[test]
    fn point_mass_against_uniform() {
        for a in [0.5, 0.9, 2.0, 7.0, f64::INFINITY] {
            let d = classical_divergence(&cd(&[1.0, 0.0]), &cd(&[0.5, 0.5]), RenyiOrder::new(a).unwrap()).unwrap();
            assert!((d - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn classical_matches_matrix_path() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.25, 0.25, 0.5];
        let l = RegisterLayout::new(&[("A", 3)]).unwrap();
        for a in [0.6, 1.0, 2.0, f64::INFINITY] {
            let o = RenyiOrder::new(a).unwrap();
            let dc = classical_divergence(&cd(&p), &cd(&q), o).unwrap();
            let dm = renyi_divergence(
                &DensityOperator::classical(l.clone(), &p).unwrap(),
                &QOperator::diagonal(l.clone(), &q).unwrap(),
                o,
            )
            .unwrap();
            assert!((dc - dm).abs() < 1e-10);
        }
    }

    #[test]
    fn g_epsilon_values() {
        let g = g_epsilon(SmoothingParam::new(0.1).unwrap()).unwrap();
        // 1 − √0.99 = 0.005012562893380..., log₂ of it
        assert!((g - 0.005012562893380045f64.log2()).abs() < 1e-12);
        assert!((g + 7.640).abs() < 1e-3);
        assert_eq!(g_epsilon(SmoothingParam::new(0.0).unwrap()), Err(Error::DivergentCorrection));
        assert!(g_epsilon(SmoothingParam::new(1.0 - 1e-15).unwrap()).unwrap().abs() < 1e-6);
        assert!(SmoothingParam::new(1.0).is_err());
    }

    #[test]
    fn smooth_upper_at_equal_states() {
        let mut rng = rng_from_seed(2);
        let rho = random_density(&mut rng, q1());
        let eps = SmoothingParam::new(0.1).unwrap();
        let v = smooth_max_divergence_upper(&rho, &rho, eps, RenyiOrder::new(2.0).unwrap()).unwrap();
        assert!((v - g_epsilon(eps).unwrap()).abs() < 1e-10);
    }
}
