//! Witness states for the Rényi chain rules and randomized verification of the rules.
//!
//! Both witness states come from one sandwich: for a state ρ and a positive
//! reference τ on a subset X of its registers,
//!
//! ```text
//! ν_X   = (ρ_X^{1/2} τ^γ ρ_X^{1/2})^α / tr(·),      γ = (1−α)/α
//! ν     = ν_X^{1/2} ρ_X^{-1/2} ρ ρ_X^{-1/2} ν_X^{1/2}
//! ```
//!
//! With `τ = ω′_A ⊗ σ_C` this is the ν of the divergence chain rule, with
//! `τ = ω_A` it is the η of the conditional-entropy chain rule.

mod geat;
mod suites;

pub use geat::{geat_leakage_step, geat_leakage_trial, GeatInstance, GeatTrialOutcome, MIN_RESTARTS};
pub use suites::{run_suite, Suite, TrialSpec};

use serde::{Deserialize, Serialize};

use crate::channel::{apply_channel, QuantumChannel};
use crate::divergence::{divergence_matrix, RenyiOrder};
use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::linalg::{self, Mat};
use crate::operator::{embed_matrix, partial_trace, tensor_product, DensityOperator, QOperator};
use crate::random::derive_seed;

/// `m^p`, exact when `m` is strictly positive and on the support otherwise.
/// The witness marginals are badly conditioned at large α, and flooring their
/// small eigenvalues would break the marginal relations the constructions promise.
fn pos_power(m: &Mat, p: f64) -> Mat {
    let e = linalg::eigh(m);
    if e.min() > 0.0 {
        e.apply(|x| x.powf(p))
    } else {
        e.apply_on_support(|x| x.powf(p))
    }
}

/// The reweighted marginal `ν_X` kept in spectral form, with the map `S` such that `ν = S ρ S†`.
///
/// The spectrum comes straight from the eigendecomposition of
/// `ρ_X^{1/2} τ^γ ρ_X^{1/2}`, so tiny eigenvalues of `ν_X` keep full relative
/// precision even where the dense matrix has lost them.
#[derive(Clone, Debug)]
struct Reweighting {
    alpha: f64,
    marginal_layout: RegisterLayout,
    full_layout: RegisterLayout,
    /// Eigenvalues of `ν_X` (normalized), aligned with `vectors`.
    values: Vec<f64>,
    vectors: Mat,
    rho_x_inv_sqrt: Mat,
    rho: Mat,
}

impl Reweighting {
    fn marginal_power(&self, p: f64) -> Mat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let v = self.values[k];
            let f = if v > 0.0 { v.powf(p) } else { 0.0 };
            for r in 0..n {
                scaled[(r, k)] *= f;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// `D_α(ν ‖ ω ⊗ ν_X)` for ω on the complement of X, evaluated from the
    /// factored form: `(ω ⊗ ν_X)^{γ/2} S = ω^{γ/2} ⊗ ν_X^{1/(2α)} ρ_X^{-1/2}`.
    fn divergence_to_product(&self, omega: &QOperator) -> Result<f64> {
        let order = RenyiOrder::new(self.alpha)?;
        let gamma = order.gamma();
        let x_part = self.marginal_power(0.5 / self.alpha) * &self.rho_x_inv_sqrt;
        let rest = self.full_layout.complement(&self.marginal_layout.labels())?;
        let om = omega.reorder(&rest)?.into_matrix();
        let oe = linalg::eigh(&om);
        if oe.min() < -1e-12 * oe.max().abs().max(1.0) {
            return Err(Error::NotPositive(oe.min()));
        }
        // supp ν ⊆ supp(ω ⊗ ν_X) needs supp ν_B ⊆ supp ω when ω is singular
        let o_part = if oe.min() > 0.0 {
            oe.apply(|x| x.powf(0.5 * gamma))
        } else {
            oe.apply_on_support(|x| x.powf(0.5 * gamma))
        };
        let y =
            embed_matrix(&x_part, &self.marginal_layout, &self.full_layout)? * embed_matrix(&o_part, &rest, &self.full_layout)?;
        if oe.min() <= 0.0 && self.alpha > 1.0 {
            let s = embed_matrix(
                &(self.marginal_power(0.5) * &self.rho_x_inv_sqrt),
                &self.marginal_layout,
                &self.full_layout,
            )?;
            let nu = &s * &self.rho * s.adjoint();
            let proj = embed_matrix(&oe.support_projector(), &rest, &self.full_layout)?;
            let outside = linalg::trace_re(&nu) - linalg::inner_re(&proj, &nu);
            if outside > linalg::EIG_FLOOR {
                return Ok(f64::INFINITY);
            }
        }
        let x = linalg::hermitize(&(&y * &self.rho * y.adjoint()));
        let q: f64 = linalg::eigh(&x).values.iter().map(|&v| v.max(0.0).powf(self.alpha)).sum();
        Ok(q.log2() / (self.alpha - 1.0))
    }
}

fn sandwich_construction(
    rho: &DensityOperator,
    reference: &QOperator,
    alpha: f64,
) -> Result<(DensityOperator, DensityOperator, Reweighting)> {
    if !(alpha > 0.0 && alpha.is_finite() && alpha != 1.0) {
        return Err(Error::UnsupportedOrder(format!(
            "witness construction needs alpha in (0,1)∪(1,∞), got {alpha}"
        )));
    }
    let layout = rho.layout();
    let labels = reference.layout().labels();
    let lx = layout.select(&labels)?;
    for f in reference.layout().factors() {
        if lx.dim_of(&f.label)? != f.dim {
            return Err(Error::Layout(format!("register {} has mismatched dimension", f.label)));
        }
    }
    let rho_x = partial_trace(rho, &labels)?.into_matrix();
    let tau = reference.reorder(&lx)?.into_matrix();
    let gamma = (1.0 - alpha) / alpha;
    let te = linalg::eigh(&tau);
    if te.min() < -1e-12 * te.max().abs().max(1.0) {
        return Err(Error::NotPositive(te.min()));
    }
    let tau_g = pos_power(&tau, gamma);
    let rs = pos_power(&rho_x, 0.5);
    let m = linalg::hermitize(&(&rs * tau_g * &rs));
    let me = linalg::eigh(&m);
    let fl = if me.min() > 0.0 { 0.0 } else { me.floor() };
    let raw: Vec<f64> = me.values.iter().map(|&v| if v > fl { v.powf(alpha) } else { 0.0 }).collect();
    let t: f64 = raw.iter().sum();
    if !(t > 0.0) {
        return Err(Error::SingularOperator);
    }
    let rw = Reweighting {
        alpha,
        marginal_layout: lx.clone(),
        full_layout: layout.clone(),
        values: raw.iter().map(|v| v / t).collect(),
        vectors: me.vectors.clone(),
        rho_x_inv_sqrt: pos_power(&rho_x, -0.5),
        rho: rho.matrix().clone(),
    };
    let nu_x = linalg::hermitize(&rw.marginal_power(1.0));
    let s = rw.marginal_power(0.5) * &rw.rho_x_inv_sqrt;
    let s_full = embed_matrix(&s, &lx, layout)?;
    let nu = linalg::hermitize(&(&s_full * rho.matrix() * s_full.adjoint()));
    Ok((
        DensityOperator::raw(lx, nu_x, true),
        DensityOperator::raw(layout.clone(), nu, true),
        rw,
    ))
}

/// The ν state of the divergence chain rule.
#[derive(Clone, Debug)]
pub struct NuConstruction {
    pub alpha: f64,
    /// `ν_AC`, registers in the order of ρ.
    pub nu_ac: DensityOperator,
    /// `ν_ABC = ν_AC^{1/2} ρ_{B|AC} ν_AC^{1/2}` on ρ's layout.
    pub nu_abc: DensityOperator,
    reweighting: Reweighting,
}

impl NuConstruction {
    /// `D_α(ν_ABC ‖ ω″_B ⊗ ν_AC)`, stable when `ν_AC` is badly conditioned.
    pub fn divergence_to_product(&self, omega_b: &QOperator) -> Result<f64> {
        self.reweighting.divergence_to_product(omega_b)
    }
}

/// Builds ν from `ρ_ABC`, `ω′_A` and `σ_C`; A and C are the registers of the
/// two references, B is everything else.
pub fn build_nu(rho: &DensityOperator, omega_a: &QOperator, sigma_c: &QOperator, alpha: f64) -> Result<NuConstruction> {
    let tau = tensor_product(omega_a, sigma_c)?;
    let (nu_ac, nu_abc, reweighting) = sandwich_construction(rho, &tau, alpha)?;
    Ok(NuConstruction {
        alpha,
        nu_ac,
        nu_abc,
        reweighting,
    })
}

/// The η state of the conditional-entropy chain rule.
#[derive(Clone, Debug)]
pub struct EtaConstruction {
    pub alpha: f64,
    pub eta_a: DensityOperator,
    /// `η_A^{1/2} ρ_{B|A} η_A^{1/2}`; with more registers than A and B this is the tripartite η.
    pub eta_ab: DensityOperator,
    reweighting: Reweighting,
}

impl EtaConstruction {
    /// `D_α(η ‖ η_A ⊗ σ)` for σ on the registers other than A.
    pub fn divergence_to_product(&self, sigma: &QOperator) -> Result<f64> {
        self.reweighting.divergence_to_product(sigma)
    }
}

/// Builds η from ρ and `ω_A`; A is the register set of `omega_a`.
pub fn build_eta(rho: &DensityOperator, omega_a: &QOperator, alpha: f64) -> Result<EtaConstruction> {
    let (eta_a, eta_ab, reweighting) = sandwich_construction(rho, omega_a, alpha)?;
    Ok(EtaConstruction {
        alpha,
        eta_a,
        eta_ab,
        reweighting,
    })
}

/// An input state whose image under a channel is a witness state.
#[derive(Clone, Debug)]
pub struct InputWitness {
    /// `ω` on the layout of `ρ′`.
    pub omega: DensityOperator,
    /// The witness state the channel output must reproduce.
    pub target: DensityOperator,
    /// `‖N(ω) − target‖₁`.
    pub defect: f64,
    /// `|tr ω − 1|`.
    pub trace_defect: f64,
}

fn input_witness(
    rho_prime: &DensityOperator,
    channel: &QuantumChannel,
    reference: &QOperator,
    alpha: f64,
) -> Result<InputWitness> {
    let rho = apply_channel(channel, rho_prime)?;
    let (nu_x, nu, rw) = sandwich_construction(&rho, reference, alpha)?;
    let lx = nu_x.layout().clone();
    let s = rw.marginal_power(0.5) * &rw.rho_x_inv_sqrt;
    let s_full = embed_matrix(&s, &lx, rho_prime.layout())?;
    let w = linalg::hermitize(&(&s_full * rho_prime.matrix() * s_full.adjoint()));
    let omega = DensityOperator::raw(rho_prime.layout().clone(), w, true);
    let image = apply_channel(channel, &omega)?.reorder(nu.layout())?;
    let defect = linalg::trace_norm_herm(&(image.matrix() - nu.matrix()));
    let trace_defect = (omega.trace() - 1.0).abs();
    Ok(InputWitness {
        omega,
        target: nu,
        defect,
        trace_defect,
    })
}

/// `ω_ARC = ν_AC^{1/2} ρ_AC^{-1/2} ρ′_ARC ρ_AC^{-1/2} ν_AC^{1/2}`, which `N: R→B` maps onto
/// the ν built from `N(ρ′)`, `ω′_A` and `σ_C`.
pub fn proof_witness_omega(
    rho_prime: &DensityOperator,
    channel: &QuantumChannel,
    omega_a: &QOperator,
    sigma_c: &QOperator,
    alpha: f64,
) -> Result<InputWitness> {
    input_witness(rho_prime, channel, &tensor_product(omega_a, sigma_c)?, alpha)
}

/// `ω_RA = η_A^{1/2} ρ_A^{-1/2} ρ′_RA ρ_A^{-1/2} η_A^{1/2}`, which `N: R→BC` maps onto η_ABC.
pub fn eta_witness_omega(
    rho_prime: &DensityOperator,
    channel: &QuantumChannel,
    omega_a: &QOperator,
    alpha: f64,
) -> Result<InputWitness> {
    input_witness(rho_prime, channel, omega_a, alpha)
}

/// Matrix of a product of operators on disjoint registers, in the order of `layout`.
pub(crate) fn product_matrix(layout: &RegisterLayout, parts: &[&QOperator]) -> Result<Mat> {
    let mut acc: Option<QOperator> = None;
    for p in parts {
        acc = Some(match acc {
            None => (*p).clone(),
            Some(a) => tensor_product(&a, p)?,
        });
    }
    let acc = acc.ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
    Ok(acc.reorder(layout)?.into_matrix())
}

/// `D_α(ρ‖σ)` without the support floor when σ is strictly positive.
///
/// At large α the witness marginals are ill-conditioned: eigenvalues fall below
/// the relative floor although the operator is full rank, and the floored
/// evaluation would report a spurious support mismatch.
pub(crate) fn divergence_unfloored(rho: &Mat, sigma: &Mat, order: RenyiOrder) -> Result<f64> {
    let alpha = order.value();
    let se = linalg::eigh(sigma);
    if order.is_umegaki() || order.is_infinite() || !(se.min() > 0.0) {
        return divergence_matrix(rho, sigma, order);
    }
    let s = se.apply(|x| x.powf(0.5 * order.gamma()));
    let m = linalg::hermitize(&(&s * rho * &s));
    let q: f64 = linalg::eigh(&m).values.iter().map(|&v| v.max(0.0).powf(alpha)).sum();
    let tr = linalg::trace_re(rho);
    if !(tr > 0.0) {
        return Err(Error::ZeroState);
    }
    Ok((q / tr).log2() / (alpha - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Value is a nonnegative residual; passes when `≤ tolerance`.
    Equality,
    /// Value is a slack; passes when `≥ −tolerance`.
    Inequality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub kind: CheckKind,
    pub tolerance: f64,
    /// Largest residual or smallest slack over all trials.
    #[serde(with = "crate::io::ext_f64_opt")]
    pub worst: Option<f64>,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    #[serde(with = "crate::io::ext_f64_opt")]
    pub alpha: Option<f64>,
    /// One value per check, `None` when not finite.
    pub values: Vec<Option<f64>>,
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub seed: u64,
    #[serde(with = "crate::io::ext_f64_opt")]
    pub alpha: Option<f64>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    /// Trials per order.
    pub trials: usize,
    pub dims: Vec<usize>,
    #[serde(with = "crate::io::ext_f64_vec")]
    pub alphas: Vec<f64>,
    pub seed: u64,
    /// Largest residual of the equality checks.
    #[serde(with = "crate::io::ext_f64_opt")]
    pub max_residual: Option<f64>,
    /// Smallest slack of the inequality checks.
    #[serde(with = "crate::io::ext_f64_opt")]
    pub min_slack: Option<f64>,
    pub checks: Vec<CheckSummary>,
    pub records: Vec<TrialRecord>,
    pub failing_seeds: Vec<u64>,
    pub errors: Vec<TrialError>,
    /// Some search behind an estimate stopped before meeting its criterion.
    pub uncertified: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct CheckDef {
    pub name: &'static str,
    pub kind: CheckKind,
    pub tol: f64,
}

impl CheckDef {
    pub fn eq(name: &'static str, tol: f64) -> Self {
        CheckDef {
            name,
            kind: CheckKind::Equality,
            tol,
        }
    }

    pub fn ineq(name: &'static str, tol: f64) -> Self {
        CheckDef {
            name,
            kind: CheckKind::Inequality,
            tol,
        }
    }

    fn passes(&self, v: f64) -> bool {
        match self.kind {
            CheckKind::Equality => v.abs() <= self.tol,
            CheckKind::Inequality => v >= -self.tol,
        }
    }
}

pub(crate) struct TrialValues {
    pub values: Vec<f64>,
    pub certified: bool,
}

impl From<Vec<f64>> for TrialValues {
    fn from(values: Vec<f64>) -> Self {
        TrialValues { values, certified: true }
    }
}

/// Runs `trials` seeded trials per cell and assembles the report. Trial `t`
/// uses seed `derive_seed(master, t)` in every cell, so each order sees the same
/// instances and a longer run extends a shorter one.
pub(crate) fn run_trials(
    identity: &str,
    spec: &TrialSpec,
    checks: Vec<CheckDef>,
    cells: &[Option<f64>],
    mut trial: impl FnMut(u64, Option<f64>) -> Result<TrialValues>,
) -> VerificationReport {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut failing = Vec::new();
    let mut worst: Vec<Option<f64>> = vec![None; checks.len()];
    let mut violations = vec![0usize; checks.len()];
    let mut uncertified = false;
    for (k, &alpha) in cells.iter().enumerate() {
        for t in 0..spec.trials {
            let index = k * spec.trials + t;
            let seed = derive_seed(spec.seed, t as u64);
            match trial(seed, alpha) {
                Ok(out) => {
                    let mut bad = false;
                    for (i, (c, &v)) in checks.iter().zip(&out.values).enumerate() {
                        if !v.is_finite() || !c.passes(v) {
                            violations[i] += 1;
                            bad = true;
                        }
                        let w = &mut worst[i];
                        *w = Some(match (*w, c.kind) {
                            (None, _) => v,
                            (Some(p), CheckKind::Equality) => p.max(v.abs()),
                            (Some(p), CheckKind::Inequality) => p.min(v),
                        });
                    }
                    if out.values.len() != checks.len() {
                        bad = true;
                    }
                    uncertified |= !out.certified;
                    if bad && !failing.contains(&seed) {
                        failing.push(seed);
                    }
                    records.push(TrialRecord {
                        index,
                        seed,
                        alpha,
                        values: out.values.iter().map(|v| v.is_finite().then_some(*v)).collect(),
                        certified: out.certified,
                    });
                }
                Err(e) => {
                    if !failing.contains(&seed) {
                        failing.push(seed);
                    }
                    errors.push(TrialError {
                        seed,
                        alpha,
                        message: e.to_string(),
                    });
                }
            }
        }
    }
    let summaries: Vec<CheckSummary> = checks
        .iter()
        .zip(worst)
        .zip(&violations)
        .map(|((c, w), &n)| CheckSummary {
            name: c.name.to_string(),
            kind: c.kind,
            tolerance: c.tol,
            worst: w.filter(|v| v.is_finite()),
            violations: n,
        })
        .collect();
    let max_residual = summaries
        .iter()
        .filter(|s| s.kind == CheckKind::Equality)
        .filter_map(|s| s.worst)
        .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.max(v))));
    let min_slack = summaries
        .iter()
        .filter(|s| s.kind == CheckKind::Inequality)
        .filter_map(|s| s.worst)
        .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |a| a.min(v))));
    let pass = errors.is_empty() && failing.is_empty();
    VerificationReport {
        identity: identity.to_string(),
        trials: spec.trials,
        dims: spec.dims.clone(),
        alphas: cells.iter().filter_map(|a| *a).collect(),
        seed: spec.seed,
        max_residual,
        min_slack,
        checks: summaries,
        records,
        failing_seeds: failing,
        errors,
        uncertified,
        pass,
    }
}
