//! Conditional entropies and mutual informations derived from the Rényi divergence.
//!
//! Closed-form quantities go straight through [`crate::divergence`]. The
//! optimized ones (`H^↑`, `I^↓`, `I^↓↓`) minimize over normalized marginals with
//! the engine in [`sandwich`]; at α = ∞ they become semidefinite programs solved by
//! [`sdp`]. Optimizers accept α ∈ [½, 1) ∪ (1, ∞) plus the two limits.

pub mod sandwich;
pub mod sdp;

use serde::{Deserialize, Serialize};

use crate::divergence::{divergence_matrix, RenyiOrder};
use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::linalg::{self, eigh, Mat};
use crate::operator::{partial_trace, DensityOperator};
use crate::random::{derive_seed, random_density, rng_from_seed};

use sandwich::{ptrace_first, ptrace_second, SandwichProblem};
use sdp::{solve_sdp, SdpProblem, SdpSolution};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub max_iters: usize,
    /// Target certified suboptimality in bits.
    pub tol_objective: f64,
    /// Trace-distance change below which alternating schemes stop.
    pub tol_state: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            max_iters: 2000,
            tol_objective: 1e-9,
            tol_state: 1e-8,
            restarts: 8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument("iteration and restart counts must be positive".into()));
        }
        if !(self.tol_objective > 0.0 && self.tol_state > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Residual still accepted when progress stalls at floating-point resolution.
    pub(crate) fn stall_tolerance(&self) -> f64 {
        (100.0 * self.tol_objective).max(1e-8)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    HDown,
    HUp,
    IPlain,
    IDown,
    IDownDown,
    IDiffCond,
}

/// A request for one entropic quantity.
///
/// `target` is the A of `H(A|B)` or the first slot of `I(A;B)`; `partner` is B.
/// For `IDiffCond`, `given` is the conditioning register C of `I(A;B|C)`.
#[derive(Clone, Debug)]
pub struct EntropyRequest {
    pub state: DensityOperator,
    pub target: Vec<String>,
    pub partner: Vec<String>,
    pub given: Vec<String>,
    pub order: RenyiOrder,
    pub variant: Variant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ResultFlag {
    /// Alternating minimization; the value is the best local optimum found.
    Local,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub name: String,
    pub state: DensityOperator,
}

#[derive(Clone, Debug)]
pub struct EntropyResult {
    pub value: f64,
    pub witnesses: Vec<Witness>,
    /// Certified optimality residual in bits (0 for closed forms, duality gap for SDPs).
    pub residual: f64,
    pub iterations: usize,
    pub flags: Vec<ResultFlag>,
}

impl EntropyResult {
    fn closed(value: f64) -> Self {
        EntropyResult {
            value,
            witnesses: vec![],
            residual: 0.0,
            iterations: 0,
            flags: vec![],
        }
    }
}

fn labels(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn check_disjoint(sets: &[&[String]]) -> Result<()> {
    let mut seen: Vec<&String> = vec![];
    for s in sets {
        for l in s.iter() {
            if seen.contains(&l) {
                return Err(Error::Layout(format!("register {l} appears in two label sets")));
            }
            seen.push(l);
        }
    }
    Ok(())
}

/// The reduced state on `a ∪ b`, ordered `a ⊗ b`, with both sub-layouts.
pub(crate) fn bipartite(state: &DensityOperator, a: &[&str], b: &[&str]) -> Result<(Mat, RegisterLayout, RegisterLayout)> {
    if a.is_empty() {
        return Err(Error::Layout("first register set is empty".into()));
    }
    let la = state.layout().select(a)?;
    let lb = state.layout().select(b)?;
    let mut keep = a.to_vec();
    keep.extend_from_slice(b);
    let red = partial_trace(state, &keep)?;
    let ordered = red.reorder(&la.concat(&lb)?)?;
    Ok((ordered.into_matrix(), la, lb))
}

fn witness(name: &str, layout: RegisterLayout, m: &Mat) -> Witness {
    let t = linalg::trace_re(m);
    Witness {
        name: name.to_string(),
        state: DensityOperator::raw(layout, m.scale(1.0 / t), true),
    }
}

/// `H_α(A|B) = −D_α(ρ_AB ‖ 1_A ⊗ ρ_B)`.
pub fn cond_entropy_down(state: &DensityOperator, target: &[&str], given: &[&str], order: RenyiOrder) -> Result<f64> {
    let (m, la, lb) = bipartite(state, target, given)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let rb = ptrace_first(&m, da, db);
    let sigma = linalg::kron(&linalg::identity(da), &rb);
    Ok(-divergence_matrix(&m, &sigma, order)?)
}

/// `H_α^↑(A|B) = −min_σ D_α(ρ_AB ‖ 1_A ⊗ σ_B)` with the minimizing σ_B as witness.
pub fn cond_entropy_up(
    state: &DensityOperator,
    target: &[&str],
    given: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<EntropyResult> {
    cond_entropy_up_from(state, target, given, order, cfg, None)
}

/// As [`cond_entropy_up`] with an explicit starting point for σ_B.
pub fn cond_entropy_up_from(
    state: &DensityOperator,
    target: &[&str],
    given: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    init: Option<&Mat>,
) -> Result<EntropyResult> {
    state.require_normalized()?;
    cfg.validate()?;
    let (m, la, lb) = bipartite(state, target, given)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let rb = ptrace_first(&m, da, db);
    if order.is_umegaki() {
        let sigma = linalg::kron(&linalg::identity(da), &rb);
        let v = -divergence_matrix(&m, &sigma, order)?;
        let mut r = EntropyResult::closed(v);
        r.witnesses.push(witness("sigma", lb, &rb));
        return Ok(r);
    }
    if order.is_infinite() {
        let (v, sol) = dmax_min_sdp(&m, &linalg::identity(da), db)?;
        let mut r = EntropyResult {
            value: -v,
            witnesses: vec![],
            residual: sol.gap,
            iterations: sol.iterations,
            flags: vec![],
        };
        r.witnesses.push(witness("sigma", lb, &sigma_from_dual(&sol, db)));
        return Ok(r);
    }
    let p = SandwichProblem::new(m, da, db, &linalg::identity(da), order.value())?;
    let start = init.cloned().unwrap_or(rb);
    let out = p.solve(cfg, Some(&start))?;
    Ok(EntropyResult {
        value: -out.divergence,
        witnesses: vec![witness("sigma", lb, &out.sigma)],
        residual: out.residual,
        iterations: out.iterations,
        flags: vec![],
    })
}

/// `I_α(A;B) = D_α(ρ_AB ‖ ρ_A ⊗ ρ_B)`.
pub fn mutual_info_plain(state: &DensityOperator, a: &[&str], b: &[&str], order: RenyiOrder) -> Result<f64> {
    let (m, la, lb) = bipartite(state, a, b)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let ra = ptrace_second(&m, da, db);
    let rb = ptrace_first(&m, da, db);
    divergence_matrix(&m, &linalg::kron(&ra, &rb), order)
}

/// `I^↓_α(A;B) = min_σ D_α(ρ_AB ‖ ρ_A ⊗ σ_B)`.
pub fn mutual_info_down(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<EntropyResult> {
    mutual_info_down_from(state, a, b, order, cfg, None)
}

pub fn mutual_info_down_from(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    init: Option<&Mat>,
) -> Result<EntropyResult> {
    state.require_normalized()?;
    cfg.validate()?;
    let (m, la, lb) = bipartite(state, a, b)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let ra = ptrace_second(&m, da, db);
    let rb = ptrace_first(&m, da, db);
    if order.is_umegaki() {
        let v = divergence_matrix(&m, &linalg::kron(&ra, &rb), order)?;
        let mut r = EntropyResult::closed(v);
        r.witnesses.push(witness("sigma", lb, &rb));
        return Ok(r);
    }
    if order.is_infinite() {
        let (v, sol) = dmax_min_sdp(&m, &ra, db)?;
        let mut r = EntropyResult {
            value: v,
            witnesses: vec![],
            residual: sol.gap,
            iterations: sol.iterations,
            flags: vec![],
        };
        r.witnesses.push(witness("sigma", lb, &sigma_from_dual(&sol, db)));
        return Ok(r);
    }
    let p = SandwichProblem::new(m, da, db, &ra, order.value())?;
    let start = init.cloned().unwrap_or(rb);
    let out = p.solve(cfg, Some(&start))?;
    Ok(EntropyResult {
        value: out.divergence,
        witnesses: vec![witness("sigma", lb, &out.sigma)],
        residual: out.residual,
        iterations: out.iterations,
        flags: vec![],
    })
}

/// Reorders a matrix on `X ⊗ Y` to `Y ⊗ X`.
pub(crate) fn swap_factors(m: &Mat, dx: usize, dy: usize) -> Mat {
    let src = |i: usize| (i % dx) * dy + i / dx;
    Mat::from_fn(dx * dy, dx * dy, |i, j| m[(src(i), src(j))])
}

/// `min_σ D_∞(ρ_XB ‖ τ_X ⊗ σ_B) = log₂ min{tr σ : τ ⊗ σ ⪰ ρ}` solved as an SDP.
/// `τ` is compressed to its support first.
pub fn dmax_min_sdp(rho: &Mat, tau: &Mat, db: usize) -> Result<(f64, SdpSolution)> {
    let dx = tau.nrows();
    let e = eigh(tau);
    let fl = e.floor();
    let sup: Vec<usize> = (0..dx).filter(|&k| e.values[k] > fl).collect();
    if sup.is_empty() {
        return Err(Error::SingularOperator);
    }
    let r = sup.len();
    // isometry onto supp τ, lifted to X ⊗ B
    let v = Mat::from_fn(dx, r, |i, k| e.vectors[(i, sup[k])]);
    let vb = linalg::kron(&v, &linalg::identity(db));
    // support check: ρ must live on supp τ ⊗ B
    let proj = &vb * vb.adjoint();
    let leak = linalg::trace_re(rho) - linalg::inner_re(&proj, rho);
    if leak > linalg::EIG_FLOOR * linalg::trace_re(rho).max(1.0) {
        return Ok((f64::INFINITY, empty_solution(db)));
    }
    let rho_c = vb.adjoint() * rho * &vb;
    let tau_c = linalg::diag(&sup.iter().map(|&k| e.values[k]).collect::<Vec<_>>());
    let basis = linalg::hermitian_basis(db);
    let a: Vec<Mat> = basis.iter().map(|eb| linalg::kron(&tau_c, eb)).collect();
    let b: Vec<f64> = basis.iter().map(linalg::trace_re).collect();
    let sol = solve_sdp(&SdpProblem { c: -rho_c, a, b })?;
    let best = -sol.value();
    if best <= 0.0 {
        return Err(Error::NumericalFailure("nonpositive SDP optimum".into()));
    }
    Ok((best.log2(), sol))
}

fn empty_solution(db: usize) -> SdpSolution {
    SdpSolution {
        status: sdp::SdpStatus::Optimal,
        primal_value: f64::NEG_INFINITY,
        dual_value: f64::NEG_INFINITY,
        gap: 0.0,
        x: Mat::zeros(0, 0),
        y: vec![0.0; db * db],
        s: Mat::zeros(0, 0),
        primal_residual: 0.0,
        dual_residual: 0.0,
        iterations: 0,
    }
}

/// Recovers `σ = −Σ y_i E_i` from the dual of [`dmax_min_sdp`].
fn sigma_from_dual(sol: &SdpSolution, db: usize) -> Mat {
    let basis = linalg::hermitian_basis(db);
    let mut s = Mat::zeros(db, db);
    for (e, y) in basis.iter().zip(&sol.y) {
        s -= e.scale(*y);
    }
    let s = linalg::hermitize(&s);
    if linalg::trace_re(&s) <= 0.0 {
        return linalg::identity(db).scale(1.0 / db as f64);
    }
    s
}

/// `I^↓↓_α(A;B) = min_{ω,σ} D_α(ρ_AB ‖ ω_A ⊗ σ_B)` by alternating minimization.
///
/// The first restart starts from `ω = ρ_A`, so the result never exceeds the
/// `I^↓` value found by the same engine; the remaining restarts use random
/// `ω` drawn from seeds derived from `cfg.seed`.
pub fn mutual_info_downdown(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<EntropyResult> {
    mutual_info_downdown_seeded(state, a, b, order, cfg, &[])
}

/// As [`mutual_info_downdown`] with extra `(ω_A, σ_B)` starting pairs tried first.
pub fn mutual_info_downdown_seeded(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    seeds: &[(Mat, Mat)],
) -> Result<EntropyResult> {
    state.require_normalized()?;
    cfg.validate()?;
    let (m, la, lb) = bipartite(state, a, b)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let ra = ptrace_second(&m, da, db);
    let rb = ptrace_first(&m, da, db);
    if order.is_umegaki() {
        let v = divergence_matrix(&m, &linalg::kron(&ra, &rb), order)?;
        let mut r = EntropyResult::closed(v);
        r.witnesses.push(witness("omega", la, &ra));
        r.witnesses.push(witness("sigma", lb, &rb));
        return Ok(r);
    }
    let swapped = swap_factors(&m, da, db);
    let mut starts: Vec<(Mat, Option<Mat>)> = seeds.iter().map(|(w, s)| (w.clone(), Some(s.clone()))).collect();
    starts.push((ra.clone(), Some(rb.clone())));
    let mut rng_idx = 0u64;
    while starts.len() < seeds.len() + cfg.restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(cfg.seed, rng_idx));
        rng_idx += 1;
        let w = random_density(&mut rng, la.clone()).into_base().into_matrix();
        starts.push((w, None));
    }
    let mut best: Option<(f64, Mat, Mat, f64, usize)> = None;
    let mut last_err = None;
    for (w0, s0) in starts {
        match alternate(&m, &swapped, da, db, &w0, s0.as_ref(), order, cfg) {
            Ok(r) => {
                if best.as_ref().map_or(true, |b| r.0 < b.0) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let Some((v, w, s, res, iters)) = best else {
        return Err(last_err.unwrap_or(Error::NumericalFailure("no restart succeeded".into())));
    };
    let mut flags = vec![];
    if order.value() < 1.0 {
        flags.push(ResultFlag::Local);
    }
    Ok(EntropyResult {
        value: v,
        witnesses: vec![witness("omega", la, &w), witness("sigma", lb, &s)],
        residual: res,
        iterations: iters,
        flags,
    })
}

#[allow(clippy::too_many_arguments)]
fn alternate(
    m: &Mat,
    swapped: &Mat,
    da: usize,
    db: usize,
    w0: &Mat,
    s0: Option<&Mat>,
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<(f64, Mat, Mat, f64, usize)> {
    let mut w = w0.clone();
    let mut s = s0.cloned().unwrap_or_else(|| linalg::identity(db).scale(1.0 / db as f64));
    let mut value = f64::INFINITY;
    let mut residual = 0.0;
    let mut total = 0;
    let mut flat_rounds = 0;
    for round in 0..cfg.max_iters.min(500) {
        let (vs, s_new, rs, is) = min_over_second(m, da, db, &w, &s, order, cfg)?;
        let (vw, w_new, rw, iw) = min_over_second(swapped, db, da, &s_new, &w, order, cfg)?;
        total += is + iw;
        residual = rs.max(rw);
        let change = linalg::trace_norm_herm(&(&w_new - &w)) + linalg::trace_norm_herm(&(&s_new - &s));
        let prev = value;
        value = vw.min(vs);
        w = w_new;
        s = s_new;
        if round > 0 && (prev - value).abs() <= 0.1 * cfg.tol_objective && change <= cfg.tol_state {
            break;
        }
        if round > 0 && (prev - value).abs() <= 1e-14 {
            break;
        }
        // degenerate optima (D_∞) keep the iterates moving without progress
        if round > 0 && prev - value <= 0.1 * cfg.tol_objective {
            flat_rounds += 1;
            if flat_rounds >= 3 {
                break;
            }
        } else {
            flat_rounds = 0;
        }
    }
    Ok((value, w, s, residual, total))
}

/// `min_σ D_α(ρ_XB ‖ τ_X ⊗ σ_B)` for any supported order; returns `(value, σ, residual, iterations)`.
fn min_over_second(
    m: &Mat,
    dx: usize,
    db: usize,
    tau: &Mat,
    init: &Mat,
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<(f64, Mat, f64, usize)> {
    if order.is_infinite() {
        let (v, sol) = dmax_min_sdp(m, tau, db)?;
        let s = sigma_from_dual(&sol, db);
        let t = linalg::trace_re(&s);
        return Ok((v, s.scale(1.0 / t), sol.gap, sol.iterations));
    }
    let p = SandwichProblem::new(m.clone(), dx, db, tau, order.value())?;
    let out = p.solve(cfg, Some(init))?;
    Ok((out.divergence, out.sigma, out.residual, out.iterations))
}

/// `I^↓_α` on a bare matrix ordered `X ⊗ B`: `(value, σ_B, residual)`.
pub(crate) fn mutual_info_down_matrix(
    m: &Mat,
    dx: usize,
    db: usize,
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    init: Option<&Mat>,
) -> Result<(f64, Mat, f64)> {
    let ra = ptrace_second(m, dx, db);
    let rb = ptrace_first(m, dx, db);
    if order.is_umegaki() {
        let v = divergence_matrix(m, &linalg::kron(&ra, &rb), order)?;
        return Ok((v, rb, 0.0));
    }
    let start = init.cloned().unwrap_or(rb);
    let (v, s, r, _) = min_over_second(m, dx, db, &ra, &start, order, cfg)?;
    Ok((v, s, r))
}

/// `I^{↓,diff}_α(A;B|C) = I^↓_α(A;BC) − I^↓_α(A;C)`.
pub fn cqmi_diff(
    state: &DensityOperator,
    a: &[&str],
    b: &[&str],
    c: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<EntropyResult> {
    let mut bc = b.to_vec();
    bc.extend_from_slice(c);
    let full = mutual_info_down(state, a, &bc, order, cfg)?;
    let part = mutual_info_down(state, a, c, order, cfg)?;
    Ok(EntropyResult {
        value: full.value - part.value,
        witnesses: vec![
            Witness {
                name: "sigma_bc".into(),
                state: full.witnesses[0].state.clone(),
            },
            Witness {
                name: "sigma_c".into(),
                state: part.witnesses[0].state.clone(),
            },
        ],
        residual: full.residual + part.residual,
        iterations: full.iterations + part.iterations,
        flags: vec![],
    })
}

/// `H_min^↑(A|B) = −log₂ min{tr σ : 1_A ⊗ σ_B ⪰ ρ_AB}`; the residual is the SDP duality gap.
pub fn hmin_up(state: &DensityOperator, target: &[&str], given: &[&str]) -> Result<EntropyResult> {
    state.require_normalized()?;
    let (m, la, lb) = bipartite(state, target, given)?;
    let da = la.total_dim();
    let db = lb.total_dim();
    let (v, sol) = dmax_min_sdp(&m, &linalg::identity(da), db)?;
    Ok(EntropyResult {
        value: -v,
        witnesses: vec![witness("sigma", lb, &sigma_from_dual(&sol, db))],
        residual: sol.gap,
        iterations: sol.iterations,
        flags: vec![],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImaxVariant {
    /// `D_∞(ρ_AB ‖ ρ_A ⊗ ρ_B)`.
    None,
    /// `log₂ min{tr σ : ρ_AB ⪯ ρ_A ⊗ σ_B}`.
    Down,
}

pub fn imax_family(state: &DensityOperator, a: &[&str], b: &[&str], variant: ImaxVariant) -> Result<EntropyResult> {
    state.require_normalized()?;
    match variant {
        ImaxVariant::None => Ok(EntropyResult::closed(mutual_info_plain(state, a, b, RenyiOrder::infinity())?)),
        ImaxVariant::Down => {
            let (m, la, lb) = bipartite(state, a, b)?;
            let da = la.total_dim();
            let db = lb.total_dim();
            let ra = ptrace_second(&m, da, db);
            let (v, sol) = dmax_min_sdp(&m, &ra, db)?;
            let mut r = EntropyResult {
                value: v,
                witnesses: vec![],
                residual: sol.gap,
                iterations: sol.iterations,
                flags: vec![],
            };
            if v.is_finite() {
                r.witnesses.push(witness("sigma", lb, &sigma_from_dual(&sol, db)));
            }
            Ok(r)
        }
    }
}

/// Evaluates a request, applying the ordering post-checks for mutual informations.
pub fn evaluate(req: &EntropyRequest, cfg: &OptimizerConfig) -> Result<EntropyResult> {
    check_disjoint(&[&req.target, &req.partner, &req.given])?;
    let a = labels(&req.target);
    let b = labels(&req.partner);
    let st = &req.state;
    let o = req.order;
    const ORDER_SLACK: f64 = 1e-7;
    match req.variant {
        Variant::HDown => Ok(EntropyResult::closed(cond_entropy_down(st, &a, &b, o)?)),
        Variant::HUp => cond_entropy_up(st, &a, &b, o, cfg),
        Variant::IPlain => Ok(EntropyResult::closed(mutual_info_plain(st, &a, &b, o)?)),
        Variant::IDown => {
            let r = mutual_info_down(st, &a, &b, o, cfg)?;
            let plain = mutual_info_plain(st, &a, &b, o)?;
            if r.value > plain + ORDER_SLACK {
                return Err(Error::NumericalFailure(format!("I_down {} exceeds I {}", r.value, plain)));
            }
            Ok(r)
        }
        Variant::IDownDown => {
            let r = mutual_info_downdown(st, &a, &b, o, cfg)?;
            let down = mutual_info_down(st, &a, &b, o, cfg)?;
            if r.value > down.value + ORDER_SLACK {
                return Err(Error::NumericalFailure(format!(
                    "I_downdown {} exceeds I_down {}",
                    r.value, down.value
                )));
            }
            Ok(r)
        }
        Variant::IDiffCond => {
            let c = labels(&req.given);
            cqmi_diff(st, &a, &b, &c, o, cfg)
        }
    }
}

/// Von Neumann entropy in bits of the reduced state on `labels`.
pub fn entropy_vn(state: &DensityOperator, labels: &[&str]) -> Result<f64> {
    if labels.is_empty() {
        return Ok(0.0);
    }
    Ok(linalg::von_neumann(partial_trace(state, labels)?.matrix()))
}

/// `H(A|B) = H(AB) − H(B)`.
pub fn cond_entropy_vn(state: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok(entropy_vn(state, &ab)? - entropy_vn(state, b)?)
}

/// `I(A:B) = H(A) + H(B) − H(AB)`.
pub fn mutual_info_vn(state: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let ab: Vec<&str> = a.iter().chain(b).copied().collect();
    Ok(entropy_vn(state, a)? + entropy_vn(state, b)? - entropy_vn(state, &ab)?)
}

/// `I(A:B|C) = H(AC) + H(BC) − H(ABC) − H(C)`.
pub fn cmi_vn(state: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
    let ac: Vec<&str> = a.iter().chain(c).copied().collect();
    let bc: Vec<&str> = b.iter().chain(c).copied().collect();
    let abc: Vec<&str> = a.iter().chain(b).chain(c).copied().collect();
    Ok(entropy_vn(state, &ac)? + entropy_vn(state, &bc)? - entropy_vn(state, &abc)? - entropy_vn(state, c)?)
}
