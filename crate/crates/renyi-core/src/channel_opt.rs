//! Optimizations over channel inputs.
//!
//! * `sup_ω I^↓_α(Z̃;L)_{L̃(ω)}` over pure `ω_{Z̃R}`, Z̃ a copy of R.
//! * `inf_ω H_α(S|EẼ)_{N(ω)}` over pure `ω` on the channel input and a copy Ẽ of it.
//!
//! Restricting to pure inputs loses nothing: the purifying system can only
//! increase the mutual information and decrease the conditional entropy. Both
//! objectives are invariant under unitaries on the purifying side, so a pure
//! input is parametrized by a lower-triangular `G` with `ω = GG†/tr(GG†)`,
//! i.e. `|ψ⟩ = Σ_i |i⟩ ⊗ G|i⟩` up to normalization.
//!
//! Every result is a local-search estimate: a lower estimate of the sup and an
//! upper estimate of the inf.

use std::cell::RefCell;

use serde::Serialize;

use crate::channel::QuantumChannel;
use crate::divergence::{divergence_matrix, RenyiOrder};
use crate::entropic::{mutual_info_down_matrix, OptimizerConfig};
use crate::error::{Error, Result};
use crate::gradient::cond_entropy_down_grad;
use crate::layout::RegisterLayout;
use crate::linalg::{self, c, Mat, C64};
use crate::random::{derive_seed, random_density, rng_from_seed};
use crate::search::{minimize_bfgs, minimize_fd, SearchOptions};

#[derive(Clone, Debug, Serialize)]
pub struct InputSearch {
    /// Best objective value found.
    pub value: f64,
    /// Input-register marginal `ω` of the best input.
    #[serde(skip)]
    pub input: Mat,
    pub restarts: usize,
    /// The restart that produced `value` met its stopping criterion.
    pub converged: bool,
}

/// Kraus operators of `ch` followed by tracing out everything except `keep`,
/// with output rows ordered as `keep` lists them.
pub fn reduced_kraus(ch: &QuantumChannel, keep: &[&str]) -> Result<(Vec<Mat>, RegisterLayout)> {
    let out = ch.out_layout();
    let kept = out.select(keep)?;
    let target = RegisterLayout::from_factors(
        keep.iter()
            .map(|l| kept.factors()[kept.position(l).unwrap()].clone())
            .collect(),
    )?;
    let (s, r) = out.split_indices(keep)?;
    let dk = kept.total_dim();
    let dt = out.total_dim() / dk.max(1);
    let perm = kept.permutation_to(&target)?;
    let mut inv = vec![0usize; perm.len()];
    for (t, &p) in perm.iter().enumerate() {
        inv[p] = t;
    }
    let din = ch.in_layout().total_dim();
    let mut kraus = Vec::with_capacity(ch.kraus().len() * dt);
    for k in ch.kraus() {
        for env in 0..dt {
            let mut m = Mat::zeros(dk, din);
            for i in 0..out.total_dim() {
                if r[i] == env {
                    m.set_row(inv[s[i]], &k.row(i));
                }
            }
            if m.iter().any(|z| z.norm() > 0.0) {
                kraus.push(m);
            }
        }
    }
    Ok((kraus, target))
}

/// Number of real parameters of a lower-triangular `d × d` complex `G` with real diagonal.
fn param_len(d: usize) -> usize {
    d * d
}

fn g_from_params(x: &[f64], d: usize) -> Mat {
    let mut g = Mat::zeros(d, d);
    let mut k = d;
    for i in 0..d {
        g[(i, i)] = c(x[i]);
        for j in 0..i {
            g[(i, j)] = C64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    g
}

fn params_from_density(omega: &Mat) -> Vec<f64> {
    let d = omega.nrows();
    let t = linalg::trace_re(omega).max(f64::MIN_POSITIVE);
    let reg = linalg::hermitize(&omega.scale(1.0 / t)) + linalg::identity(d).scale(1e-9);
    let g = match reg.clone().cholesky() {
        Some(ch) => ch.l(),
        None => linalg::identity(d).scale(1.0 / (d as f64).sqrt()),
    };
    let mut x = vec![0.0; param_len(d)];
    let mut k = d;
    for i in 0..d {
        x[i] = g[(i, i)].re;
        for j in 0..i {
            x[k] = g[(i, j)].re;
            x[k + 1] = g[(i, j)].im;
            k += 2;
        }
    }
    x
}

fn density_from_params(x: &[f64], d: usize) -> Mat {
    let g = g_from_params(x, d);
    let w = &g * g.adjoint();
    let t = linalg::trace_re(&w);
    w.scale(1.0 / t)
}

/// `Σ_k vec(Ψ K_kᵀ) vec(Ψ K_kᵀ)†` with `Ψ = Gᵀ`: the channel output on `copy ⊗ out`.
fn output_state(g: &Mat, kraus: &[Mat]) -> Mat {
    let psi = g.transpose();
    let dz = psi.nrows();
    let dout = kraus[0].nrows();
    let n = dz * dout;
    let mut tau = Mat::zeros(n, n);
    for k in kraus {
        let w = &psi * k.transpose();
        let v = nalgebra::DVector::from_fn(n, |idx, _| w[(idx / dout, idx % dout)]);
        tau += &v * v.adjoint();
    }
    let t = linalg::trace_re(&tau);
    tau.scale(1.0 / t)
}

fn starting_points(seeds: &[Mat], d: usize, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut starts: Vec<Vec<f64>> = seeds.iter().map(params_from_density).collect();
    starts.push(params_from_density(&linalg::identity(d)));
    let layout = RegisterLayout::new(&[("X", d)]).expect("positive dimension");
    let mut idx = 0;
    while starts.len() < seeds.len() + restarts.max(1) {
        let mut rng = rng_from_seed(derive_seed(seed, idx));
        idx += 1;
        starts.push(params_from_density(random_density(&mut rng, layout.clone()).matrix()));
    }
    starts
}

/// `sup_ω I^↓_α(Z̃;L)_{L̃(ω)}`, where `leak` maps its whole input R to outputs
/// including `l_labels`; other outputs are traced out. `seeds` are candidate
/// marginals `ω_R` tried before the random restarts.
pub fn sup_mutual_info_down(
    leak: &QuantumChannel,
    l_labels: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    seeds: &[Mat],
) -> Result<InputSearch> {
    cfg.validate()?;
    let (kraus, lay) = reduced_kraus(leak, l_labels)?;
    let d = leak.in_layout().total_dim();
    let dl = lay.total_dim();
    if kraus.is_empty() {
        return Err(Error::InvalidArgument("channel has no Kraus operators".into()));
    }
    let inner = OptimizerConfig {
        tol_objective: cfg.tol_objective.min(1e-10),
        ..cfg.clone()
    };
    let warm: RefCell<Option<Mat>> = RefCell::new(None);
    let eval = |x: &[f64]| -> Option<f64> {
        let g = g_from_params(x, d);
        if !(linalg::trace_re(&(&g * g.adjoint())) > 1e-300) {
            return None;
        }
        let tau = output_state(&g, &kraus);
        let init = warm.borrow().clone();
        let (v, s, _) = mutual_info_down_matrix(&tau, d, dl, order, &inner, init.as_ref()).ok()?;
        *warm.borrow_mut() = Some(s);
        v.is_finite().then_some(-v)
    };
    let opts = SearchOptions {
        max_iters: cfg.max_iters.min(200),
        grad_tol: 1e-7,
        f_tol: 1e-11,
        max_step: 0.5,
    };
    let mut best: Option<InputSearch> = None;
    let starts = starting_points(seeds, d, cfg.restarts, cfg.seed);
    let n_starts = starts.len();
    for x0 in starts {
        *warm.borrow_mut() = None;
        let Some(out) = minimize_fd(eval, x0, 1e-6, &opts) else {
            continue;
        };
        let value = -out.f;
        if best.as_ref().map_or(true, |b| value > b.value) {
            best = Some(InputSearch {
                value,
                input: density_from_params(&out.x, d),
                restarts: n_starts,
                converged: out.converged,
            });
        }
    }
    best.ok_or_else(|| Error::NumericalFailure("no restart of the input search succeeded".into()))
}

/// `I^↓_α(Z̃;L)` for the canonical purification of a given `ω_R`.
pub fn mutual_info_down_at_input(
    leak: &QuantumChannel,
    l_labels: &[&str],
    omega_r: &Mat,
    order: RenyiOrder,
    cfg: &OptimizerConfig,
) -> Result<f64> {
    let (kraus, lay) = reduced_kraus(leak, l_labels)?;
    let d = leak.in_layout().total_dim();
    let e = linalg::eigh(omega_r);
    let g = e.apply(|v| v.max(0.0).sqrt());
    let tau = output_state(&g, &kraus);
    Ok(mutual_info_down_matrix(&tau, d, lay.total_dim(), order, cfg, None)?.0)
}

/// `H_α(S|EẼ)` for the channel output on `Ẽ ⊗ S ⊗ E`, reordered to `S ⊗ (E ⊗ Ẽ)`,
/// with its gradient with respect to `Ψ̄` (`Ψ = Gᵀ`).
fn entropy_and_gradient(g: &Mat, kraus: &[Mat], ds: usize, de: usize, alpha: f64) -> Option<(f64, Mat)> {
    let psi = g.transpose();
    let dx = psi.nrows();
    let dout = ds * de;
    let n = dout * dx;
    let idx = |s: usize, e: usize, x: usize| (s * de + e) * dx + x;
    let mut vs = Vec::with_capacity(kraus.len());
    let mut tau = Mat::zeros(n, n);
    for k in kraus {
        let w = &psi * k.transpose();
        let mut v = nalgebra::DVector::<C64>::zeros(n);
        for x in 0..dx {
            for o in 0..dout {
                v[idx(o / de, o % de, x)] = w[(x, o)];
            }
        }
        tau += &v * v.adjoint();
        vs.push(v);
    }
    let (h, grad) = cond_entropy_down_grad(&tau, ds, de * dx, alpha)?;
    let mut wmat = Mat::zeros(dx, psi.ncols());
    for (k, v) in kraus.iter().zip(&vs) {
        let gv = &grad * v;
        let wk = Mat::from_fn(dx, dout, |x, o| gv[idx(o / de, o % de, x)]);
        wmat += wk * k.map(|z| z.conj());
    }
    Some((h, wmat))
}

fn entropy_value(g: &Mat, kraus: &[Mat], ds: usize, de: usize, order: RenyiOrder) -> Option<f64> {
    let tau = output_state(g, kraus);
    let dx = g.nrows();
    // output_state orders copy ⊗ S ⊗ E; move the copy to the end
    let dout = ds * de;
    let n = dout * dx;
    let src = |i: usize| (i % dx) * dout + i / dx;
    let t = Mat::from_fn(n, n, |i, j| tau[(src(i), src(j))]);
    let tb = crate::entropic::sandwich::ptrace_first(&t, ds, de * dx);
    let sigma = linalg::kron(&linalg::identity(ds), &tb);
    divergence_matrix(&t, &sigma, order).ok().map(|v| -v)
}

/// `inf_ω H_α(S|EẼ)_{N(ω)}` over pure inputs on `in ⊗ Ẽ`, with `S = s_labels`,
/// `E = e_labels` among the outputs of `n` (the rest traced out). `seeds` are
/// candidate input marginals tried before random restarts.
pub fn inf_cond_entropy_down(
    n: &QuantumChannel,
    s_labels: &[&str],
    e_labels: &[&str],
    order: RenyiOrder,
    cfg: &OptimizerConfig,
    seeds: &[Mat],
) -> Result<InputSearch> {
    cfg.validate()?;
    let keep: Vec<&str> = s_labels.iter().chain(e_labels).copied().collect();
    let (kraus, lay) = reduced_kraus(n, &keep)?;
    let ds = lay.select(s_labels)?.total_dim();
    let de = lay.total_dim() / ds;
    let d = n.in_layout().total_dim();
    if d * lay.total_dim() > crate::layout::MAX_TOTAL_DIM {
        return Err(Error::DimensionLimit(d * lay.total_dim()));
    }
    let alpha = order.value();
    let analytic = alpha > 1.0 && alpha.is_finite() && !order.is_umegaki();
    let opts = SearchOptions {
        max_iters: cfg.max_iters.min(400),
        grad_tol: 1e-8,
        f_tol: 1e-12,
        max_step: 0.5,
    };
    let value_only = |x: &[f64]| entropy_value(&g_from_params(x, d), &kraus, ds, de, order);
    let with_grad = |x: &[f64]| -> Option<(f64, Vec<f64>)> {
        let g = g_from_params(x, d);
        let Some((h, w)) = entropy_and_gradient(&g, &kraus, ds, de, alpha) else {
            let v = value_only(x)?;
            let mut f = value_only;
            let grad = crate::search::fd_gradient(&mut f, x, 1e-6)?;
            return Some((v, grad));
        };
        // ∂/∂G[j,x] = 2 W[x,j] (real and imaginary parts), restricted to the lower triangle
        let mut grad = vec![0.0; param_len(d)];
        let mut k = d;
        for i in 0..d {
            grad[i] = 2.0 * w[(i, i)].re;
            for j in 0..i {
                grad[k] = 2.0 * w[(j, i)].re;
                grad[k + 1] = 2.0 * w[(j, i)].im;
                k += 2;
            }
        }
        Some((h, grad))
    };
    let mut best: Option<InputSearch> = None;
    let starts = starting_points(seeds, d, cfg.restarts, cfg.seed);
    let n_starts = starts.len();
    for x0 in starts {
        let out = if analytic {
            minimize_bfgs(with_grad, x0, &opts)
        } else {
            minimize_fd(value_only, x0, 1e-6, &opts)
        };
        let Some(out) = out else { continue };
        if best.as_ref().map_or(true, |b| out.f < b.value) {
            best = Some(InputSearch {
                value: out.f,
                input: density_from_params(&out.x, d),
                restarts: n_starts,
                converged: out.converged,
            });
        }
    }
    best.ok_or_else(|| Error::NumericalFailure("no restart of the input search succeeded".into()))
}

/// `H_α(S|EẼ)` at the canonical purification of a given input marginal.
pub fn cond_entropy_down_at_input(
    n: &QuantumChannel,
    s_labels: &[&str],
    e_labels: &[&str],
    omega: &Mat,
    order: RenyiOrder,
) -> Result<f64> {
    let keep: Vec<&str> = s_labels.iter().chain(e_labels).copied().collect();
    let (kraus, lay) = reduced_kraus(n, &keep)?;
    let ds = lay.select(s_labels)?.total_dim();
    let de = lay.total_dim() / ds;
    let g = linalg::eigh(omega).apply(|v| v.max(0.0).sqrt());
    entropy_value(&g, &kraus, ds, de, order).ok_or_else(|| Error::NumericalFailure("entropy evaluation failed".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_channel;
    use crate::entropic::{cond_entropy_down, mutual_info_down};
    use crate::operator::{purify, DensityOperator};
    use crate::random::random_channel;

    fn l(spec: &[(&str, usize)]) -> RegisterLayout {
        RegisterLayout::new(spec).unwrap()
    }

    #[test]
    fn reduced_kraus_matches_partial_trace() {
        let mut rng = rng_from_seed(3);
        let ch = random_channel(&mut rng, l(&[("R", 2)]), l(&[("X", 2), ("Y", 3)]), 2);
        let rho = random_density(&mut rng, l(&[("R", 2)]));
        let (k, lay) = reduced_kraus(&ch, &["Y"]).unwrap();
        assert_eq!(lay.labels(), vec!["Y"]);
        let red = QuantumChannel::new(l(&[("R", 2)]), lay, k).unwrap();
        let a = apply_channel(&red, &rho).unwrap();
        let b = apply_channel(&ch, &rho).unwrap().reduce(&["Y"]).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn objective_matches_direct_evaluation() {
        let mut rng = rng_from_seed(8);
        let ch = random_channel(&mut rng, l(&[("R", 2)]), l(&[("L", 2)]), 2);
        let omega = random_density(&mut rng, l(&[("R", 2)]));
        let order = RenyiOrder::new(1.4).unwrap();
        let cfg = OptimizerConfig::default();
        let fast = mutual_info_down_at_input(&ch, &["L"], omega.matrix(), order, &cfg).unwrap();
        let psi = purify(&omega, "Z").unwrap();
        let out = apply_channel(&ch, &psi).unwrap();
        let direct = mutual_info_down(&out, &["Z"], &["L"], order, &cfg).unwrap().value;
        assert!((fast - direct).abs() < 1e-8, "{fast} vs {direct}");

        let n = random_channel(&mut rng, l(&[("R", 2)]), l(&[("S", 2), ("E", 2)]), 3);
        let h_fast = cond_entropy_down_at_input(&n, &["S"], &["E"], omega.matrix(), order).unwrap();
        let out = apply_channel(&n, &psi).unwrap();
        let h_direct = cond_entropy_down(&out, &["S"], &["E", "Z"], order).unwrap();
        assert!((h_fast - h_direct).abs() < 1e-9, "{h_fast} vs {h_direct}");
    }

    #[test]
    fn constant_channel_has_no_mutual_information() {
        let tau = DensityOperator::maximally_mixed(l(&[("L", 2)]));
        let ch = QuantumChannel::replacer(l(&[("R", 2)]), &tau).unwrap();
        let cfg = OptimizerConfig {
            restarts: 3,
            ..Default::default()
        };
        let r = sup_mutual_info_down(&ch, &["L"], RenyiOrder::new(1.2).unwrap(), &cfg, &[]).unwrap();
        assert!(r.value.abs() < 1e-8);
    }

    #[test]
    fn identity_channel_sup_is_maximally_entangled() {
        let ch = QuantumChannel::identity(l(&[("R", 2)]));
        let cfg = OptimizerConfig {
            restarts: 3,
            ..Default::default()
        };
        let r = sup_mutual_info_down(&ch, &["R"], RenyiOrder::new(1.5).unwrap(), &cfg, &[]).unwrap();
        // I^↓ of a maximally entangled qubit pair is 2
        assert!((r.value - 2.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn infimum_search_is_below_every_probe() {
        let mut rng = rng_from_seed(21);
        let n = random_channel(&mut rng, l(&[("R", 2)]), l(&[("S", 2), ("E", 2)]), 4);
        let order = RenyiOrder::new(2.0).unwrap();
        let cfg = OptimizerConfig {
            restarts: 4,
            ..Default::default()
        };
        let r = inf_cond_entropy_down(&n, &["S"], &["E"], order, &cfg, &[]).unwrap();
        for s in 0..20 {
            let mut rng = rng_from_seed(100 + s);
            let w = random_density(&mut rng, l(&[("R", 2)]));
            let v = cond_entropy_down_at_input(&n, &["S"], &["E"], w.matrix(), order).unwrap();
            assert!(r.value <= v + 1e-9);
        }
        let at = cond_entropy_down_at_input(&n, &["S"], &["E"], &r.input, order).unwrap();
        assert!((at - r.value).abs() < 1e-6);
    }
}
