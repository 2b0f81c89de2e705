//! Minimizes `σ ↦ D_α(ρ_XB ‖ τ_X ⊗ σ_B)` over density operators σ_B.
//!
//! The objective is `f(σ) = ln(Q(σ)/tr ρ)/(α−1)` with
//! `Q(σ) = tr[(Z ρ Z)^α]`, `Z = τ^{γ/2} ⊗ σ^{γ/2}`, `γ = (1−α)/α`.
//! `Q` is convex in σ for α > 1 and concave for ½ ≤ α < 1, so the
//! Frank-Wolfe gap of `f` bounds the distance to the optimum and serves as
//! the stopping certificate.
//!
//! B is first compressed onto the support of ρ_B, where the minimizer lives.
//! The search is BFGS on the scale-invariant extension `f(σ/tr σ)` in the
//! congruence coordinates `σ = P Y P`, `P = σ_c^{1/2}`, re-centred at the
//! current iterate every few dozen steps.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, divided_differences, eigh, Eigh, Mat, EIG_FLOOR, LN2};

use super::OptimizerConfig;

const RECENTER_EVERY: usize = 40;

#[derive(Clone, Debug)]
pub struct SandwichProblem {
    /// `ρ` on `X ⊗ R`, with R the support of ρ_B.
    rho: Mat,
    dx: usize,
    /// Columns span the support of ρ_B (`db × r`).
    iso: Mat,
    alpha: f64,
    gamma: f64,
    tau_half: Mat,
    trace_rho: f64,
    /// ρ is not supported where the divergence is finite.
    infinite: bool,
}

#[derive(Clone, Debug)]
pub struct SigmaOutcome {
    pub sigma: Mat,
    /// Optimal divergence in bits.
    pub divergence: f64,
    /// Frank-Wolfe gap converted to bits.
    pub residual: f64,
    pub iterations: usize,
}

struct Eval {
    q: f64,
    /// `tr_X[(ZρZ)^α]`.
    t: Mat,
    sig: Eigh,
}

/// Objective data at a normalized σ.
struct Point {
    sigma: Mat,
    f: f64,
    /// Gradient of `f` at σ.
    grad: Mat,
}

impl Point {
    /// Gradient of `σ ↦ f(σ/tr σ)` at `s·σ`.
    fn scale_free_grad(&self, s: f64) -> Mat {
        let lin = linalg::inner_re(&self.grad, &self.sigma);
        let n = self.sigma.nrows();
        (&self.grad - linalg::identity(n).scale(lin)).scale(1.0 / s)
    }

    /// Frank-Wolfe gap of `f` in nats.
    fn gap(&self) -> f64 {
        (linalg::inner_re(&self.grad, &self.sigma) - eigh(&self.grad).min()).max(0.0)
    }
}

impl SandwichProblem {
    /// `rho` on `X ⊗ B` (X first), `tau` on X.
    pub fn new(rho: Mat, dx: usize, db: usize, tau: &Mat, alpha: f64) -> Result<Self> {
        if !(alpha >= 0.5 && alpha.is_finite() && alpha != 1.0) {
            return Err(Error::UnsupportedOrder(format!(
                "optimizer needs alpha in [1/2,1)∪(1,∞), got {alpha}"
            )));
        }
        if rho.nrows() != dx * db || tau.nrows() != dx {
            return Err(Error::Layout("sandwich problem dimensions disagree".into()));
        }
        let trace_rho = linalg::trace_re(&rho);
        if trace_rho <= 0.0 {
            return Err(Error::ZeroState);
        }
        let gamma = (1.0 - alpha) / alpha;
        let te = eigh(tau);
        let tau_half = te.apply_on_support(|x| x.powf(0.5 * gamma));
        let covered = linalg::inner_re(&linalg::kron(&te.support_projector(), &linalg::identity(db)), &rho);
        let infinite = if alpha > 1.0 {
            trace_rho - covered > EIG_FLOOR * trace_rho
        } else {
            covered <= EIG_FLOOR * trace_rho
        };

        let rb = eigh(&ptrace_first(&rho, dx, db));
        let fl = rb.floor();
        let cols: Vec<usize> = (0..db).filter(|&k| rb.values[k] > fl).collect();
        let iso = Mat::from_fn(db, cols.len(), |i, j| rb.vectors[(i, cols[j])]);
        let lift = linalg::kron(&linalg::identity(dx), &iso);
        let rho = linalg::hermitize(&(lift.adjoint() * rho * &lift));
        Ok(SandwichProblem {
            rho,
            dx,
            iso,
            alpha,
            gamma,
            tau_half,
            trace_rho,
            infinite,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn r(&self) -> usize {
        self.iso.ncols()
    }

    fn eval(&self, sigma: &Mat) -> Eval {
        let sig = eigh(sigma);
        let g2 = 0.5 * self.gamma;
        let s_half = sig.apply(|x| x.max(f64::MIN_POSITIVE).powf(g2));
        let z = linalg::kron(&self.tau_half, &s_half);
        let xm = &z * &self.rho * &z;
        let e = eigh(&xm);
        let a = self.alpha;
        let q: f64 = e.values.iter().map(|&v| v.max(0.0).powf(a)).sum();
        let xa = e.apply(|v| v.max(0.0).powf(a));
        let t = ptrace_first(&xa, self.dx, self.r());
        Eval { q, t, sig }
    }

    /// Euclidean gradient of `Q` at σ ≻ 0.
    fn gradient_q(&self, ev: &Eval) -> Mat {
        let u = &ev.sig.vectors;
        let lam: Vec<f64> = ev.sig.values.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect();
        let tt = u.adjoint() * &ev.t * u;
        let gam = divided_differences(&lam, self.gamma);
        let w: Vec<f64> = lam.iter().map(|&l| l.powf(-0.5 * self.gamma)).collect();
        let n = lam.len();
        let g = Mat::from_fn(n, n, |i, j| tt[(i, j)] * (self.alpha * gam[(i, j)] * w[i] * w[j]));
        linalg::hermitize(&(u * g * u.adjoint()))
    }

    /// Objective at `sigma / tr sigma`; `None` outside the open cone.
    fn point(&self, sigma: &Mat) -> Option<Point> {
        let s = linalg::trace_re(sigma);
        if !(s > 0.0) {
            return None;
        }
        let sigma = linalg::hermitize(&sigma.scale(1.0 / s));
        let ev = self.eval(&sigma);
        if !(ev.sig.min() > 1e-15 * ev.sig.max()) || !(ev.q > 0.0) || !ev.q.is_finite() {
            return None;
        }
        let am1 = self.alpha - 1.0;
        let f = (ev.q / self.trace_rho).ln() / am1;
        let grad = self.gradient_q(&ev).scale(1.0 / (ev.q * am1));
        Some(Point { sigma, f, grad })
    }

    /// Runs the optimizer from `init` (defaults to ρ_B); `init` is on B.
    pub fn solve(&self, cfg: &OptimizerConfig, init: Option<&Mat>) -> Result<SigmaOutcome> {
        let r = self.r();
        if self.infinite {
            let s = self.lift(&linalg::identity(r).scale(1.0 / r as f64));
            return Ok(SigmaOutcome {
                sigma: s,
                divergence: f64::INFINITY,
                residual: 0.0,
                iterations: 0,
            });
        }
        let mix = linalg::identity(r).scale(1.0 / r as f64);
        let start = init
            .map(|m| {
                let m = linalg::hermitize(&(self.iso.adjoint() * m * &self.iso));
                let t = linalg::trace_re(&m);
                if !(t > 1e-12) {
                    return mix.clone();
                }
                let m = m.scale(1.0 / t);
                let e = eigh(&m);
                if e.min() <= 1e-8 * e.max() {
                    linalg::hermitize(&(m.scale(1.0 - 1e-6) + mix.scale(1e-6)))
                } else {
                    m
                }
            })
            .unwrap_or_else(|| ptrace_first(&self.rho, self.dx, r).scale(1.0 / self.trace_rho));
        let mut pt = match self.point(&start) {
            Some(p) => p,
            None => self
                .point(&mix)
                .ok_or_else(|| Error::NumericalFailure("objective undefined at the start".into()))?,
        };
        if r == 1 {
            return Ok(self.outcome(&pt, 0.0, 0));
        }

        let tol = cfg.tol_objective * LN2;
        let noise = 1e-13 * (1.0 + pt.f.abs()) + 1e-13 / (self.alpha - 1.0).abs();
        let n = r * r;
        let mut iters = 0;
        let mut idle_rounds = 0;
        'outer: while iters < cfg.max_iters {
            let round_start = pt.f;
            let p_half = eigh(&pt.sigma).apply(|x| x.max(0.0).sqrt());
            let mut y_mat = linalg::identity(r);
            let mut ytr = 1.0;
            let coords_grad = |p: &Point, ytr: f64| -> Vec<f64> {
                linalg::hermitian_coords(&linalg::hermitize(&(&p_half * p.scale_free_grad(ytr) * &p_half)))
            };
            let mut g = coords_grad(&pt, 1.0);
            let mut h = DMatrix::<f64>::identity(n, n);
            let mut scaled = false;
            for _ in 0..RECENTER_EVERY {
                let gap = pt.gap();
                if gap <= tol {
                    return Ok(self.outcome(&pt, gap / LN2, iters));
                }
                if iters >= cfg.max_iters {
                    break 'outer;
                }
                iters += 1;
                let gv = nalgebra::DVector::from_column_slice(&g);
                let mut d = -(&h * &gv);
                if d.dot(&gv) >= 0.0 {
                    h = DMatrix::identity(n, n);
                    d = -gv.clone();
                }
                let dm = linalg::hermitian_from_coords(r, d.as_slice());
                let slope = d.dot(&gv);
                let mut t = 1.0f64.min(0.9 * max_psd_step(&y_mat, &dm));
                if !scaled {
                    t = t.min(0.5 * ytr / d.norm().max(1e-300));
                }
                let mut accepted = None;
                for _ in 0..50 {
                    let cand = linalg::hermitize(&(&y_mat + dm.scale(t)));
                    let sig = &p_half * &cand * &p_half;
                    if let Some(np) = self.point(&sig) {
                        let ntr = linalg::trace_re(&cand);
                        let g_new = coords_grad(&np, ntr);
                        // Armijo, or its derivative form once values sit in rounding noise
                        let armijo = np.f <= pt.f + 1e-4 * t * slope;
                        let dphi: f64 = g_new.iter().zip(d.iter()).map(|(a, b)| a * b).sum();
                        let approx = np.f <= pt.f + noise && dphi <= -0.8 * slope;
                        if armijo || approx {
                            accepted = Some((cand, np, ntr, g_new));
                            break;
                        }
                    }
                    t *= 0.5;
                }
                let Some((cand, np, ntr, g_new)) = accepted else {
                    break;
                };
                let sv = d.scale(t);
                let yv = nalgebra::DVector::from_column_slice(&g_new) - &gv;
                let sy = sv.dot(&yv);
                if sy > 1e-14 * sv.norm() * yv.norm() {
                    if !scaled {
                        h = DMatrix::identity(n, n).scale(sy / yv.dot(&yv));
                        scaled = true;
                    }
                    let rho_k = 1.0 / sy;
                    let hy = &h * &yv;
                    let yhy = yv.dot(&hy);
                    h += (&sv * sv.transpose()).scale((1.0 + rho_k * yhy) * rho_k)
                        - (&hy * sv.transpose() + &sv * hy.transpose()).scale(rho_k);
                }
                y_mat = cand;
                ytr = ntr;
                pt = np;
                g = g_new;
            }
            if round_start - pt.f <= noise {
                idle_rounds += 1;
                if idle_rounds >= 2 {
                    break;
                }
            } else {
                idle_rounds = 0;
            }
        }
        let gap = pt.gap();
        let residual = gap / LN2;
        if residual <= cfg.stall_tolerance() {
            return Ok(self.outcome(&pt, residual, iters));
        }
        Err(Error::StalledOptimizer {
            best: pt.f / LN2,
            residual,
            iters,
        })
    }

    /// Plain Frank-Wolfe with exact line search on each segment towards the
    /// linear-minimization vertex. Sublinear; kept as a reference for [`Self::solve`].
    pub fn solve_frank_wolfe(&self, max_iters: usize, tol_bits: f64) -> Result<SigmaOutcome> {
        let r = self.r();
        if self.infinite {
            return self.solve(&OptimizerConfig::default(), None);
        }
        let start = ptrace_first(&self.rho, self.dx, r).scale(1.0 / self.trace_rho);
        let mut pt = self
            .point(&start)
            .ok_or_else(|| Error::NumericalFailure("objective undefined at ρ_B".into()))?;
        for iter in 0..max_iters {
            let gap = pt.gap();
            if gap / LN2 <= tol_bits || r == 1 {
                return Ok(self.outcome(&pt, gap / LN2, iter));
            }
            let v = eigh(&pt.grad).vectors.column(0).into_owned();
            let dir = &v * v.adjoint() - &pt.sigma;
            // derivative bisection; the sign of f' matches that of the convex sign·Q
            let slope = |p: &Point| linalg::inner_re(&p.grad, &dir);
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let mut best: Option<Point> = None;
            for _ in 0..60 {
                let t = 0.5 * (lo + hi);
                match self.point(&(&pt.sigma + dir.scale(t))) {
                    Some(np) => {
                        if slope(&np) < 0.0 {
                            lo = t;
                        } else {
                            hi = t;
                        }
                        if best.as_ref().map_or(true, |b| np.f < b.f) {
                            best = Some(np);
                        }
                    }
                    None => hi = t,
                }
            }
            match best {
                Some(np) if np.f <= pt.f => pt = np,
                _ => break,
            }
        }
        let residual = pt.gap() / LN2;
        if residual <= tol_bits {
            return Ok(self.outcome(&pt, residual, max_iters));
        }
        Err(Error::StalledOptimizer {
            best: pt.f / LN2,
            residual,
            iters: max_iters,
        })
    }

    fn lift(&self, s: &Mat) -> Mat {
        linalg::hermitize(&(&self.iso * s * self.iso.adjoint()))
    }

    fn outcome(&self, pt: &Point, residual: f64, iterations: usize) -> SigmaOutcome {
        SigmaOutcome {
            sigma: self.lift(&pt.sigma),
            divergence: pt.f / LN2,
            residual,
            iterations,
        }
    }
}

/// `tr_X` of a matrix on `X ⊗ B`.
pub fn ptrace_first(m: &Mat, dx: usize, db: usize) -> Mat {
    let mut out = Mat::zeros(db, db);
    for x in 0..dx {
        out += m.view((x * db, x * db), (db, db));
    }
    out
}

/// `tr_B` of a matrix on `X ⊗ B`.
pub fn ptrace_second(m: &Mat, dx: usize, db: usize) -> Mat {
    Mat::from_fn(dx, dx, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
}

/// Largest `t` with `y + tΔ ⪰ 0`, given y ≻ 0.
fn max_psd_step(y: &Mat, dir: &Mat) -> f64 {
    let e = eigh(y);
    let w = e.apply(|v| 1.0 / v.max(1e-300).sqrt());
    let lam = eigh(&(&w * dir * &w)).min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}
