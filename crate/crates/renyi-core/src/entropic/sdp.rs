//! Dense primal-dual interior-point solver for small complex semidefinite programs.
//!
//! Primal: `min ⟨C,X⟩  s.t. ⟨A_i,X⟩ = b_i, X ⪰ 0`.
//! Dual:   `max b·y    s.t. S = C − Σ y_i A_i ⪰ 0`.
//!
//! Infeasible path-following with the HKM search direction and a Mehrotra
//! predictor-corrector step.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::MAX_TOTAL_DIM;
use crate::linalg::{self, eigh, Mat};

pub const SDP_GAP_TOL: f64 = 1e-7;
pub const SDP_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub c: Mat,
    pub a: Vec<Mat>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SdpStatus {
    Optimal,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal − dual|`.
    pub gap: f64,
    pub x: Mat,
    pub y: Vec<f64>,
    pub s: Mat,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }
}

const MAX_ITERS: usize = 120;

struct Iterate {
    x: Mat,
    y: DVector<f64>,
    s: Mat,
}

fn apply_a(a: &[Mat], x: &Mat) -> DVector<f64> {
    DVector::from_iterator(a.len(), a.iter().map(|ai| linalg::inner_re(ai, x)))
}

fn apply_at(a: &[Mat], y: &DVector<f64>, n: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    for (ai, yi) in a.iter().zip(y.iter()) {
        m += ai.scale(*yi);
    }
    m
}

/// Largest step in `[0, ∞)` keeping `m + t·d` PSD, given `m ≻ 0`.
fn max_step(m: &Mat, d: &Mat) -> f64 {
    let e = eigh(m);
    let w = e.apply(|v| 1.0 / v.max(1e-300).sqrt());
    let lam = eigh(&(&w * d * &w)).min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

fn sym(m: &Mat) -> Mat {
    linalg::hermitize(m)
}

fn solve_spd(m: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch.solve(rhs));
    }
    m.clone().lu().solve(rhs)
}

/// Solves the program; `Optimal` is returned only with gap ≤ 1e−7 and residuals ≤ 1e−8.
pub fn solve_sdp(p: &SdpProblem) -> Result<SdpSolution> {
    let n = p.c.nrows();
    let m = p.a.len();
    if n == 0 || n > MAX_TOTAL_DIM {
        return Err(Error::DimensionLimit(n));
    }
    if p.b.len() != m || p.a.iter().any(|a| a.nrows() != n || a.ncols() != n) {
        return Err(Error::InvalidArgument("inconsistent SDP data".into()));
    }
    let b = DVector::from_vec(p.b.clone());
    let c = sym(&p.c);
    let a: Vec<Mat> = p.a.iter().map(sym).collect();
    let nb = b.norm();
    let nc = c.norm();
    let nf = n as f64;
    let amax = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let xi = (10.0f64).max(nf.sqrt()).max(
        a.iter()
            .zip(b.iter())
            .map(|(ai, bi)| nf * (1.0 + bi.abs()) / (1.0 + ai.norm()))
            .fold(0.0, f64::max),
    );
    let eta = (10.0f64).max(nf.sqrt()).max(amax).max(nc);
    let mut it = Iterate {
        x: linalg::identity(n).scale(xi),
        y: DVector::zeros(m),
        s: linalg::identity(n).scale(eta),
    };

    let mut best: Option<SdpSolution> = None;
    for iter in 0..MAX_ITERS {
        let rp = &b - apply_a(&a, &it.x);
        let rd = &c - &it.s - apply_at(&a, &it.y, n);
        let pobj = linalg::inner_re(&c, &it.x);
        let dobj = b.dot(&it.y);
        let pres = rp.norm();
        let dres = rd.norm();
        let gap = (pobj - dobj).abs();
        let cand = SdpSolution {
            status: SdpStatus::Optimal,
            primal_value: pobj,
            dual_value: dobj,
            gap,
            x: it.x.clone(),
            y: it.y.iter().copied().collect(),
            s: it.s.clone(),
            primal_residual: pres,
            dual_residual: dres,
            iterations: iter,
        };
        let scale = 1.0 + pobj.abs().max(dobj.abs());
        let complementarity = linalg::inner_re(&it.x, &it.s);
        let converged =
            gap <= 1e-11 * scale && complementarity <= 1e-11 * scale && pres <= 1e-11 * (1.0 + nb) && dres <= 1e-11 * (1.0 + nc);
        let better = match &best {
            None => true,
            Some(bs) => {
                let merit = |s: &SdpSolution| s.gap.max(s.primal_residual).max(s.dual_residual);
                merit(&cand) <= merit(bs)
            }
        };
        if better {
            best = Some(cand);
        }
        if converged {
            break;
        }
        let xn = it.x.norm();
        let yn = it.y.norm();
        if xn > 1e12 && pobj < -1e10 {
            return Err(Error::Unbounded(format!("primal objective {pobj:.3e} with |X| = {xn:.3e}")));
        }
        if yn > 1e12 && dobj > 1e10 {
            return Err(Error::Infeasible(format!("dual objective {dobj:.3e} with |y| = {yn:.3e}")));
        }

        let mu = complementarity / nf;
        let sinv = {
            let e = eigh(&it.s);
            e.apply(|v| 1.0 / v)
        };
        // Schur complement M_ij = Re tr(A_i X A_j S⁻¹)
        let g: Vec<Mat> = a.iter().map(|aj| &it.x * aj * &sinv).collect();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let v = linalg::inner_re(&a[i], &g[j]);
                schur[(i, j)] = v;
                schur[(j, i)] = v;
            }
        }
        let xrd = sym(&(&it.x * &rd * &sinv));
        let direction = |sigma_mu: f64, corr: Option<&Mat>| -> Option<(Mat, DVector<f64>, Mat)> {
            let mut target = sinv.scale(sigma_mu) - &it.x - &xrd;
            if let Some(cr) = corr {
                target -= cr;
            }
            let h = &rp - apply_a(&a, &target);
            let dy = solve_spd(&schur, &h)?;
            let ds = &rd - apply_at(&a, &dy, n);
            let mut dx = sinv.scale(sigma_mu) - &it.x - sym(&(&it.x * &ds * &sinv));
            if let Some(cr) = corr {
                dx -= cr;
            }
            Some((sym(&dx), dy, sym(&ds)))
        };
        let Some((dxa, dya, dsa)) = direction(0.0, None) else {
            break;
        };
        let ap = (1.0f64).min(max_step(&it.x, &dxa));
        let ad = (1.0f64).min(max_step(&it.s, &dsa));
        let mu_aff = linalg::inner_re(&(&it.x + dxa.scale(ap)), &(&it.s + dsa.scale(ad))) / nf;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);
        let corr = sym(&(&dxa * &dsa * &sinv));
        let Some((dx, dy, ds)) = direction(sigma * mu, Some(&corr)) else {
            break;
        };
        let _ = dya;
        let tau = if iter < 5 { 0.9 } else { 0.98 };
        let ap = (1.0f64).min(tau * max_step(&it.x, &dx));
        let ad = (1.0f64).min(tau * max_step(&it.s, &ds));
        if !(ap > 1e-14 && ad > 1e-14) {
            break;
        }
        it.x = sym(&(&it.x + dx.scale(ap)));
        it.y += dy.scale(ad);
        it.s = sym(&(&it.s + ds.scale(ad)));
    }
    let sol = best.ok_or_else(|| Error::NumericalFailure("no iterate produced".into()))?;
    if sol.gap <= SDP_GAP_TOL && sol.primal_residual <= SDP_RESIDUAL_TOL && sol.dual_residual <= SDP_RESIDUAL_TOL {
        Ok(sol)
    } else {
        Err(Error::NumericalFailure(format!(
            "SDP stopped with gap {:.3e}, primal residual {:.3e}, dual residual {:.3e} after {} iterations",
            sol.gap, sol.primal_residual, sol.dual_residual, sol.iterations
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, diag};

    /// `max ⟨ρ, X⟩` over `X ⪰ 0`, `tr_A X = I_B` for a trivial `A`: minimize ⟨−ρ,X⟩ with X = I.
    #[test]
    fn componentwise_minimum_trace() {
        // min tr σ s.t. σ ⪰ diag(0.3, 0.7): dual of max ⟨ρ,X⟩ with X = I
        let rho = diag(&[0.3, 0.7]);
        let basis = linalg::hermitian_basis(2);
        let b: Vec<f64> = basis.iter().map(|e| linalg::trace_re(e)).collect();
        let sol = solve_sdp(&SdpProblem { c: -rho, a: basis, b }).unwrap();
        assert!((sol.value() + 1.0).abs() < 1e-8);
        assert!(sol.gap <= SDP_GAP_TOL);
    }

    #[test]
    fn small_lp_against_enumeration() {
        // min x0 + 2 x1 + 3 x2 on the probability simplex (diagonal X), optimum 1
        let c_ = diag(&[1.0, 2.0, 3.0]);
        let mut a = vec![linalg::identity(3)];
        let mut b = vec![1.0];
        // force diagonality: off-diagonal real and imaginary parts vanish
        for (k, e) in linalg::hermitian_basis(3).into_iter().enumerate() {
            if k >= 3 {
                a.push(e);
                b.push(0.0);
            }
        }
        let sol = solve_sdp(&SdpProblem { c: c_, a, b }).unwrap();
        assert!((sol.value() - 1.0).abs() < 1e-8);
        assert!((sol.x[(0, 0)] - c(1.0)).norm() < 1e-6);
    }
}
