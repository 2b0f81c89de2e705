//! Unconstrained local minimization for the searches over channel inputs.
//!
//! These searches only ever produce estimates (a sup from below, an inf from
//! above), so a plain BFGS with backtracking is all that is needed.

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_iters: usize,
    /// Stop once the gradient's max-norm drops below this.
    pub grad_tol: f64,
    /// Stop after three consecutive steps improving `f` by less than this (absolute).
    pub f_tol: f64,
    /// Largest Euclidean step length tried by the line search.
    pub max_step: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_iters: 300,
            grad_tol: 1e-9,
            f_tol: 1e-12,
            max_step: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    /// The gradient or progress criterion was met before `max_iters`.
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Central-difference gradient of `f` at `x`; `None` if any probe fails.
pub fn fd_gradient(f: &mut impl FnMut(&[f64]) -> Option<f64>, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut y = x.to_vec();
    for i in 0..x.len() {
        let step = h * (1.0 + x[i].abs());
        y[i] = x[i] + step;
        let fp = f(&y)?;
        y[i] = x[i] - step;
        let fm = f(&y)?;
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * step);
    }
    Some(g)
}

/// BFGS on `f`, which returns the value and gradient or `None` where undefined.
pub fn minimize_bfgs(
    mut f: impl FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
    x0: Vec<f64>,
    opts: &SearchOptions,
) -> Option<SearchOutcome> {
    let n = x0.len();
    let (mut fx, mut g) = f(&x0)?;
    let mut x = x0;
    if n == 0 {
        return Some(SearchOutcome {
            x,
            f: fx,
            iterations: 0,
            converged: true,
        });
    }
    // inverse Hessian approximation, row-major
    let mut h = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
    };
    reset(&mut h);
    let mut small_steps = 0;
    for it in 0..opts.max_iters {
        if g.iter().all(|v| v.abs() <= opts.grad_tol) {
            return Some(SearchOutcome {
                x,
                f: fx,
                iterations: it,
                converged: true,
            });
        }
        let mut d: Vec<f64> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&d, &g);
        if slope >= 0.0 {
            reset(&mut h);
            d = g.iter().map(|v| -v).collect();
            slope = dot(&d, &g);
        }
        let dn = norm(&d);
        let mut t = if dn > opts.max_step { opts.max_step / dn } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            if let Some((fn_, gn)) = f(&xn) {
                if fn_.is_finite() && fn_ <= fx + 1e-4 * t * slope {
                    accepted = Some((xn, fn_, gn));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            // no descent at machine resolution: a stationary point for our purposes
            let converged = g.iter().all(|v| v.abs() <= opts.grad_tol.sqrt());
            return Some(SearchOutcome {
                x,
                f: fx,
                iterations: it,
                converged,
            });
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-14 * norm(&s) * norm(&y) {
            let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            let c = (1.0 + yhy * rho) * rho;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let improvement = fx - fn_;
        x = xn;
        fx = fn_;
        g = gn;
        if improvement <= opts.f_tol {
            small_steps += 1;
            if small_steps >= 3 {
                return Some(SearchOutcome {
                    x,
                    f: fx,
                    iterations: it + 1,
                    converged: true,
                });
            }
        } else {
            small_steps = 0;
        }
    }
    Some(SearchOutcome {
        x,
        f: fx,
        iterations: opts.max_iters,
        converged: false,
    })
}

/// BFGS with central-difference gradients.
pub fn minimize_fd(
    mut f: impl FnMut(&[f64]) -> Option<f64>,
    x0: Vec<f64>,
    h: f64,
    opts: &SearchOptions,
) -> Option<SearchOutcome> {
    minimize_bfgs(
        |x| {
            let v = f(x)?;
            let g = fd_gradient(&mut f, x, h)?;
            Some((v, g))
        },
        x0,
        opts,
    )
}
