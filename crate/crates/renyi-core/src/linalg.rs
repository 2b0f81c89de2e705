//! Dense Hermitian linear algebra on `DMatrix<Complex64>`.
//!
//! Everything here works on bare matrices. The register-aware wrappers live in
//! [`crate::operator`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

/// Relative eigenvalue floor that defines supports and pseudoinverses.
pub const EIG_FLOOR: f64 = 1e-10;

pub const LN2: f64 = std::f64::consts::LN_2;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(n: usize, m: usize) -> Mat {
    Mat::zeros(n, m)
}

pub fn diag(values: &[f64]) -> Mat {
    let n = values.len();
    let mut m = Mat::zeros(n, n);
    for (i, v) in values.iter().enumerate() {
        m[(i, i)] = c(*v);
    }
    m
}

pub fn dagger(m: &Mat) -> Mat {
    m.adjoint()
}

pub fn hermitize(m: &Mat) -> Mat {
    let mut h = m + m.adjoint();
    h.scale_mut(0.5);
    h
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_defect(m: &Mat) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn trace(m: &Mat) -> C64 {
    m.diagonal().iter().sum()
}

pub fn trace_re(m: &Mat) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `Re tr(a b)`; for Hermitian arguments this is the Hilbert-Schmidt inner product.
pub fn inner_re(a: &Mat, b: &Mat) -> f64 {
    let (n, m) = a.shape();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..m {
            let x = a[(i, j)];
            let y = b[(j, i)];
            s += x.re * y.re - x.im * y.im;
        }
    }
    s
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Frobenius norm of a difference.
pub fn frob_dist(a: &Mat, b: &Mat) -> f64 {
    (a - b).norm()
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Deterministic Hermitian eigendecomposition: eigenvalues ascending, each
/// eigenvector scaled so its largest-modulus entry is real and positive.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

pub fn eigh(m: &Mat) -> Eigh {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: vec![],
            vectors: Mat::zeros(0, 0),
        };
    }
    let se = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]).then(i.cmp(&j)));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        values.push(se.eigenvalues[i]);
        let col = se.eigenvectors.column(i);
        let mut best = 0;
        let mut best_abs = -1.0;
        for r in 0..n {
            let a = col[r].norm();
            if a > best_abs * (1.0 + 1e-12) {
                best = r;
                best_abs = a;
            }
        }
        let phase = if best_abs > 0.0 { col[best].conj() / best_abs } else { c(1.0) };
        for r in 0..n {
            vectors[(r, k)] = col[r] * phase;
        }
    }
    Eigh { values, vectors }
}

impl Eigh {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Eigenvalues at or below this are treated as zero.
    pub fn floor(&self) -> f64 {
        EIG_FLOOR * self.spectral_norm()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U†`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Mat {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for k in 0..n {
            let fk = f(self.values[k]);
            for r in 0..n {
                scaled[(r, k)] *= fk;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Function of a PSD operator with everything at or below the floor mapped to zero.
    pub fn apply_on_support(&self, f: impl Fn(f64) -> f64) -> Mat {
        let fl = self.floor();
        self.apply(|x| if x > fl { f(x) } else { 0.0 })
    }

    pub fn rank(&self) -> usize {
        let fl = self.floor();
        self.values.iter().filter(|&&v| v > fl).count()
    }

    pub fn support_projector(&self) -> Mat {
        self.apply_on_support(|_| 1.0)
    }

    pub fn reconstruct(&self) -> Mat {
        self.apply(|x| x)
    }
}

/// Support projector of a PSD matrix.
pub fn support_projector(m: &Mat) -> Mat {
    eigh(m).support_projector()
}

/// `m^p` on the support; `None` if `p < 0`, `pseudo` is false and `m` is singular.
pub fn psd_power(m: &Mat, p: f64, pseudo: bool) -> Option<Mat> {
    let e = eigh(m);
    if p < 0.0 && !pseudo && e.rank() < e.dim() {
        return None;
    }
    if p == 0.0 {
        return Some(e.support_projector());
    }
    Some(e.apply_on_support(|x| x.powf(p)))
}

pub fn psd_sqrt(m: &Mat) -> Mat {
    eigh(m).apply_on_support(f64::sqrt)
}

pub fn psd_inv_sqrt(m: &Mat) -> Mat {
    eigh(m).apply_on_support(|x| 1.0 / x.sqrt())
}

/// Base-2 logarithm on the support (zero on the kernel).
pub fn psd_log2(m: &Mat) -> Mat {
    eigh(m).apply_on_support(f64::log2)
}

/// `Σ λ log₂ λ` over the positive spectrum.
pub fn xlogx_trace(m: &Mat) -> f64 {
    let e = eigh(m);
    let fl = e.floor();
    e.values.iter().filter(|&&v| v > fl).map(|&v| v * v.log2()).sum()
}

/// Von Neumann entropy in bits of a (possibly subnormalized) PSD matrix, `−tr m log m`.
pub fn von_neumann(m: &Mat) -> f64 {
    -xlogx_trace(m)
}

/// Schatten-1 norm of an arbitrary square matrix.
pub fn trace_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().sum()
}

/// Trace norm of a Hermitian matrix via its spectrum.
pub fn trace_norm_herm(m: &Mat) -> f64 {
    eigh(m).values.iter().map(|v| v.abs()).sum()
}

/// Column vector as a rank-one projector `|v⟩⟨v|`.
pub fn outer(v: &DVector<C64>) -> Mat {
    v * v.adjoint()
}

pub fn basis_vector(n: usize, k: usize) -> DVector<C64> {
    let mut v = DVector::zeros(n);
    v[k] = c(1.0);
    v
}

/// Orthonormal basis of Hermitian `d×d` matrices (real span), diagonal elements first.
pub fn hermitian_basis(d: usize) -> Vec<Mat> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        let mut m = Mat::zeros(d, d);
        m[(k, k)] = c(1.0);
        out.push(m);
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = Mat::zeros(d, d);
            m[(j, k)] = c(s);
            m[(k, j)] = c(s);
            out.push(m);
            let mut m = Mat::zeros(d, d);
            m[(j, k)] = C64::new(0.0, -s);
            m[(k, j)] = C64::new(0.0, s);
            out.push(m);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(m: &Mat) -> Vec<f64> {
    let d = m.nrows();
    let r2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(m[(k, k)].re);
    }
    for j in 0..d {
        for k in (j + 1)..d {
            let z = 0.5 * (m[(j, k)] + m[(k, j)].conj());
            out.push(r2 * z.re);
            out.push(-r2 * z.im);
        }
    }
    out
}

/// Inverse of [`hermitian_coords`].
pub fn hermitian_from_coords(d: usize, coords: &[f64]) -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = Mat::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = c(coords[k]);
    }
    let mut idx = d;
    for j in 0..d {
        for k in (j + 1)..d {
            let z = C64::new(s * coords[idx], -s * coords[idx + 1]);
            m[(j, k)] = z;
            m[(k, j)] = z.conj();
            idx += 2;
        }
    }
    m
}

/// Fréchet derivative kernel of `x ↦ x^p` at a diagonal point: the first divided differences.
pub fn divided_differences(values: &[f64], p: f64) -> DMatrix<f64> {
    let n = values.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (values[i], values[j]);
            g[(i, j)] = if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300) {
                let m = 0.5 * (a + b);
                p * m.powf(p - 1.0)
            } else {
                (a.powf(p) - b.powf(p)) / (a - b)
            };
        }
    }
    g
}
