//! Register-aware Hermitian operators and density operators.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::layout::{RegisterLayout, MAX_TOTAL_DIM};
use crate::linalg::{self, c, eigh, Mat, C64};

pub const HERMITIAN_TOL: f64 = 1e-9;
pub const PSD_TOL: f64 = 1e-9;
pub const TRACE_TOL: f64 = 1e-9;
/// Off-diagonal mass allowed on a register that is supposed to be classical.
pub const CLASSICAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct QOperator {
    layout: RegisterLayout,
    matrix: Mat,
    hermitian_tol: f64,
}

impl QOperator {
    /// Validates shape and Hermiticity, then stores the Hermitian part.
    pub fn new(layout: RegisterLayout, matrix: Mat) -> Result<Self> {
        Self::with_tol(layout, matrix, HERMITIAN_TOL)
    }

    pub fn with_tol(layout: RegisterLayout, matrix: Mat, hermitian_tol: f64) -> Result<Self> {
        let n = layout.total_dim();
        if n > MAX_TOTAL_DIM {
            return Err(Error::DimensionLimit(n));
        }
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Layout(format!(
                "matrix is {}x{} but layout {} has dimension {}",
                matrix.nrows(),
                matrix.ncols(),
                layout,
                n
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NumericalFailure("non-finite matrix entry".into()));
        }
        let defect = linalg::hermitian_defect(&matrix);
        if defect > hermitian_tol {
            return Err(Error::NotHermitian(defect));
        }
        Ok(QOperator {
            layout,
            matrix: linalg::hermitize(&matrix),
            hermitian_tol,
        })
    }

    /// Internal constructor for matrices that are Hermitian by construction.
    pub(crate) fn raw(layout: RegisterLayout, matrix: Mat) -> Self {
        debug_assert_eq!(matrix.nrows(), layout.total_dim());
        QOperator {
            layout,
            matrix: linalg::hermitize(&matrix),
            hermitian_tol: HERMITIAN_TOL,
        }
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        QOperator::raw(layout, linalg::identity(n))
    }

    pub fn diagonal(layout: RegisterLayout, values: &[f64]) -> Result<Self> {
        if values.len() != layout.total_dim() {
            return Err(Error::Layout("diagonal length does not match layout".into()));
        }
        QOperator::new(layout, linalg::diag(values))
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    pub fn hermitian_tol(&self) -> f64 {
        self.hermitian_tol
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh(&self.matrix).values
    }

    pub fn scale(&self, t: f64) -> QOperator {
        QOperator::raw(self.layout.clone(), self.matrix.scale(t))
    }

    /// `self + other`, aligning `other` to this layout first.
    pub fn add(&self, other: &QOperator) -> Result<QOperator> {
        let o = other.reorder(&self.layout)?;
        Ok(QOperator::raw(self.layout.clone(), &self.matrix + o.matrix()))
    }

    pub fn sub(&self, other: &QOperator) -> Result<QOperator> {
        self.add(&other.scale(-1.0))
    }

    /// Same operator expressed in another ordering of the same registers.
    pub fn reorder(&self, target: &RegisterLayout) -> Result<QOperator> {
        if &self.layout == target {
            return Ok(self.clone());
        }
        let p = self.layout.permutation_to(target)?;
        let n = p.len();
        let m = Mat::from_fn(n, n, |i, j| self.matrix[(p[i], p[j])]);
        Ok(QOperator {
            layout: target.clone(),
            matrix: m,
            hermitian_tol: self.hermitian_tol,
        })
    }

    /// Same operator with registers in lexicographic label order.
    pub fn canonical(&self) -> QOperator {
        self.reorder(&self.layout.canonical())
            .expect("canonical layout holds the same registers")
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<QOperator> {
        Ok(QOperator {
            layout: self.layout.relabel(from, to)?,
            ..self.clone()
        })
    }

    /// Largest entrywise difference after aligning layouts.
    pub fn max_abs_diff(&self, other: &QOperator) -> Result<f64> {
        let o = other.reorder(&self.layout)?;
        Ok(linalg::max_abs_diff(&self.matrix, o.matrix()))
    }

    pub fn trace_distance(&self, other: &QOperator) -> Result<f64> {
        let o = other.reorder(&self.layout)?;
        Ok(linalg::trace_norm_herm(&(&self.matrix - o.matrix())))
    }

    /// Checks PSD and trace bounds and wraps as a density operator.
    pub fn into_density(self, normalized: bool) -> Result<DensityOperator> {
        DensityOperator::from_operator(self, normalized)
    }

    /// Sandwich `x ↦ s x s` with `s` acting on the registers of `s_op` and identity elsewhere.
    pub fn sandwich(&self, s_op: &QOperator) -> Result<QOperator> {
        let s = embed(s_op, &self.layout)?;
        Ok(QOperator::raw(self.layout.clone(), &s * &self.matrix * &s))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    base: QOperator,
    normalized: bool,
}

impl std::ops::Deref for DensityOperator {
    type Target = QOperator;
    fn deref(&self) -> &QOperator {
        &self.base
    }
}

impl DensityOperator {
    pub fn new(layout: RegisterLayout, matrix: Mat, normalized: bool) -> Result<Self> {
        Self::from_operator(QOperator::new(layout, matrix)?, normalized)
    }

    pub fn from_operator(base: QOperator, normalized: bool) -> Result<Self> {
        let e = eigh(base.matrix());
        let scale = e.spectral_norm().max(1.0);
        if e.min() < -PSD_TOL * scale {
            return Err(Error::NotPositive(e.min()));
        }
        let t = base.trace();
        if t <= 0.0 {
            return Err(Error::ZeroState);
        }
        if t > 1.0 + TRACE_TOL {
            return Err(Error::Normalization(format!("trace {t} exceeds 1")));
        }
        if normalized && (t - 1.0).abs() > TRACE_TOL {
            return Err(Error::Normalization(format!("trace {t} is not 1")));
        }
        Ok(DensityOperator { base, normalized })
    }

    /// Internal constructor for states that are valid by construction.
    pub(crate) fn raw(layout: RegisterLayout, matrix: Mat, normalized: bool) -> Self {
        DensityOperator {
            base: QOperator::raw(layout, matrix),
            normalized,
        }
    }

    /// Normalized copy of a nonzero PSD operator.
    pub fn normalize(op: &QOperator) -> Result<Self> {
        let t = op.trace();
        if t <= 0.0 {
            return Err(Error::ZeroState);
        }
        Self::from_operator(op.scale(1.0 / t), true)
    }

    pub fn maximally_mixed(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        DensityOperator::raw(layout, linalg::identity(n).scale(1.0 / n as f64), true)
    }

    pub fn pure(layout: RegisterLayout, psi: &DVector<C64>) -> Result<Self> {
        if psi.len() != layout.total_dim() {
            return Err(Error::Layout("vector length does not match layout".into()));
        }
        let nrm = psi.norm();
        if nrm == 0.0 {
            return Err(Error::ZeroState);
        }
        let v = psi / c(nrm);
        Ok(DensityOperator::raw(layout, linalg::outer(&v), true))
    }

    /// Diagonal state from a probability vector.
    pub fn classical(layout: RegisterLayout, probs: &[f64]) -> Result<Self> {
        let s: f64 = probs.iter().sum();
        let normalized = (s - 1.0).abs() <= TRACE_TOL;
        DensityOperator::from_operator(QOperator::diagonal(layout, probs)?, normalized)
    }

    pub fn base(&self) -> &QOperator {
        &self.base
    }

    pub fn into_base(self) -> QOperator {
        self.base
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::Normalization("a normalized state is required".into()))
        }
    }

    pub fn reorder(&self, target: &RegisterLayout) -> Result<DensityOperator> {
        Ok(DensityOperator {
            base: self.base.reorder(target)?,
            normalized: self.normalized,
        })
    }

    pub fn canonical(&self) -> DensityOperator {
        DensityOperator {
            base: self.base.canonical(),
            normalized: self.normalized,
        }
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<DensityOperator> {
        Ok(DensityOperator {
            base: self.base.relabel(from, to)?,
            normalized: self.normalized,
        })
    }

    /// Reduced state on `keep`.
    pub fn reduce(&self, keep: &[&str]) -> Result<DensityOperator> {
        let r = partial_trace(&self.base, keep)?;
        Ok(DensityOperator {
            base: r,
            normalized: self.normalized,
        })
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        let t = tensor_product(&self.base, &other.base)?;
        Ok(DensityOperator {
            base: t,
            normalized: self.normalized && other.normalized,
        })
    }
}

/// An event on a classical register: the register takes one of the accepted values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalEvent {
    register_label: String,
    accepted: Vec<usize>,
}

impl ClassicalEvent {
    pub fn new(register_label: &str, accepted: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut accepted: Vec<usize> = accepted.into_iter().collect();
        accepted.sort_unstable();
        accepted.dedup();
        if accepted.is_empty() {
            return Err(Error::InvalidArgument("event accepts no values".into()));
        }
        Ok(ClassicalEvent {
            register_label: register_label.to_string(),
            accepted,
        })
    }

    pub fn register_label(&self) -> &str {
        &self.register_label
    }

    pub fn accepted(&self) -> &[usize] {
        &self.accepted
    }

    /// Intersection with another event on the same register.
    pub fn and(&self, other: &ClassicalEvent) -> Option<ClassicalEvent> {
        if self.register_label != other.register_label {
            return None;
        }
        let acc: Vec<usize> = self.accepted.iter().copied().filter(|a| other.accepted.contains(a)).collect();
        ClassicalEvent::new(&self.register_label, acc).ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventMode {
    Partial,
    Conditional,
}

/// Matrix of `op` (on a subset of registers) extended by identity to `full`, in `full`'s order.
pub fn embed(op: &QOperator, full: &RegisterLayout) -> Result<Mat> {
    embed_matrix(op.matrix(), op.layout(), full)
}

pub fn embed_matrix(m: &Mat, sub: &RegisterLayout, full: &RegisterLayout) -> Result<Mat> {
    for f in sub.factors() {
        if full.dim_of(&f.label)? != f.dim {
            return Err(Error::Layout(format!("register {} has mismatched dimension", f.label)));
        }
    }
    let labels = sub.labels();
    // `split_indices` reports sub-indices in `full`'s order of the sub registers.
    let sub_in_full = full.select(&labels)?;
    let sub_op = if &sub_in_full == sub {
        m.clone()
    } else {
        let p = sub.permutation_to(&sub_in_full)?;
        Mat::from_fn(p.len(), p.len(), |i, j| m[(p[i], p[j])])
    };
    let (s, r) = full.split_indices(&labels)?;
    let n = full.total_dim();
    Ok(Mat::from_fn(
        n,
        n,
        |i, j| if r[i] == r[j] { sub_op[(s[i], s[j])] } else { c(0.0) },
    ))
}

/// Partial trace keeping the registers in `keep`, in the original order.
pub fn partial_trace(op: &QOperator, keep: &[&str]) -> Result<QOperator> {
    let layout = op.layout();
    let kept = layout.select(keep)?;
    let m = partial_trace_matrix(op.matrix(), layout, keep)?;
    Ok(QOperator {
        layout: kept,
        matrix: m,
        hermitian_tol: op.hermitian_tol,
    })
}

pub fn partial_trace_matrix(m: &Mat, layout: &RegisterLayout, keep: &[&str]) -> Result<Mat> {
    let kept = layout.select(keep)?;
    let traced = layout.complement(keep)?;
    let (k, t) = layout.split_indices(keep)?;
    let dk = kept.total_dim();
    let dt = traced.total_dim();
    let mut index = vec![0usize; dk * dt];
    for (i, (&a, &b)) in k.iter().zip(t.iter()).enumerate() {
        index[a * dt + b] = i;
    }
    let mut out = Mat::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = c(0.0);
            for x in 0..dt {
                s += m[(index[a * dt + x], index[b * dt + x])];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

pub fn tensor_product(a: &QOperator, b: &QOperator) -> Result<QOperator> {
    let layout = a.layout().concat(b.layout())?;
    if layout.total_dim() > MAX_TOTAL_DIM {
        return Err(Error::DimensionLimit(layout.total_dim()));
    }
    Ok(QOperator::raw(layout, linalg::kron(a.matrix(), b.matrix())))
}

/// `U f(Λ) U†` for a PSD operator; eigenvalues at or below the floor map to zero.
pub fn matrix_power(op: &QOperator, exponent: f64, use_pseudoinverse: bool) -> Result<QOperator> {
    let e = eigh(op.matrix());
    let scale = e.spectral_norm().max(1.0);
    if e.min() < -PSD_TOL * scale {
        return Err(Error::NotPositive(e.min()));
    }
    if exponent < 0.0 && !use_pseudoinverse && e.rank() < e.dim() {
        return Err(Error::SingularOperator);
    }
    let m = if exponent == 0.0 {
        e.support_projector()
    } else {
        e.apply_on_support(|x| x.powf(exponent))
    };
    Ok(QOperator::raw(op.layout().clone(), m))
}

/// `ρ_B^{−1/2} ρ ρ_B^{−1/2}` with the pseudoinverse on the reduced state over `given`.
pub fn conditional_state(rho: &DensityOperator, given: &[&str]) -> Result<QOperator> {
    let rb = partial_trace(rho, given)?;
    if rb.trace() <= 0.0 || eigh(rb.matrix()).rank() == 0 {
        return Err(Error::SingularOperator);
    }
    let s = matrix_power(&rb, -0.5, true)?;
    rho.base().sandwich(&s)
}

/// Generalized fidelity `‖√ρ√σ‖₁ + √((1−tr ρ)(1−tr σ))`.
pub fn generalized_fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let s = sigma.reorder(rho.layout())?;
    // ‖√ρ √σ‖₁ from singular values; taking square roots of the spectrum of
    // √ρ σ √ρ would turn rounding noise of order 1e-17 into 3e-9 in F
    let f = linalg::trace_norm(&(linalg::psd_sqrt(rho.matrix()) * linalg::psd_sqrt(s.matrix())));
    let defect = ((1.0 - rho.trace()).max(0.0) * (1.0 - s.trace()).max(0.0)).sqrt();
    Ok((f + defect).min(1.0))
}

/// Purified distance `√(1 − F²)`.
pub fn purified_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    let f = generalized_fidelity(rho, sigma)?;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

/// A pure state on `rho`'s layout plus a purifying register of dimension `rank(ρ)`.
pub fn purify(rho: &DensityOperator, purifier_label: &str) -> Result<DensityOperator> {
    rho.require_normalized()?;
    if rho.layout().contains(purifier_label) {
        return Err(Error::Layout(format!("purifier label {purifier_label} already in use")));
    }
    let e = eigh(rho.matrix());
    let fl = e.floor();
    let support: Vec<usize> = (0..e.dim()).filter(|&k| e.values[k] > fl).collect();
    let r = support.len();
    let layout = rho.layout().concat(&RegisterLayout::new(&[(purifier_label, r)])?)?;
    if layout.total_dim() > MAX_TOTAL_DIM {
        return Err(Error::DimensionLimit(layout.total_dim()));
    }
    let n = rho.dim();
    let mut psi = DVector::<C64>::zeros(n * r);
    for (j, &k) in support.iter().enumerate() {
        let w = e.values[k].sqrt();
        for i in 0..n {
            psi[i * r + j] += e.vectors[(i, k)] * w;
        }
    }
    DensityOperator::pure(layout, &psi)
}

/// Largest off-diagonal block magnitude of `rho` with respect to the basis of `label`.
pub fn classicality_defect(rho: &QOperator, label: &str) -> Result<f64> {
    let (s, _) = rho.layout().split_indices(&[label])?;
    let n = rho.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if s[i] != s[j] {
                worst = worst.max(rho.matrix()[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}

/// Partial state `ρ_∧Ω` or conditional state `ρ_|Ω = (tr ρ / tr ρ_∧Ω) ρ_∧Ω`.
pub fn condition_on_event(rho: &DensityOperator, ev: &ClassicalEvent, mode: EventMode) -> Result<DensityOperator> {
    let label = ev.register_label();
    let d = rho.layout().dim_of(label)?;
    if ev.accepted().iter().any(|&a| a >= d) {
        return Err(Error::InvalidArgument(format!(
            "event index out of range for register {label}"
        )));
    }
    if classicality_defect(rho, label)? > CLASSICAL_TOL {
        return Err(Error::Classicality(label.to_string()));
    }
    let (s, _) = rho.layout().split_indices(&[label])?;
    let n = rho.dim();
    let keep: Vec<bool> = (0..d).map(|k| ev.accepted().contains(&k)).collect();
    let m = Mat::from_fn(n, n, |i, j| {
        if keep[s[i]] && keep[s[j]] && s[i] == s[j] {
            rho.matrix()[(i, j)]
        } else {
            c(0.0)
        }
    });
    let p = linalg::trace_re(&m);
    match mode {
        EventMode::Partial => Ok(DensityOperator {
            base: QOperator::raw(rho.layout().clone(), m),
            normalized: false,
        }),
        EventMode::Conditional => {
            if p <= 0.0 {
                return Err(Error::ZeroProbabilityEvent);
            }
            let scaled = m.scale(rho.trace() / p);
            Ok(DensityOperator {
                base: QOperator::raw(rho.layout().clone(), scaled),
                normalized: rho.is_normalized(),
            })
        }
    }
}
