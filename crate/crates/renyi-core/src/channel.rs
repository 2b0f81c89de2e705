//! Completely positive trace-preserving maps in Kraus form.

use crate::error::{Error, Result};
use crate::layout::RegisterLayout;
use crate::linalg::{self, c, eigh, Mat};
use crate::operator::{DensityOperator, QOperator};

pub const CPTP_TOL: f64 = 1e-9;

/// Structural facts about a channel that downstream code can exploit.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelTag {
    /// `(1−δ)·|⊥⟩⟨⊥| + δ·(embedding)` from a register of dimension `dim_r`.
    ProbabilisticLeakage { delta: f64, dim_r: usize },
    /// Starts with a pinching of the input in its computational basis.
    PinchedInput,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    in_layout: RegisterLayout,
    out_layout: RegisterLayout,
    kraus: Vec<Mat>,
    tags: Vec<ChannelTag>,
}

impl QuantumChannel {
    pub fn new(in_layout: RegisterLayout, out_layout: RegisterLayout, kraus: Vec<Mat>) -> Result<Self> {
        let din = in_layout.total_dim();
        let dout = out_layout.total_dim();
        if kraus.is_empty() {
            return Err(Error::InvalidArgument("channel needs at least one Kraus operator".into()));
        }
        for k in &kraus {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::Layout(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.nrows(),
                    k.ncols(),
                    dout,
                    din
                )));
            }
        }
        let ch = QuantumChannel {
            in_layout,
            out_layout,
            kraus,
            tags: vec![],
        };
        let defect = ch.cptp_defect();
        if defect > CPTP_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators are not trace preserving (defect {defect:.3e})"
            )));
        }
        Ok(ch)
    }

    pub(crate) fn from_kraus_unchecked(in_layout: RegisterLayout, out_layout: RegisterLayout, kraus: Vec<Mat>) -> Self {
        QuantumChannel {
            in_layout,
            out_layout,
            kraus,
            tags: vec![],
        }
    }

    pub fn with_tag(mut self, tag: ChannelTag) -> Self {
        self.tags.push(tag);
        self
    }

    pub fn tags(&self) -> &[ChannelTag] {
        &self.tags
    }

    pub fn in_layout(&self) -> &RegisterLayout {
        &self.in_layout
    }

    pub fn out_layout(&self) -> &RegisterLayout {
        &self.out_layout
    }

    pub fn kraus(&self) -> &[Mat] {
        &self.kraus
    }

    /// `max |Σ K†K − I|`.
    pub fn cptp_defect(&self) -> f64 {
        let n = self.in_layout.total_dim();
        let mut s = Mat::zeros(n, n);
        for k in &self.kraus {
            s += k.adjoint() * k;
        }
        linalg::max_abs_diff(&s, &linalg::identity(n))
    }

    pub fn identity(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        QuantumChannel::from_kraus_unchecked(layout.clone(), layout, vec![linalg::identity(n)])
    }

    /// `X ↦ V X V†` for an isometry `V`.
    pub fn isometry(in_layout: RegisterLayout, out_layout: RegisterLayout, v: Mat) -> Result<Self> {
        QuantumChannel::new(in_layout, out_layout, vec![v])
    }

    /// `X ↦ tr(X) τ`.
    pub fn replacer(in_layout: RegisterLayout, tau: &DensityOperator) -> Result<Self> {
        tau.require_normalized()?;
        let din = in_layout.total_dim();
        let dout = tau.dim();
        let s = linalg::psd_sqrt(tau.matrix());
        let mut kraus = Vec::with_capacity(din * dout);
        for i in 0..dout {
            for j in 0..din {
                let mut k = Mat::zeros(dout, din);
                for r in 0..dout {
                    k[(r, j)] = s[(r, i)];
                }
                kraus.push(k);
            }
        }
        QuantumChannel::new(in_layout, tau.layout().clone(), kraus)
    }

    /// Dephasing in the computational basis of every register of `layout`.
    pub fn pinching(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        let kraus = (0..n)
            .map(|k| {
                let mut m = Mat::zeros(n, n);
                m[(k, k)] = c(1.0);
                m
            })
            .collect();
        QuantumChannel::from_kraus_unchecked(layout.clone(), layout, kraus).with_tag(ChannelTag::PinchedInput)
    }

    /// Discards the input.
    pub fn trace_out(layout: RegisterLayout) -> Self {
        let n = layout.total_dim();
        let kraus = (0..n)
            .map(|k| {
                let mut m = Mat::zeros(1, n);
                m[(0, k)] = c(1.0);
                m
            })
            .collect();
        QuantumChannel::from_kraus_unchecked(layout, RegisterLayout::trivial(), kraus)
    }

    /// `self` followed by `next`; `next` must take exactly the registers `self` outputs.
    pub fn then(&self, next: &QuantumChannel) -> Result<QuantumChannel> {
        let p = self.out_layout.permutation_to(next.in_layout())?;
        let d = p.len();
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for k2 in &next.kraus {
            // columns of k2 are indexed in next.in order; reorder to self.out order
            let mut k2p = Mat::zeros(k2.nrows(), d);
            for (t, &s) in p.iter().enumerate() {
                k2p.set_column(s, &k2.column(t));
            }
            for k1 in &self.kraus {
                kraus.push(&k2p * k1);
            }
        }
        let mut ch = QuantumChannel::from_kraus_unchecked(self.in_layout.clone(), next.out_layout.clone(), kraus);
        if self.tags.contains(&ChannelTag::PinchedInput) {
            ch.tags.push(ChannelTag::PinchedInput);
        }
        // pre-processing keeps the flag branch intact and only reshapes the leaking one
        for t in &next.tags {
            if matches!(t, ChannelTag::ProbabilisticLeakage { .. }) {
                ch.tags.push(t.clone());
            }
        }
        Ok(ch.compressed())
    }

    /// Renames a register wherever it appears in the input or output layout.
    pub fn relabel(&self, from: &str, to: &str) -> Result<QuantumChannel> {
        let rename = |l: &RegisterLayout| {
            if l.contains(from) {
                l.relabel(from, to)
            } else {
                Ok(l.clone())
            }
        };
        if !self.in_layout.contains(from) && !self.out_layout.contains(from) {
            return Err(Error::Layout(format!("channel has no register {from}")));
        }
        Ok(QuantumChannel {
            in_layout: rename(&self.in_layout)?,
            out_layout: rename(&self.out_layout)?,
            ..self.clone()
        })
    }

    /// Parallel composition `self ⊗ other`.
    pub fn tensor(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        let in_l = self.in_layout.concat(&other.in_layout)?;
        let out_l = self.out_layout.concat(&other.out_layout)?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(linalg::kron(a, b));
            }
        }
        Ok(QuantumChannel::from_kraus_unchecked(in_l, out_l, kraus).compressed())
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|)` (input first).
    pub fn choi(&self) -> Mat {
        let din = self.in_layout.total_dim();
        let dout = self.out_layout.total_dim();
        let mut j = Mat::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // vec(K) with input index major: |i⟩ ⊗ K|i⟩
            let v = nalgebra::DVector::from_fn(din * dout, |r, _| k[(r % dout, r / dout)]);
            j += &v * v.adjoint();
        }
        j
    }

    /// Minimal Kraus representation from the Choi spectrum.
    pub fn compressed(&self) -> QuantumChannel {
        let din = self.in_layout.total_dim();
        let dout = self.out_layout.total_dim();
        if self.kraus.len() <= din * dout && self.kraus.len() <= 4 {
            return self.clone();
        }
        let e = eigh(&self.choi());
        let fl = e.floor().max(1e-15);
        let mut kraus = Vec::new();
        for idx in (0..e.dim()).rev() {
            let lam = e.values[idx];
            if lam <= fl {
                continue;
            }
            let s = lam.sqrt();
            kraus.push(Mat::from_fn(dout, din, |o, i| e.vectors[(i * dout + o, idx)] * s));
        }
        QuantumChannel {
            in_layout: self.in_layout.clone(),
            out_layout: self.out_layout.clone(),
            kraus,
            tags: self.tags.clone(),
        }
    }

    /// Applies the channel to a bare matrix whose registers are ordered `rest ⊗ in`.
    pub fn apply_matrix(&self, m: &Mat, rest_dim: usize) -> Mat {
        let id = linalg::identity(rest_dim);
        let dout = self.out_layout.total_dim();
        let mut out = Mat::zeros(rest_dim * dout, rest_dim * dout);
        for k in &self.kraus {
            let big = if rest_dim == 1 { k.clone() } else { linalg::kron(&id, k) };
            out += &big * m * big.adjoint();
        }
        out
    }

    /// Heisenberg picture on a bare matrix ordered `rest ⊗ out`; the result is ordered `rest ⊗ in`.
    pub fn adjoint_matrix(&self, m: &Mat, rest_dim: usize) -> Mat {
        let id = linalg::identity(rest_dim);
        let din = self.in_layout.total_dim();
        let mut out = Mat::zeros(rest_dim * din, rest_dim * din);
        for k in &self.kraus {
            let big = if rest_dim == 1 { k.clone() } else { linalg::kron(&id, k) };
            out += big.adjoint() * m * &big;
        }
        out
    }

    /// Splits `layout` into the untouched registers and checks the input registers.
    fn rest_of(&self, layout: &RegisterLayout) -> Result<RegisterLayout> {
        for f in self.in_layout.factors() {
            if layout.dim_of(&f.label)? != f.dim {
                return Err(Error::Layout(format!("register {} has mismatched dimension", f.label)));
            }
        }
        let rest = layout.complement(&self.in_layout.labels())?;
        for f in self.out_layout.factors() {
            if rest.contains(&f.label) {
                return Err(Error::Layout(format!(
                    "output register {} collides with an untouched register",
                    f.label
                )));
            }
        }
        Ok(rest)
    }

    /// Heisenberg picture for a register-aware observable.
    pub fn adjoint_apply(&self, x: &QOperator) -> Result<QOperator> {
        let rest = x.layout().complement(&self.out_layout.labels())?;
        let ordered = x.reorder(&rest.concat(&self.out_layout)?)?;
        let m = self.adjoint_matrix(ordered.matrix(), rest.total_dim());
        QOperator::new(rest.concat(&self.in_layout)?, m)
    }
}

/// Applies `ch` to the registers it names and the identity elsewhere.
/// The result lists the untouched registers first, then the channel outputs.
pub fn apply_channel(ch: &QuantumChannel, rho: &DensityOperator) -> Result<DensityOperator> {
    let rest = ch.rest_of(rho.layout())?;
    let ordered = rho.reorder(&rest.concat(ch.in_layout())?)?;
    let out_layout = rest.concat(ch.out_layout())?;
    let m = ch.apply_matrix(ordered.matrix(), rest.total_dim());
    let q = QOperator::new(out_layout, m)?;
    Ok(DensityOperator::raw(q.layout().clone(), q.into_matrix(), rho.is_normalized()))
}
