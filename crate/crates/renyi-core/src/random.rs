//! Seeded random states, unitaries and channels.
//!
//! All randomness flows through an explicitly passed [`ChaCha8Rng`].

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::QuantumChannel;
use crate::layout::RegisterLayout;
use crate::linalg::{c, Mat, C64};
use crate::operator::DensityOperator;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-trial seed from a master seed (splitmix64 finalizer).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-random unitary via QR of a Ginibre matrix with the phases of `R` absorbed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let g = ginibre(rng, n, n);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..n {
        let d = r[(k, k)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..n {
            q[(i, k)] *= ph;
        }
    }
    q
}

/// Haar-random isometry `C^cols → C^rows` (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Mat {
    assert!(rows >= cols, "isometry needs rows >= cols");
    random_unitary(rng, rows).columns(0, cols).into_owned()
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| gaussian_complex(rng));
    let nrm = v.norm();
    v / c(nrm)
}

/// Reduced state of a Haar-random pure state on `layout ⊗ layout`; full rank with probability one.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, layout: RegisterLayout) -> DensityOperator {
    let n = layout.total_dim();
    let psi = random_pure_vector(rng, n * n);
    let g = Mat::from_fn(n, n, |i, j| psi[i * n + j]);
    let rho = &g * g.adjoint();
    DensityOperator::raw(layout, rho, true)
}

/// Reduced state of a Haar-random pure state on `layout ⊗ C^k`; rank at most `k`.
pub fn random_density_rank<R: Rng + ?Sized>(rng: &mut R, layout: RegisterLayout, k: usize) -> DensityOperator {
    let n = layout.total_dim();
    let psi = random_pure_vector(rng, n * k);
    let g = Mat::from_fn(n, k, |i, j| psi[i * k + j]);
    DensityOperator::raw(layout, &g * g.adjoint(), true)
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, layout: RegisterLayout) -> DensityOperator {
    let psi = random_pure_vector(rng, layout.total_dim());
    DensityOperator::raw(layout, &psi * psi.adjoint(), true)
}

/// Random probability vector (uniform on the simplex).
pub fn random_probabilities<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Stinespring channel with a Haar isometry into `out ⊗ C^env_dim`.
pub fn random_channel<R: Rng + ?Sized>(
    rng: &mut R,
    in_layout: RegisterLayout,
    out_layout: RegisterLayout,
    env_dim: usize,
) -> QuantumChannel {
    let din = in_layout.total_dim();
    let dout = out_layout.total_dim();
    let v = random_isometry(rng, dout * env_dim, din);
    let kraus = (0..env_dim)
        .map(|e| Mat::from_fn(dout, din, |o, i| v[(o * env_dim + e, i)]))
        .collect();
    QuantumChannel::from_kraus_unchecked(in_layout, out_layout, kraus)
}
