//! Shared fixtures for unit tests.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Squeezed variance of the default source state (-2.95 dB).
pub const V_S: f64 = 0.506_990_708_3;
/// Antisqueezed variance of the default source state (4.15 dB).
pub const V_AS: f64 = 2.600_159_563_2;
/// Symplectic eigenvalue sqrt(V_S * V_AS) of that state.
pub const NU: f64 = 1.148_153_621_5;
/// Thermal-reference variance (V_S + V_AS) / 2.
pub const MU: f64 = 1.553_575_135_7;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random physical one-mode parameters: squeezed/antisqueezed variances plus
/// a phase-space rotation angle.
pub fn random_one_mode_params(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
    let v_s = 0.1 + rng.gen::<f64>() * 0.9;
    let v_as = 1.0 / v_s + rng.gen::<f64>() * 4.0;
    let theta = rng.gen::<f64>() * std::f64::consts::PI;
    (v_s, v_as, theta)
}

/// R(theta) diag(v_s, v_as) R(theta)ᵗ — the general one-mode covariance.
pub fn rotated_diag(v_s: f64, v_as: f64, theta: f64) -> DMatrix<f64> {
    let r = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
    let d = DMatrix::from_diagonal(&DVector::from_row_slice(&[v_s, v_as]));
    &r * d * r.transpose()
}
