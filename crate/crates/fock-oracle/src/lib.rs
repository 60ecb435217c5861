//! Truncated Fock-space reference computations.
//!
//! Everything here works on explicit density matrices in a finite photon-number
//! basis and never touches covariance matrices or symplectic eigenvalues, so it
//! serves as an independent check of the Gaussian-formula implementations.
//! Conventions match the main crate: X = a + a†, Y = i(a† - a), vacuum
//! variance 1.

use nalgebra::DMatrix;

/// Truncation dimension used by the reference computations.
pub const DEFAULT_DIM: usize = 60;

/// Annihilation operator in a `dim`-dimensional Fock basis.
pub fn annihilation(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Photon-number probabilities of a thermal state with mean photon number
/// `nbar`, truncated to `dim` terms.
pub fn thermal_probabilities(nbar: f64, dim: usize) -> Vec<f64> {
    if nbar <= 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return p;
    }
    let ratio = nbar / (1.0 + nbar);
    let mut p = Vec::with_capacity(dim);
    let mut term = 1.0 / (1.0 + nbar);
    for _ in 0..dim {
        p.push(term);
        term *= ratio;
    }
    p
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 1e-300)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits of a real symmetric density matrix, via
/// eigendecomposition. Slightly negative eigenvalues from rounding are
/// discarded.
pub fn von_neumann_entropy_bits(rho: &DMatrix<f64>) -> f64 {
    let eig = rho.clone().symmetric_eigen();
    shannon_entropy_bits(&eig.eigenvalues.iter().copied().collect::<Vec<f64>>())
}

/// Mean photon number tr(rho n̂) of a density matrix in the Fock basis.
pub fn mean_photon_number(rho: &DMatrix<f64>) -> f64 {
    (0..rho.nrows()).map(|n| n as f64 * rho[(n, n)]).sum()
}

/// Density matrix of a displaced squeezed thermal state
/// rho = D(alpha) S(r) rho_th(nbar) S(r)† D(alpha)†, with real `alpha`.
///
/// The corresponding covariance matrix is diag(nu e^{-2r}, nu e^{2r}) with
/// nu = 2 nbar + 1, and the displacement is (2 alpha, 0).
pub fn displaced_squeezed_thermal(nbar: f64, r: f64, alpha: f64, dim: usize) -> DMatrix<f64> {
    let a = annihilation(dim);
    let ad = a.transpose();
    let squeeze = ((&a * &a - &ad * &ad) * (r / 2.0)).exp();
    let displace = ((&ad - &a) * alpha).exp();
    let u = displace * squeeze;
    let rho_th = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(thermal_probabilities(
        nbar, dim,
    )));
    &u * rho_th * u.transpose()
}

/// Same state parameterized by its covariance diag(v_s, v_as) and x-displacement.
pub fn gaussian_density_matrix(v_s: f64, v_as: f64, x_displacement: f64, dim: usize) -> DMatrix<f64> {
    let nu = (v_s * v_as).sqrt();
    let r = 0.25 * (v_as / v_s).ln();
    displaced_squeezed_thermal(0.5 * (nu - 1.0), r, 0.5 * x_displacement, dim)
}

/// Relative-entropy coherence of a single-mode density matrix, in bits:
/// entropy of the thermal state with the same mean photon number minus the
/// entropy of the state itself.
pub fn coherence_bits(rho: &DMatrix<f64>) -> f64 {
    let nbar = mean_photon_number(rho);
    let reference = thermal_probabilities(nbar, rho.nrows());
    shannon_entropy_bits(&reference) - von_neumann_entropy_bits(rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_zero_entropy_and_coherence() {
        let rho = displaced_squeezed_thermal(0.0, 0.0, 0.0, DEFAULT_DIM);
        assert!(von_neumann_entropy_bits(&rho).abs() < 1e-12);
        assert!(coherence_bits(&rho).abs() < 1e-12);
        assert!(mean_photon_number(&rho).abs() < 1e-12);
    }

    #[test]
    fn thermal_probabilities_normalize() {
        let p = thermal_probabilities(0.5, 200);
        let sum: f64 = p.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squeezing_preserves_trace_and_entropy() {
        let rho = displaced_squeezed_thermal(0.2, 0.4, 0.0, DEFAULT_DIM);
        assert!((rho.trace() - 1.0).abs() < 1e-10);
        // Entropy is invariant under the unitary squeeze.
        let s = von_neumann_entropy_bits(&rho);
        let s_th = shannon_entropy_bits(&thermal_probabilities(0.2, DEFAULT_DIM));
        assert!((s - s_th).abs() < 1e-8, "s = {s}, thermal = {s_th}");
    }

    #[test]
    fn displacement_adds_photons() {
        let rho = displaced_squeezed_thermal(0.0, 0.0, 1.0, DEFAULT_DIM);
        // Displaced vacuum with alpha = 1 has nbar = |alpha|^2 = 1.
        assert!((mean_photon_number(&rho) - 1.0).abs() < 1e-9);
    }
}
