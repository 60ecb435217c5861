//! Quantum-information metrics on Gaussian states.
//!
//! All entropies are in bits (log base 2). Coherence is the relative-entropy
//! measure: the entropy of the mean-photon-number-matched thermal reference
//! minus the entropy of the state itself.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::serialize::state_sha256;
use crate::state::{
    quadrature_index, CovarianceMatrix, GaussianState, PhysicalityPolicy, Quadrature, EPS_PHYS,
};

/// Von Neumann entropy contribution of one symplectic eigenvalue, in bits:
/// g(nu) = ((nu+1)/2) log2((nu+1)/2) - ((nu-1)/2) log2((nu-1)/2), with the
/// 0 log 0 := 0 convention so g(1) = 0.
pub fn entropy_term(nu: f64) -> Result<f64> {
    if !nu.is_finite() || nu < 1.0 - EPS_PHYS {
        return Err(Error::Domain {
            value: nu,
            reason: "symplectic eigenvalue below 1".into(),
        });
    }
    if nu <= 1.0 {
        return Ok(0.0);
    }
    let hi = 0.5 * (nu + 1.0);
    let lo = 0.5 * (nu - 1.0);
    let lo_term = if lo > 0.0 { lo * lo.log2() } else { 0.0 };
    Ok(hi * hi.log2() - lo_term)
}

fn spectrum_entropy(values: &[f64]) -> Result<f64> {
    values.iter().try_fold(0.0, |acc, &nu| Ok(acc + entropy_term(nu)?))
}

/// Per-mode variance of the thermal state with the same mean photon number as
/// the given state: (V_XX + V_YY + x̄_X² + x̄_Y²) / 2 for each mode.
fn thermal_variances(state: &GaussianState) -> Vec<f64> {
    (0..state.n_modes())
        .map(|k| {
            let x = 2 * k;
            let y = 2 * k + 1;
            0.5 * (state.cov().get(x, x)
                + state.cov().get(y, y)
                + state.displacement()[x].powi(2)
                + state.displacement()[y].powi(2))
        })
        .collect()
}

/// The incoherent reference of a state: zero displacement, diagonal covariance
/// with equal X/Y variances, matching the input's mean photon number per mode.
pub fn thermal_reference(state: &GaussianState) -> GaussianState {
    let variances = thermal_variances(state);
    let diag: Vec<f64> = variances.iter().flat_map(|&t| [t, t]).collect();
    let entries = DMatrix::from_diagonal(&DVector::from_vec(diag));
    let cov = match state.cov().policy() {
        PhysicalityPolicy::Strict => CovarianceMatrix::new(state.n_modes(), entries)
            .expect("thermal reference of a physical state is physical"),
        PhysicalityPolicy::Reconstructed => {
            CovarianceMatrix::reconstructed(state.n_modes(), entries)
                .expect("thermal reference variances stay within the reconstruction band")
                .0
        }
    };
    GaussianState::from_covariance(cov)
}

/// Relative-entropy coherence of a state, with the entropies that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceReport {
    /// S(thermal reference) - S(state), clamped to zero at reporting.
    pub coherence_bits: f64,
    pub entropy_state_bits: f64,
    pub entropy_thermal_ref_bits: f64,
    /// Per-mode variance of the thermal reference.
    pub thermal_ref_variances: Vec<f64>,
    /// SHA-256 of the input state, for provenance.
    pub input_sha256: String,
}

pub fn coherence(state: &GaussianState) -> Result<CoherenceReport> {
    let entropy_state = spectrum_entropy(state.symplectic_eigenvalues().values())?;
    let reference = thermal_reference(state);
    let entropy_thermal = spectrum_entropy(reference.symplectic_eigenvalues().values())?;
    let raw = entropy_thermal - entropy_state;
    // Sampling noise can push a reconstructed state's coherence slightly
    // negative; exactly constructed states must stay within -1e-9.
    if raw < -1e-9 && state.cov().policy() == PhysicalityPolicy::Strict {
        return Err(Error::NumericalFailure(format!(
            "coherence of a physical state evaluated to {raw} bits"
        )));
    }
    Ok(CoherenceReport {
        coherence_bits: raw.max(0.0),
        entropy_state_bits: entropy_state,
        entropy_thermal_ref_bits: entropy_thermal,
        thermal_ref_variances: thermal_variances(state),
        input_sha256: state_sha256(state),
    })
}

/// Noise level of one quadrature of a single-mode state in dB relative to the
/// shot noise limit; negative means squeezed below vacuum.
pub fn squeezing_db(state: &GaussianState, quadrature: Quadrature) -> Result<f64> {
    if state.n_modes() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            actual: state.n_modes(),
        });
    }
    let idx = quadrature_index(0, quadrature);
    Ok(10.0 * state.cov().get(idx, idx).log10())
}

/// PPT entanglement test result for a two-mode state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Smallest symplectic eigenvalue of the partially transposed covariance.
    pub ppt_value: f64,
    /// True iff `ppt_value < 1` (the boundary itself counts as separable).
    pub entangled: bool,
    /// SHA-256 of the input state, for provenance.
    pub input_sha256: String,
}

/// PPT value from the closed form sqrt((Gamma - sqrt(Gamma² - 4 Det V)) / 2)
/// with Gamma = Det A + Det B - 2 Det C taken from the actual 2x2 blocks, so
/// it applies to any two-mode covariance, not only the ideal EPR form.
pub fn ppt_value(state: &GaussianState) -> Result<EntanglementReport> {
    if state.n_modes() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: state.n_modes(),
        });
    }
    let m = state.cov().entries();
    let det_a = m.fixed_view::<2, 2>(0, 0).determinant();
    let det_b = m.fixed_view::<2, 2>(2, 2).determinant();
    let det_c = m.fixed_view::<2, 2>(0, 2).determinant();
    let gamma = det_a + det_b - 2.0 * det_c;
    // Partial transposition leaves the full determinant unchanged.
    let det_v = m.determinant();
    let (_, ppt) = crate::state::eigenvalue_pair_from_invariants(gamma, det_v);
    Ok(EntanglementReport {
        ppt_value: ppt,
        entangled: ppt < 1.0,
        input_sha256: state_sha256(state),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{symplectic_eigenvalues_general, variance_to_db};
    use crate::test_util::{MU, NU, V_AS, V_S};


    fn paper_squeezed() -> GaussianState {
        GaussianState::squeezed(V_S, V_AS).unwrap()
    }

    fn paper_epr() -> GaussianState {
        GaussianState::epr(V_S, V_AS).unwrap()
    }

    #[test]
    fn entropy_term_fixed_points() {
        assert_eq!(entropy_term(1.0).unwrap(), 0.0);
        assert_eq!(entropy_term(3.0).unwrap(), 2.0);
        // Value frozen from the truncated Fock-space thermal oracle,
        // nbar = (nu - 1)/2, truncation 60.
        assert!((entropy_term(NU).unwrap() - 0.388_880_420_9).abs() < 1e-9);
        assert!(entropy_term(0.9).is_err());
        // Just inside the clamp band.
        assert_eq!(entropy_term(1.0 - 0.5e-9).unwrap(), 0.0);
    }

    #[test]
    fn entropy_term_is_strictly_increasing() {
        let mut prev = entropy_term(1.0).unwrap();
        for i in 1..=100 {
            let nu = 1.0 + i as f64 * 0.09;
            let g = entropy_term(nu).unwrap();
            assert!(g > prev, "g({nu}) = {g} not above {prev}");
            prev = g;
        }
    }

    #[test]
    fn entropy_term_matches_fock_oracle() {
        // Thermal reference: Shannon entropy of the photon-number
        // distribution with nbar = (nu - 1)/2. Truncation grows with nbar so
        // the tail stays far below the 1e-4 comparison tolerance.
        for i in 0..=30 {
            let nu = 1.0 + i as f64 * 0.3;
            let nbar = 0.5 * (nu - 1.0);
            let dim = 60 + (nbar * 60.0) as usize;
            let oracle =
                fock_oracle::shannon_entropy_bits(&fock_oracle::thermal_probabilities(nbar, dim));
            let ours = entropy_term(nu).unwrap();
            assert!(
                (ours - oracle).abs() < 1e-4,
                "nu = {nu}: formula {ours} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn thermal_reference_of_paper_squeezed_state() {
        let reference = thermal_reference(&paper_squeezed());
        assert!((reference.cov().get(0, 0) - MU).abs() < 1e-9);
        assert!((reference.cov().get(1, 1) - MU).abs() < 1e-9);
        assert_eq!(reference.displacement().iter().sum::<f64>(), 0.0);
        // Mean photon number per mode is preserved: (V_X + V_Y + x̄²)/4 - 1/2.
        let input_n = (V_S + V_AS) / 4.0 - 0.5;
        let ref_n = (2.0 * MU) / 4.0 - 0.5;
        assert!((input_n - ref_n).abs() < 1e-9);
    }

    #[test]
    fn thermal_reference_of_displaced_vacuum() {
        let state = GaussianState::vacuum(1)
            .with_displacement(DVector::from_row_slice(&[2.0, 0.0]))
            .unwrap();
        let reference = thermal_reference(&state);
        assert!((reference.cov().get(0, 0) - 3.0).abs() < 1e-12);
        assert!((reference.cov().get(1, 1) - 3.0).abs() < 1e-12);
        // Displaced vacuum with |alpha|² = 1 maps to a thermal state with
        // nbar = 1, i.e. variance 3.
        let nbar: f64 = (3.0 + 3.0) / 4.0 - 0.5;
        assert!((nbar - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_of_incoherent_states_is_zero() {
        assert_eq!(coherence(&GaussianState::vacuum(1)).unwrap().coherence_bits, 0.0);
        assert_eq!(coherence(&GaussianState::vacuum(3)).unwrap().coherence_bits, 0.0);
        let thermal = GaussianState::from_covariance(
            CovarianceMatrix::new(
                1,
                DMatrix::from_diagonal(&DVector::from_row_slice(&[3.0, 3.0])),
            )
            .unwrap(),
        );
        assert_eq!(coherence(&thermal).unwrap().coherence_bits, 0.0);
    }

    #[test]
    fn coherence_of_paper_states() {
        // Frozen from the Fock-space oracle evaluation of the thermal
        // reference and state entropies (truncation 60 agrees to < 1e-8).
        let sq = coherence(&paper_squeezed()).unwrap();
        assert!((sq.coherence_bits - 0.574_139_419_8).abs() < 1e-9, "{}", sq.coherence_bits);
        assert!((sq.entropy_state_bits - 0.388_880_420_9).abs() < 1e-9);
        assert!((sq.entropy_thermal_ref_bits - 0.963_019_840_8).abs() < 1e-9);
        assert_eq!(sq.thermal_ref_variances.len(), 1);

        let epr = coherence(&paper_epr()).unwrap();
        assert!((epr.coherence_bits - 1.148_278_839_6).abs() < 1e-9, "{}", epr.coherence_bits);
    }

    #[test]
    fn coherence_matches_fock_oracle_on_one_mode_states() {
        // Independent route: explicit density matrices, eigenvalue entropies,
        // thermal reference with the measured mean photon number.
        let cases = [
            (V_S, V_AS, 0.0),
            (1.0, 1.0, 0.0),
            (0.5, 2.0, 0.0),
            (0.4, 3.0, 1.2),
            (1.5, 1.5, 0.8),
        ];
        for &(v_s, v_as, x_disp) in &cases {
            let state = GaussianState::squeezed(v_s, v_as)
                .unwrap()
                .with_displacement(DVector::from_row_slice(&[x_disp, 0.0]))
                .unwrap();
            let ours = coherence(&state).unwrap().coherence_bits;
            let rho = fock_oracle::gaussian_density_matrix(v_s, v_as, x_disp, 60);
            let oracle = fock_oracle::coherence_bits(&rho);
            assert!(
                (ours - oracle).abs() < 1e-4,
                "({v_s}, {v_as}, {x_disp}): formula {ours} vs oracle {oracle}"
            );
        }
    }

    #[test]
    fn coherence_increases_with_displacement() {
        let base = GaussianState::squeezed(0.5, 2.5).unwrap();
        let mut prev = coherence(&base).unwrap().coherence_bits;
        for i in 1..=10 {
            let d = i as f64 * 0.4;
            let state = base
                .clone()
                .with_displacement(DVector::from_row_slice(&[d, 0.0]))
                .unwrap();
            let c = coherence(&state).unwrap().coherence_bits;
            assert!(c > prev, "coherence not increasing at displacement {d}");
            prev = c;
        }
    }

    #[test]
    fn coherence_invariant_under_phase_space_rotation() {
        use crate::test_util::{random_one_mode_params, rotated_diag, seeded_rng};
        let mut rng = seeded_rng(23);
        for _ in 0..50 {
            let (v_s, v_as, theta) = random_one_mode_params(&mut rng);
            let unrotated = GaussianState::from_covariance(
                CovarianceMatrix::new(1, rotated_diag(v_s, v_as, 0.0)).unwrap(),
            );
            let rotated = GaussianState::from_covariance(
                CovarianceMatrix::new(1, rotated_diag(v_s, v_as, theta)).unwrap(),
            );
            let c0 = coherence(&unrotated).unwrap().coherence_bits;
            let c1 = coherence(&rotated).unwrap().coherence_bits;
            assert!((c0 - c1).abs() < 1e-9, "theta = {theta}: {c0} vs {c1}");
        }
    }

    #[test]
    fn coherence_nonnegative_on_random_states() {
        use crate::test_util::{random_one_mode_params, rotated_diag, seeded_rng};
        use rand::Rng;
        let mut rng = seeded_rng(31);
        for _ in 0..200 {
            let (v_s, v_as, theta) = random_one_mode_params(&mut rng);
            let d = DVector::from_row_slice(&[rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0]);
            let state = GaussianState::new(
                d,
                CovarianceMatrix::new(1, rotated_diag(v_s, v_as, theta)).unwrap(),
            )
            .unwrap();
            assert!(coherence(&state).unwrap().coherence_bits >= 0.0);
        }
    }

    #[test]
    fn squeezing_db_of_paper_state() {
        let state = GaussianState::squeezed(
            crate::state::db_to_variance(-2.95),
            crate::state::db_to_variance(4.15),
        )
        .unwrap();
        assert!((squeezing_db(&state, Quadrature::X).unwrap() - (-2.95)).abs() < 1e-12);
        assert!((squeezing_db(&state, Quadrature::Y).unwrap() - 4.15).abs() < 1e-12);
        assert_eq!(squeezing_db(&GaussianState::vacuum(1), Quadrature::X).unwrap(), 0.0);
        assert!(squeezing_db(&paper_epr(), Quadrature::X).is_err());
        assert!(Quadrature::from_index(2).is_err());
        // V_S is the 10-digit decimal of 10^(-0.295).
        assert!((variance_to_db(V_S) - (-2.95)).abs() < 1e-8);
    }

    #[test]
    fn ppt_of_product_states_is_separable() {
        let two_vacua = GaussianState::epr(1.0, 1.0).unwrap();
        let report = ppt_value(&two_vacua).unwrap();
        assert!((report.ppt_value - 1.0).abs() < 1e-12);
        assert!(!report.entangled, "boundary counts as separable");
    }

    #[test]
    fn ppt_of_paper_epr_state() {
        let report = ppt_value(&paper_epr()).unwrap();
        // For the symmetric pure-family form the PPT value equals v_s.
        assert!((report.ppt_value - V_S).abs() < 1e-9, "{}", report.ppt_value);
        assert!(report.entangled);
    }

    #[test]
    fn ppt_matches_partial_transpose_oracle() {
        // Independent route: flip the sign of the second mode's Y quadrature
        // and take the smallest symplectic eigenvalue of the general solver.
        let states = [paper_epr(), GaussianState::epr(0.3, 4.0).unwrap(), GaussianState::epr(1.0, 1.0).unwrap()];
        for state in &states {
            let m = state.cov().entries();
            let lambda = DMatrix::from_diagonal(&DVector::from_row_slice(&[1.0, 1.0, 1.0, -1.0]));
            let pt = &lambda * m * &lambda;
            let oracle = symplectic_eigenvalues_general(&pt).unwrap();
            let ppt = ppt_value(state).unwrap().ppt_value;
            assert!(
                (oracle.last().unwrap() - ppt).abs() < 1e-9,
                "oracle {:?} vs closed form {ppt}",
                oracle
            );
        }
    }

    #[test]
    fn ppt_of_random_products_at_least_one() {
        use crate::test_util::{random_one_mode_params, rotated_diag, seeded_rng};
        let mut rng = seeded_rng(41);
        for _ in 0..100 {
            let (vs1, vas1, th1) = random_one_mode_params(&mut rng);
            let (vs2, vas2, th2) = random_one_mode_params(&mut rng);
            let mut m = DMatrix::zeros(4, 4);
            m.view_mut((0, 0), (2, 2)).copy_from(&rotated_diag(vs1, vas1, th1));
            m.view_mut((2, 2), (2, 2)).copy_from(&rotated_diag(vs2, vas2, th2));
            let state = GaussianState::from_covariance(CovarianceMatrix::new(2, m).unwrap());
            let report = ppt_value(&state).unwrap();
            assert!(report.ppt_value >= 1.0 - 1e-9, "ppt {}", report.ppt_value);
        }
    }

    #[test]
    fn reports_serialize_with_provenance() {
        let report = coherence(&paper_squeezed()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("input_sha256"));
        assert!(json.contains("coherence_bits"));
        let ent = ppt_value(&paper_epr()).unwrap();
        let json = serde_json::to_string(&ent).unwrap();
        assert!(json.contains("ppt_value"));
        assert_eq!(ent.input_sha256.len(), 64);
    }
}
