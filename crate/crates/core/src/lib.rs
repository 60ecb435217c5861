//! Gaussian quantum-state toolkit built on the covariance-matrix formalism.
//!
//! The crate models N-mode Gaussian states (displacement vector + covariance
//! matrix, vacuum variance normalized to 1), propagates them through thermal
//! noise channels, quantifies coherence, squeezing and entanglement, and
//! reconstructs covariance matrices from homodyne quadrature samples.

pub mod channel;
pub mod error;
pub mod homodyne;
pub mod metrics;
pub mod serialize;
pub mod state;

#[cfg(test)]
pub(crate) mod test_util;

pub use channel::{apply_channel, apply_two_channels, ThermalChannel};
pub use error::{Error, Result};
pub use metrics::{
    coherence, entropy_term, ppt_value, squeezing_db, thermal_reference, CoherenceReport,
    EntanglementReport,
};
pub use state::{
    symplectic_eigenvalues_general, symplectic_eigenvalues_raw, validate_physicality,
    CovarianceMatrix, GaussianState, PhysicalityPolicy, PhysicalityReport, Quadrature,
    SymplecticSpectrum, EPS_PHYS, RECONSTRUCTION_EPS,
};
