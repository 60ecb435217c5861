//! File formats and provenance hashing.
//!
//! Covariance matrices travel as JSON objects that declare the quadrature
//! ordering explicitly; only the repo-wide "XYXY" ordering is accepted on
//! input, so files can never be silently transposed.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::state::{CovarianceMatrix, GaussianState};

pub const ORDERING: &str = "XYXY";

/// On-disk form of a Gaussian state: full row-major matrix plus displacement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub n_modes: usize,
    pub ordering: String,
    pub matrix: Vec<Vec<f64>>,
    pub displacement: Vec<f64>,
}

impl StateFile {
    pub fn from_state(state: &GaussianState) -> Self {
        let dim = state.cov().dim();
        let matrix = (0..dim)
            .map(|i| (0..dim).map(|j| state.cov().get(i, j)).collect())
            .collect();
        Self {
            n_modes: state.n_modes(),
            ordering: ORDERING.to_string(),
            matrix,
            displacement: state.displacement().iter().copied().collect(),
        }
    }

    pub fn into_state(self) -> Result<GaussianState> {
        if self.ordering != ORDERING {
            return Err(Error::Parameter(format!(
                "unsupported quadrature ordering {:?}: files must declare {:?}",
                self.ordering, ORDERING
            )));
        }
        let dim = 2 * self.n_modes;
        if self.matrix.len() != dim || self.matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension {
                expected: self.n_modes,
                actual: self.matrix.len() / 2,
            });
        }
        let flat: Vec<f64> = self.matrix.into_iter().flatten().collect();
        let cov = CovarianceMatrix::new(self.n_modes, DMatrix::from_row_slice(dim, dim, &flat))?;
        GaussianState::new(DVector::from_vec(self.displacement), cov)
    }
}

pub fn state_to_json(state: &GaussianState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateFile::from_state(state))?)
}

pub fn state_from_json(json: &str) -> Result<GaussianState> {
    let file: StateFile = serde_json::from_str(json)?;
    file.into_state()
}

pub fn write_state(path: &Path, state: &GaussianState) -> Result<()> {
    std::fs::write(path, state_to_json(state)?)?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<GaussianState> {
    state_from_json(&std::fs::read_to_string(path)?)
}

/// SHA-256 over the canonical byte representation of a state (mode count,
/// row-major covariance entries, displacement; all little-endian), used to tie
/// metric reports to their input.
pub fn state_sha256(state: &GaussianState) -> String {
    let mut hasher = Sha256::new();
    hasher.update((state.n_modes() as u64).to_le_bytes());
    let dim = state.cov().dim();
    for i in 0..dim {
        for j in 0..dim {
            hasher.update(state.cov().get(i, j).to_le_bytes());
        }
    }
    for x in state.displacement().iter() {
        hasher.update(x.to_le_bytes());
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
