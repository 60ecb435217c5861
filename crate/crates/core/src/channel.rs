//! Gaussian thermal-noise channel acting on designated modes.
//!
//! The single-mode map is x̄ -> sqrt(eta) x̄, V -> eta V + (1 - eta)(delta + 1) I
//! on the affected mode, with cross-covariances to other modes scaled by
//! sqrt(eta). delta = 0 is the pure lossy channel; loss L = 1 - eta.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{CovarianceMatrix, GaussianState, PhysicalityPolicy};

/// Transmission and excess-noise parameters of a thermal-noise channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalChannel {
    eta: f64,
    delta: f64,
}

impl ThermalChannel {
    /// Vacuum noise entering through the loss port, in shot-noise units.
    pub const VACUUM_NOISE: f64 = 1.0;

    pub fn new(eta: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
            return Err(Error::Parameter(format!(
                "transmission must lie in [0, 1], got {eta}"
            )));
        }
        if delta < 0.0 || !delta.is_finite() {
            return Err(Error::Parameter(format!(
                "excess noise must be nonnegative, got {delta}"
            )));
        }
        Ok(Self { eta, delta })
    }

    /// Channel specified by loss L = 1 - eta.
    pub fn from_loss(loss: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&loss) || !loss.is_finite() {
            return Err(Error::Parameter(format!(
                "loss must lie in [0, 1], got {loss}"
            )));
        }
        Self::new(1.0 - loss, delta)
    }

    /// Identity channel (full transmission, no excess noise).
    pub fn identity() -> Self {
        Self { eta: 1.0, delta: 0.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn loss(&self) -> f64 {
        1.0 - self.eta
    }

    /// Added noise (1 - eta)(delta + vacuum) entering the affected mode.
    fn added_noise(&self) -> f64 {
        (1.0 - self.eta) * (self.delta + Self::VACUUM_NOISE)
    }
}

/// Send one mode of a state through a thermal-noise channel.
pub fn apply_channel(
    state: &GaussianState,
    channel: &ThermalChannel,
    mode_index: usize,
) -> Result<GaussianState> {
    let n = state.n_modes();
    if mode_index >= n {
        return Err(Error::Index {
            index: mode_index,
            bound: n,
        });
    }

    let eta = channel.eta();
    let sqrt_eta = eta.sqrt();
    let lam = channel.added_noise();
    let dim = 2 * n;
    let lo = 2 * mode_index;

    let mut m = state.cov().entries().clone();
    for i in 0..dim {
        for j in 0..dim {
            let i_in = i == lo || i == lo + 1;
            let j_in = j == lo || j == lo + 1;
            match (i_in, j_in) {
                (true, true) => m[(i, j)] *= eta,
                (true, false) | (false, true) => m[(i, j)] *= sqrt_eta,
                (false, false) => {}
            }
        }
    }
    m[(lo, lo)] += lam;
    m[(lo + 1, lo + 1)] += lam;

    let mut d = state.displacement().clone();
    d[lo] *= sqrt_eta;
    d[lo + 1] *= sqrt_eta;

    let cov = match state.cov().policy() {
        PhysicalityPolicy::Strict => CovarianceMatrix::new(n, m)?,
        PhysicalityPolicy::Reconstructed => CovarianceMatrix::reconstructed(n, m)?.0,
    };
    GaussianState::new(d, cov)
}

/// Send both modes of a two-mode state through their own channels.
pub fn apply_two_channels(
    state: &GaussianState,
    channel_a: &ThermalChannel,
    channel_b: &ThermalChannel,
) -> Result<GaussianState> {
    if state.n_modes() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            actual: state.n_modes(),
        });
    }
    apply_channel(&apply_channel(state, channel_a, 0)?, channel_b, 1)
}
