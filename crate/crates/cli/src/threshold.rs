//! Bisection search for the excess noise that kills squeezing or
//! entanglement.

use gqc_core::ppt_value;
use serde::{Deserialize, Serialize};

use crate::config::{Scenario, SweepConfig};
use crate::error::{Error, Result};
use crate::sweep::propagate;

/// Boundary whose crossing is searched for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMetric {
    /// Squeezed-quadrature variance reaches the shot noise limit.
    SqueezingCrossesSnl,
    /// PPT value reaches 1 (entanglement dies).
    PptCrossesOne,
}

impl ThresholdMetric {
    pub fn default_for(scenario: Scenario) -> Self {
        if scenario.n_modes() == 1 {
            ThresholdMetric::SqueezingCrossesSnl
        } else {
            ThresholdMetric::PptCrossesOne
        }
    }

    fn name(self) -> &'static str {
        match self {
            ThresholdMetric::SqueezingCrossesSnl => "squeezing_crosses_snl",
            ThresholdMetric::PptCrossesOne => "ppt_crosses_one",
        }
    }
}

/// Excess noise is searched over this bracket.
const BRACKET: (f64, f64) = (0.0, 100.0);

/// Absolute tolerance on the located noise level.
const TOLERANCE: f64 = 1e-6;

/// Find the excess noise delta* at which the metric crosses its boundary,
/// with the channel loss held fixed. The metric is evaluated analytically and
/// bisected to 1e-6.
pub fn find_threshold(
    scenario: Scenario,
    metric: ThresholdMetric,
    source_db: (f64, f64),
    fixed_loss: f64,
) -> Result<f64> {
    if scenario.sweeps_loss() {
        return Err(Error::Config(format!(
            "threshold search runs over excess noise; scenario {scenario:?} sweeps loss"
        )));
    }
    match metric {
        ThresholdMetric::SqueezingCrossesSnl if scenario.n_modes() != 1 => {
            return Err(Error::Config(
                "squeezing_crosses_snl needs a single-mode scenario".into(),
            ))
        }
        ThresholdMetric::PptCrossesOne if scenario.n_modes() != 2 => {
            return Err(Error::Config(
                "ppt_crosses_one needs a two-mode scenario".into(),
            ))
        }
        _ => {}
    }

    let source = SweepConfig {
        scenario,
        source_db,
        fixed_loss,
        grid: crate::config::GridSpec {
            start: 0.0,
            stop: 1.0,
            points: 2,
        },
        sampling: None,
        metric: Some(metric),
    }
    .source_state()?;

    // Signed distance from the boundary; negative below, positive above.
    let excess = |delta: f64| -> Result<f64> {
        let state = propagate(scenario, &source, fixed_loss, delta)?;
        match metric {
            ThresholdMetric::SqueezingCrossesSnl => Ok(state.cov().get(0, 0) - 1.0),
            ThresholdMetric::PptCrossesOne => Ok(ppt_value(&state)?.ppt_value - 1.0),
        }
    };

    let (mut lo, mut hi) = BRACKET;
    let f_lo = excess(lo)?;
    let f_hi = excess(hi)?;
    if f_lo >= 0.0 {
        return Err(Error::NoCrossing {
            metric: metric.name().into(),
            endpoint: format!("delta = {lo} (already at or above the boundary)"),
            value: f_lo,
        });
    }
    if f_hi <= 0.0 {
        return Err(Error::NoCrossing {
            metric: metric.name().into(),
            endpoint: format!("delta = {hi} (still below the boundary)"),
            value: f_hi,
        });
    }

    while hi - lo > TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Convenience wrapper: threshold for a sweep configuration, using its
/// configured metric or the scenario default.
pub fn find_threshold_for(config: &SweepConfig) -> Result<f64> {
    let metric = config
        .metric
        .unwrap_or_else(|| ThresholdMetric::default_for(config.scenario));
    find_threshold(config.scenario, metric, config.source_db, config.fixed_loss)
}
