//! Sweep execution and the CSV/JSON report formats.

use std::path::Path;

use gqc_core::homodyne::{
    estimate_error_bars, sample_quadratures, AcquisitionPlan, MetricSelector,
    QuadratureSampleSet,
};
use gqc_core::state::variance_to_db;
use gqc_core::{
    apply_channel, apply_two_channels, coherence, ppt_value, GaussianState, Quadrature,
    ThermalChannel,
};
use serde::Serialize;

use crate::config::{Scenario, SweepConfig};
use crate::error::{Error, Result};

/// Send the scenario's source state through its channel topology at one
/// parameter point.
pub fn propagate(
    scenario: Scenario,
    source: &GaussianState,
    loss: f64,
    delta: f64,
) -> Result<GaussianState> {
    let channel = ThermalChannel::from_loss(loss, delta)?;
    let out = match scenario {
        Scenario::SqueezedLoss | Scenario::SqueezedNoise => apply_channel(source, &channel, 0)?,
        Scenario::EprLoss | Scenario::EprNoiseOneMode => apply_channel(source, &channel, 1)?,
        Scenario::EprLossTwoModes | Scenario::EprNoiseTwoModes => {
            apply_two_channels(source, &channel, &channel)?
        }
    };
    Ok(out)
}

/// (loss, delta) for one swept parameter value.
fn channel_parameters(config: &SweepConfig, parameter: f64) -> (f64, f64) {
    if config.sweeps_loss() {
        (parameter, 0.0)
    } else {
        (config.fixed_loss, parameter)
    }
}

/// One metric across the analytic and (optional) sampled evaluation routes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MetricColumn {
    pub analytic: Option<f64>,
    pub sampled: Option<f64>,
    pub sampled_err: Option<f64>,
}

impl MetricColumn {
    fn analytic(value: f64) -> Self {
        Self {
            analytic: Some(value),
            sampled: None,
            sampled_err: None,
        }
    }
}

/// Metrics at one grid point. Metrics that do not apply to the scenario
/// (squeezing of a two-mode state, PPT of a one-mode state) stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: f64,
    pub squeezing_db_x: MetricColumn,
    pub squeezing_db_y: MetricColumn,
    pub ppt_value: MetricColumn,
    pub coherence_bits: MetricColumn,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter_name: String,
    pub sampling_enabled: bool,
    pub rows: Vec<SweepRow>,
}

/// Evaluate every grid point of a sweep configuration.
///
/// Analytic metrics always; when sampling is configured, each point also runs
/// the full measurement chain (sample, reconstruct, re-evaluate) with a
/// one-standard-deviation error bar per metric. Grid point `i` derives its
/// seed as `base_seed ^ i`, so points are independent and reproducible.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let source = config.source_state()?;
    let parameter_name = config.scenario.parameter_name().to_string();

    let mut rows = Vec::with_capacity(config.grid.points);
    for (index, parameter) in config.grid.values().into_iter().enumerate() {
        let row = evaluate_point(config, &source, parameter).map_err(|e| Error::AtGridPoint {
            index,
            parameter_name: parameter_name.clone(),
            parameter,
            source: Box::new(e),
        })?;
        rows.push(row);
    }
    Ok(SweepResult {
        parameter_name,
        sampling_enabled: config.sampling.is_some(),
        rows,
    })
}

fn evaluate_point(
    config: &SweepConfig,
    source: &GaussianState,
    parameter: f64,
) -> Result<SweepRow> {
    let (loss, delta) = channel_parameters(config, parameter);
    let state = propagate(config.scenario, source, loss, delta)?;
    let one_mode = state.n_modes() == 1;

    let mut row = SweepRow {
        parameter,
        squeezing_db_x: MetricColumn::default(),
        squeezing_db_y: MetricColumn::default(),
        ppt_value: MetricColumn::default(),
        coherence_bits: MetricColumn::analytic(coherence(&state)?.coherence_bits),
    };
    if one_mode {
        row.squeezing_db_x =
            MetricColumn::analytic(gqc_core::squeezing_db(&state, Quadrature::X)?);
        row.squeezing_db_y =
            MetricColumn::analytic(gqc_core::squeezing_db(&state, Quadrature::Y)?);
    } else {
        row.ppt_value = MetricColumn::analytic(ppt_value(&state)?.ppt_value);
    }

    if let Some(sampling) = &config.sampling {
        let index = grid_index(config, parameter);
        let seed = sampling.seed ^ index as u64;
        let plan = AcquisitionPlan::standard(state.n_modes());
        let samples = sample_quadratures(&state, sampling.n, seed, &plan)?;
        attach_sampled_metrics(&mut row, &samples, one_mode)?;
    }
    Ok(row)
}

fn grid_index(config: &SweepConfig, parameter: f64) -> usize {
    config
        .grid
        .values()
        .iter()
        .position(|&p| p == parameter)
        .unwrap_or(0)
}

fn attach_sampled_metrics(
    row: &mut SweepRow,
    samples: &QuadratureSampleSet,
    one_mode: bool,
) -> Result<()> {
    if one_mode {
        for (quadrature, column) in [
            (Quadrature::X, &mut row.squeezing_db_x),
            (Quadrature::Y, &mut row.squeezing_db_y),
        ] {
            let (variance, sigma) = estimate_error_bars(
                samples,
                MetricSelector::Variance {
                    mode: 0,
                    quadrature,
                },
            )?;
            // Propagate the variance error bar into dB.
            column.sampled = Some(variance_to_db(variance));
            column.sampled_err = Some(10.0 * sigma / (variance * std::f64::consts::LN_10));
        }
    } else {
        let (value, sigma) = estimate_error_bars(samples, MetricSelector::Ppt)?;
        row.ppt_value.sampled = Some(value);
        row.ppt_value.sampled_err = Some(sigma);
    }
    let (value, sigma) = estimate_error_bars(samples, MetricSelector::Coherence)?;
    row.coherence_bits.sampled = Some(value);
    row.coherence_bits.sampled_err = Some(sigma);
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV report format
// ---------------------------------------------------------------------------

const ANALYTIC_COLUMNS: [&str; 4] = [
    "squeezing_db_x",
    "squeezing_db_y",
    "ppt_value",
    "coherence_bits",
];

fn format_cell(value: Option<f64>) -> String {
    // Absent metrics stay empty (null), never zero.
    value.map(|v| format!("{v}")).unwrap_or_default()
}

fn parse_cell(text: &str, line: usize) -> Result<Option<f64>> {
    if text.is_empty() {
        return Ok(None);
    }
    text.parse::<f64>().map(Some).map_err(|_| Error::Csv {
        line,
        message: format!("invalid number {text:?}"),
    })
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        let mut header = vec![self.parameter_name.clone()];
        for name in ANALYTIC_COLUMNS {
            header.push(name.to_string());
        }
        if self.sampling_enabled {
            for name in ANALYTIC_COLUMNS {
                header.push(format!("{name}_sampled"));
                header.push(format!("{name}_err"));
            }
        }
        let mut out = header.join(",");
        out.push('\n');

        for row in &self.rows {
            let columns = [
                &row.squeezing_db_x,
                &row.squeezing_db_y,
                &row.ppt_value,
                &row.coherence_bits,
            ];
            let mut cells = vec![format!("{}", row.parameter)];
            for column in columns {
                cells.push(format_cell(column.analytic));
            }
            if self.sampling_enabled {
                for column in columns {
                    cells.push(format_cell(column.sampled));
                    cells.push(format_cell(column.sampled_err));
                }
            }
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::Csv {
            line: 1,
            message: "empty report".into(),
        })?;
        let fields: Vec<&str> = header.split(',').collect();
        let analytic_only: Vec<String> = ANALYTIC_COLUMNS.iter().map(|s| s.to_string()).collect();
        let sampling_enabled = match fields.len() {
            5 => false,
            13 => true,
            n => {
                return Err(Error::Csv {
                    line: 1,
                    message: format!("expected 5 or 13 columns, got {n}"),
                })
            }
        };
        let parameter_name = fields[0].to_string();
        if fields[1..5] != analytic_only[..] {
            return Err(Error::Csv {
                line: 1,
                message: format!("unexpected metric columns {:?}", &fields[1..5]),
            });
        }

        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            if line.is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != fields.len() {
                return Err(Error::Csv {
                    line: line_no,
                    message: format!("expected {} cells, got {}", fields.len(), cells.len()),
                });
            }
            let parameter = cells[0].parse::<f64>().map_err(|_| Error::Csv {
                line: line_no,
                message: format!("invalid parameter {:?}", cells[0]),
            })?;
            let mut columns = [MetricColumn::default(); 4];
            for (k, column) in columns.iter_mut().enumerate() {
                column.analytic = parse_cell(cells[1 + k], line_no)?;
                if sampling_enabled {
                    column.sampled = parse_cell(cells[5 + 2 * k], line_no)?;
                    column.sampled_err = parse_cell(cells[6 + 2 * k], line_no)?;
                }
            }
            rows.push(SweepRow {
                parameter,
                squeezing_db_x: columns[0],
                squeezing_db_y: columns[1],
                ppt_value: columns[2],
                coherence_bits: columns[3],
            });
        }
        Ok(Self {
            parameter_name,
            sampling_enabled,
            rows,
        })
    }
}

/// Companion metadata written next to every report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata<'a> {
    pub tool_version: &'static str,
    pub config: &'a SweepConfig,
    /// Per-point seeds actually used (base ^ index), when sampling ran.
    pub derived_seeds: Option<Vec<u64>>,
}

/// Write the CSV report plus a `<path>.meta.json` echo of the configuration.
pub fn emit_report(result: &SweepResult, config: &SweepConfig, path: &Path) -> Result<()> {
    std::fs::write(path, result.to_csv())?;
    let derived_seeds = config.sampling.as_ref().map(|s| {
        (0..config.grid.points)
            .map(|i| s.seed ^ i as u64)
            .collect()
    });
    let metadata = ReportMetadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        config,
        derived_seeds,
    };
    let meta_path = meta_path(path);
    std::fs::write(meta_path, serde_json::to_string_pretty(&metadata)?)?;
    Ok(())
}

pub fn meta_path(csv_path: &Path) -> std::path::PathBuf {
    let mut name = csv_path.as_os_str().to_os_string();
    name.push(".meta.json");
    std::path::PathBuf::from(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GridSpec, SamplingConfig};

    fn loss_config(scenario: Scenario, points: usize) -> SweepConfig {
        SweepConfig {
            scenario,
            source_db: crate::config::DEFAULT_SOURCE_DB,
            fixed_loss: 0.4,
            grid: GridSpec {
                start: 0.0,
                stop: 1.0,
                points,
            },
            sampling: None,
            metric: None,
        }
    }

    #[test]
    fn squeezed_loss_sweep_matches_paper_shape() {
        let result = run_sweep(&loss_config(Scenario::SqueezedLoss, 11)).unwrap();
        assert_eq!(result.rows.len(), 11);
        // Coherence decreases strictly and hits exactly zero at full loss.
        let coherence: Vec<f64> = result
            .rows
            .iter()
            .map(|r| r.coherence_bits.analytic.unwrap())
            .collect();
        for pair in coherence.windows(2) {
            assert!(pair[1] < pair[0], "coherence not strictly decreasing");
        }
        assert_eq!(*coherence.last().unwrap(), 0.0);
        assert!((coherence[0] - 0.574_139_419_8).abs() < 1e-9);
        // Squeezing relaxes toward the SNL from below.
        for row in &result.rows {
            assert!(row.squeezing_db_x.analytic.unwrap() <= 0.0 + 1e-12);
            assert!(row.ppt_value.analytic.is_none());
        }
    }

    #[test]
    fn epr_loss_sweep_stays_entangled() {
        let result = run_sweep(&loss_config(Scenario::EprLoss, 11)).unwrap();
        for (i, row) in result.rows.iter().enumerate() {
            let ppt = row.ppt_value.analytic.unwrap();
            if i + 1 < result.rows.len() {
                assert!(ppt < 1.0, "entanglement must survive any partial loss");
            } else {
                assert!((ppt - 1.0).abs() < 1e-9, "separable exactly at full loss");
            }
            assert!(row.squeezing_db_x.analytic.is_none());
        }
    }

    #[test]
    fn noise_sweep_keeps_coherence_positive() {
        let config = SweepConfig {
            scenario: Scenario::SqueezedNoise,
            grid: GridSpec {
                start: 0.0,
                stop: 5.0,
                points: 11,
            },
            ..loss_config(Scenario::SqueezedNoise, 11)
        };
        let result = run_sweep(&config).unwrap();
        for row in &result.rows {
            assert!(row.coherence_bits.analytic.unwrap() > 0.0);
        }
        // Squeezing dies within the grid (beyond delta = 0.74).
        assert!(result.rows[0].squeezing_db_x.analytic.unwrap() < 0.0);
        assert!(result.rows.last().unwrap().squeezing_db_x.analytic.unwrap() > 0.0);
    }

    #[test]
    fn two_mode_scenarios_agree_with_mode_swap() {
        // Same channel on both modes: swapping the modes of the EPR state
        // cannot change the PPT value.
        let config = SweepConfig {
            scenario: Scenario::EprNoiseTwoModes,
            grid: GridSpec {
                start: 0.0,
                stop: 3.0,
                points: 7,
            },
            ..loss_config(Scenario::EprNoiseTwoModes, 7)
        };
        let source = config.source_state().unwrap();
        for &delta in &[0.0, 0.5, 1.7] {
            let state = propagate(config.scenario, &source, 0.4, delta).unwrap();
            let direct = ppt_value(&state).unwrap().ppt_value;

            let channel = ThermalChannel::from_loss(0.4, delta).unwrap();
            let swapped = apply_two_channels(&source, &channel, &channel).unwrap();
            let m = swapped.cov().entries();
            let perm = [2usize, 3, 0, 1];
            let swapped_entries =
                nalgebra::DMatrix::from_fn(4, 4, |i, j| m[(perm[i], perm[j])]);
            let swapped_state = GaussianState::from_covariance(
                gqc_core::CovarianceMatrix::new(2, swapped_entries).unwrap(),
            );
            let via_swap = ppt_value(&swapped_state).unwrap().ppt_value;
            assert!((direct - via_swap).abs() < 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let result = run_sweep(&loss_config(Scenario::EprLoss, 5)).unwrap();
        let csv = result.to_csv();
        let back = SweepResult::from_csv(&csv).unwrap();
        assert_eq!(back, result);
        assert_eq!(back.to_csv(), csv);
        // Null cells stay null.
        assert!(csv.lines().nth(1).unwrap().starts_with("0,,,"));
    }

    #[test]
    fn sampled_sweep_reports_error_bars_and_matches_analytic() {
        let config = SweepConfig {
            scenario: Scenario::SqueezedLoss,
            grid: GridSpec {
                start: 0.0,
                stop: 0.8,
                points: 3,
            },
            sampling: Some(SamplingConfig {
                n: 100_000,
                seed: 41,
            }),
            ..loss_config(Scenario::SqueezedLoss, 3)
        };
        let result = run_sweep(&config).unwrap();
        assert!(result.sampling_enabled);
        for row in &result.rows {
            let c = &row.coherence_bits;
            let err = c.sampled_err.unwrap();
            assert!(err > 0.0);
            assert!(
                (c.sampled.unwrap() - c.analytic.unwrap()).abs() <= 4.0 * err.max(1e-3),
                "sampled coherence too far from analytic at {}",
                row.parameter
            );
            let x = &row.squeezing_db_x;
            assert!((x.sampled.unwrap() - x.analytic.unwrap()).abs() < 0.1);
        }
        let csv = result.to_csv();
        let back = SweepResult::from_csv(&csv).unwrap();
        assert_eq!(back.to_csv(), csv);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 13);
    }

    #[test]
    fn emit_report_writes_csv_and_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let config = loss_config(Scenario::SqueezedLoss, 4);
        let result = run_sweep(&config).unwrap();
        let path = dir.path().join("sweep.csv");
        emit_report(&result, &config, &path).unwrap();
        let csv = std::fs::read_to_string(&path).unwrap();
        assert_eq!(SweepResult::from_csv(&csv).unwrap(), result);
        let meta: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(meta_path(&path)).unwrap()).unwrap();
        assert_eq!(meta["config"]["scenario"], "squeezed_loss");
        assert!(meta["tool_version"].is_string());
        assert!(meta["derived_seeds"].is_null());
    }
}
