//! Synthetic homodyne measurement chain.
//!
//! Quadrature time series are drawn from the multivariate normal statistics of
//! a Gaussian state, written to and read from labeled CSV files, and turned
//! back into covariance matrices with the correlation-variance estimators
//! V_ij = [Var(x_i + x_j) - Var(x_i) - Var(x_j)] / 2 (equivalently the minus
//! form, and algebraically equal to the direct sample covariance on the same
//! samples). Per-entry error bars come from non-overlapping blocking.
//!
//! One acquisition group holds the quadratures measured simultaneously: X and
//! Y of the same mode never share a group. Samples are modeled as
//! already-demodulated i.i.d. draws.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::metrics;
use crate::state::{quadrature_index, CovarianceMatrix, GaussianState, Quadrature};

/// Samples per acquisition used by default (oscilloscope record length).
pub const DEFAULT_SAMPLE_COUNT: usize = 500_000;

/// Number of non-overlapping blocks used for error bars.
pub const BOOTSTRAP_BLOCKS: usize = 100;

/// Relative tolerance for the sum-form / minus-form / direct estimator
/// agreement check; the three are algebraically identical, so a larger gap
/// indicates corrupted input.
const ESTIMATOR_IDENTITY_TOL: f64 = 1e-12;

/// Which quadratures are measured, and which of them simultaneously.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcquisitionPlan {
    groups: Vec<Vec<(usize, Quadrature)>>,
}

impl AcquisitionPlan {
    pub fn new(groups: Vec<Vec<(usize, Quadrature)>>) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::Plan("plan has no acquisition groups".into()));
        }
        for (g, group) in groups.iter().enumerate() {
            if group.is_empty() {
                return Err(Error::Plan(format!("acquisition group {g} is empty")));
            }
            for (k, &(mode, quad)) in group.iter().enumerate() {
                if group[..k].contains(&(mode, quad)) {
                    return Err(Error::Plan(format!(
                        "acquisition group {g} lists {}{} twice",
                        quad.label(),
                        mode + 1
                    )));
                }
                let conjugate = match quad {
                    Quadrature::X => Quadrature::Y,
                    Quadrature::Y => Quadrature::X,
                };
                if group.contains(&(mode, conjugate)) {
                    return Err(Error::Plan(format!(
                        "X{m} and Y{m} of the same mode cannot be measured simultaneously",
                        m = mode + 1
                    )));
                }
            }
        }
        Ok(Self { groups })
    }

    /// All X quadratures jointly, then all Y quadratures jointly — the
    /// acquisition pattern that measures every entry of an EPR-form matrix.
    pub fn standard(n_modes: usize) -> Self {
        let xs = (0..n_modes).map(|m| (m, Quadrature::X)).collect();
        let ys = (0..n_modes).map(|m| (m, Quadrature::Y)).collect();
        Self { groups: vec![xs, ys] }
    }

    /// Parse a compact plan such as `"X1,X2;Y1,Y2"`: groups separated by
    /// semicolons, labels by commas, modes numbered from 1.
    pub fn parse(text: &str) -> Result<Self> {
        let mut groups = Vec::new();
        for group_text in text.split(';') {
            let mut group = Vec::new();
            for label in group_text.split(',') {
                group.push(parse_label(label.trim()).map_err(|m| Error::Plan(m))?);
            }
            groups.push(group);
        }
        Self::new(groups)
    }

    pub fn groups(&self) -> &[Vec<(usize, Quadrature)>] {
        &self.groups
    }

    fn max_mode(&self) -> usize {
        self.groups
            .iter()
            .flatten()
            .map(|&(m, _)| m)
            .max()
            .unwrap_or(0)
    }
}

impl std::fmt::Display for AcquisitionPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let text: Vec<String> = self
            .groups
            .iter()
            .map(|g| {
                g.iter()
                    .map(|&(m, q)| format!("{}{}", q.label(), m + 1))
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        write!(f, "{}", text.join(";"))
    }
}

fn parse_label(label: &str) -> std::result::Result<(usize, Quadrature), String> {
    let mut chars = label.chars();
    let quad = match chars.next() {
        Some('X') => Quadrature::X,
        Some('Y') => Quadrature::Y,
        other => return Err(format!("label {label:?} must start with X or Y, got {other:?}")),
    };
    let mode: usize = chars
        .as_str()
        .parse()
        .map_err(|_| format!("label {label:?} has no valid mode number"))?;
    if mode == 0 {
        return Err(format!("label {label:?}: modes are numbered from 1"));
    }
    Ok((mode - 1, quad))
}

/// Time series recorded for one quadrature of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRecord {
    pub mode: usize,
    pub quadrature: Quadrature,
    pub samples: Vec<f64>,
}

impl QuadratureRecord {
    fn label(&self) -> String {
        format!("{}{}", self.quadrature.label(), self.mode + 1)
    }
}

/// Records acquired simultaneously; all sample vectors have equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionGroup {
    pub records: Vec<QuadratureRecord>,
}

impl AcquisitionGroup {
    pub fn len(&self) -> usize {
        self.records.first().map_or(0, |r| r.samples.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn slice(&self, start: usize, end: usize) -> AcquisitionGroup {
        AcquisitionGroup {
            records: self
                .records
                .iter()
                .map(|r| QuadratureRecord {
                    mode: r.mode,
                    quadrature: r.quadrature,
                    samples: r.samples[start..end].to_vec(),
                })
                .collect(),
        }
    }
}

/// Labeled quadrature samples grouped by simultaneous acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSampleSet {
    n_modes: usize,
    groups: Vec<AcquisitionGroup>,
    rng_seed: Option<u64>,
}

impl QuadratureSampleSet {
    pub fn new(
        n_modes: usize,
        groups: Vec<AcquisitionGroup>,
        rng_seed: Option<u64>,
    ) -> Result<Self> {
        // Group structure must itself be a valid plan.
        AcquisitionPlan::new(
            groups
                .iter()
                .map(|g| g.records.iter().map(|r| (r.mode, r.quadrature)).collect())
                .collect(),
        )?;
        for (g, group) in groups.iter().enumerate() {
            let len = group.len();
            if len == 0 {
                return Err(Error::InsufficientData(format!(
                    "acquisition group {g} has no samples"
                )));
            }
            for record in &group.records {
                if record.samples.len() != len {
                    return Err(Error::LengthMismatch {
                        line: 0,
                        expected: len,
                        actual: record.samples.len(),
                    });
                }
                if record.mode >= n_modes {
                    return Err(Error::Index {
                        index: record.mode,
                        bound: n_modes,
                    });
                }
            }
        }
        Ok(Self {
            n_modes,
            groups,
            rng_seed,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn groups(&self) -> &[AcquisitionGroup] {
        &self.groups
    }

    pub fn rng_seed(&self) -> Option<u64> {
        self.rng_seed
    }

    /// Samples per acquisition (the smallest group when they differ).
    pub fn sample_count(&self) -> usize {
        self.groups.iter().map(|g| g.len()).min().unwrap_or(0)
    }

    /// Combine sample sets recorded separately (for example one CSV per
    /// acquisition group) into one.
    pub fn merge(sets: impl IntoIterator<Item = QuadratureSampleSet>) -> Result<Self> {
        let mut iter = sets.into_iter();
        let mut merged = iter
            .next()
            .ok_or_else(|| Error::InsufficientData("no sample sets to merge".into()))?;
        for set in iter {
            if set.n_modes != merged.n_modes {
                return Err(Error::Dimension {
                    expected: merged.n_modes,
                    actual: set.n_modes,
                });
            }
            merged.groups.extend(set.groups);
            merged.rng_seed = merged.rng_seed.or(set.rng_seed);
        }
        Ok(merged)
    }

    /// Render one acquisition group in the sample CSV format.
    pub fn group_to_csv(&self, group_index: usize) -> Result<String> {
        let group = self.groups.get(group_index).ok_or(Error::Index {
            index: group_index,
            bound: self.groups.len(),
        })?;
        let columns: Vec<String> = group.records.iter().map(|r| r.label()).collect();
        let mut out = String::new();
        out.push_str(&format!(
            "# modes={} ordering=XYXY columns={}",
            self.n_modes,
            columns.join(",")
        ));
        if let Some(seed) = self.rng_seed {
            out.push_str(&format!(" seed={seed}"));
        }
        out.push('\n');
        let len = group.len();
        let mut row = String::new();
        for i in 0..len {
            row.clear();
            for (k, record) in group.records.iter().enumerate() {
                if k > 0 {
                    row.push(',');
                }
                row.push_str(&format!("{}", record.samples[i]));
            }
            out.push_str(&row);
            out.push('\n');
        }
        Ok(out)
    }

    /// Write one CSV file per acquisition group next to `prefix`; returns the
    /// paths written. A single group goes to `<prefix>.csv`, multiple groups
    /// to `<prefix>_g<k>.csv`.
    pub fn write_csv_files(&self, prefix: &Path) -> Result<Vec<std::path::PathBuf>> {
        let mut paths = Vec::new();
        for g in 0..self.groups.len() {
            let path = if self.groups.len() == 1 {
                prefix.with_extension("csv")
            } else {
                prefix.with_extension(format!("g{g}.csv"))
            };
            let mut file = std::fs::File::create(&path)?;
            file.write_all(self.group_to_csv(g)?.as_bytes())?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Draw `n` samples of every planned quadrature from the state's statistics.
///
/// Each acquisition group is an independent draw from the multivariate normal
/// with the matching displacement components and covariance submatrix; the
/// stream is fully determined by `(seed, group index)`.
pub fn sample_quadratures(
    state: &GaussianState,
    n: usize,
    seed: u64,
    plan: &AcquisitionPlan,
) -> Result<QuadratureSampleSet> {
    if n == 0 {
        return Err(Error::Parameter("sample count must be positive".into()));
    }
    if plan.max_mode() >= state.n_modes() {
        return Err(Error::Index {
            index: plan.max_mode(),
            bound: state.n_modes(),
        });
    }

    let mut groups = Vec::with_capacity(plan.groups().len());
    for (g, group_plan) in plan.groups().iter().enumerate() {
        let indices: Vec<usize> = group_plan
            .iter()
            .map(|&(m, q)| quadrature_index(m, q))
            .collect();
        let dim = indices.len();
        let mean = DVector::from_iterator(dim, indices.iter().map(|&i| state.displacement()[i]));
        let sub = DMatrix::from_fn(dim, dim, |r, c| state.cov().get(indices[r], indices[c]));
        let chol = sub.clone().cholesky().ok_or_else(|| {
            Error::NumericalFailure(
                "covariance submatrix is not positive definite; cannot sample".into(),
            )
        })?;
        let l = chol.l();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(g as u64);
        let normal = StandardNormal;

        let mut columns: Vec<Vec<f64>> = vec![Vec::with_capacity(n); dim];
        let mut z = DVector::zeros(dim);
        for _ in 0..n {
            for zi in z.iter_mut() {
                *zi = normal.sample(&mut rng);
            }
            let x = &mean + &l * &z;
            for (k, col) in columns.iter_mut().enumerate() {
                col.push(x[k]);
            }
        }

        let records = group_plan
            .iter()
            .zip(columns)
            .map(|(&(mode, quadrature), samples)| QuadratureRecord {
                mode,
                quadrature,
                samples,
            })
            .collect();
        groups.push(AcquisitionGroup { records });
    }

    QuadratureSampleSet::new(state.n_modes(), groups, Some(seed))
}

/// Parse one sample CSV (a single acquisition group).
pub fn parse_samples_csv(text: &str) -> Result<QuadratureSampleSet> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format {
            line: 1,
            message: "empty file".into(),
        })?;
    let header = header.strip_prefix('#').ok_or_else(|| Error::Format {
        line: 1,
        message: "expected a `# key=value ...` header line".into(),
    })?;

    let mut modes = None;
    let mut ordering = None;
    let mut columns = None;
    let mut seed = None;
    for token in header.split_whitespace() {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::Format {
            line: 1,
            message: format!("malformed header token {token:?}"),
        })?;
        match key {
            "modes" => {
                modes = Some(value.parse::<usize>().map_err(|_| Error::Format {
                    line: 1,
                    message: format!("invalid modes count {value:?}"),
                })?)
            }
            "ordering" => ordering = Some(value.to_string()),
            "columns" => columns = Some(value.to_string()),
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|_| Error::Format {
                    line: 1,
                    message: format!("invalid seed {value:?}"),
                })?)
            }
            other => {
                return Err(Error::Format {
                    line: 1,
                    message: format!("unknown header key {other:?}"),
                })
            }
        }
    }
    let n_modes = modes.ok_or_else(|| Error::Format {
        line: 1,
        message: "header is missing modes=".into(),
    })?;
    let ordering = ordering.ok_or_else(|| Error::Format {
        line: 1,
        message: "header is missing ordering=".into(),
    })?;
    if ordering != crate::serialize::ORDERING {
        return Err(Error::Format {
            line: 1,
            message: format!("unsupported ordering declaration {ordering:?}; only XYXY is defined"),
        });
    }
    let columns = columns.ok_or_else(|| Error::Format {
        line: 1,
        message: "header is missing columns=".into(),
    })?;
    let labels: Vec<(usize, Quadrature)> = columns
        .split(',')
        .map(|l| {
            parse_label(l.trim()).map_err(|message| Error::Format { line: 1, message })
        })
        .collect::<Result<_>>()?;

    let mut samples: Vec<Vec<f64>> = vec![Vec::new(); labels.len()];
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != labels.len() {
            return Err(Error::LengthMismatch {
                line: line_no,
                expected: labels.len(),
                actual: fields.len(),
            });
        }
        for (k, field) in fields.iter().enumerate() {
            let value = field.trim().parse::<f64>().map_err(|_| Error::Format {
                line: line_no,
                message: format!("invalid number {field:?}"),
            })?;
            samples[k].push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::Format {
            line: 1,
            message: "file holds no sample rows".into(),
        });
    }

    let records = labels
        .into_iter()
        .zip(samples)
        .map(|((mode, quadrature), samples)| QuadratureRecord {
            mode,
            quadrature,
            samples,
        })
        .collect();
    QuadratureSampleSet::new(n_modes, vec![AcquisitionGroup { records }], seed)
}

/// Read one sample CSV file (a single acquisition group).
pub fn ingest_samples(path: &Path) -> Result<QuadratureSampleSet> {
    parse_samples_csv(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

/// Neumaier-compensated sum, so the sum-form and direct covariance estimators
/// agree to the mandated 1e-12 even over 5e5-sample records.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

fn mean_of(xs: &[f64]) -> f64 {
    compensated_sum(xs.iter().copied()) / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
fn variance_of(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean_of(xs);
    compensated_sum(xs.iter().map(|&x| (x - m) * (x - m))) / (xs.len() - 1) as f64
}

/// Unbiased sample covariance (two-pass).
fn covariance_of(xs: &[f64], ys: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = mean_of(xs);
    let my = mean_of(ys);
    compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)))
        / (xs.len() - 1) as f64
}

/// Pooled variance of one quadrature over every acquisition that measured it.
fn pooled_variance(slices: &[&[f64]]) -> f64 {
    let all: Vec<f64> = slices.iter().flat_map(|s| s.iter().copied()).collect();
    variance_of(&all)
}

/// Off-diagonal estimate from one jointly acquired pair: the correlation
/// variance sum form, cross-checked against the minus form and the direct
/// sample covariance (all three are algebraically identical).
fn correlation_variance_entry(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let mx = mean_of(xs);
    let my = mean_of(ys);
    let n1 = (xs.len() - 1) as f64;
    let var_x = compensated_sum(xs.iter().map(|&x| (x - mx) * (x - mx))) / n1;
    let var_y = compensated_sum(ys.iter().map(|&y| (y - my) * (y - my))) / n1;
    let var_sum = compensated_sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| ((x - mx) + (y - my)) * ((x - mx) + (y - my))),
    ) / n1;
    let var_diff = compensated_sum(
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| ((x - mx) - (y - my)) * ((x - mx) - (y - my))),
    ) / n1;
    let direct =
        compensated_sum(xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my))) / n1;

    let sum_form = 0.5 * (var_sum - var_x - var_y);
    let minus_form = -0.5 * (var_diff - var_x - var_y);
    let tol = ESTIMATOR_IDENTITY_TOL * direct.abs().max(1.0);
    if (sum_form - direct).abs() > tol || (minus_form - direct).abs() > tol {
        return Err(Error::NumericalFailure(format!(
            "correlation-variance estimators disagree: sum form {sum_form}, minus form {minus_form}, direct {direct}"
        )));
    }
    Ok(sum_form)
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

/// Covariance matrix estimated from samples, with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct ReconstructedCovariance {
    pub cov: CovarianceMatrix,
    /// Standard error of each entry from blocking; zero for entries fixed by
    /// convention or when too few samples are available.
    pub standard_errors: DMatrix<f64>,
    /// Samples per acquisition that entered the estimate.
    pub n_samples: usize,
    /// Clamping, convention and coverage notes accumulated along the way.
    pub warnings: Vec<String>,
}

/// Raw entry estimation shared by the full reconstruction and its blocks.
/// Unmeasured entries stay zero; returns the measured index pairs.
fn estimate_entries(samples: &QuadratureSampleSet) -> Result<(DMatrix<f64>, Vec<(usize, usize)>)> {
    let dim = 2 * samples.n_modes();
    let mut matrix = DMatrix::zeros(dim, dim);

    // Diagonal: pooled variances; every quadrature must have been measured.
    let mut missing = Vec::new();
    for mode in 0..samples.n_modes() {
        for quad in [Quadrature::X, Quadrature::Y] {
            let slices: Vec<&[f64]> = samples
                .groups()
                .iter()
                .flat_map(|g| g.records.iter())
                .filter(|r| r.mode == mode && r.quadrature == quad)
                .map(|r| r.samples.as_slice())
                .collect();
            if slices.is_empty() {
                missing.push(format!("{}{}", quad.label(), mode + 1));
                continue;
            }
            let idx = quadrature_index(mode, quad);
            matrix[(idx, idx)] = pooled_variance(&slices);
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingData(missing));
    }

    // Off-diagonals: one estimate per jointly acquired pair, sample-weighted
    // when the same pair appears in several acquisitions.
    let mut weighted: std::collections::BTreeMap<(usize, usize), (f64, f64)> =
        std::collections::BTreeMap::new();
    for group in samples.groups() {
        for (k, rec_a) in group.records.iter().enumerate() {
            for rec_b in group.records.iter().skip(k + 1) {
                let i = quadrature_index(rec_a.mode, rec_a.quadrature);
                let j = quadrature_index(rec_b.mode, rec_b.quadrature);
                let value = correlation_variance_entry(&rec_a.samples, &rec_b.samples)?;
                let w = rec_a.samples.len() as f64;
                let key = (i.min(j), i.max(j));
                let slot = weighted.entry(key).or_insert((0.0, 0.0));
                slot.0 += w * value;
                slot.1 += w;
            }
        }
    }
    let mut measured = Vec::new();
    for ((i, j), (sum, weight)) in weighted {
        matrix[(i, j)] = sum / weight;
        matrix[(j, i)] = matrix[(i, j)];
        measured.push((i, j));
    }
    Ok((matrix, measured))
}

/// Reconstruct a covariance matrix from quadrature samples.
///
/// Diagonal entries are sample variances; off-diagonals use the correlation
/// variances of the jointly acquired pairs. Same-mode X-Y entries are not
/// simultaneously measurable and are fixed to 0 by convention; other
/// unmeasured entries are also 0 but flagged in the warnings.
pub fn reconstruct_covariance(samples: &QuadratureSampleSet) -> Result<ReconstructedCovariance> {
    let n_modes = samples.n_modes();
    let dim = 2 * n_modes;
    let (matrix, measured) = estimate_entries(samples)?;

    let mut warnings = Vec::new();
    let mut convention = Vec::new();
    let mut uncovered = Vec::new();
    for i in 0..dim {
        for j in (i + 1)..dim {
            if measured.contains(&(i, j)) {
                continue;
            }
            if j == i + 1 && i % 2 == 0 {
                convention.push(format!("(X{m},Y{m})", m = i / 2 + 1));
            } else {
                uncovered.push(format!("({i},{j})"));
            }
        }
    }
    if !convention.is_empty() {
        warnings.push(format!(
            "same-mode cross entries {} fixed to 0 by convention (not simultaneously measurable)",
            convention.join(", ")
        ));
    }
    if !uncovered.is_empty() {
        warnings.push(format!(
            "entries {} were not covered by any joint acquisition and default to 0",
            uncovered.join(", ")
        ));
    }

    // Standard errors from non-overlapping blocking, when there is enough
    // data for every block to carry a meaningful variance.
    let b = BOOTSTRAP_BLOCKS;
    let mut standard_errors = DMatrix::zeros(dim, dim);
    if samples.sample_count() >= 2 * b {
        let mut block_values: Vec<DMatrix<f64>> = Vec::with_capacity(b);
        for block in 0..b {
            let sub = block_subset(samples, block, b)?;
            let (entries, _) = estimate_entries(&sub)?;
            block_values.push(entries);
        }
        for i in 0..dim {
            for j in 0..dim {
                if i == j || measured.contains(&(i.min(j), i.max(j))) {
                    let estimates: Vec<f64> = block_values.iter().map(|m| m[(i, j)]).collect();
                    standard_errors[(i, j)] = variance_of(&estimates).sqrt() / (b as f64).sqrt();
                }
            }
        }
    } else {
        warnings.push(format!(
            "fewer than {} samples per acquisition; standard errors unavailable",
            2 * b
        ));
    }

    let (cov, clamp_warnings) = CovarianceMatrix::reconstructed(n_modes, matrix)?;
    warnings.extend(clamp_warnings);

    Ok(ReconstructedCovariance {
        cov,
        standard_errors,
        n_samples: samples.sample_count(),
        warnings,
    })
}

/// The `block`-th of `total` equal contiguous chunks of every group.
fn block_subset(
    samples: &QuadratureSampleSet,
    block: usize,
    total: usize,
) -> Result<QuadratureSampleSet> {
    let groups = samples
        .groups()
        .iter()
        .map(|g| {
            let block_len = g.len() / total;
            g.slice(block * block_len, (block + 1) * block_len)
        })
        .collect();
    QuadratureSampleSet::new(samples.n_modes(), groups, samples.rng_seed())
}

/// Statistic that can be recomputed per block for error bars.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSelector {
    Variance {
        mode: usize,
        quadrature: Quadrature,
    },
    Covariance {
        a: (usize, Quadrature),
        b: (usize, Quadrature),
    },
    Coherence,
    Ppt,
}

fn evaluate_metric(samples: &QuadratureSampleSet, metric: MetricSelector) -> Result<f64> {
    match metric {
        MetricSelector::Variance { mode, quadrature } => {
            let slices: Vec<&[f64]> = samples
                .groups()
                .iter()
                .flat_map(|g| g.records.iter())
                .filter(|r| r.mode == mode && r.quadrature == quadrature)
                .map(|r| r.samples.as_slice())
                .collect();
            if slices.is_empty() {
                return Err(Error::MissingData(vec![format!(
                    "{}{}",
                    quadrature.label(),
                    mode + 1
                )]));
            }
            Ok(pooled_variance(&slices))
        }
        MetricSelector::Covariance { a, b } => {
            let mut weighted = (0.0, 0.0);
            for group in samples.groups() {
                let ra = group
                    .records
                    .iter()
                    .find(|r| (r.mode, r.quadrature) == a);
                let rb = group
                    .records
                    .iter()
                    .find(|r| (r.mode, r.quadrature) == b);
                if let (Some(ra), Some(rb)) = (ra, rb) {
                    let w = ra.samples.len() as f64;
                    weighted.0 += w * covariance_of(&ra.samples, &rb.samples);
                    weighted.1 += w;
                }
            }
            if weighted.1 == 0.0 {
                return Err(Error::MissingData(vec![format!(
                    "joint acquisition of {}{} and {}{}",
                    a.1.label(),
                    a.0 + 1,
                    b.1.label(),
                    b.0 + 1
                )]));
            }
            Ok(weighted.0 / weighted.1)
        }
        MetricSelector::Coherence => {
            let (entries, _) = estimate_entries(samples)?;
            let (cov, _) = CovarianceMatrix::reconstructed(samples.n_modes(), entries)?;
            Ok(metrics::coherence(&GaussianState::from_covariance(cov))?.coherence_bits)
        }
        MetricSelector::Ppt => {
            if samples.n_modes() != 2 {
                return Err(Error::Dimension {
                    expected: 2,
                    actual: samples.n_modes(),
                });
            }
            let (entries, _) = estimate_entries(samples)?;
            let (cov, _) = CovarianceMatrix::reconstructed(samples.n_modes(), entries)?;
            Ok(metrics::ppt_value(&GaussianState::from_covariance(cov))?.ppt_value)
        }
    }
}

/// Metric value on the full data plus a one-standard-deviation error bar:
/// the metric is recomputed on [`BOOTSTRAP_BLOCKS`] equal blocks and the
/// spread of the block estimates is scaled by 1/sqrt(blocks).
pub fn estimate_error_bars(
    samples: &QuadratureSampleSet,
    metric: MetricSelector,
) -> Result<(f64, f64)> {
    let b = BOOTSTRAP_BLOCKS;
    if samples.sample_count() < 2 * b {
        return Err(Error::InsufficientData(format!(
            "error bars need at least {} samples per acquisition, got {}",
            2 * b,
            samples.sample_count()
        )));
    }
    let value = evaluate_metric(samples, metric)?;
    let mut block_estimates = Vec::with_capacity(b);
    for block in 0..b {
        block_estimates.push(evaluate_metric(&block_subset(samples, block, b)?, metric)?);
    }
    let sigma = variance_of(&block_estimates).sqrt() / (b as f64).sqrt();
    Ok((value, sigma))
}
