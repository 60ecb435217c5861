//! N-mode Gaussian states in the covariance-matrix formalism.
//!
//! A state is a displacement vector together with a real symmetric 2N x 2N
//! covariance matrix of the quadrature operators, ordered (X1, Y1, ..., XN, YN)
//! and normalized so the vacuum variance is 1 (the shot noise limit). Physical
//! matrices have every symplectic eigenvalue >= 1.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::error::{Error, Result};

/// Tolerance below which a symplectic eigenvalue marks a constructed matrix
/// as unphysical; eigenvalues in `[1 - EPS_PHYS, 1)` are clamped to 1.
pub const EPS_PHYS: f64 = 1e-9;

/// Tolerance for matrices estimated from finite samples. Sampling noise
/// routinely pushes eigenvalues slightly below 1; anything above this band
/// indicates a pipeline bug rather than statistics and is rejected.
pub const RECONSTRUCTION_EPS: f64 = 0.05;

/// Symmetry tolerance accepted by the covariance constructor.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// One of the two quadratures of an optical mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    /// Amplitude quadrature, X = a + a†.
    X,
    /// Phase quadrature, Y = i(a† - a).
    Y,
}

impl Quadrature {
    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            0 => Ok(Quadrature::X),
            1 => Ok(Quadrature::Y),
            _ => Err(Error::Index { index, bound: 2 }),
        }
    }

    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::Y => 1,
        }
    }

    pub fn label(self) -> char {
        match self {
            Quadrature::X => 'X',
            Quadrature::Y => 'Y',
        }
    }
}

impl std::fmt::Display for Quadrature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Row/column of the quadrature `quad` of mode `mode` in the XYXY ordering.
pub fn quadrature_index(mode: usize, quad: Quadrature) -> usize {
    2 * mode + quad.offset()
}

/// How strictly physicality is enforced on a covariance matrix.
///
/// Matrices built from exact parameters must satisfy the uncertainty bound to
/// [`EPS_PHYS`]; matrices estimated from samples are allowed eigenvalues down
/// to `1 -` [`RECONSTRUCTION_EPS`], which are then clamped to 1 with a warning.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhysicalityPolicy {
    Strict,
    Reconstructed,
}

impl PhysicalityPolicy {
    pub fn epsilon(self) -> f64 {
        match self {
            PhysicalityPolicy::Strict => EPS_PHYS,
            PhysicalityPolicy::Reconstructed => RECONSTRUCTION_EPS,
        }
    }
}

/// The standard symplectic form Omega: block diagonal of [[0, 1], [-1, 0]].
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of a symmetric matrix by the general route: the
/// moduli of the eigenvalues of i*Omega*V, each conjugate pair counted once.
///
/// For positive-definite V this uses the Cholesky factor V = L Lᵗ: the
/// singular values of the antisymmetric matrix Lᵗ Omega L are the symplectic
/// eigenvalues, each appearing twice. Matrices that fail Cholesky (possible
/// for unphysical inputs) fall back to complex eigenvalues of Omega*V.
///
/// Returned sorted in descending order, unclamped.
pub fn symplectic_eigenvalues_general(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = matrix.nrows();
    if dim == 0 || dim % 2 != 0 || matrix.ncols() != dim {
        return Err(Error::Dimension {
            expected: dim.max(2) / 2,
            actual: matrix.ncols() / 2,
        });
    }
    let n_modes = dim / 2;
    let omega = symplectic_form(n_modes);

    let paired = match matrix.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let k = l.transpose() * &omega * &l;
            let svd = k.svd(false, false);
            svd.singular_values.iter().copied().collect::<Vec<f64>>()
        }
        None => {
            let ev = (&omega * matrix).complex_eigenvalues();
            let mut moduli: Vec<f64> = ev.iter().map(|z| z.norm()).collect();
            moduli.sort_by(|a, b| b.partial_cmp(a).expect("non-NaN eigenvalue moduli"));
            moduli
        }
    };

    // Moduli come in near-identical pairs (one per conjugate pair); collapse
    // each adjacent pair to its mean.
    let mut values = Vec::with_capacity(n_modes);
    for pair in paired.chunks_exact(2) {
        let gap = (pair[0] - pair[1]).abs();
        if gap > 1e-6 * pair[0].max(1.0) {
            return Err(Error::NumericalFailure(format!(
                "symplectic eigenvalue pairing failed: adjacent moduli {} and {} differ by {gap}",
                pair[0], pair[1]
            )));
        }
        values.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(values)
}

fn closed_form_single_mode(matrix: &DMatrix<f64>) -> Vec<f64> {
    vec![matrix.determinant().max(0.0).sqrt()]
}

/// Both roots of nu⁴ - delta nu² + det_v = 0, the two-mode eigenvalue pair
/// expressed through its invariants (delta is the relevant block-determinant
/// sum, det_v the full determinant).
///
/// The textbook form sqrt((delta ± sqrt(delta² - 4 det_v))/2) destroys the
/// small root by cancellation: at an exactly degenerate pair the discriminant
/// is pure rounding noise and sqrt amplifies it to ~1e-8. A discriminant
/// indistinguishable from zero therefore takes the exact degenerate answer
/// det_v^(1/4); otherwise the large root comes from the sum and the small one
/// from the invariant product det_v, never from a subtraction.
pub(crate) fn eigenvalue_pair_from_invariants(delta: f64, det_v: f64) -> (f64, f64) {
    let disc_sq = delta * delta - 4.0 * det_v;
    let scale = delta * delta + 4.0 * det_v.abs();
    if disc_sq <= 1e-11 * scale {
        let nu = det_v.abs().powf(0.25);
        return (nu, nu);
    }
    let hi_sq = 0.5 * (delta + disc_sq.sqrt());
    if hi_sq <= 0.0 {
        return (0.0, 0.0);
    }
    let lo_sq = det_v / hi_sq;
    (hi_sq.sqrt(), lo_sq.max(0.0).sqrt())
}

/// Two-mode closed form via Delta = Det A + Det B + 2 Det C on the actual
/// 2x2 blocks of the matrix.
fn closed_form_two_mode(matrix: &DMatrix<f64>) -> Vec<f64> {
    let a = matrix.fixed_view::<2, 2>(0, 0).determinant();
    let b = matrix.fixed_view::<2, 2>(2, 2).determinant();
    let c = matrix.fixed_view::<2, 2>(0, 2).determinant();
    let delta = a + b + 2.0 * c;
    let det = matrix.determinant();
    let (hi, lo) = eigenvalue_pair_from_invariants(delta, det);
    vec![hi, lo]
}

/// Symplectic eigenvalues of a raw symmetric matrix: closed forms for one and
/// two modes, the general solver beyond that. Descending, unclamped.
pub fn symplectic_eigenvalues_raw(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    match matrix.nrows() {
        2 => Ok(closed_form_single_mode(matrix)),
        4 => Ok(closed_form_two_mode(matrix)),
        _ => symplectic_eigenvalues_general(matrix),
    }
}

/// Verdict of a physicality check, with the offending eigenvalue when the
/// check fails.
#[derive(Debug, Clone)]
pub struct PhysicalityReport {
    pub is_physical: bool,
    /// Smallest symplectic eigenvalue found.
    pub min_symplectic_eigenvalue: f64,
    /// All symplectic eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Tolerance the verdict was taken against.
    pub epsilon: f64,
}

impl std::fmt::Display for PhysicalityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_physical {
            write!(
                f,
                "physical (min symplectic eigenvalue {})",
                self.min_symplectic_eigenvalue
            )
        } else {
            write!(
                f,
                "unphysical: symplectic eigenvalue {} < 1 - {}",
                self.min_symplectic_eigenvalue, self.epsilon
            )
        }
    }
}

/// Check whether a symmetric matrix satisfies the uncertainty bound
/// min(nu_i) >= 1 - epsilon.
pub fn validate_physicality(matrix: &DMatrix<f64>, epsilon: f64) -> Result<PhysicalityReport> {
    let eigenvalues = symplectic_eigenvalues_raw(matrix)?;
    let min = eigenvalues
        .last()
        .copied()
        .ok_or_else(|| Error::NumericalFailure("empty spectrum".into()))?;
    Ok(PhysicalityReport {
        is_physical: min >= 1.0 - epsilon,
        min_symplectic_eigenvalue: min,
        eigenvalues,
        epsilon,
    })
}

/// Symplectic eigenvalues of a physical covariance matrix, sorted descending
/// and clamped so every value is >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum {
    values: Vec<f64>,
}

impl SymplecticSpectrum {
    /// Clamp raw eigenvalues against a policy: values in `[1 - eps, 1)` become
    /// exactly 1, values below fail. Returns the indices that were clamped by
    /// more than [`EPS_PHYS`] (only possible under the reconstructed policy).
    fn clamp(raw: Vec<f64>, epsilon: f64) -> Result<(Self, Vec<usize>)> {
        let mut clamped_indices = Vec::new();
        let mut values = Vec::with_capacity(raw.len());
        for (i, nu) in raw.into_iter().enumerate() {
            if nu < 1.0 - epsilon {
                return Err(Error::UnphysicalState {
                    min_symplectic: nu,
                    limit: 1.0 - epsilon,
                });
            }
            if nu < 1.0 {
                if 1.0 - nu > EPS_PHYS {
                    clamped_indices.push(i);
                }
                values.push(1.0);
            } else {
                values.push(nu);
            }
        }
        Ok((Self { values }, clamped_indices))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> f64 {
        *self.values.last().expect("non-empty spectrum")
    }

    /// True when every eigenvalue equals 1 within `tol` (pure state witness).
    pub fn is_pure(&self, tol: f64) -> bool {
        self.values.iter().all(|nu| (nu - 1.0).abs() <= tol)
    }
}

/// Real symmetric 2N x 2N second-moment matrix, vacuum-normalized.
///
/// Construction symmetrizes the input, requires positive diagonal entries and
/// enforces the uncertainty bound on the symplectic spectrum, which is
/// computed once and stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
    spectrum: SymplecticSpectrum,
    policy: PhysicalityPolicy,
}

impl CovarianceMatrix {
    /// Strict constructor for matrices built from exact parameters.
    pub fn new(n_modes: usize, entries: DMatrix<f64>) -> Result<Self> {
        let (cov, _) = Self::build(n_modes, entries, PhysicalityPolicy::Strict)?;
        Ok(cov)
    }

    /// Lenient constructor for matrices estimated from samples. Returns the
    /// matrix together with warnings for eigenvalues that had to be clamped
    /// beyond the strict tolerance.
    pub fn reconstructed(n_modes: usize, entries: DMatrix<f64>) -> Result<(Self, Vec<String>)> {
        Self::build(n_modes, entries, PhysicalityPolicy::Reconstructed)
    }

    fn build(
        n_modes: usize,
        entries: DMatrix<f64>,
        policy: PhysicalityPolicy,
    ) -> Result<(Self, Vec<String>)> {
        if n_modes == 0 {
            return Err(Error::Parameter("n_modes must be positive".into()));
        }
        let dim = 2 * n_modes;
        if entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::Dimension {
                expected: n_modes,
                actual: entries.nrows() / 2,
            });
        }

        let mut max_asymmetry = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                max_asymmetry = max_asymmetry.max((entries[(i, j)] - entries[(j, i)]).abs());
            }
        }
        if max_asymmetry > SYMMETRY_TOL {
            return Err(Error::AsymmetricInput {
                max_asymmetry,
                tolerance: SYMMETRY_TOL,
            });
        }
        let entries = 0.5 * (&entries + entries.transpose());

        for i in 0..dim {
            if entries[(i, i)] <= 0.0 {
                return Err(Error::NonPositiveDiagonal {
                    index: i,
                    value: entries[(i, i)],
                });
            }
        }

        let raw = symplectic_eigenvalues_raw(&entries)?;
        let (spectrum, clamped) = SymplecticSpectrum::clamp(raw, policy.epsilon())?;
        let warnings = clamped
            .iter()
            .map(|&i| {
                format!(
                    "symplectic eigenvalue {} below 1 was clamped to 1 (sampling noise)",
                    i
                )
            })
            .collect();

        Ok((
            Self {
                n_modes,
                entries,
                spectrum,
                policy,
            },
            warnings,
        ))
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn policy(&self) -> PhysicalityPolicy {
        self.policy
    }

    /// The stored symplectic spectrum (clamped, descending).
    pub fn symplectic_spectrum(&self) -> &SymplecticSpectrum {
        &self.spectrum
    }

    /// The 2x2 diagonal block of a mode.
    pub fn mode_block(&self, mode: usize) -> Result<Matrix2<f64>> {
        if mode >= self.n_modes {
            return Err(Error::Index {
                index: mode,
                bound: self.n_modes,
            });
        }
        Ok(self.entries.fixed_view::<2, 2>(2 * mode, 2 * mode).into())
    }
}

/// Displacement vector plus covariance matrix: a complete description of an
/// N-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    displacement: DVector<f64>,
    cov: CovarianceMatrix,
}

impl GaussianState {
    pub fn new(displacement: DVector<f64>, cov: CovarianceMatrix) -> Result<Self> {
        if displacement.len() != cov.dim() {
            return Err(Error::Dimension {
                expected: cov.n_modes(),
                actual: displacement.len() / 2,
            });
        }
        Ok(Self { displacement, cov })
    }

    /// Zero-displacement state over a covariance matrix.
    pub fn from_covariance(cov: CovarianceMatrix) -> Self {
        let displacement = DVector::zeros(cov.dim());
        Self { displacement, cov }
    }

    /// The N-mode vacuum: zero displacement, identity covariance.
    pub fn vacuum(n_modes: usize) -> Self {
        let cov = CovarianceMatrix::new(n_modes, DMatrix::identity(2 * n_modes, 2 * n_modes))
            .expect("identity covariance is physical");
        Self::from_covariance(cov)
    }

    /// Single-mode squeezed state with squeezed variance `v_s` on X and
    /// antisqueezed variance `v_as` on Y (both in shot-noise units).
    pub fn squeezed(v_s: f64, v_as: f64) -> Result<Self> {
        check_squeezing_variances(v_s, v_as)?;
        let cov = CovarianceMatrix::new(1, DMatrix::from_diagonal(&DVector::from_row_slice(&[
            v_s, v_as,
        ])))?;
        Ok(Self::from_covariance(cov))
    }

    /// Two-mode EPR entangled state built from the same squeezing variances:
    /// block covariance [[aI, cZ], [cZ, aI]] with a = (v_s + v_as)/2 and
    /// c = (v_s - v_as)/2, so X quadratures carry +c and Y quadratures -c.
    pub fn epr(v_s: f64, v_as: f64) -> Result<Self> {
        check_squeezing_variances(v_s, v_as)?;
        let a = 0.5 * (v_s + v_as);
        let c = 0.5 * (v_s - v_as);
        let mut m = DMatrix::zeros(4, 4);
        for k in 0..4 {
            m[(k, k)] = a;
        }
        m[(0, 2)] = c;
        m[(2, 0)] = c;
        m[(1, 3)] = -c;
        m[(3, 1)] = -c;
        let cov = CovarianceMatrix::new(2, m)?;
        Ok(Self::from_covariance(cov))
    }

    pub fn with_displacement(mut self, displacement: DVector<f64>) -> Result<Self> {
        if displacement.len() != self.cov.dim() {
            return Err(Error::Dimension {
                expected: self.cov.n_modes(),
                actual: displacement.len() / 2,
            });
        }
        self.displacement = displacement;
        Ok(self)
    }

    pub fn n_modes(&self) -> usize {
        self.cov.n_modes()
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<f64>, CovarianceMatrix) {
        (self.displacement, self.cov)
    }

    /// Symplectic eigenvalues of the state's covariance matrix.
    pub fn symplectic_eigenvalues(&self) -> &SymplecticSpectrum {
        self.cov.symplectic_spectrum()
    }
}

fn check_squeezing_variances(v_s: f64, v_as: f64) -> Result<()> {
    if !(v_s > 0.0) || !(v_as > 0.0) {
        return Err(Error::Parameter(format!(
            "squeezing variances must be positive, got ({v_s}, {v_as})"
        )));
    }
    if v_s * v_as < 1.0 - EPS_PHYS {
        return Err(Error::UnphysicalState {
            min_symplectic: (v_s * v_as).sqrt(),
            limit: 1.0 - EPS_PHYS,
        });
    }
    Ok(())
}

/// Convert a variance in shot-noise units to decibels relative to the SNL.
pub fn variance_to_db(variance: f64) -> f64 {
    10.0 * variance.log10()
}

/// Convert a noise level in dB (relative to the SNL) to a variance.
pub fn db_to_variance(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
