//! Trajectory (Hankel) matrices and SSA signal subspaces.
//!
//! Sample positions `t` are 1-based throughout the public API: `t` names the
//! last sample covered by a trajectory matrix, so `t == series.len()` is the
//! newest admissible position. Storage is 0-based; entry `(i, j)` of the
//! `w × M` matrix ending at `t` holds `samples[t - w - M + 1 + i + j]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{canonicalize_signs, orthonormality_error, thin_svd};
use crate::series::TimeSeries;

/// Tolerance for accepting a caller-supplied basis as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// A `w × M` Hankel matrix of lagged sliding windows.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix {
    entries: DMatrix<f64>,
    end: usize,
}

impl TrajectoryMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn width(&self) -> usize {
        self.entries.nrows()
    }

    pub fn window_count(&self) -> usize {
        self.entries.ncols()
    }

    /// 1-based index of the last covered sample.
    pub fn end(&self) -> usize {
        self.end
    }
}

/// How many leading singular directions form a signal subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankRule {
    Fixed(usize),
    /// Smallest rank whose cumulative eigenvalue share reaches the fraction.
    Energy(f64),
}

impl std::fmt::Display for RankRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RankRule::Fixed(r) => write!(f, "{r}"),
            RankRule::Energy(e) => write!(f, "energy:{e}"),
        }
    }
}

impl std::str::FromStr for RankRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(frac) = s.strip_prefix("energy:") {
            let frac: f64 = frac
                .trim()
                .parse()
                .map_err(|_| Error::Parameter(format!("bad energy fraction '{frac}'")))?;
            if !(frac > 0.0 && frac <= 1.0) {
                return Err(Error::Parameter(format!(
                    "energy fraction {frac} outside (0, 1]"
                )));
            }
            Ok(RankRule::Energy(frac))
        } else {
            let r: usize = s
                .parse()
                .map_err(|_| Error::Parameter(format!("bad rank '{s}'")))?;
            if r == 0 {
                return Err(Error::Parameter("rank must be at least 1".into()));
            }
            Ok(RankRule::Fixed(r))
        }
    }
}

/// Anything represented by an orthonormal basis of a subspace of `R^w`.
pub trait Span {
    fn basis(&self) -> &DMatrix<f64>;

    fn ambient_dim(&self) -> usize {
        self.basis().nrows()
    }

    fn dim(&self) -> usize {
        self.basis().ncols()
    }

    fn is_empty(&self) -> bool {
        self.dim() == 0
    }
}

/// Orthonormal basis of a subspace together with the eigenvalues that ranked it.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
    spectrum: Vec<f64>,
}

impl Span for Subspace {
    fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }
}

impl Span for DMatrix<f64> {
    fn basis(&self) -> &DMatrix<f64> {
        self
    }
}

impl Subspace {
    /// Wraps an orthonormal basis and its descending spectrum.
    pub fn new(basis: DMatrix<f64>, spectrum: Vec<f64>) -> Result<Self> {
        if spectrum.len() != basis.ncols() {
            return Err(Error::Shape(format!(
                "{} spectrum values for {} basis columns",
                spectrum.len(),
                basis.ncols()
            )));
        }
        if basis.ncols() > basis.nrows() {
            return Err(Error::Shape(format!(
                "{} basis columns exceed ambient dimension {}",
                basis.ncols(),
                basis.nrows()
            )));
        }
        let err = orthonormality_error(&basis);
        if err > ORTHONORMAL_TOL {
            return Err(Error::Degenerate(format!(
                "basis is not orthonormal (max |BᵀB − I| = {err:.3e})"
            )));
        }
        Ok(Self { basis, spectrum })
    }

    /// Orthonormal basis for the column span of `vectors` (thin QR), spectrum all ones.
    pub fn from_spanning(vectors: DMatrix<f64>) -> Result<Self> {
        let k = vectors.ncols();
        let scale = vectors.norm().max(f64::MIN_POSITIVE);
        let qr = vectors.qr();
        let r = qr.r();
        if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * scale) {
            return Err(Error::Degenerate("spanning vectors are rank deficient".into()));
        }
        let mut q = qr.q();
        canonicalize_signs(&mut q);
        Ok(Self {
            basis: q,
            spectrum: vec![1.0; k],
        })
    }

    pub(crate) fn from_parts(basis: DMatrix<f64>, spectrum: Vec<f64>) -> Self {
        Self { basis, spectrum }
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn into_basis(self) -> DMatrix<f64> {
        self.basis
    }
}

/// Builds the `w × M` trajectory matrix whose last column ends at sample `t` (1-based).
pub fn build_trajectory_matrix(
    series: &TimeSeries,
    t: usize,
    width: usize,
    window_count: usize,
) -> Result<TrajectoryMatrix> {
    if width < 2 {
        return Err(Error::Bounds(format!("w ≥ 2 violated (w = {width})")));
    }
    if window_count < 2 {
        return Err(Error::Bounds(format!("M ≥ 2 violated (M = {window_count})")));
    }
    let span = width + window_count - 1;
    if t < span {
        return Err(Error::Bounds(format!(
            "t ≥ w + M − 1 violated (t = {t}, w + M − 1 = {span})"
        )));
    }
    if t > series.len() {
        return Err(Error::Bounds(format!(
            "t ≤ length violated (t = {t}, length = {})",
            series.len()
        )));
    }
    let start = t - span;
    let samples = &series.samples()[start..t];
    let entries = DMatrix::from_fn(width, window_count, |i, j| samples[i + j]);
    Ok(TrajectoryMatrix { entries, end: t })
}

/// Smallest `k ≥ 1` whose leading eigenvalues hold at least `energy` of the total.
pub fn choose_rank(spectrum: &[f64], energy: f64) -> Result<usize> {
    if spectrum.is_empty() {
        return Err(Error::Degenerate("empty spectrum".into()));
    }
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::Parameter(format!("energy fraction {energy} outside (0, 1]")));
    }
    let total: f64 = spectrum.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("all-zero spectrum".into()));
    }
    let mut acc = 0.0;
    for (i, &x) in spectrum.iter().enumerate() {
        acc += x;
        if acc / total >= energy {
            return Ok(i + 1);
        }
    }
    // cumulative rounding can leave the last share a hair under 1
    Ok(spectrum.len())
}

/// Signal subspace of a trajectory matrix: its leading left singular vectors.
///
/// The spectrum holds eigenvalues of `H·Hᵀ` (squared singular values),
/// unnormalized. Columns follow the sign convention of
/// [`canonicalize_signs`], so bases are reproducible; equal singular values
/// keep the factorization's column order, which leaves canonical angles
/// unaffected but may permute basis columns.
pub fn signal_subspace(h: &TrajectoryMatrix, rank: RankRule) -> Result<Subspace> {
    let max_rank = h.width().min(h.window_count());
    if let RankRule::Fixed(r) = rank {
        if r == 0 || r > max_rank {
            return Err(Error::Bounds(format!(
                "1 ≤ r ≤ min(w, M) violated (r = {r}, min(w, M) = {max_rank})"
            )));
        }
    }
    let (singular, u, _) = thin_svd(&h.entries);
    let spectrum_full: Vec<f64> = singular.iter().map(|s| s * s).collect();
    let r = match rank {
        RankRule::Fixed(r) => r,
        RankRule::Energy(e) => choose_rank(&spectrum_full, e)?,
    };
    let mut basis = u.columns(0, r).into_owned();
    canonicalize_signs(&mut basis);
    Ok(Subspace {
        basis,
        spectrum: spectrum_full[..r].to_vec(),
    })
}

/// Convenience: signal subspace of the trajectory matrix ending at `t`.
pub fn signal_subspace_at(
    series: &TimeSeries,
    t: usize,
    width: usize,
    window_count: usize,
    rank: RankRule,
) -> Result<Subspace> {
    signal_subspace(&build_trajectory_matrix(series, t, width, window_count)?, rank)
}
