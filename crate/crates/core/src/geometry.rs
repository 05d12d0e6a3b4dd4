//! Canonical angles, difference subspaces and the indices built on them.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{canonicalize_signs, projector, sorted_symmetric_eigen, thin_svd};
use crate::ssa::{Span, Subspace};

/// Default lower bound on difference-subspace eigenvalues.
pub const DEFAULT_DELTA_FLOOR: f64 = 1e-6;

/// Pairs with `1 − cos θ` at or above this are treated as orthogonal.
pub const ORTHOGONAL_CUTOFF: f64 = 1.0 - 1e-12;

/// Cosines below this are clamped before taking logarithms.
pub const LOG_COSINE_FLOOR: f64 = 1e-12;

/// Projector-sum eigenvalues within this of two mark shared directions.
const OVERLAP_EIGEN_TOL: f64 = 1e-8;

/// Relative eigenvalue cutoff for the rank of a projector sum.
const RANK_REL_TOL: f64 = 1e-10;

/// Canonical cosines with their paired canonical vectors.
///
/// Cosines are sorted descending (angles ascending) and clamped into `[0, 1]`.
#[derive(Debug, Clone)]
pub struct CanonicalAngleSet {
    pub cosines: Vec<f64>,
    pub left_vectors: DMatrix<f64>,
    pub right_vectors: DMatrix<f64>,
}

impl CanonicalAngleSet {
    pub fn len(&self) -> usize {
        self.cosines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosines.is_empty()
    }

    /// Angles in radians, ascending.
    pub fn angles(&self) -> Vec<f64> {
        self.cosines.iter().map(|c| c.acos()).collect()
    }
}

/// Orthonormal basis of the difference component between two subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSubspace {
    basis: DMatrix<f64>,
    g_eigenvalues: Vec<f64>,
    overlap_dim: usize,
    source_dims: (usize, usize),
}

impl Span for DifferenceSubspace {
    fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }
}

impl DifferenceSubspace {
    /// Eigenvalues of the projector sum paired with each basis column, ascending.
    pub fn g_eigenvalues(&self) -> &[f64] {
        &self.g_eigenvalues
    }

    /// Number of directions shared by both inputs.
    pub fn overlap_dim(&self) -> usize {
        self.overlap_dim
    }

    pub fn source_dims(&self) -> (usize, usize) {
        self.source_dims
    }
}

fn check_same_ambient(a: &impl Span, b: &impl Span) -> Result<()> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(Error::Shape(format!(
            "ambient dimensions differ ({} vs {})",
            a.ambient_dim(),
            b.ambient_dim()
        )));
    }
    Ok(())
}

fn check_delta_floor(delta_floor: f64) -> Result<()> {
    if !(delta_floor > 0.0 && delta_floor < 1.0) {
        return Err(Error::Parameter(format!(
            "delta_floor {delta_floor} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Canonical angles from the SVD of `Φᵀ·Ψ`; `k = min(dim P, dim Q)` triples.
pub fn canonical_angles(p: &impl Span, q: &impl Span) -> Result<CanonicalAngleSet> {
    check_same_ambient(p, q)?;
    let w = p.ambient_dim();
    let k = p.dim().min(q.dim());
    if k == 0 {
        return Ok(CanonicalAngleSet {
            cosines: Vec::new(),
            left_vectors: DMatrix::zeros(w, 0),
            right_vectors: DMatrix::zeros(w, 0),
        });
    }
    let cross = p.basis().transpose() * q.basis();
    let (singular, u, v) = thin_svd(&cross);
    let cosines = singular.iter().map(|s| s.clamp(0.0, 1.0)).collect();
    Ok(CanonicalAngleSet {
        cosines,
        left_vectors: p.basis() * u,
        right_vectors: q.basis() * v,
    })
}

/// Difference subspace from normalized differences of canonical vector pairs.
///
/// A pair with `g = 1 − cos θ` contributes `(v − u)/‖v − u‖` when
/// `delta_floor < g < 1`; pairs at or under the floor count as overlap and
/// orthogonal pairs are dropped. Columns are ordered by ascending `g`.
pub fn difference_subspace(
    p: &impl Span,
    q: &impl Span,
    delta_floor: f64,
) -> Result<DifferenceSubspace> {
    check_delta_floor(delta_floor)?;
    let angles = canonical_angles(p, q)?;
    let w = p.ambient_dim();
    let mut columns = Vec::new();
    let mut g_eigenvalues = Vec::new();
    let mut overlap_dim = 0;
    for (i, &cos) in angles.cosines.iter().enumerate() {
        let g = 1.0 - cos;
        if g <= delta_floor {
            overlap_dim += 1;
        } else if g < ORTHOGONAL_CUTOFF {
            let diff = angles.right_vectors.column(i) - angles.left_vectors.column(i);
            columns.push(&diff / diff.norm());
            g_eigenvalues.push(g);
        }
    }
    let mut basis = if columns.is_empty() {
        DMatrix::zeros(w, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    canonicalize_signs(&mut basis);
    Ok(DifferenceSubspace {
        basis,
        g_eigenvalues,
        overlap_dim,
        source_dims: (p.dim(), q.dim()),
    })
}

/// Difference subspace from the eigenvectors of `G = P + Q` (sum of projectors)
/// with eigenvalues strictly between `delta_floor` and one.
pub fn difference_subspace_analytic(
    p: &impl Span,
    q: &impl Span,
    delta_floor: f64,
) -> Result<DifferenceSubspace> {
    check_delta_floor(delta_floor)?;
    check_same_ambient(p, q)?;
    let w = p.ambient_dim();
    let g = projector(p.basis()) + projector(q.basis());
    let (values, vectors) = sorted_symmetric_eigen(g);
    let overlap_dim = values
        .iter()
        .filter(|&&x| (x - 2.0).abs() <= OVERLAP_EIGEN_TOL)
        .count();
    // ascending eigenvalue order
    let keep: Vec<usize> = (0..w)
        .rev()
        .filter(|&i| values[i] > delta_floor && values[i] < ORTHOGONAL_CUTOFF)
        .collect();
    let mut basis = DMatrix::from_fn(w, keep.len(), |r, c| vectors[(r, keep[c])]);
    canonicalize_signs(&mut basis);
    Ok(DifferenceSubspace {
        basis,
        g_eigenvalues: keep.iter().map(|&i| values[i]).collect(),
        overlap_dim,
        source_dims: (p.dim(), q.dim()),
    })
}

/// Mean of `1 − cos θ` over the `c` smallest canonical angles (or all of
/// them when fewer exist). Lies in `[0, 1]`.
pub fn subspace_dissimilarity(a: &impl Span, b: &impl Span, c: usize) -> Result<f64> {
    if c == 0 {
        return Err(Error::Parameter("angle count c must be at least 1".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::Degenerate("dissimilarity of an empty subspace".into()));
    }
    let angles = canonical_angles(a, b)?;
    Ok(mean_complement(&angles.cosines, c))
}

/// `(1/c')·Σ(1 − cosᵢ)` over the first `c' = min(c, len)` of descending cosines.
pub(crate) fn mean_complement(cosines: &[f64], c: usize) -> f64 {
    let used = c.min(cosines.len());
    if used == 0 {
        return 0.0;
    }
    cosines[..used].iter().map(|x| 1.0 - x).sum::<f64>() / used as f64
}

/// Log-volume magnitude index: `Σ ln max(cos θᵢ, 1e-12)` over every canonical angle.
pub fn magnitude(p: &impl Span, q: &impl Span) -> Result<f64> {
    let angles = canonical_angles(p, q)?;
    Ok(log_cosine_sum(&angles.cosines))
}

pub(crate) fn log_cosine_sum(cosines: &[f64]) -> f64 {
    cosines.iter().map(|&c| c.max(LOG_COSINE_FLOOR).ln()).sum()
}

/// Principal component subspace of a set of difference subspaces: the top
/// `min(max_dims, rank S)` eigenvectors of `S = Σ Dᵢ·Dᵢᵀ`. Empty members are
/// skipped; accumulation runs in input order.
pub fn principal_component_subspace<S: Span>(members: &[S], max_dims: usize) -> Result<Subspace> {
    if max_dims == 0 {
        return Err(Error::Parameter("nor_dims must be at least 1".into()));
    }
    let mut non_empty = members.iter().filter(|d| !d.is_empty());
    let first = non_empty
        .next()
        .ok_or_else(|| Error::Degenerate("every difference subspace is empty".into()))?;
    let w = first.ambient_dim();
    let mut scatter = projector(first.basis());
    for d in non_empty {
        if d.ambient_dim() != w {
            return Err(Error::Shape(format!(
                "ambient dimensions differ ({} vs {w})",
                d.ambient_dim()
            )));
        }
        scatter += projector(d.basis());
    }
    let (values, vectors) = sorted_symmetric_eigen(scatter);
    let top = values[0];
    let rank = values.iter().filter(|&&x| x > RANK_REL_TOL * top).count();
    let keep = rank.min(max_dims);
    let mut basis = vectors.columns(0, keep).into_owned();
    canonicalize_signs(&mut basis);
    Ok(Subspace::from_parts(basis, values[..keep].to_vec()))
}
