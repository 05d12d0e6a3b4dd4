//! Pairwise subspace distances and classical multidimensional scaling.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{canonical_angles, subspace_dissimilarity};
use crate::linalg::sorted_symmetric_eigen;
use crate::ssa::Span;

/// Eigenvalues below this fraction of the largest are not positive.
const POSITIVE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceMetric {
    /// `1 − cos θ₁`.
    MinAngle,
    /// Mean `1 − cos θᵢ` over the `c` smallest angles.
    Dissimilarity(usize),
}

/// Symmetric matrix of subspace distances with a zero diagonal.
pub fn pairwise_subspace_distances<S: Span>(items: &[S], metric: SubspaceMetric) -> Result<DMatrix<f64>> {
    if items.len() < 2 {
        return Err(Error::Parameter("need at least two subspaces".into()));
    }
    let w = items[0].ambient_dim();
    if let Some(bad) = items.iter().find(|s| s.ambient_dim() != w) {
        return Err(Error::Shape(format!(
            "ambient dimensions differ ({} vs {w})",
            bad.ambient_dim()
        )));
    }
    let n = items.len();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = match metric {
                SubspaceMetric::MinAngle => {
                    let a = canonical_angles(&items[i], &items[j])?;
                    1.0 - a.cosines.first().copied().unwrap_or(0.0)
                }
                SubspaceMetric::Dissimilarity(c) => subspace_dissimilarity(&items[i], &items[j], c)?,
            };
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

/// Classical MDS coordinates (one row per item).
#[derive(Debug, Clone)]
pub struct Embedding {
    pub coordinates: DMatrix<f64>,
    /// Relative Frobenius error between input and embedded distances.
    pub stress: f64,
    /// Requested dimensions that had no positive eigenvalue.
    pub missing_dims: usize,
}

/// Double-centered Gram matrix `B = −½·J·D²·J`.
pub fn double_center(distances: &DMatrix<f64>) -> DMatrix<f64> {
    let n = distances.nrows();
    let sq = distances.map(|x| x * x);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let col_means: Vec<f64> = (0..n).map(|j| sq.column(j).sum() / n as f64).collect();
    let grand = sq.sum() / (n * n) as f64;
    DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - col_means[j] + grand))
}

pub fn mds_embed(distances: &DMatrix<f64>, dim: usize) -> Result<Embedding> {
    let n = distances.nrows();
    if n != distances.ncols() || n == 0 {
        return Err(Error::Shape(format!(
            "distance matrix must be square and non-empty ({}×{})",
            n,
            distances.ncols()
        )));
    }
    for i in 0..n {
        if distances[(i, i)] != 0.0 {
            return Err(Error::Parameter(format!("non-zero diagonal at {i}")));
        }
        for j in 0..i {
            let (a, b) = (distances[(i, j)], distances[(j, i)]);
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::Parameter(format!("distance matrix asymmetric at ({i}, {j})")));
            }
        }
    }
    let (values, vectors) = sorted_symmetric_eigen(double_center(distances));
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    let usable = values
        .iter()
        .take(dim)
        .filter(|&&v| top > 0.0 && v > POSITIVE_REL_TOL * top)
        .count();
    let mut coordinates = DMatrix::zeros(n, dim);
    for k in 0..usable {
        let s = values[k].sqrt();
        for i in 0..n {
            coordinates[(i, k)] = vectors[(i, k)] * s;
        }
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in 0..i {
            let e = (coordinates.row(i) - coordinates.row(j)).norm();
            num += (distances[(i, j)] - e).powi(2);
            den += distances[(i, j)].powi(2);
        }
    }
    let stress = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(Embedding {
        coordinates,
        stress,
        missing_dims: dim - usable,
    })
}
