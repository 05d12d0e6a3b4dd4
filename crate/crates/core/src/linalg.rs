//! Small dense helpers shared by the subspace code.

use nalgebra::{DMatrix, SymmetricEigen};

/// Flips each column so that its entry of largest magnitude is nonnegative.
/// Ties on magnitude resolve to the earliest row.
pub fn canonicalize_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0usize;
        let mut best_abs = f64::NEG_INFINITY;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > best_abs {
                best_abs = x.abs();
                best = i;
            }
        }
        if col.len() > 0 && col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Eigen-decomposition of a symmetric matrix with eigenpairs sorted by
/// descending eigenvalue. Equal eigenvalues keep the solver's column order.
pub fn sorted_symmetric_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Thin SVD `A = U·diag(s)·Vᵀ` with singular values in descending order.
///
/// Backed by faer: nalgebra's bidiagonal SVD loses accuracy on the
/// rank-deficient Hankel matrices that periodic signals produce.
pub fn thin_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return (Vec::new(), DMatrix::zeros(m, 0), DMatrix::zeros(n, 0));
    }
    let fa = faer::Mat::<f64>::from_fn(m, n, |i, j| a[(i, j)]);
    let svd = fa.thin_svd().expect("SVD of a finite matrix converges");
    let s = svd.S().column_vector();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| s[y].total_cmp(&s[x]));
    let values = order.iter().map(|&i| s[i]).collect();
    let u = DMatrix::from_fn(m, k, |r, c| svd.U()[(r, order[c])]);
    let v = DMatrix::from_fn(n, k, |r, c| svd.V()[(r, order[c])]);
    (values, u, v)
}

/// Largest absolute entry of `BᵀB − I`.
pub fn orthonormality_error(basis: &DMatrix<f64>) -> f64 {
    let gram = basis.transpose() * basis;
    let k = gram.nrows();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Projector `B·Bᵀ` onto the column span of an orthonormal basis.
pub fn projector(basis: &DMatrix<f64>) -> DMatrix<f64> {
    basis * basis.transpose()
}
