//! Rank-revealing kernels behind [`Matrix`]: exact row reduction, and SVD
//! plus Schur for the float backend.

use nalgebra::DMatrix;

use crate::matrix::Matrix;
use crate::scalar::{Scalar, C64};

/// Tolerance for deciding that `M − zI` drops rank at a computed eigenvalue.
/// Looser than the default because eigenvalues carry their own error.
pub const EIGEN_TOL: f64 = 1e-7;

/// Chordal distance below which eigenvalues and projective roots are merged.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Reduced row echelon form and its pivot columns. Pivots are chosen by
/// largest modulus, which is only a stability aid for exact backends.
pub fn rref<S: Scalar>(m: &Matrix<S>) -> (Matrix<S>, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = m.shape();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let best = (r..rows)
            .filter(|&i| !a[(i, col)].is_zero())
            .max_by(|&x, &y| a[(x, col)].modulus().total_cmp(&a[(y, col)].modulus()));
        let Some(p) = best else { continue };
        a.swap_rows(p, r);
        let inv = S::one() / a[(r, col)].clone();
        for c in col..cols {
            let v = a[(r, c)].clone() * inv.clone();
            a[(r, c)] = v;
        }
        for i in 0..rows {
            if i == r || a[(i, col)].is_zero() {
                continue;
            }
            let factor = a[(i, col)].clone();
            for c in col..cols {
                let v = a[(i, c)].clone() - factor.clone() * a[(r, c)].clone();
                a[(i, c)] = v;
            }
        }
        pivots.push(col);
        r += 1;
    }
    (a, pivots)
}

/// Kernel basis read off the reduced echelon form, one column per free
/// variable with a 1 in that position.
pub fn rref_nullspace<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    let (r, pivots) = rref(m);
    let cols = m.cols();
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    Matrix::from_fn(cols, free.len(), |row, k| {
        let f = free[k];
        if row == f {
            S::one()
        } else if let Some(i) = pivots.iter().position(|&p| p == row) {
            -r[(i, f)].clone()
        } else {
            S::zero()
        }
    })
}

fn to_na(m: &Matrix<C64>) -> DMatrix<C64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.entries())
}

fn from_na(m: &DMatrix<C64>) -> Matrix<C64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

fn threshold(m: &Matrix<C64>, tol: f64) -> f64 {
    tol * m.max_abs().max(1.0)
}

/// Singular values of `m`, padded with zeros to `min(rows, cols)` entries.
pub fn singular_values(m: &Matrix<C64>) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    to_na(m).singular_values().iter().copied().collect()
}

pub fn svd_rank(m: &Matrix<C64>, tol: f64) -> usize {
    let t = threshold(m, tol);
    singular_values(m).into_iter().filter(|&s| s > t).count()
}

/// Orthonormal kernel basis from the right singular vectors.
pub fn svd_nullspace(m: &Matrix<C64>, tol: f64) -> Matrix<C64> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Matrix::zeros(0, 0);
    }
    if rows == 0 {
        return Matrix::identity(cols);
    }
    let t = threshold(m, tol);
    // pad with zero rows so the thin SVD exposes a full right basis
    let mut a = DMatrix::<C64>::zeros(rows.max(cols), cols);
    a.view_mut((0, 0), (rows, cols)).copy_from(&to_na(m));
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let kernel: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= t)
        .collect();
    Matrix::from_fn(cols, kernel.len(), |r, k| v_t[(kernel[k], r)].conj())
}

/// Smallest singular value, or 0 for an empty or wide matrix with a kernel.
pub fn min_singular_value(m: &Matrix<C64>) -> f64 {
    if m.cols() == 0 {
        return f64::INFINITY;
    }
    if m.rows() < m.cols() {
        return 0.0;
    }
    singular_values(m).into_iter().fold(f64::INFINITY, f64::min)
}

/// All eigenvalues with algebraic multiplicity, from the complex Schur form.
pub fn eigenvalues(m: &Matrix<C64>) -> Vec<C64> {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Vec::new();
    }
    let eps = 1e-14 * m.max_abs().max(1.0);
    let triangular = (0..n).all(|c| (c + 1..n).all(|r| m[(r, c)].norm() <= eps));
    let t = if triangular {
        m.clone()
    } else {
        // QR stalls on some nilpotent inputs; shifting by a multiple of the
        // identity moves the spectrum without changing the Schur vectors
        let scale = m.max_abs().max(1.0);
        [
            C64::new(0.0, 0.0),
            C64::new(0.61, 0.37),
            C64::new(-0.29, 0.83),
        ]
        .into_iter()
        .find_map(|z| {
            let shift = Matrix::scalar(n, z * scale);
            nalgebra::Schur::try_new(to_na(&(m + &shift)), f64::EPSILON, 2_000)
                .map(|s| &from_na(&s.unpack().1) - &shift)
        })
        .expect("Schur iteration converges for some shift")
    };
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].norm() > eps {
            // leftover 2×2 block
            let (a, b, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
            let half_tr = (a + d) / 2.0;
            let disc = ((a - d) * (a - d) / 4.0 + b * c).sqrt();
            out.push(half_tr + disc);
            out.push(half_tr - disc);
            i += 2;
        } else {
            out.push(t[(i, i)]);
            i += 1;
        }
    }
    out
}

/// Chordal distance between affine points of P¹.
pub fn chordal(z: C64, w: C64) -> f64 {
    (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
}

/// Chordal distance between projective points given by coordinates.
pub fn chordal_proj(a: (C64, C64), b: (C64, C64)) -> f64 {
    let num = (a.0 * b.1 - a.1 * b.0).norm();
    let den = (a.0.norm_sqr() + a.1.norm_sqr()).sqrt() * (b.0.norm_sqr() + b.1.norm_sqr()).sqrt();
    num / den
}

/// Greedy single-link clustering of values within `CLUSTER_TOL` chordal
/// distance; each cluster is replaced by its mean and its size.
pub fn cluster(values: &[C64]) -> Vec<(C64, usize)> {
    let mut groups: Vec<Vec<C64>> = Vec::new();
    for &v in values {
        match groups
            .iter_mut()
            .find(|g| g.iter().any(|&u| chordal(u, v) <= CLUSTER_TOL))
        {
            Some(g) => g.push(v),
            None => groups.push(vec![v]),
        }
    }
    // a later value may bridge two earlier groups
    let mut merged = true;
    while merged {
        merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                let close = groups[i]
                    .iter()
                    .any(|&u| groups[j].iter().any(|&v| chordal(u, v) <= CLUSTER_TOL));
                if close {
                    let g = groups.remove(j);
                    groups[i].extend(g);
                    merged = true;
                    break 'outer;
                }
            }
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let k = g.len();
            (g.iter().sum::<C64>() / k as f64, k)
        })
        .collect()
}

/// Distinct eigenvalues with multiplicities.
pub fn distinct_eigenvalues(m: &Matrix<C64>) -> Vec<(C64, usize)> {
    cluster(&eigenvalues(m))
}

/// Orthonormal basis of `ker(m − z·I)` at the eigen tolerance.
pub fn eigenspace(m: &Matrix<C64>, z: C64) -> Matrix<C64> {
    let shifted = m - &Matrix::scalar(m.rows(), z);
    svd_nullspace(
        &shifted,
        EIGEN_TOL * m.max_abs().max(1.0) / shifted.max_abs().max(1.0),
    )
}

/// Kernel of `m` restricted to the column span of the orthonormal `basis`,
/// returned as vectors in the ambient space.
pub fn kernel_within(m: &Matrix<C64>, basis: &Matrix<C64>, tol: f64) -> Matrix<C64> {
    if basis.cols() == 0 {
        return basis.clone();
    }
    let restricted = m * basis;
    let k = svd_nullspace(
        &restricted,
        tol * m.max_abs().max(1.0) / restricted.max_abs().max(1.0),
    );
    orthonormalize(&(basis * &k))
}

/// Orthonormal basis of the column span (thin SVD left vectors).
pub fn orthonormalize(m: &Matrix<C64>) -> Matrix<C64> {
    if m.cols() == 0 || m.rows() == 0 {
        return Matrix::zeros(m.rows(), 0);
    }
    let svd = to_na(m).svd(true, false);
    let u = svd.u.expect("requested left singular vectors");
    let t = 1e-10 * m.max_abs().max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > t)
        .collect();
    Matrix::from_fn(m.rows(), keep.len(), |r, k| u[(r, keep[k])])
}
