//! ADHM data `(b₁, b₂, e)` for the Hilbert scheme of points of the plane.

use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::linalg::{self, EIGEN_TOL};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PlaneADHM<S> {
    pub c: usize,
    pub b1: Matrix<S>,
    pub b2: Matrix<S>,
    pub e: Matrix<S>,
}

/// A joint eigenvalue `(z, w)` with an orthonormal basis of
/// `ker(b₁ − z) ∩ ker(b₂ − w)`.
#[derive(Clone, Debug)]
pub struct JointEigen {
    pub z: C64,
    pub w: C64,
    pub basis: Matrix<C64>,
}

impl<S: Scalar> PlaneADHM<S> {
    pub fn new(b1: Matrix<S>, b2: Matrix<S>, e: Matrix<S>) -> Result<Self> {
        let c = b1.rows();
        if b1.shape() != (c, c) || b2.shape() != (c, c) || e.shape() != (1, c) {
            return Err(AdhmError::ShapeMismatch(format!(
                "plane data needs c×c, c×c, 1×c; got {:?}, {:?}, {:?}",
                b1.shape(),
                b2.shape(),
                e.shape()
            )));
        }
        Ok(PlaneADHM { c, b1, b2, e })
    }

    pub fn scale(&self) -> f64 {
        self.b1
            .max_abs()
            .max(self.b2.max_abs())
            .max(self.e.max_abs())
            .max(1.0)
    }

    pub fn to_complex(&self) -> Result<PlaneADHM<C64>> {
        Ok(PlaneADHM {
            c: self.c,
            b1: self.b1.to_complex()?,
            b2: self.b2.to_complex()?,
            e: self.e.to_complex()?,
        })
    }

    /// The transposed triple `(ᵗb₁, ᵗb₂, ᵗe)` in Nakajima's convention, where
    /// co-stability of `(b₁, b₂, e)` becomes stability: no proper subspace
    /// containing the image of `ᵗe` is invariant under both matrices.
    pub fn transpose_data(&self) -> (Matrix<S>, Matrix<S>, Matrix<S>) {
        (self.b1.transpose(), self.b2.transpose(), self.e.transpose())
    }
}

/// `[b₁, b₂] = 0` within `tol·max(1, ‖b₁‖‖b₂‖)`.
pub fn check_t1<S: Scalar>(d: &PlaneADHM<S>, tol: f64) -> bool {
    let scale = (d.b1.max_abs() * d.b2.max_abs()).max(1.0);
    d.b1.commutator(&d.b2).is_negligible(tol, scale)
}

/// Every joint eigenvalue of `(b₁, b₂)` with its joint eigenspace.
pub fn common_eigenvectors<S: Scalar>(
    b1: &Matrix<S>,
    b2: &Matrix<S>,
    tol: f64,
) -> Result<Vec<JointEigen>> {
    if let Backend::Prime(_) = S::backend() {
        return Err(AdhmError::UnsupportedBackend(S::backend()));
    }
    let (b1, b2) = (b1.to_complex()?, b2.to_complex()?);
    let tol = tol.max(EIGEN_TOL);
    let mut out = Vec::new();
    let ws = linalg::distinct_eigenvalues(&b2);
    for (z, _) in linalg::distinct_eigenvalues(&b1) {
        let vz = linalg::eigenspace(&b1, z);
        for &(w, _) in &ws {
            let shifted = &b2 - &Matrix::scalar(b2.rows(), w);
            let basis = linalg::kernel_within(&shifted, &vz, tol);
            if basis.cols() > 0 {
                out.push(JointEigen { z, w, basis });
            }
        }
    }
    Ok(out)
}

/// Co-stability: no joint eigenvector of `(b₁, b₂)` lies in `ker e`.
pub fn check_t2<S: Scalar>(d: &PlaneADHM<S>, tol: f64) -> Result<bool> {
    let e = d.e.to_complex()?;
    let threshold = tol.max(EIGEN_TOL) * e.max_abs().max(1.0);
    for joint in common_eigenvectors(&d.b1, &d.b2, tol)? {
        let ev = &e * &joint.basis;
        // e·V has rank at most one
        if joint.basis.cols() > 1 || ev.max_abs() <= threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Diagonal data for distinct points, framed by `e = (1, …, 1)`.
pub fn from_plane_points<S: Scalar>(points: &[(S, S)]) -> Result<PlaneADHM<S>> {
    if points.is_empty() {
        return Err(AdhmError::InvalidInput(
            "at least one point is required".into(),
        ));
    }
    for i in 0..points.len() {
        if points[..i].contains(&points[i]) {
            return Err(AdhmError::DuplicatePoint(i));
        }
    }
    let z: Vec<S> = points.iter().map(|p| p.0.clone()).collect();
    let w: Vec<S> = points.iter().map(|p| p.1.clone()).collect();
    PlaneADHM::new(
        Matrix::diag(&z),
        Matrix::diag(&w),
        Matrix::from_fn(1, z.len(), |_, _| S::one()),
    )
}

/// `(φb₁φ⁻¹, φb₂φ⁻¹, eφ⁻¹)`.
pub fn gl_action<S: Scalar>(phi: &Matrix<S>, d: &PlaneADHM<S>, tol: f64) -> Result<PlaneADHM<S>> {
    if phi.shape() != (d.c, d.c) {
        return Err(AdhmError::ShapeMismatch("gauge size differs from c".into()));
    }
    let inv = phi.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    Ok(PlaneADHM {
        c: d.c,
        b1: &(phi * &d.b1) * &inv,
        b2: &(phi * &d.b2) * &inv,
        e: &d.e * &inv,
    })
}

/// Joint eigenvalues when each joint eigenspace is a line and there are `c`
/// of them; otherwise `NonSimpleSpectrum`.
pub fn joint_spectrum<S: Scalar>(d: &PlaneADHM<S>, tol: f64) -> Result<Vec<(C64, C64)>> {
    let joint = common_eigenvectors(&d.b1, &d.b2, tol)?;
    if joint.len() != d.c || joint.iter().any(|j| j.basis.cols() != 1) {
        return Err(AdhmError::NonSimpleSpectrum);
    }
    Ok(joint.into_iter().map(|j| (j.z, j.w)).collect())
}

/// Sorts points lexicographically by real then imaginary parts.
pub fn sort_points(points: &mut [(C64, C64)]) {
    let key = |p: &(C64, C64)| [p.0.re, p.0.im, p.1.re, p.1.im];
    points.sort_by(|a, b| {
        key(a)
            .iter()
            .zip(key(b).iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::scalar::{Gf, DEFAULT_TOL};

    type Q = BigRational;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn cd(v: &[f64]) -> Matrix<C64> {
        Matrix::diag(&v.iter().map(|&x| c(x)).collect::<Vec<_>>())
    }

    #[test]
    fn t1_examples() {
        let d = PlaneADHM::new(cd(&[1.0, 2.0]), cd(&[3.0, 4.0]), Matrix::zeros(1, 2)).unwrap();
        assert!(check_t1(&d, DEFAULT_TOL));
        let b1 = Matrix::<Q>::from_int_rows(&[&[0, 1], &[0, 0]]);
        let d = PlaneADHM::new(b1.clone(), b1.transpose(), Matrix::zeros(1, 2)).unwrap();
        assert!(!check_t1(&d, 0.0));
        assert_eq!(
            d.b1.commutator(&d.b2),
            Matrix::from_int_rows(&[&[1, 0], &[0, -1]])
        );
        let d = PlaneADHM::new(
            Matrix::<Q>::from_int_rows(&[&[3]]),
            Matrix::from_int_rows(&[&[-5]]),
            Matrix::from_int_rows(&[&[0]]),
        )
        .unwrap();
        assert!(check_t1(&d, 0.0));
    }

    #[test]
    fn joint_eigenvectors_of_diagonal_and_zero() {
        let j = common_eigenvectors(&cd(&[1.0, 2.0]), &cd(&[3.0, 4.0]), DEFAULT_TOL).unwrap();
        assert_eq!(j.len(), 2);
        for x in &j {
            assert_eq!(x.basis.cols(), 1);
            let k = if (x.z - 1.0).norm() < 1e-9 { 0 } else { 1 };
            assert!((x.w - [3.0, 4.0][k]).norm() < 1e-9);
            assert!((x.basis[(k, 0)].norm() - 1.0).abs() < 1e-9);
        }
        let z = Matrix::<C64>::zeros(2, 2);
        let j = common_eigenvectors(&z, &z, DEFAULT_TOL).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].basis.cols(), 2);
        let g = Matrix::<Gf<5>>::identity(2);
        assert!(common_eigenvectors(&g, &g, 0.0).is_err());
    }

    #[test]
    fn conjugated_diagonals_give_conjugated_vectors() {
        let p = Matrix::<C64>::from_int_rows(&[&[1, 1], &[1, 2]]);
        let pinv = p.inverse(DEFAULT_TOL).unwrap();
        let b1 = &(&p * &cd(&[1.0, -1.0])) * &pinv;
        let b2 = &(&p * &cd(&[5.0, 7.0])) * &pinv;
        for j in common_eigenvectors(&b1, &b2, DEFAULT_TOL).unwrap() {
            let k = if (j.z - 1.0).norm() < 1e-9 { 0 } else { 1 };
            // the eigenvector is parallel to the k-th column of p
            let col = p.column(k);
            let cross = j.basis[(0, 0)] * col[(1, 0)] - j.basis[(1, 0)] * col[(0, 0)];
            assert!(cross.norm() < 1e-9);
        }
    }

    #[test]
    fn t2_examples() {
        let one = Matrix::<Q>::from_int_rows(&[&[1]]);
        let zero = Matrix::<Q>::zeros(1, 1);
        assert!(check_t2(
            &PlaneADHM::new(zero.clone(), zero.clone(), one).unwrap(),
            0.0
        )
        .unwrap());
        let d = PlaneADHM::new(
            Matrix::<Q>::identity(2),
            Matrix::zeros(2, 2),
            Matrix::zeros(1, 2),
        );
        assert!(!check_t2(&d.unwrap(), 0.0).unwrap());
        let b1 = Matrix::<Q>::diag(&[Q::from_integer(1.into()), Q::from_integer(2.into())]);
        let b2 = Matrix::<Q>::diag(&[Q::from_integer(3.into()), Q::from_integer(4.into())]);
        let d = PlaneADHM::new(b1.clone(), b2.clone(), Matrix::from_int_rows(&[&[1, 0]])).unwrap();
        assert!(!check_t2(&d, 0.0).unwrap());
        let d = PlaneADHM::new(b1, b2, Matrix::from_int_rows(&[&[1, 1]])).unwrap();
        assert!(check_t2(&d, 0.0).unwrap());
    }

    #[test]
    fn points_and_duplicates() {
        let d = from_plane_points(&[(c(0.0), c(0.0))]).unwrap();
        assert!(d.b1.is_zero() && d.b2.is_zero() && d.e == Matrix::from_fn(1, 1, |_, _| c(1.0)));
        let d = from_plane_points(&[(c(1.0), c(0.0)), (c(0.0), c(1.0))]).unwrap();
        assert!(check_t1(&d, DEFAULT_TOL) && check_t2(&d, DEFAULT_TOL).unwrap());
        assert_eq!(
            from_plane_points(&[(c(1.0), c(1.0)), (c(1.0), c(1.0))]),
            Err(AdhmError::DuplicatePoint(1))
        );
    }

    #[test]
    fn scalar_gauge_halves_e() {
        let d = from_plane_points(&[(c(1.0), c(2.0)), (c(3.0), c(-1.0))]).unwrap();
        assert_eq!(gl_action(&Matrix::identity(2), &d, DEFAULT_TOL).unwrap(), d);
        let g = gl_action(&Matrix::scalar(2, c(2.0)), &d, DEFAULT_TOL).unwrap();
        assert!((&g.b1 - &d.b1).max_abs() < 1e-15 && (&g.b2 - &d.b2).max_abs() < 1e-15);
        assert!((&g.e - &d.e.scale(&c(0.5))).max_abs() < 1e-15);
        assert_eq!(
            gl_action(&Matrix::zeros(2, 2), &d, DEFAULT_TOL),
            Err(AdhmError::SingularGauge)
        );
    }

    #[test]
    fn json_layout() {
        let d =
            from_plane_points(&[(Q::from_integer(2.into()), Q::from_integer(3.into()))]).unwrap();
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["c"], 1);
        assert_eq!(v["b2"]["entries"][0], "3/1");
        let back: PlaneADHM<Q> = serde_json::from_value(v).unwrap();
        assert_eq!(back, d);
    }
}
