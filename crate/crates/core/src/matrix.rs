//! Dense row-major matrices over any [`Scalar`] backend.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{AdhmError, Result};
use crate::linalg;
use crate::scalar::{Backend, Scalar, C64};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(AdhmError::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from integer rows; handy for fixtures.
    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self::from_fn(rows.len(), cols, |r, c| S::from_i64(rows[r][c]))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn scalar(n: usize, value: S) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { value.clone() } else { S::zero() })
    }

    pub fn diag(values: &[S]) -> Self {
        let n = values.len();
        Self::from_fn(
            n,
            n,
            |r, c| if r == c { values[r].clone() } else { S::zero() },
        )
    }

    pub fn row_vector(values: &[S]) -> Self {
        Self::from_fn(1, values.len(), |_, c| values[c].clone())
    }

    pub fn col_vector(values: &[S]) -> Self {
        Self::from_fn(values.len(), 1, |r, _| values[r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, r: usize) -> Vec<S> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn column(&self, c: usize) -> Self {
        Self::from_fn(self.rows, 1, |r, _| self[(r, c)].clone())
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])].clone())
    }

    pub fn submatrix(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(row0 + r, col0 + c)].clone())
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Conjugate transpose; plain transpose for exact backends.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn hstack(blocks: &[&Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        assert!(blocks.iter().all(|b| b.rows == rows), "hstack row mismatch");
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.set_block(0, offset, b);
            offset += b.cols;
        }
        out
    }

    pub fn vstack(blocks: &[&Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        assert!(
            blocks.iter().all(|b| b.cols == cols),
            "vstack column mismatch"
        );
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Matrix { rows, cols, data }
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(row0 + r, col0 + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data
            .iter()
            .map(|x| x.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Zero within `tol * scale` (literal zero for exact backends).
    pub fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol, scale))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn pow(&self, exp: usize) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> S {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].modulus().total_cmp(&a[(y, col)].modulus()));
            let Some(p) = pivot else { return S::zero() };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det = det * pv.clone();
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pv.clone();
                for c in col..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solves `self · X = rhs` for square invertible `self`; `None` when
    /// `self` is singular (numerically: rank below full at tolerance `tol`).
    pub fn solve(&self, rhs: &Self, tol: f64) -> Option<Self> {
        assert!(
            self.is_square() && rhs.rows == self.rows,
            "solve shape mismatch"
        );
        if !self.is_invertible(tol) {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let p = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].modulus().total_cmp(&a[(y, col)].modulus()))?;
            a.swap_rows(p, col);
            b.swap_rows(p, col);
            let pv = a[(col, col)].clone();
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone() / pv.clone();
                for c in col..n {
                    let v = a[(r, c)].clone() - factor.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
                for c in 0..b.cols {
                    let v = b[(r, c)].clone() - factor.clone() * b[(col, c)].clone();
                    b[(r, c)] = v;
                }
            }
        }
        for r in 0..n {
            let pv = a[(r, r)].clone();
            for c in 0..b.cols {
                let v = b[(r, c)].clone() / pv.clone();
                b[(r, c)] = v;
            }
        }
        Some(b)
    }

    pub fn inverse(&self, tol: f64) -> Option<Self> {
        self.solve(&Self::identity(self.rows), tol)
    }

    pub fn is_invertible(&self, tol: f64) -> bool {
        self.is_square() && self.rank(tol) == self.rows
    }

    /// Rank: singular values above `tol·max(1, ‖M‖max)` in the float
    /// backend, exact row reduction otherwise.
    pub fn rank(&self, tol: f64) -> usize {
        if S::is_exact() {
            linalg::rref(self).1.len()
        } else {
            linalg::svd_rank(&self.to_complex().expect("float backend"), tol)
        }
    }

    /// Columns spanning the kernel. Float backend: orthonormal columns from
    /// the SVD. Exact backends: the reduced-echelon basis.
    pub fn nullspace(&self, tol: f64) -> Self {
        if S::is_exact() {
            linalg::rref_nullspace(self)
        } else {
            let k = linalg::svd_nullspace(&self.to_complex().expect("float backend"), tol);
            Self::from_complex(&k).expect("float backend")
        }
    }

    pub fn to_complex(&self) -> Result<Matrix<C64>> {
        let data = self
            .data
            .iter()
            .map(|x| {
                x.to_c64()
                    .ok_or(AdhmError::UnsupportedBackend(S::backend()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn from_complex(m: &Matrix<C64>) -> Option<Self> {
        let data = m
            .data
            .iter()
            .map(|z| S::from_c64(*z))
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix {
            rows: m.rows,
            cols: m.cols,
            data,
        })
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::json!({
            "rows": self.rows,
            "cols": self.cols,
            "backend": S::backend().to_string(),
            "entries": self.data.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| AdhmError::Parse(format!("matrix is missing `{name}`")))
        };
        let rows = field("rows")?
            .as_u64()
            .ok_or_else(|| AdhmError::Parse("`rows` must be a count".into()))?
            as usize;
        let cols = field("cols")?
            .as_u64()
            .ok_or_else(|| AdhmError::Parse("`cols` must be a count".into()))?
            as usize;
        let backend: Backend = field("backend")?
            .as_str()
            .ok_or_else(|| AdhmError::Parse("`backend` must be a string".into()))?
            .parse()?;
        if backend != S::backend() {
            return Err(AdhmError::Parse(format!(
                "matrix backend {backend} does not match expected {}",
                S::backend()
            )));
        }
        let entries = field("entries")?
            .as_array()
            .ok_or_else(|| AdhmError::Parse("`entries` must be an array".into()))?;
        let data = entries
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<_>>>()?;
        Matrix::new(rows, cols, data)
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Scalar> Mul for &Matrix<S> {
    type Output = Matrix<S>;
    fn mul(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(
            self.cols, rhs.rows,
            "product of {}x{} and {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Matrix::<S>::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let v = out[(r, c)].clone() + a.clone() * rhs[(k, c)].clone();
                    out[(r, c)] = v;
                }
            }
        }
        out
    }
}

impl<S: Scalar> Add for &Matrix<S> {
    type Output = Matrix<S>;
    fn add(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.shape(), rhs.shape(), "sum shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &Matrix<S> {
    type Output = Matrix<S>;
    fn sub(self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.shape(), rhs.shape(), "difference shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for &Matrix<S> {
    type Output = Matrix<S>;
    fn neg(self) -> Matrix<S> {
        self.map(|x| -x.clone())
    }
}

impl<S: Scalar> Serialize for Matrix<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Matrix<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Matrix::from_json_value(&v).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;
    use num_traits::Zero;

    use super::*;
    use crate::scalar::{Gf, DEFAULT_TOL};

    type Q = BigRational;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn rank_examples_all_backends() {
        assert_eq!(Matrix::<C64>::identity(3).rank(DEFAULT_TOL), 3);
        assert_eq!(Matrix::<Q>::identity(3).rank(DEFAULT_TOL), 3);
        assert_eq!(Matrix::<Gf<5>>::identity(3).rank(0.0), 3);
        assert_eq!(Matrix::<C64>::zeros(2, 3).rank(DEFAULT_TOL), 0);
        assert_eq!(Matrix::<Q>::zeros(2, 3).rank(DEFAULT_TOL), 0);
        let m = [&[1, 2][..], &[2, 4]];
        assert_eq!(Matrix::<C64>::from_int_rows(&m).rank(DEFAULT_TOL), 1);
        assert_eq!(Matrix::<Q>::from_int_rows(&m).rank(0.0), 1);
        assert_eq!(Matrix::<Gf<5>>::from_int_rows(&m).rank(0.0), 1);
        // full rank over Q, singular mod 5
        let m = Matrix::<Gf<5>>::from_int_rows(&[&[1, 2], &[3, 1]]);
        assert_eq!(m.rank(0.0), 1);
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(Matrix::<C64>::identity(3).nullspace(DEFAULT_TOL).cols(), 0);
        let k = Matrix::<C64>::zeros(2, 2).nullspace(DEFAULT_TOL);
        assert_eq!(k.shape(), (2, 2));
        let gram = &k.adjoint() * &k;
        assert!(
            (&gram - &Matrix::identity(2)).max_abs() < 1e-12,
            "orthonormal"
        );

        let k = Matrix::<C64>::from_int_rows(&[&[1, 1]]).nullspace(DEFAULT_TOL);
        assert_eq!(k.shape(), (2, 1));
        assert!((k[(0, 0)] + k[(1, 0)]).norm() < 1e-12);
        assert!(k[(0, 0)].norm() > 0.5);

        let k = Matrix::<Q>::from_int_rows(&[&[1, 1]]).nullspace(0.0);
        assert_eq!(k, Matrix::from_int_rows(&[&[-1], &[1]]));
    }

    #[test]
    fn det_and_inverse() {
        let a = Matrix::<Q>::from_int_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.det(), Q::from_integer(18.into()));
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(&a * &inv, Matrix::identity(3));
        let s = Matrix::<Q>::from_int_rows(&[&[1, 2], &[2, 4]]);
        assert!(s.det().is_zero());
        assert!(s.inverse(0.0).is_none());

        let f = a.map(|x| c(x.to_c64().unwrap().re));
        assert!((f.det() - c(18.0)).norm() < 1e-12);
        let finv = f.inverse(DEFAULT_TOL).unwrap();
        assert!((&(&f * &finv) - &Matrix::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_and_backend_mismatch() {
        let a = Matrix::<Q>::from_int_rows(&[&[1, -2], &[0, 3]]).scale(&Q::new(1.into(), 3.into()));
        let v = a.to_json_value();
        assert_eq!(v["backend"], "rational");
        assert_eq!(v["entries"][1], "-2/3");
        assert_eq!(Matrix::<Q>::from_json_value(&v).unwrap(), a);
        assert!(Matrix::<C64>::from_json_value(&v).is_err());

        let g = Matrix::<Gf<5>>::from_int_rows(&[&[4, 9]]);
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"backend":"gf(5)","cols":2,"entries":[4,4],"rows":1}"#
        );
        let back: Matrix<Gf<5>> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);

        let bad = serde_json::json!({"rows":2,"cols":2,"backend":"complex","entries":[[1,0]]});
        assert!(matches!(
            Matrix::<C64>::from_json_value(&bad),
            Err(AdhmError::ShapeMismatch(_))
        ));
    }
}
