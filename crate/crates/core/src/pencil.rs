//! Regularity of pencils `ν₁A₁ + ν₂A₂` and minimal polynomial solutions of
//! singular ones.

use crate::matrix::Matrix;
use crate::poly::{interpolation_nodes, pencil_det_poly, projective_roots, ProjRoot};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct PencilAnalysis<S> {
    pub regular: bool,
    /// A node `[ν₁:ν₂]` where the pencil is invertible.
    pub witness: Option<(S, S)>,
    /// Projective roots of the determinant; `None` over prime fields.
    pub eigenvalues: Option<Vec<ProjRoot>>,
    pub minimal_index: Option<usize>,
    /// Column vectors `v₀, …, v_ε`.
    pub minimal_solution: Option<Vec<Matrix<S>>>,
    /// Largest chain-equation residual of the returned solution.
    pub chain_residual: f64,
}

impl<S: Scalar> PencilAnalysis<S> {
    /// The span of the minimal solution as columns.
    pub fn solution_span(&self) -> Option<Matrix<S>> {
        self.minimal_solution
            .as_ref()
            .map(|v| Matrix::hstack(&v.iter().collect::<Vec<_>>()))
    }
}

/// The `(ε+2)c × (ε+1)c` system `A₁v₀ = 0`, `A₂v_{q−1} − A₁v_q = 0`,
/// `A₂v_ε = 0`.
pub fn staircase<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>, eps: usize) -> Matrix<S> {
    let c = a1.rows();
    let mut m = Matrix::zeros((eps + 2) * c, (eps + 1) * c);
    let neg_a1 = -a1;
    m.set_block(0, 0, a1);
    for q in 1..=eps {
        m.set_block(q * c, (q - 1) * c, a2);
        m.set_block(q * c, q * c, &neg_a1);
    }
    m.set_block((eps + 1) * c, eps * c, a2);
    m
}

/// Largest residual of the chain equations for `v₀..v_ε`, relative to
/// `max(1, ‖A‖)`.
pub fn chain_residual<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>, v: &[Matrix<S>]) -> f64 {
    let scale = a1.max_abs().max(a2.max_abs()).max(1.0);
    let mut worst = (a1 * &v[0]).max_abs();
    for q in 1..v.len() {
        worst = worst.max((&(a2 * &v[q - 1]) - &(a1 * &v[q])).max_abs());
    }
    worst = worst.max((a2 * &v[v.len() - 1]).max_abs());
    worst / scale
}

// Normalizes each basis column by its first coordinate of maximal modulus
// and keeps the one whose leading coordinate comes first.
fn pick_solution<S: Scalar>(basis: &Matrix<S>, tol: f64) -> Matrix<S> {
    let mut best: Option<(usize, Matrix<S>)> = None;
    for k in 0..basis.cols() {
        let col = basis.column(k);
        let top = col.max_abs();
        let Some(pivot) = (0..col.rows()).find(|&i| col[(i, 0)].modulus() >= top * (1.0 - 1e-9))
        else {
            continue;
        };
        let normalized = col.scale(&(S::one() / col[(pivot, 0)].clone()));
        let lead = (0..col.rows())
            .find(|&i| !normalized[(i, 0)].is_negligible(tol, 1.0))
            .unwrap_or(col.rows());
        if best.as_ref().is_none_or(|(l, _)| lead < *l) {
            best = Some((lead, normalized));
        }
    }
    best.expect("nonempty kernel").1
}

/// Regularity verdict plus either the spectrum or the minimal index with a
/// minimal solution.
pub fn analyze_pencil<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>, tol: f64) -> PencilAnalysis<S> {
    assert!(
        a1.is_square() && a1.shape() == a2.shape(),
        "pencil needs equal square matrices"
    );
    let c = a1.rows();
    let nodes = interpolation_nodes::<S>(c).unwrap_or_default();
    let witness = nodes
        .into_iter()
        .find(|(n1, n2)| (&a1.scale(n1) + &a2.scale(n2)).rank(tol) == c);
    let regular = witness.is_some() || {
        // fields too small to host c+1 nodes
        let p = pencil_det_poly(a1, a2);
        !p.is_zero(tol)
    };
    if regular {
        let eigenvalues = projective_roots(&pencil_det_poly(a1, a2), tol).ok();
        return PencilAnalysis {
            regular,
            witness,
            eigenvalues,
            minimal_index: None,
            minimal_solution: None,
            chain_residual: 0.0,
        };
    }
    for eps in 0..=c {
        let kernel = staircase(a1, a2, eps).nullspace(tol);
        if kernel.cols() == 0 {
            continue;
        }
        let x = pick_solution(&kernel, tol);
        let v: Vec<Matrix<S>> = (0..=eps).map(|q| x.submatrix(q * c, 0, c, 1)).collect();
        let chain_residual = chain_residual(a1, a2, &v);
        return PencilAnalysis {
            regular,
            witness: None,
            eigenvalues: None,
            minimal_index: Some(eps),
            minimal_solution: Some(v),
            chain_residual,
        };
    }
    unreachable!("a singular c×c pencil has a polynomial solution of degree below c")
}

/// `dim(A₁S₀ + A₂S₀) ≥ dim S₀` for the span of the columns of `s0`.
pub fn check_q3_star<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>, s0: &Matrix<S>, tol: f64) -> bool {
    let images = Matrix::hstack(&[&(a1 * s0), &(a2 * s0)]);
    images.rank(tol) >= s0.cols()
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::scalar::{Gf, C64, DEFAULT_TOL};

    type Q = BigRational;

    #[test]
    fn identity_pencil_is_regular() {
        let an = analyze_pencil(&Matrix::<Q>::identity(3), &Matrix::zeros(3, 3), 0.0);
        assert!(an.regular && an.witness.is_some() && an.minimal_index.is_none());
        let ev = an.eigenvalues.unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].multiplicity, 3);
        assert!(ev[0].point.0.norm() < 1e-12 && (ev[0].point.1 - 1.0).norm() < 1e-12);
    }

    #[test]
    fn embedded_jordan_pencil_has_index_one() {
        let a1 = Matrix::<Q>::from_int_rows(&[&[1, 0], &[0, 0]]);
        let a2 = Matrix::<Q>::from_int_rows(&[&[0, 1], &[0, 0]]);
        let an = analyze_pencil(&a1, &a2, 0.0);
        assert!(!an.regular && an.witness.is_none());
        assert_eq!(an.minimal_index, Some(1));
        let v = an.minimal_solution.clone().unwrap();
        assert_eq!(v[0], Matrix::from_int_rows(&[&[0], &[1]]));
        assert_eq!(v[1], Matrix::from_int_rows(&[&[1], &[0]]));
        assert_eq!(an.chain_residual, 0.0);
        assert!(!check_q3_star(&a1, &a2, &an.solution_span().unwrap(), 0.0));

        let f1 = a1.map(|x| x.to_c64().unwrap());
        let f2 = a2.map(|x| x.to_c64().unwrap());
        let an = analyze_pencil(&f1, &f2, DEFAULT_TOL);
        assert_eq!(an.minimal_index, Some(1));
        assert!(an.chain_residual < 1e-12);
    }

    #[test]
    fn common_kernel_gives_index_zero() {
        let a = Matrix::<Gf<7>>::from_int_rows(&[&[1, 0], &[0, 0]]);
        let an = analyze_pencil(&a, &a, 0.0);
        assert_eq!(an.minimal_index, Some(0));
        assert_eq!(
            an.minimal_solution.unwrap()[0],
            Matrix::from_int_rows(&[&[0], &[1]])
        );
    }

    #[test]
    fn zero_pencil_fails_q3_star() {
        let z = Matrix::<C64>::zeros(2, 2);
        let s0 = Matrix::from_int_rows(&[&[1], &[0]]);
        assert!(!check_q3_star(&z, &z, &s0, DEFAULT_TOL));
        assert!(check_q3_star(&Matrix::identity(2), &z, &s0, DEFAULT_TOL));
    }
}
