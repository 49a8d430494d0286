//! Binary forms: the determinant of a pencil and its roots on P¹.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::linalg::{self, CLUSTER_TOL};
use crate::matrix::Matrix;
use crate::scalar::{spow, Backend, Scalar, C64};

/// A binary form of fixed degree; `coeffs[q]` multiplies `ν₂^q ν₁^(d−q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogPoly<S> {
    degree: usize,
    coeffs: Vec<S>,
}

impl<S: Scalar> HomogPoly<S> {
    pub fn new(coeffs: Vec<S>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(AdhmError::InvalidInput(
                "a form needs at least one coefficient".into(),
            ));
        }
        Ok(HomogPoly {
            degree: coeffs.len() - 1,
            coeffs,
        })
    }

    pub fn zero(degree: usize) -> Self {
        HomogPoly {
            degree,
            coeffs: vec![S::zero(); degree + 1],
        }
    }

    /// `∏ (β_i ν₁ − α_i ν₂)`, the form vanishing at each `[α_i : β_i]`.
    pub fn from_roots(roots: &[(S, S)]) -> Self {
        roots.iter().fold(
            HomogPoly {
                degree: 0,
                coeffs: vec![S::one()],
            },
            |acc, (a, b)| {
                acc.mul(&HomogPoly {
                    degree: 1,
                    coeffs: vec![b.clone(), -a.clone()],
                })
            },
        )
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn eval(&self, nu1: &S, nu2: &S) -> S {
        self.coeffs
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (q, a)| {
                acc + a.clone() * spow(nu2, q) * spow(nu1, self.degree - q)
            })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut coeffs = vec![S::zero(); degree + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        HomogPoly { degree, coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    /// All coefficients below `tol` in absolute value (literal zero when exact).
    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|a| a.is_negligible(tol, 1.0))
    }
}

impl<S: Scalar> Serialize for HomogPoly<S> {
    fn serialize<Z: serde::Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        serde_json::json!({
            "degree": self.degree,
            "coeffs": self.coeffs.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        })
        .serialize(s)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for HomogPoly<S> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        let coeffs = v["coeffs"]
            .as_array()
            .ok_or_else(|| D::Error::custom("`coeffs` must be an array"))?
            .iter()
            .map(S::from_json)
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        HomogPoly::new(coeffs).map_err(D::Error::custom)
    }
}

/// Interpolation nodes `(ν₁, ν₂)` for a form of degree `d`. The float
/// backend uses the chart angles `πm/(d+1)`; exact backends use `[0:1]`
/// followed by `[1:k]`, which needs `d+1 ≤ p+1` points over `F_p`.
pub fn interpolation_nodes<S: Scalar>(d: usize) -> Option<Vec<(S, S)>> {
    if S::is_exact() {
        if let Backend::Prime(p) = S::backend() {
            if d as u64 > p {
                return None;
            }
        }
        let mut nodes = vec![(S::zero(), S::one())];
        nodes.extend((0..d as i64).map(|k| (S::one(), S::from_i64(k))));
        Some(nodes)
    } else {
        Some(
            (0..=d)
                .map(|m| crate::scalar::rotation::<S>(m as i64, d).expect("float backend"))
                .collect(),
        )
    }
}

fn pencil_at<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>, nu1: &S, nu2: &S) -> Matrix<S> {
    &a1.scale(nu1) + &a2.scale(nu2)
}

/// `det(ν₁A₁ + ν₂A₂)` by evaluation at `c+1` nodes and interpolation.
/// Prime fields too small to host enough nodes fall back to the cofactor
/// expansion.
pub fn pencil_det_poly<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>) -> HomogPoly<S> {
    assert!(
        a1.is_square() && a1.shape() == a2.shape(),
        "pencil needs equal square matrices"
    );
    let c = a1.rows();
    let Some(nodes) = interpolation_nodes::<S>(c) else {
        return pencil_det_poly_cofactor(a1, a2);
    };
    let vander = Matrix::from_fn(c + 1, c + 1, |i, q| {
        spow(&nodes[i].1, q) * spow(&nodes[i].0, c - q)
    });
    let values = Matrix::from_fn(c + 1, 1, |i, _| {
        pencil_at(a1, a2, &nodes[i].0, &nodes[i].1).det()
    });
    let coeffs = vander
        .solve(&values, 1e-12)
        .expect("nodes are pairwise non-proportional");
    HomogPoly {
        degree: c,
        coeffs: (0..=c).map(|q| coeffs[(q, 0)].clone()).collect(),
    }
}

/// `det(ν₁A₁ + ν₂A₂)` by Laplace expansion along rows, memoized over
/// column subsets. Exponential in `c`; an independent oracle for small sizes.
pub fn pencil_det_poly_cofactor<S: Scalar>(a1: &Matrix<S>, a2: &Matrix<S>) -> HomogPoly<S> {
    assert!(
        a1.is_square() && a1.shape() == a2.shape(),
        "pencil needs equal square matrices"
    );
    let c = a1.rows();
    assert!(c < 24, "cofactor expansion is exponential");
    let mut memo: HashMap<u32, Vec<S>> = HashMap::new();
    let full = (1u32 << c) - 1;
    let coeffs = minor(a1, a2, full, c, &mut memo);
    HomogPoly { degree: c, coeffs }
}

// Determinant of rows `c − |cols| ..` restricted to `cols`, as coefficients
// of `ν₂^q ν₁^(k−q)` with `k = |cols|`.
fn minor<S: Scalar>(
    a1: &Matrix<S>,
    a2: &Matrix<S>,
    cols: u32,
    c: usize,
    memo: &mut HashMap<u32, Vec<S>>,
) -> Vec<S> {
    let k = cols.count_ones() as usize;
    if k == 0 {
        return vec![S::one()];
    }
    if let Some(v) = memo.get(&cols) {
        return v.clone();
    }
    let row = c - k;
    let mut out = vec![S::zero(); k + 1];
    let mut sign = S::one();
    for j in 0..c {
        if cols & (1 << j) == 0 {
            continue;
        }
        let sub = minor(a1, a2, cols & !(1 << j), c, memo);
        let (l1, l2) = (a1[(row, j)].clone(), a2[(row, j)].clone());
        for (q, s) in sub.iter().enumerate() {
            out[q] = out[q].clone() + sign.clone() * l1.clone() * s.clone();
            out[q + 1] = out[q + 1].clone() + sign.clone() * l2.clone() * s.clone();
        }
        sign = -sign;
    }
    memo.insert(cols, out.clone());
    out
}

/// A point `[λ₁ : λ₂]` of P¹ with multiplicity; the larger coordinate is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjRoot {
    pub point: (C64, C64),
    pub multiplicity: usize,
}

/// Scales `(a, b)` so that its first coordinate of maximal modulus is 1.
/// Moduli within the clustering tolerance count as tied.
pub fn normalize_point(a: C64, b: C64) -> (C64, C64) {
    if a.norm() >= b.norm() * (1.0 - CLUSTER_TOL) {
        (C64::new(1.0, 0.0), b / a)
    } else {
        (a / b, C64::new(1.0, 0.0))
    }
}

/// Merges projective points closer than the clustering tolerance.
pub fn cluster_projective(points: Vec<((C64, C64), usize)>) -> Vec<ProjRoot> {
    let mut groups: Vec<Vec<((C64, C64), usize)>> = Vec::new();
    for (p, k) in points {
        let p = normalize_point(p.0, p.1);
        match groups.iter_mut().find(|g| {
            g.iter()
                .any(|(u, _)| linalg::chordal_proj(*u, p) <= CLUSTER_TOL)
        }) {
            Some(g) => g.push((p, k)),
            None => groups.push(vec![(p, k)]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let first = g[0].0;
            let pick_first = first.0 == C64::new(1.0, 0.0);
            let mut sum = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            let mut total = 0;
            for ((a, b), k) in &g {
                let s = if pick_first { *a } else { *b };
                sum.0 += a / s * *k as f64;
                sum.1 += b / s * *k as f64;
                total += k;
            }
            ProjRoot {
                point: normalize_point(sum.0, sum.1),
                multiplicity: total,
            }
        })
        .collect()
}

/// Roots of `p` on P¹ with multiplicities summing to the degree. `[1:0]` is
/// read off the vanishing low coefficients; the rest are companion-matrix
/// eigenvalues of `Σ a_q s^(d−q)`, where `s = ν₁/ν₂`.
pub fn projective_roots<S: Scalar>(p: &HomogPoly<S>, tol: f64) -> Result<Vec<ProjRoot>> {
    if let Backend::Prime(_) = S::backend() {
        return Err(AdhmError::UnsupportedBackend(S::backend()));
    }
    if p.is_zero(tol) {
        return Err(AdhmError::ZeroPolynomial);
    }
    let a: Vec<C64> = p
        .coeffs
        .iter()
        .map(|x| x.to_c64().expect("not a prime field"))
        .collect();
    let scale = p.max_abs().max(1.0);
    let d = p.degree;
    let k = p
        .coeffs
        .iter()
        .take_while(|x| x.is_negligible(tol, scale))
        .count();
    let mut pts = Vec::new();
    if k > 0 {
        pts.push(((C64::new(1.0, 0.0), C64::new(0.0, 0.0)), k));
    }
    let r = d - k;
    if r > 0 {
        // monic g(s) = s^r + Σ_{j<r} g_j s^j with g_j = a_{d−j}/a_k
        let lead = a[k];
        let companion = Matrix::from_fn(r, r, |i, j| {
            if i == 0 {
                -a[k + 1 + j] / lead
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        for s in linalg::eigenvalues(&companion) {
            pts.push(((s, C64::new(1.0, 0.0)), 1));
        }
    }
    Ok(cluster_projective(pts))
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::scalar::Gf;

    type Q = BigRational;

    fn q(v: i64) -> Q {
        Q::from_integer(v.into())
    }

    #[test]
    fn identity_and_zero_pencil() {
        let p = pencil_det_poly(&Matrix::<Q>::identity(2), &Matrix::zeros(2, 2));
        assert_eq!(p.coeffs(), &[q(1), q(0), q(0)]);
        let p = pencil_det_poly(&Matrix::<C64>::identity(2), &Matrix::zeros(2, 2));
        assert!((p.coeffs()[0] - 1.0).norm() < 1e-12);
        assert!(p.coeffs()[1].norm() < 1e-12 && p.coeffs()[2].norm() < 1e-12);
    }

    #[test]
    fn diagonal_pencil_expands() {
        // (ν₁+ν₂)(2ν₁+ν₂) = 2ν₁² + 3ν₁ν₂ + ν₂²
        let a1 = Matrix::<Q>::diag(&[q(1), q(2)]);
        let a2 = Matrix::<Q>::identity(2);
        assert_eq!(pencil_det_poly(&a1, &a2).coeffs(), &[q(2), q(3), q(1)]);
        assert_eq!(
            pencil_det_poly_cofactor(&a1, &a2).coeffs(),
            &[q(2), q(3), q(1)]
        );
    }

    #[test]
    fn tiny_field_uses_cofactor_fallback() {
        let a1 = Matrix::<Gf<2>>::identity(3);
        let a2 = Matrix::<Gf<2>>::from_int_rows(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        // det(ν₁I + ν₂P) for a 3-cycle P is ν₁³ + ν₂³
        let p = pencil_det_poly(&a1, &a2);
        assert_eq!(
            p.coeffs(),
            &[Gf::new(1), Gf::new(0), Gf::new(0), Gf::new(1)]
        );
    }

    #[test]
    fn roots_of_simple_forms() {
        let p = HomogPoly::<Q>::new(vec![q(0), q(1), q(0)]).unwrap();
        let mut r = projective_roots(&p, 1e-9).unwrap();
        r.sort_by(|a, b| b.point.0.norm().total_cmp(&a.point.0.norm()));
        assert_eq!(r.len(), 2);
        assert!((r[0].point.0 - 1.0).norm() < 1e-12 && r[0].point.1.norm() < 1e-12);
        assert!(r[1].point.0.norm() < 1e-12 && (r[1].point.1 - 1.0).norm() < 1e-12);

        let p = HomogPoly::<Q>::new(vec![q(1), q(2), q(1)]).unwrap();
        let r = projective_roots(&p, 1e-9).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].point.0 - 1.0).norm() < 1e-7 && (r[0].point.1 + 1.0).norm() < 1e-7);

        assert_eq!(
            projective_roots(&HomogPoly::<Q>::zero(3), 1e-9),
            Err(AdhmError::ZeroPolynomial)
        );
        let g = HomogPoly::<Gf<5>>::new(vec![Gf::new(1), Gf::new(1)]).unwrap();
        assert!(matches!(
            projective_roots(&g, 0.0),
            Err(AdhmError::UnsupportedBackend(_))
        ));
    }

    #[test]
    fn cubic_roots_from_factors() {
        // roots s = 1, 2, 3 of the affine coordinate s = ν₁/ν₂
        let p = HomogPoly::<Q>::from_roots(&[(q(1), q(1)), (q(2), q(1)), (q(3), q(1))]);
        let mut r: Vec<f64> = projective_roots(&p, 1e-9)
            .unwrap()
            .iter()
            .map(|x| (x.point.0 / x.point.1).re)
            .collect();
        r.sort_by(f64::total_cmp);
        for (got, want) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }
}
