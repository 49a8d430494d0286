//! ADHM data `(A₁, A₂; C₁, …, C_n; e)` for the Hilbert scheme of points of
//! X_n, its charts `ζ_m` onto co-stable plane data, and the gluing maps.

use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::linalg::{self, EIGEN_TOL};
use crate::matrix::Matrix;
use crate::pencil::analyze_pencil;
use crate::plane::{
    check_t1, check_t2, common_eigenvectors, from_plane_points, joint_spectrum, sort_points,
    PlaneADHM,
};
use crate::poly::{pencil_det_poly, projective_roots};
use crate::scalar::{binomial, rotation, spow, Backend, Scalar, C64};

/// Relative tolerance for the scalar constraint `λ₁ⁿμ₁ + λ₂ⁿμ₂ = 0`.
pub const CONSTRAINT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct XnADHM<S> {
    pub n: usize,
    pub c: usize,
    #[serde(rename = "A1")]
    pub a1: Matrix<S>,
    #[serde(rename = "A2")]
    pub a2: Matrix<S>,
    #[serde(rename = "C")]
    pub cs: Vec<Matrix<S>>,
    pub e: Matrix<S>,
}

/// The image `(B_m, E_m, e; A_{2m})` of the chart map `ζ_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ChartData<S> {
    pub m: usize,
    #[serde(rename = "B")]
    pub b: Matrix<S>,
    #[serde(rename = "E")]
    pub e_m: Matrix<S>,
    pub e: Matrix<S>,
    #[serde(rename = "A2m")]
    pub a2m: Matrix<S>,
}

/// `σ^h_m`: row `p` holds the coefficients of
/// `(s_m μ₁ + c_m μ₂)^p (c_m μ₁ − s_m μ₂)^(h−p)` on `μ₂^q μ₁^(h−q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaMatrix<S> {
    pub h: usize,
    pub m: i64,
    pub entries: Matrix<S>,
}

impl<S: Scalar> XnADHM<S> {
    pub fn new(a1: Matrix<S>, a2: Matrix<S>, cs: Vec<Matrix<S>>, e: Matrix<S>) -> Result<Self> {
        let c = a1.rows();
        let n = cs.len();
        if n == 0 || c == 0 {
            return Err(AdhmError::InvalidInput("need n ≥ 1 and c ≥ 1".into()));
        }
        let square = |m: &Matrix<S>| m.shape() == (c, c);
        if !square(&a1) || !square(&a2) || !cs.iter().all(square) || e.shape() != (1, c) {
            return Err(AdhmError::ShapeMismatch(format!(
                "X_n data with c={c} needs c×c blocks and a 1×c framing"
            )));
        }
        Ok(XnADHM {
            n,
            c,
            a1,
            a2,
            cs,
            e,
        })
    }

    pub fn zeros(n: usize, c: usize) -> Self {
        XnADHM {
            n,
            c,
            a1: Matrix::zeros(c, c),
            a2: Matrix::zeros(c, c),
            cs: vec![Matrix::zeros(c, c); n],
            e: Matrix::zeros(1, c),
        }
    }

    pub fn scale(&self) -> f64 {
        self.cs
            .iter()
            .chain([&self.a1, &self.a2, &self.e])
            .map(Matrix::max_abs)
            .fold(1.0, f64::max)
    }

    pub fn to_complex(&self) -> Result<XnADHM<C64>> {
        Ok(XnADHM {
            n: self.n,
            c: self.c,
            a1: self.a1.to_complex()?,
            a2: self.a2.to_complex()?,
            cs: self
                .cs
                .iter()
                .map(Matrix::to_complex)
                .collect::<Result<_>>()?,
            e: self.e.to_complex()?,
        })
    }

    /// Validates that the tuple is shape-consistent (after deserializing).
    pub fn validate(&self) -> Result<()> {
        let d = XnADHM::new(
            self.a1.clone(),
            self.a2.clone(),
            self.cs.clone(),
            self.e.clone(),
        )?;
        if d.n != self.n || d.c != self.c {
            return Err(AdhmError::ShapeMismatch(
                "declared n or c disagrees with blocks".into(),
            ));
        }
        Ok(())
    }
}

impl<S: Scalar> ChartData<S> {
    pub fn plane(&self) -> PlaneADHM<S> {
        PlaneADHM {
            c: self.b.rows(),
            b1: self.b.clone(),
            b2: self.e_m.clone(),
            e: self.e.clone(),
        }
    }

    pub fn scale(&self) -> f64 {
        [&self.b, &self.e_m, &self.e, &self.a2m]
            .iter()
            .map(|m| m.max_abs())
            .fold(1.0, f64::max)
    }
}

fn check_chart(c: usize, m: usize) -> Result<()> {
    if m > c {
        return Err(AdhmError::IndexOutOfRange {
            index: m as i64,
            max: c,
        });
    }
    Ok(())
}

/// `(c_k, s_k) = (cos(πk/(c+1)), sin(πk/(c+1)))` in `S`; exact backends
/// only reach quarter turns.
pub fn rotation_in<S: Scalar>(k: i64, c: usize) -> Result<(S, S)> {
    rotation::<S>(k, c).ok_or(AdhmError::UnsupportedBackend(S::backend()))
}

/// Chart constants `(c_m, s_m)` for `0 ≤ m ≤ c`.
pub fn chart_constants(c: usize, m: usize) -> Result<(f64, f64)> {
    check_chart(c, m)?;
    let (cm, sm) = rotation_in::<C64>(m as i64, c)?;
    Ok((cm.re, sm.re))
}

pub fn sigma<S: Scalar>(h: usize, m: i64, c: usize) -> Result<SigmaMatrix<S>> {
    let (cm, sm) = rotation_in::<S>(m, c)?;
    // coefficient lists over μ₂^q μ₁^(deg−q)
    let up = [sm.clone(), cm.clone()];
    let down = [cm, -sm];
    let times = |poly: &[S], lin: &[S; 2]| {
        let mut out = vec![S::zero(); poly.len() + 1];
        for (q, a) in poly.iter().enumerate() {
            out[q] = out[q].clone() + a.clone() * lin[0].clone();
            out[q + 1] = out[q + 1].clone() + a.clone() * lin[1].clone();
        }
        out
    };
    let mut entries = Matrix::zeros(h + 1, h + 1);
    for p in 0..=h {
        let mut poly = vec![S::one()];
        for _ in 0..p {
            poly = times(&poly, &up);
        }
        for _ in p..h {
            poly = times(&poly, &down);
        }
        for (q, a) in poly.into_iter().enumerate() {
            entries[(p, q)] = a;
        }
    }
    Ok(SigmaMatrix { h, m, entries })
}

/// `(A_{1m}, A_{2m}, E_m, D_m)`.
pub type ChartMatrices<S> = (Matrix<S>, Matrix<S>, Matrix<S>, Matrix<S>);

/// Sorted chart coordinates of the points, one entry per chart containing them.
pub type ChartPoints = Vec<(usize, Vec<(C64, C64)>)>;

/// `(A_{1m}, A_{2m}, E_m, D_m)` for chart `m`.
pub fn chart_matrices<S: Scalar>(d: &XnADHM<S>, m: usize) -> Result<ChartMatrices<S>> {
    check_chart(d.c, m)?;
    let (cm, sm) = rotation_in::<S>(m as i64, d.c)?;
    let a1m = &d.a1.scale(&cm) - &d.a2.scale(&sm);
    let a2m = &d.a1.scale(&sm) + &d.a2.scale(&cm);
    let n = d.n;
    let mut dm = Matrix::zeros(d.c, d.c);
    for q in 1..=n {
        let w = S::from_i64(binomial(n - 1, q - 1) as i64) * spow(&cm, n - q) * spow(&sm, q - 1);
        dm = &dm + &d.cs[q - 1].scale(&w);
    }
    let em = &dm * &a2m;
    Ok((a1m, a2m, em, dm))
}

/// Defects of (P1): the single cubic relation for `n = 1`, otherwise
/// `A₁C_q − A₂C_{q+1}` and `C_qA₁ − C_{q+1}A₂` for `q = 1..n−1`.
pub fn p1_defects<S: Scalar>(d: &XnADHM<S>) -> Vec<Matrix<S>> {
    if d.n == 1 {
        let c1 = &d.cs[0];
        return vec![&(&(&d.a1 * c1) * &d.a2) - &(&(&d.a2 * c1) * &d.a1)];
    }
    let mut out = Vec::new();
    for q in 0..d.n - 1 {
        out.push(&(&d.a1 * &d.cs[q]) - &(&d.a2 * &d.cs[q + 1]));
        out.push(&(&d.cs[q] * &d.a1) - &(&d.cs[q + 1] * &d.a2));
    }
    out
}

/// Largest (P1) defect relative to `scale^k`, `k` the degree of the relation.
pub fn p1_residual<S: Scalar>(d: &XnADHM<S>) -> f64 {
    let k = if d.n == 1 { 3 } else { 2 };
    let worst = p1_defects(d)
        .iter()
        .map(Matrix::max_abs)
        .fold(0.0, f64::max);
    worst / d.scale().powi(k)
}

pub fn check_p1<S: Scalar>(d: &XnADHM<S>, tol: f64) -> bool {
    if S::is_exact() {
        p1_defects(d).iter().all(Matrix::is_zero)
    } else {
        p1_residual(d) <= tol
    }
}

pub fn check_p2<S: Scalar>(d: &XnADHM<S>, tol: f64) -> bool {
    analyze_pencil(&d.a1, &d.a2, tol).regular
}

/// Direct search for a vector violating (P3). For each root `[λ₁:λ₂]` of
/// `det(λ₂A₁ + λ₁A₂)` and each pair of eigenvalues `(ν, κ)` of
/// `M₁ = C₁A₂`, `M₂ = C_nA₁`, intersects `ker(M₁ − ν) ∩ ker(M₂ − κ)` with
/// `ker(λ₂A₁ + λ₁A₂) ∩ ker e`; a nonzero intersection with
/// `μ₁ = −ν`, `μ₂ = (−1)ⁿκ` and `λ₁ⁿμ₁ + λ₂ⁿμ₂ = 0` is a violation.
pub fn check_p3_direct<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Result<bool> {
    if let Backend::Prime(_) = S::backend() {
        return Err(AdhmError::UnsupportedBackend(S::backend()));
    }
    if !check_p2(d, tol) {
        return Err(AdhmError::InvalidInput(
            "(P3) needs a regular pencil".into(),
        ));
    }
    let d = d.to_complex()?;
    let tol = tol.max(EIGEN_TOL);
    let m1 = &d.cs[0] * &d.a2;
    let m2 = &d.cs[d.n - 1] * &d.a1;
    let ev1 = linalg::distinct_eigenvalues(&m1);
    let ev2 = linalg::distinct_eigenvalues(&m2);
    let sign = if d.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let roots = projective_roots(&pencil_det_poly(&d.a1, &d.a2), tol)?;
    for root in roots {
        // det(ν₁A₁ + ν₂A₂) vanishes at [ν₁:ν₂] = [λ₂:λ₁]
        let (l2, l1) = root.point;
        let pencil = &d.a1.scale(&l2) + &d.a2.scale(&l1);
        let stacked = Matrix::vstack(&[&pencil, &d.e]);
        let k = linalg::svd_nullspace(&stacked, tol);
        if k.cols() == 0 {
            continue;
        }
        for &(nu, _) in &ev1 {
            let v1 = linalg::kernel_within(&(&m1 - &Matrix::scalar(d.c, nu)), &k, tol);
            if v1.cols() == 0 {
                continue;
            }
            for &(kappa, _) in &ev2 {
                let v = linalg::kernel_within(&(&m2 - &Matrix::scalar(d.c, kappa)), &v1, tol);
                if v.cols() == 0 {
                    continue;
                }
                let (mu1, mu2) = (-nu, kappa * sign);
                let value = l1.powu(d.n as u32) * mu1 + l2.powu(d.n as u32) * mu2;
                if value.norm() <= CONSTRAINT_TOL * mu1.norm().max(mu2.norm()).max(1.0) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The chart with the largest `|det A_{2m}|` (smallest index on ties),
/// among the charts representable in `S`.
pub fn cover_chart<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Result<usize> {
    if !check_p2(d, tol) {
        return Err(AdhmError::InvalidInput(
            "no chart covers a singular pencil".into(),
        ));
    }
    best_chart(d, tol).ok_or(AdhmError::NoChart)
}

fn best_chart<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for m in 0..=d.c {
        let Ok((_, a2m, _, _)) = chart_matrices(d, m) else {
            continue;
        };
        if !a2m.is_invertible(tol) {
            continue;
        }
        let det = a2m.det().modulus();
        if best.is_none_or(|(_, b)| det > b * (1.0 + 1e-12)) {
            best = Some((m, det));
        }
    }
    best.map(|(m, _)| m)
}

/// (P3) read through a covering chart: (T2) of the chart triple there.
pub fn check_p3_via_chart<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Result<bool> {
    if let Backend::Prime(_) = S::backend() {
        return Err(AdhmError::UnsupportedBackend(S::backend()));
    }
    let d = d.to_complex()?;
    let m = best_chart(&d, tol).ok_or(AdhmError::NoChart)?;
    check_t2(&zeta(&d, m, tol)?.plane(), tol)
}

/// `ζ_m`: `(B_m = A_{2m}⁻¹A_{1m}, E_m, e; A_{2m})`.
pub fn zeta<S: Scalar>(d: &XnADHM<S>, m: usize, tol: f64) -> Result<ChartData<S>> {
    let (a1m, a2m, em, _) = chart_matrices(d, m)?;
    let inv = a2m.inverse(tol).ok_or(AdhmError::NotInChart(m))?;
    Ok(ChartData {
        m,
        b: &inv * &a1m,
        e_m: em,
        e: d.e.clone(),
        a2m,
    })
}

/// `ζ_m⁻¹` for co-stable commuting chart triples.
pub fn zeta_inverse<S: Scalar>(cd: &ChartData<S>, n: usize, tol: f64) -> Result<XnADHM<S>> {
    let plane = cd.plane();
    if !check_t1(&plane, tol) {
        return Err(AdhmError::InvalidInput(
            "chart matrices do not commute".into(),
        ));
    }
    // prime fields have no spectral co-stability test
    if !matches!(S::backend(), Backend::Prime(_)) && !check_t2(&plane, tol)? {
        return Err(AdhmError::NotCostable);
    }
    zeta_inverse_unchecked(cd, n, tol)
}

/// The formulas of `ζ_m⁻¹` without the (T1)/(T2) checks, so that violators
/// can be produced on purpose.
pub fn zeta_inverse_unchecked<S: Scalar>(
    cd: &ChartData<S>,
    n: usize,
    tol: f64,
) -> Result<XnADHM<S>> {
    if n == 0 {
        return Err(AdhmError::InvalidInput("n must be at least 1".into()));
    }
    let c = cd.b.rows();
    check_chart(c, cd.m)?;
    let a = &cd.a2m;
    let ainv = a.inverse(tol).ok_or(AdhmError::SingularA2m)?;
    let (cm, sm) = rotation_in::<S>(cd.m as i64, c)?;
    let id = Matrix::identity(c);
    let a1 = a * &(&cd.b.scale(&cm) + &id.scale(&sm));
    let a2 = a * &(&id.scale(&cm) - &cd.b.scale(&sm));
    let sig = sigma::<S>(n - 1, cd.m as i64, c)?.entries;
    let tail = &cd.e_m * &ainv;
    let powers: Vec<Matrix<S>> = (0..n).map(|q| &cd.b.pow(q) * &tail).collect();
    let cs = (0..n)
        .map(|p| {
            (0..n).fold(Matrix::zeros(c, c), |acc, q| {
                &acc + &powers[q].scale(&sig[(p, q)])
            })
        })
        .collect();
    XnADHM::new(a1, a2, cs, cd.e.clone())
}

/// `c_{m−l}·1 − s_{m−l}·b₁`, the matrix whose invertibility cuts the overlap.
pub fn overlap_matrix<S: Scalar>(
    b1: &Matrix<S>,
    m: usize,
    l: usize,
    c: usize,
) -> Result<Matrix<S>> {
    let (ck, sk) = rotation_in::<S>(m as i64 - l as i64, c)?;
    Ok(&Matrix::scalar(b1.rows(), ck) - &b1.scale(&sk))
}

/// Transition `φ_{lm}` from chart `m` to chart `l` of plane data.
pub fn transition_phi<S: Scalar>(
    d: &PlaneADHM<S>,
    m: usize,
    l: usize,
    n: usize,
    tol: f64,
) -> Result<PlaneADHM<S>> {
    let c = d.c;
    check_chart(c, m)?;
    check_chart(c, l)?;
    let (ck, sk) = rotation_in::<S>(m as i64 - l as i64, c)?;
    let d1 = overlap_matrix(&d.b1, m, l, c)?;
    let inv = d1
        .inverse(tol)
        .ok_or(AdhmError::NotInOverlap { from: m, to: l })?;
    let d2 = &Matrix::scalar(c, sk) + &d.b1.scale(&ck);
    Ok(PlaneADHM {
        c,
        b1: &inv * &d2,
        b2: &d1.pow(n) * &d.b2,
        e: d.e.clone(),
    })
}

/// `ω_{lm}`: transition of full chart data, with `A_{2m} ↦ A_{2m}(c_{m−l} − s_{m−l}B)`.
pub fn transition_omega<S: Scalar>(
    cd: &ChartData<S>,
    l: usize,
    n: usize,
    tol: f64,
) -> Result<ChartData<S>> {
    let c = cd.b.rows();
    let p = transition_phi(&cd.plane(), cd.m, l, n, tol)?;
    let d1 = overlap_matrix(&cd.b, cd.m, l, c)?;
    Ok(ChartData {
        m: l,
        b: p.b1,
        e_m: p.b2,
        e: p.e,
        a2m: &cd.a2m * &d1,
    })
}

/// `(φ₂A_iφ₁⁻¹, φ₁C_jφ₂⁻¹, eφ₁⁻¹)`.
pub fn gl2_action<S: Scalar>(
    phi1: &Matrix<S>,
    phi2: &Matrix<S>,
    d: &XnADHM<S>,
    tol: f64,
) -> Result<XnADHM<S>> {
    let i1 = phi1.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    let i2 = phi2.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    Ok(XnADHM {
        n: d.n,
        c: d.c,
        a1: &(phi2 * &d.a1) * &i1,
        a2: &(phi2 * &d.a2) * &i1,
        cs: d.cs.iter().map(|cq| &(phi1 * cq) * &i2).collect(),
        e: &d.e * &i1,
    })
}

/// The induced action on chart data:
/// `(φ₁Bφ₁⁻¹, φ₁Eφ₁⁻¹, eφ₁⁻¹; φ₂A_{2m}φ₁⁻¹)`.
pub fn chart_gl2_action<S: Scalar>(
    phi1: &Matrix<S>,
    phi2: &Matrix<S>,
    cd: &ChartData<S>,
    tol: f64,
) -> Result<ChartData<S>> {
    let i1 = phi1.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    if !phi2.is_invertible(tol) {
        return Err(AdhmError::SingularGauge);
    }
    Ok(ChartData {
        m: cd.m,
        b: &(phi1 * &cd.b) * &i1,
        e_m: &(phi1 * &cd.e_m) * &i1,
        e: &cd.e * &i1,
        a2m: &(phi2 * &cd.a2m) * &i1,
    })
}

/// Distinct points of X_n, given by their chart-`m` coordinates, realized
/// through diagonal chart data with `A_{2m} = 1`.
pub fn from_xn_points<S: Scalar>(
    n: usize,
    m: usize,
    points: &[(S, S)],
    tol: f64,
) -> Result<XnADHM<S>> {
    let plane = from_plane_points(points)?;
    let cd = ChartData {
        m,
        a2m: Matrix::identity(plane.c),
        b: plane.b1,
        e_m: plane.b2,
        e: plane.e,
    };
    zeta_inverse_unchecked(&cd, n, tol)
}

/// Chart coordinates of the points in every chart containing them, as
/// sorted joint eigenvalues of `(B_m, E_m)`.
pub fn to_xn_points<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Result<ChartPoints> {
    let d = d.to_complex()?;
    if !check_p2(&d, tol) {
        return Err(AdhmError::NoChart);
    }
    let mut out = Vec::new();
    for m in 0..=d.c {
        let Ok(cd) = zeta(&d, m, tol) else { continue };
        let mut pts = joint_spectrum(&cd.plane(), tol)?;
        sort_points(&mut pts);
        out.push((m, pts));
    }
    Ok(out)
}

/// A vector and parameters satisfying the (P3) system together with
/// `λ₁ⁿμ₁ + λ₂ⁿμ₂ = 0`, built from a joint eigenvector of `(B_m, E_m)`.
#[derive(Clone, Debug)]
pub struct UsefulWitness {
    pub m: usize,
    pub v: Matrix<C64>,
    pub lambda: (C64, C64),
    pub mu: (C64, C64),
}

pub fn useful_witness<S: Scalar>(d: &XnADHM<S>, tol: f64) -> Result<UsefulWitness> {
    let d = d.to_complex()?;
    let m = best_chart(&d, tol).ok_or(AdhmError::NoChart)?;
    let cd = zeta(&d, m, tol)?;
    let joint = common_eigenvectors(&cd.b, &cd.e_m, tol)?;
    let first = joint.first().ok_or(AdhmError::NonSimpleSpectrum)?;
    let (z, w) = (first.z, first.w);
    let (cm, sm) = chart_constants(d.c, m)?;
    let n = d.n as u32;
    let l1 = z * cm + sm;
    let l2 = z * sm - cm;
    let sign = if d.n % 2 == 0 { 1.0 } else { -1.0 };
    let mu1 = -sign * l2.powu(n) * w;
    let mu2 = sign * l1.powu(n) * w;
    Ok(UsefulWitness {
        m,
        v: first.basis.column(0),
        lambda: (l1, l2),
        mu: (mu1, mu2),
    })
}

/// Residuals of the witness: the scalar constraint and the three vector
/// equations, each relative to the size of its terms.
pub fn useful_residuals(d: &XnADHM<C64>, w: &UsefulWitness) -> [f64; 4] {
    let (l1, l2) = w.lambda;
    let (mu1, mu2) = w.mu;
    let n = d.n as u32;
    let sign = if d.n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let constraint = (l1.powu(n) * mu1 + l2.powu(n) * mu2).norm()
        / (l1.powu(n) * mu1)
            .norm()
            .max((l2.powu(n) * mu2).norm())
            .max(1.0);
    let scale = d.scale();
    let pencil = &d.a1.scale(&l2) + &d.a2.scale(&l1);
    let r1 = (&pencil * &w.v).max_abs() / (scale * l1.norm().max(l2.norm()).max(1.0));
    let r2 = (&(&(&d.cs[0] * &d.a2) * &w.v) + &w.v.scale(&mu1)).max_abs()
        / (scale * scale).max(mu1.norm());
    let r3 = (&(&(&d.cs[d.n - 1] * &d.a1) * &w.v) - &w.v.scale(&(mu2 * sign))).max_abs()
        / (scale * scale).max(mu2.norm());
    [constraint, r1, r2, r3]
}
