//! Framed representations of the quivers `Q_n`, their relations, and
//! θ-semistability by two routes: the spectral criteria on the (P2) locus
//! and literal subspace enumeration over a prime field.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::matrix::Matrix;
use crate::scalar::{binomial, spow, Gf, Scalar, C64};
use crate::xn::{chart_matrices, check_p1, check_p2, check_p3_direct, XnADHM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FramedRep<S> {
    pub n: usize,
    pub v0: usize,
    pub v1: usize,
    pub w: usize,
    #[serde(rename = "A1")]
    pub a1: Matrix<S>,
    #[serde(rename = "A2")]
    pub a2: Matrix<S>,
    #[serde(rename = "C")]
    pub cs: Vec<Matrix<S>>,
    pub e: Matrix<S>,
    pub f: Vec<Matrix<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams {
    pub theta: (f64, f64),
    pub dims: (usize, usize),
}

impl StabilityParams {
    /// `θ_c = (2c, −2c+1)` with dimension vector `(c, c)`.
    pub fn for_c(c: usize) -> Self {
        StabilityParams {
            theta: (2.0 * c as f64, 1.0 - 2.0 * c as f64),
            dims: (c, c),
        }
    }

    /// Whether correctness claims cover these parameters; anything else is
    /// evaluated on a best-effort basis.
    pub fn is_covered(&self, w: usize) -> bool {
        let c = self.dims.0;
        w == 1 && *self == Self::for_c(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Semistable,
    NotSemistable,
    /// `f ≠ 0` with a singular pencil, where no criterion is available.
    Indeterminate,
}

impl<S: Scalar> FramedRep<S> {
    pub fn new(
        a1: Matrix<S>,
        a2: Matrix<S>,
        cs: Vec<Matrix<S>>,
        e: Matrix<S>,
        f: Vec<Matrix<S>>,
    ) -> Result<Self> {
        let (v1, v0) = a1.shape();
        let n = cs.len();
        let w = e.rows();
        let ok = n >= 1
            && a2.shape() == (v1, v0)
            && cs.iter().all(|c| c.shape() == (v0, v1))
            && e.cols() == v0
            && f.len() == n - 1
            && f.iter().all(|x| x.shape() == (v0, w));
        if !ok {
            return Err(AdhmError::ShapeMismatch(format!(
                "framed representation with n={n}, v=({v0},{v1}), w={w} has inconsistent blocks"
            )));
        }
        Ok(FramedRep {
            n,
            v0,
            v1,
            w,
            a1,
            a2,
            cs,
            e,
            f,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let r = FramedRep::new(
            self.a1.clone(),
            self.a2.clone(),
            self.cs.clone(),
            self.e.clone(),
            self.f.clone(),
        )?;
        if (r.n, r.v0, r.v1, r.w) != (self.n, self.v0, self.v1, self.w) {
            return Err(AdhmError::ShapeMismatch(
                "declared dimensions disagree with blocks".into(),
            ));
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        self.cs
            .iter()
            .chain(&self.f)
            .chain([&self.a1, &self.a2, &self.e])
            .map(Matrix::max_abs)
            .fold(1.0, f64::max)
    }

    pub fn framing_is_zero(&self) -> bool {
        self.f.iter().all(Matrix::is_zero)
    }

    pub fn map<T: Scalar>(&self, g: impl Fn(&S) -> T + Copy) -> FramedRep<T> {
        FramedRep {
            n: self.n,
            v0: self.v0,
            v1: self.v1,
            w: self.w,
            a1: self.a1.map(g),
            a2: self.a2.map(g),
            cs: self.cs.iter().map(|m| m.map(g)).collect(),
            e: self.e.map(g),
            f: self.f.iter().map(|m| m.map(g)).collect(),
        }
    }
}

/// `f = 0` embedding of X_n data.
pub fn embed_xn_as_rep<S: Scalar>(d: &XnADHM<S>) -> FramedRep<S> {
    FramedRep {
        n: d.n,
        v0: d.c,
        v1: d.c,
        w: 1,
        a1: d.a1.clone(),
        a2: d.a2.clone(),
        cs: d.cs.clone(),
        e: d.e.clone(),
        f: vec![Matrix::zeros(d.c, 1); d.n - 1],
    }
}

pub fn project_rep<S: Scalar>(r: &FramedRep<S>) -> Result<XnADHM<S>> {
    if !r.framing_is_zero() {
        return Err(AdhmError::NonzeroFraming);
    }
    if r.v0 != r.v1 || r.w != 1 {
        return Err(AdhmError::ShapeMismatch(
            "projection needs v = (c, c) and w = 1".into(),
        ));
    }
    XnADHM::new(r.a1.clone(), r.a2.clone(), r.cs.clone(), r.e.clone())
}

/// Defects of the relations: `A₁C₁A₂ − A₂C₁A₁` for `n = 1`, otherwise
/// `A₁C_q − A₂C_{q+1}` and `C_qA₁ + f_qe − C_{q+1}A₂` for `q = 1..n−1`.
pub fn relation_defects<S: Scalar>(r: &FramedRep<S>) -> Vec<Matrix<S>> {
    if r.n == 1 {
        let c1 = &r.cs[0];
        return vec![&(&(&r.a1 * c1) * &r.a2) - &(&(&r.a2 * c1) * &r.a1)];
    }
    let mut out = Vec::new();
    for q in 0..r.n - 1 {
        out.push(&(&r.a1 * &r.cs[q]) - &(&r.a2 * &r.cs[q + 1]));
        out.push(&(&(&r.cs[q] * &r.a1) + &(&r.f[q] * &r.e)) - &(&r.cs[q + 1] * &r.a2));
    }
    out
}

/// Condition (Q1), relative to `scale^k` with `k` the relation degree.
pub fn check_relations<S: Scalar>(r: &FramedRep<S>, tol: f64) -> bool {
    let defects = relation_defects(r);
    if S::is_exact() {
        return defects.iter().all(Matrix::is_zero);
    }
    let k = if r.n == 1 { 3 } else { 2 };
    let worst = defects.iter().map(Matrix::max_abs).fold(0.0, f64::max);
    worst <= tol * r.scale().powi(k)
}

pub fn theta_slope(theta: (f64, f64), dims: (usize, usize)) -> f64 {
    theta.0 * dims.0 as f64 + theta.1 * dims.1 as f64
}

/// θ_c-semistability through the proved equivalences: with `f = 0` it is
/// (P1) ∧ (P2) ∧ (P3); with `f ≠ 0` a regular pencil rules it out, and a
/// singular one leaves it undecided.
pub fn check_semistable_spectral<S: Scalar>(r: &FramedRep<S>, tol: f64) -> Result<Verdict> {
    if r.v0 != r.v1 || r.w != 1 {
        return Err(AdhmError::ShapeMismatch(
            "spectral criterion needs v = (c, c), w = 1".into(),
        ));
    }
    if !check_relations(r, tol) {
        return Err(AdhmError::InvalidInput("relations (Q1) do not hold".into()));
    }
    let d = XnADHM {
        n: r.n,
        c: r.v0,
        a1: r.a1.clone(),
        a2: r.a2.clone(),
        cs: r.cs.clone(),
        e: r.e.clone(),
    };
    let p2 = check_p2(&d, tol);
    // numerically zero framing counts as zero on the float backend
    let zero_f = r.framing_is_zero()
        || (!S::is_exact() && r.f.iter().all(|f| f.is_negligible(tol, r.scale())));
    if !zero_f {
        return Ok(if p2 {
            Verdict::NotSemistable
        } else {
            Verdict::Indeterminate
        });
    }
    let ok = check_p1(&d, tol) && p2 && check_p3_direct(&d, tol)?;
    Ok(if ok {
        Verdict::Semistable
    } else {
        Verdict::NotSemistable
    })
}

/// `u_m = Σ_{q=1}^{n−1} C(n−2, q−1) c_m^{n−1−q} s_m^{q−1} f_q`, the vector
/// with `[B_m, E_m] = u_m e` whenever (Q1) holds.
pub fn u_m_residual<S: Scalar>(r: &FramedRep<S>, m: usize, tol: f64) -> Result<Matrix<S>> {
    if r.n < 2 {
        return Err(AdhmError::InvalidInput("u_m needs n ≥ 2".into()));
    }
    let d = XnADHM {
        n: r.n,
        c: r.v0,
        a1: r.a1.clone(),
        a2: r.a2.clone(),
        cs: r.cs.clone(),
        e: r.e.clone(),
    };
    let (_, a2m, _, _) = chart_matrices(&d, m)?;
    if !a2m.is_invertible(tol) {
        return Err(AdhmError::NotInChart(m));
    }
    let (cm, sm) = crate::xn::rotation_in::<S>(m as i64, r.v0)?;
    let n = r.n;
    let mut u = Matrix::zeros(r.v0, r.w);
    for q in 1..n {
        let w =
            S::from_i64(binomial(n - 2, q - 1) as i64) * spow(&cm, n - 1 - q) * spow(&sm, q - 1);
        u = &u + &r.f[q - 1].scale(&w);
    }
    Ok(u)
}

/// `[B_m, E_m] − u_m e`, which vanishes on representations satisfying (Q1).
pub fn bridge_defect<S: Scalar>(r: &FramedRep<S>, m: usize, tol: f64) -> Result<Matrix<S>> {
    let u = u_m_residual(r, m, tol)?;
    let d = XnADHM {
        n: r.n,
        c: r.v0,
        a1: r.a1.clone(),
        a2: r.a2.clone(),
        cs: r.cs.clone(),
        e: r.e.clone(),
    };
    let cd = crate::xn::zeta(&d, m, tol)?;
    Ok(&cd.b.commutator(&cd.e_m) - &(&u * &r.e))
}

/// An arrow of a doubled quiver, with the index of its opposite.
#[derive(Clone, Debug)]
pub struct DoubleArrow<S> {
    pub source: usize,
    pub target: usize,
    pub map: Matrix<S>,
    pub opposite: usize,
    /// True for arrows of the original quiver, false for the added ones.
    pub original: bool,
}

/// `μ_i = Σ_{a∈E} (X_aX_{a*} − X_{a*}X_a)` restricted to vertex `i`, plus
/// `X_{d*}X_d` for each framing pair `(d, d*)` at vertex `i`.
pub fn moment_map<S: Scalar>(
    dims: &[usize],
    arrows: &[DoubleArrow<S>],
    framings: &[(usize, Matrix<S>, Matrix<S>)],
) -> Vec<Matrix<S>> {
    let mut mu: Vec<Matrix<S>> = dims.iter().map(|&v| Matrix::zeros(v, v)).collect();
    for a in arrows.iter().filter(|a| a.original) {
        let star = &arrows[a.opposite];
        // X_a X_{a*} lives at the target of a, X_{a*} X_a at its source
        mu[a.target] = &mu[a.target] + &(&a.map * &star.map);
        mu[a.source] = &mu[a.source] - &(&star.map * &a.map);
    }
    for (vertex, d, d_star) in framings {
        mu[*vertex] = &mu[*vertex] + &(d_star * d);
    }
    mu
}

/// Per-vertex moment residual of the framed double of the affine `A₁`
/// quiver under `a ↔ A₂`, `a* ↔ C₂`, `b ↔ C₁`, `b* ↔ A₁`, `d₀ ↔ e`,
/// `d₀* ↔ f₁` (the vertex-1 framing vanishes for `w = (1, 0)`).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentResidual<S> {
    pub vertex0: Matrix<S>,
    pub vertex1: Matrix<S>,
}

pub fn moment_residual_n2<S: Scalar>(r: &FramedRep<S>) -> Result<MomentResidual<S>> {
    if r.n != 2 {
        return Err(AdhmError::ShapeMismatch(
            "the moment identification needs n = 2".into(),
        ));
    }
    let arrows = vec![
        DoubleArrow {
            source: 0,
            target: 1,
            map: r.a2.clone(),
            opposite: 1,
            original: true,
        },
        DoubleArrow {
            source: 1,
            target: 0,
            map: r.cs[1].clone(),
            opposite: 0,
            original: false,
        },
        DoubleArrow {
            source: 1,
            target: 0,
            map: r.cs[0].clone(),
            opposite: 3,
            original: true,
        },
        DoubleArrow {
            source: 0,
            target: 1,
            map: r.a1.clone(),
            opposite: 2,
            original: false,
        },
    ];
    let framings = vec![(0, r.e.clone(), r.f[0].clone())];
    let mut mu = moment_map(&[r.v0, r.v1], &arrows, &framings);
    let vertex1 = mu.pop().expect("two vertices");
    let vertex0 = mu.pop().expect("two vertices");
    Ok(MomentResidual { vertex0, vertex1 })
}

/// All subspaces of `F_p^v` of every dimension, each as a `v × k` basis.
pub fn subspaces<const P: u64>(v: usize) -> Vec<Matrix<Gf<P>>> {
    let mut out = Vec::new();
    for k in 0..=v {
        subspaces_of_dim::<P>(v, k, &mut out);
    }
    out
}

// Enumerates reduced echelon k × v matrices: pivot sets, then every filling
// of the free entries to the right of each pivot.
fn subspaces_of_dim<const P: u64>(v: usize, k: usize, out: &mut Vec<Matrix<Gf<P>>>) {
    for pivots in combinations(v, k) {
        let mut free = Vec::new();
        for (row, &p) in pivots.iter().enumerate() {
            for col in p + 1..v {
                if !pivots.contains(&col) {
                    free.push((row, col));
                }
            }
        }
        let total = (P as usize).pow(free.len() as u32);
        for code in 0..total {
            let mut rows = Matrix::<Gf<P>>::zeros(k, v);
            for (row, &p) in pivots.iter().enumerate() {
                rows[(row, p)] = Gf::new(1);
            }
            let mut x = code;
            for &(row, col) in &free {
                rows[(row, col)] = Gf::new((x % P as usize) as i64);
                x /= P as usize;
            }
            out.push(rows.transpose());
        }
    }
}

fn combinations(v: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > v {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 0..v {
        for rest in combinations(v - first - 1, k - 1) {
            let mut c = vec![first];
            c.extend(rest.into_iter().map(|x| x + first + 1));
            out.push(c);
        }
    }
    out
}

/// Number of subspaces of `F_p^v`, the sum of Gaussian binomials.
pub fn subspace_count(p: u64, v: usize) -> u128 {
    (0..=v)
        .map(|k| {
            let (mut num, mut den) = (1u128, 1u128);
            for i in 0..k {
                num *= (p as u128).pow((v - i) as u32) - 1;
                den *= (p as u128).pow((i + 1) as u32) - 1;
            }
            num / den
        })
        .sum()
}

pub const DEFAULT_BUDGET: u128 = 5_000_000;

/// The condition violated by a sub-representation found by enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violated {
    KernelCondition,
    ImageCondition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceOutcome {
    pub semistable: bool,
    pub pairs_checked: u128,
    /// Dimensions of the first violating sub-representation found.
    pub violation: Option<((usize, usize), Violated)>,
}

fn contains<const P: u64>(span: &Matrix<Gf<P>>, vectors: &Matrix<Gf<P>>) -> bool {
    if vectors.cols() == 0 {
        return true;
    }
    let k = span.rank(0.0);
    Matrix::hstack(&[span, vectors]).rank(0.0) == k
}

/// θ-semistability straight from the definition, by enumerating every pair
/// `(S₀, S₁)` of subspaces closed under all arrows.
pub fn brute_force_semistable<const P: u64>(
    r: &FramedRep<Gf<P>>,
    params: StabilityParams,
    budget: u128,
) -> Result<BruteForceOutcome> {
    r.validate()?;
    let needed = subspace_count(P, r.v0) * subspace_count(P, r.v1);
    if needed > budget {
        return Err(AdhmError::TooLarge { needed, budget });
    }
    let subs0 = subspaces::<P>(r.v0);
    let subs1 = subspaces::<P>(r.v1);
    let images_f: Vec<&Matrix<Gf<P>>> = r.f.iter().collect();
    let total = params.theta;
    let whole = theta_slope(total, (r.v0, r.v1));
    let violations: Vec<((usize, usize), Violated)> = subs0
        .par_iter()
        .filter_map(|s0| {
            let k0 = s0.cols();
            let in_ker_e = (&r.e * s0).is_zero();
            let has_images = r.n == 1 || images_f.iter().all(|f| contains(s0, f));
            let image = Matrix::hstack(&[&(&r.a1 * s0), &(&r.a2 * s0)]);
            for s1 in &subs1 {
                if !contains(s1, &image) {
                    continue;
                }
                if !r.cs.iter().all(|c| contains(s0, &(c * s1))) {
                    continue;
                }
                let slope = theta_slope(total, (k0, s1.cols()));
                if in_ker_e && slope > 0.0 {
                    return Some(((k0, s1.cols()), Violated::KernelCondition));
                }
                if has_images && slope > whole {
                    return Some(((k0, s1.cols()), Violated::ImageCondition));
                }
            }
            None
        })
        .collect();
    Ok(BruteForceOutcome {
        semistable: violations.is_empty(),
        pairs_checked: needed,
        violation: violations.into_iter().next(),
    })
}

/// Reduces an integer-entry rational representation modulo `P`; `None` if
/// some entry has a denominator divisible by `P`.
pub fn reduce_mod_p<const P: u64>(r: &FramedRep<crate::Rational>) -> Option<FramedRep<Gf<P>>> {
    let reduce = |m: &Matrix<crate::Rational>| -> Option<Matrix<Gf<P>>> {
        let mut out = Matrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let x = &m[(i, j)];
                let num = Gf::<P>::new(i64::try_from(x.numer() % P as i64).ok()?);
                let den = Gf::<P>::new(i64::try_from(x.denom() % P as i64).ok()?).inverse()?;
                out[(i, j)] = num * den;
            }
        }
        Some(out)
    };
    Some(FramedRep {
        n: r.n,
        v0: r.v0,
        v1: r.v1,
        w: r.w,
        a1: reduce(&r.a1)?,
        a2: reduce(&r.a2)?,
        cs: r.cs.iter().map(reduce).collect::<Option<_>>()?,
        e: reduce(&r.e)?,
        f: r.f.iter().map(reduce).collect::<Option<_>>()?,
    })
}

/// Convenience for complex reps built from chart data.
pub fn to_complex_rep<S: Scalar>(r: &FramedRep<S>) -> Result<FramedRep<C64>> {
    Ok(FramedRep {
        n: r.n,
        v0: r.v0,
        v1: r.v1,
        w: r.w,
        a1: r.a1.to_complex()?,
        a2: r.a2.to_complex()?,
        cs: r.cs.iter().map(Matrix::to_complex).collect::<Result<_>>()?,
        e: r.e.to_complex()?,
        f: r.f.iter().map(Matrix::to_complex).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::scalar::DEFAULT_TOL;

    type Q = BigRational;
    type F5 = Gf<5>;

    fn one<S: Scalar>(x: i64) -> Matrix<S> {
        Matrix::from_int_rows(&[&[x]])
    }

    #[test]
    fn relations_examples() {
        let z = FramedRep::<Q>::new(
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 2),
            vec![Matrix::zeros(2, 2); 3],
            Matrix::zeros(1, 2),
            vec![Matrix::zeros(2, 1); 2],
        )
        .unwrap();
        assert!(check_relations(&z, 0.0));
        let r = FramedRep::<Q>::new(one(0), one(0), vec![one(0), one(0)], one(1), vec![one(1)])
            .unwrap();
        assert!(!check_relations(&r, 0.0));
    }

    #[test]
    fn theta_examples() {
        let t = StabilityParams::for_c(3).theta;
        assert_eq!(theta_slope(t, (0, 0)), 0.0);
        for k in 1..=3 {
            assert_eq!(theta_slope(t, (k, k)), k as f64);
        }
        assert_eq!(theta_slope(t, (0, 1)), -5.0);
    }

    #[test]
    fn n2_framing_is_f1_in_every_chart() {
        let r = FramedRep::<C64>::new(one(2), one(1), vec![one(0), one(0)], one(1), vec![one(3)])
            .unwrap();
        for m in 0..=1 {
            match u_m_residual(&r, m, DEFAULT_TOL) {
                Ok(u) => assert_eq!(u, r.f[0]),
                Err(e) => assert_eq!(e, AdhmError::NotInChart(m)),
            }
        }
        let zero = FramedRep::<C64>::new(one(2), one(1), vec![one(0); 3], one(1), vec![one(0); 2])
            .unwrap();
        assert!(u_m_residual(&zero, 0, DEFAULT_TOL).unwrap().is_zero());
    }

    #[test]
    fn subspace_enumeration_counts() {
        assert_eq!(subspaces::<5>(1).len(), 2);
        assert_eq!(subspaces::<5>(2).len(), 8);
        assert_eq!(subspaces::<3>(3).len() as u128, subspace_count(3, 3));
        assert_eq!(subspace_count(5, 3), 64);
        for s in subspaces::<5>(3) {
            assert_eq!(s.rank(0.0), s.cols());
        }
    }

    #[test]
    fn brute_force_scalar_cases() {
        let params = StabilityParams::for_c(1);
        // A₁ = 1, A₂ = 0, C = 0, e = 1: the only closed pairs are 0,
        // (0, F), (F, F); none violates either condition
        let r = FramedRep::<F5>::new(one(1), one(0), vec![one(0)], one(1), vec![]).unwrap();
        assert!(
            brute_force_semistable(&r, params, DEFAULT_BUDGET)
                .unwrap()
                .semistable
        );
        // the zero representation admits (F, 0), violating the image condition
        let z = FramedRep::<F5>::new(one(0), one(0), vec![one(0)], one(1), vec![]).unwrap();
        let out = brute_force_semistable(&z, params, DEFAULT_BUDGET).unwrap();
        assert!(!out.semistable);
        assert_eq!(out.violation, Some(((1, 0), Violated::ImageCondition)));
        let tight = brute_force_semistable(&z, params, 3);
        assert!(matches!(
            tight,
            Err(AdhmError::TooLarge {
                needed: 4,
                budget: 3
            })
        ));
    }

    #[test]
    fn spectral_verdicts() {
        let r = FramedRep::<Q>::new(one(1), one(0), vec![one(0)], one(1), vec![]).unwrap();
        assert_eq!(
            check_semistable_spectral(&r, 0.0).unwrap(),
            Verdict::Semistable
        );
        let r0 = FramedRep::<Q>::new(one(1), one(0), vec![one(0)], one(0), vec![]).unwrap();
        assert_eq!(
            check_semistable_spectral(&r0, 0.0).unwrap(),
            Verdict::NotSemistable
        );
        // n = 2, f₁ ≠ 0 with e = 0 keeps (Q1) and a regular pencil
        let rf =
            FramedRep::<Q>::new(one(1), one(0), vec![one(0); 2], one(0), vec![one(1)]).unwrap();
        assert_eq!(
            check_semistable_spectral(&rf, 0.0).unwrap(),
            Verdict::NotSemistable
        );
        let rs =
            FramedRep::<Q>::new(one(0), one(0), vec![one(0); 2], one(0), vec![one(1)]).unwrap();
        assert_eq!(
            check_semistable_spectral(&rs, 0.0).unwrap(),
            Verdict::Indeterminate
        );
    }

    #[test]
    fn moment_residual_matches_defects_on_scalars() {
        let r = FramedRep::<Q>::new(one(2), one(3), vec![one(5), one(7)], one(11), vec![one(13)])
            .unwrap();
        let mu = moment_residual_n2(&r).unwrap();
        let defects = relation_defects(&r);
        assert_eq!(mu.vertex1, -&defects[0]);
        assert_eq!(mu.vertex0, defects[1]);
    }

    #[test]
    fn embed_project_roundtrip() {
        let d = XnADHM::<Q>::new(one(1), one(2), vec![one(3), one(4)], one(1)).unwrap();
        let r = embed_xn_as_rep(&d);
        assert_eq!(project_rep(&r).unwrap(), d);
        let mut r2 = r.clone();
        r2.f[0] = one(1);
        assert_eq!(project_rep(&r2), Err(AdhmError::NonzeroFraming));
    }

    #[test]
    fn reduction_mod_p() {
        let half = Q::new(1.into(), 2.into());
        let r = FramedRep::<Q>::new(
            Matrix::from_fn(1, 1, |_, _| half.clone()),
            one(0),
            vec![one(-1)],
            one(6),
            vec![],
        )
        .unwrap();
        let g = reduce_mod_p::<5>(&r).unwrap();
        assert_eq!(g.a1[(0, 0)], Gf::new(3));
        assert_eq!(g.cs[0][(0, 0)], Gf::new(4));
        assert_eq!(g.e[(0, 0)], Gf::new(1));
        assert!(reduce_mod_p::<2>(&r).is_none());
    }

    #[test]
    fn bridge_identity_in_every_chart() {
        use crate::random::{random_framed_rep, sample_rng};
        for i in 0..40u64 {
            let (n, c) = (2 + (i % 4) as usize, 2 + (i % 3) as usize);
            let r = random_framed_rep(n, c, (i as usize) % (c + 1), &mut sample_rng(11, i));
            for m in 0..=c {
                if let Ok(d) = bridge_defect(&r, m, DEFAULT_TOL) {
                    assert!(d.max_abs() <= 1e-9 * r.scale().powi(3), "n={n} c={c} m={m}");
                }
            }
        }
    }

    #[test]
    fn swapped_weights_break_the_bridge_for_n3() {
        use crate::random::{random_framed_rep, sample_rng};
        let r = random_framed_rep(3, 2, 1, &mut sample_rng(5, 0));
        let d = XnADHM {
            n: 3,
            c: 2,
            a1: r.a1.clone(),
            a2: r.a2.clone(),
            cs: r.cs.clone(),
            e: r.e.clone(),
        };
        let cd = crate::xn::zeta(&d, 1, DEFAULT_TOL).unwrap();
        let (cm, sm) = crate::xn::rotation_in::<C64>(1, 2).unwrap();
        // weights s^{n−1−q} c^{q−1} instead of c^{n−1−q} s^{q−1}
        let u = &r.f[0].scale(&sm) + &r.f[1].scale(&cm);
        let defect = &cd.b.commutator(&cd.e_m) - &(&u * &r.e);
        assert!(defect.max_abs() > 1e-6);
    }

    #[test]
    fn nonzero_framing_on_regular_pencil_is_rejected() {
        use crate::random::{random_framed_rep, sample_rng};
        for i in 0..20u64 {
            let r = random_framed_rep(
                2 + (i % 3) as usize,
                2 + (i % 2) as usize,
                0,
                &mut sample_rng(3, i),
            );
            assert_eq!(
                check_semistable_spectral(&r, DEFAULT_TOL).unwrap(),
                Verdict::NotSemistable
            );
        }
    }
}
