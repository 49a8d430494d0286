//! Monad coefficients on Σ_n in the chart-`m` section basis.
//!
//! With `U = O(0,−1)^c`, `V = O(1,−1)^c ⊕ O^{c+1}`, `W = O(1,0)^c`:
//! `α₁ = Σ_q α₁q y₂^q y₁^{n−q} s_E + α₁,n+1 s_∞`, `α₂ = α₂₀y₁ + α₂₁y₂`,
//! `β₁ = β₁₀y₁ + β₁₁y₂`, `β₂ = Σ_q β₂q y₂^q y₁^{n−q} s_E + β₂,n+1 s_∞`,
//! all monomials in the chart coordinates `[y₁m, y₂m]`. On ℓ∞ the section
//! `s_∞` vanishes and `s_E` is read as 1, so the framing `ξ` is a
//! degree-(n−1) form with values in `C^c` (`xi_top`) together with a vector of
//! `C^{c+1}` (`xi_bottom`).

use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::matrix::Matrix;
use crate::plane::PlaneADHM;
use crate::scalar::Scalar;
use crate::xn::sigma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadBasis {
    pub n: usize,
    pub c: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct MonadCoeffs<S> {
    pub basis: MonadBasis,
    /// `α₁q` for `q = 0..n`, then `α₁,n+1`; each `c × c`.
    pub alpha1: Vec<Matrix<S>>,
    /// `(α₂₀, α₂₁)`, each `(c+1) × c`.
    pub alpha2: Vec<Matrix<S>>,
    /// `(β₁₀, β₁₁)`, each `c × c`.
    pub beta1: Vec<Matrix<S>>,
    /// `β₂q` for `q = 0..n`, then `β₂,n+1`; each `c × (c+1)`.
    pub beta2: Vec<Matrix<S>>,
    /// Coefficients of `y₂^q y₁^{n−1−q}`, each `c × 1`.
    pub xi_top: Vec<Matrix<S>>,
    /// `(c+1) × 1`, carrying the frame.
    pub xi_bottom: Matrix<S>,
}

/// `(φ, ψ, χ)` with `ψ = [[ψ₁₁, ψ₁₂], [0, ψ₂₂]]`; `ψ₁₂` is the form
/// `Σ_q ψ₁₂,q y₂^q y₁^{n−1−q} s_E`, read in the chart of the monad it acts on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GaugeElement<S> {
    pub phi: Matrix<S>,
    pub psi11: Matrix<S>,
    pub psi12: Vec<Matrix<S>>,
    pub psi22: Matrix<S>,
    pub chi: Matrix<S>,
}

impl<S: Scalar> MonadCoeffs<S> {
    pub fn zeros(n: usize, c: usize, m: usize) -> Self {
        MonadCoeffs {
            basis: MonadBasis { n, c, m },
            alpha1: vec![Matrix::zeros(c, c); n + 2],
            alpha2: vec![Matrix::zeros(c + 1, c); 2],
            beta1: vec![Matrix::zeros(c, c); 2],
            beta2: vec![Matrix::zeros(c, c + 1); n + 2],
            xi_top: vec![Matrix::zeros(c, 1); n],
            xi_bottom: Matrix::zeros(c + 1, 1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let MonadBasis { n, c, .. } = self.basis;
        let shapes = |ms: &[Matrix<S>], len: usize, shape: (usize, usize)| {
            ms.len() == len && ms.iter().all(|x| x.shape() == shape)
        };
        let ok = n >= 1
            && shapes(&self.alpha1, n + 2, (c, c))
            && shapes(&self.alpha2, 2, (c + 1, c))
            && shapes(&self.beta1, 2, (c, c))
            && shapes(&self.beta2, n + 2, (c, c + 1))
            && shapes(&self.xi_top, n, (c, 1))
            && self.xi_bottom.shape() == (c + 1, 1);
        if ok {
            Ok(())
        } else {
            Err(AdhmError::ShapeMismatch(format!(
                "monad coefficients do not fit n={n}, c={c}"
            )))
        }
    }

    pub fn scale(&self) -> f64 {
        self.alpha1
            .iter()
            .chain(&self.alpha2)
            .chain(&self.beta1)
            .chain(&self.beta2)
            .chain(&self.xi_top)
            .chain([&self.xi_bottom])
            .map(Matrix::max_abs)
            .fold(1.0, f64::max)
    }
}

impl<S: Scalar> GaugeElement<S> {
    pub fn identity(n: usize, c: usize) -> Self {
        GaugeElement {
            phi: Matrix::identity(c),
            psi11: Matrix::identity(c),
            psi12: vec![Matrix::zeros(c, c + 1); n],
            psi22: Matrix::identity(c + 1),
            chi: Matrix::identity(c),
        }
    }

    /// `self ∘ other`: acting by the result equals acting by `other`, then
    /// by `self`.
    pub fn compose(&self, other: &Self) -> Self {
        GaugeElement {
            phi: &self.phi * &other.phi,
            psi11: &self.psi11 * &other.psi11,
            psi12: self
                .psi12
                .iter()
                .zip(&other.psi12)
                .map(|(a, b)| &(&self.psi11 * b) + &(a * &other.psi22))
                .collect(),
            psi22: &self.psi22 * &other.psi22,
            chi: &self.chi * &other.chi,
        }
    }

    /// The image of `φ ∈ GL(c)` under `ι`: `(ᵗφ⁻¹, diag(ᵗφ⁻¹, ᵗφ⁻¹, 1), ᵗφ⁻¹)`.
    pub fn iota(phi: &Matrix<S>, n: usize, tol: f64) -> Result<Self> {
        let c = phi.rows();
        let t = phi
            .inverse(tol)
            .ok_or(AdhmError::SingularGauge)?
            .transpose();
        let mut psi22 = Matrix::identity(c + 1);
        psi22.set_block(0, 0, &t);
        Ok(GaugeElement {
            phi: t.clone(),
            psi11: t.clone(),
            psi12: vec![Matrix::zeros(c, c + 1); n],
            psi22,
            chi: t,
        })
    }
}

fn at<S: Scalar>(v: &[Matrix<S>], q: isize, rows: usize, cols: usize) -> Matrix<S> {
    if q < 0 || q as usize >= v.len() {
        Matrix::zeros(rows, cols)
    } else {
        v[q as usize].clone()
    }
}

/// `β∘α` over the basis `{y₂^q y₁^{n+1−q} s_E}_{q=0..n+1} ∪ {y₁s_∞, y₂s_∞}`.
pub fn compose_residual<S: Scalar>(mc: &MonadCoeffs<S>) -> Vec<Matrix<S>> {
    let MonadBasis { n, c, .. } = mc.basis;
    let a1 = &mc.alpha1[..=n];
    let b2 = &mc.beta2[..=n];
    let (b10, b11) = (&mc.beta1[0], &mc.beta1[1]);
    let (a20, a21) = (&mc.alpha2[0], &mc.alpha2[1]);
    let mut out = Vec::with_capacity(n + 4);
    for q in 0..=(n as isize + 1) {
        let r = &(&(b10 * &at(a1, q, c, c)) + &(b11 * &at(a1, q - 1, c, c)))
            + &(&(&at(b2, q, c, c + 1) * a20) + &(&at(b2, q - 1, c, c + 1) * a21));
        out.push(r);
    }
    let (a1inf, b2inf) = (&mc.alpha1[n + 1], &mc.beta2[n + 1]);
    out.push(&(b10 * a1inf) + &(b2inf * a20));
    out.push(&(b11 * a1inf) + &(b2inf * a21));
    out
}

/// `H⁰(β|ℓ∞)∘ξ` over `{y₂^q y₁^{n−q}}_{q=0..n}`.
pub fn framing_residual<S: Scalar>(mc: &MonadCoeffs<S>) -> Vec<Matrix<S>> {
    let MonadBasis { n, c, .. } = mc.basis;
    let (b10, b11) = (&mc.beta1[0], &mc.beta1[1]);
    (0..=n as isize)
        .map(|q| {
            &(&(b10 * &at(&mc.xi_top, q, c, 1)) + &(b11 * &at(&mc.xi_top, q - 1, c, 1)))
                + &(&mc.beta2[q as usize] * &mc.xi_bottom)
        })
        .collect()
}

/// Largest entry of both residual families, relative to `scale²`.
pub fn monad_residual<S: Scalar>(mc: &MonadCoeffs<S>) -> f64 {
    let worst = compose_residual(mc)
        .iter()
        .chain(&framing_residual(mc))
        .map(Matrix::max_abs)
        .fold(0.0, f64::max);
    worst / mc.scale().powi(2)
}

/// `j_m(b₁, b₂, e)`.
pub fn build_jm<S: Scalar>(d: &PlaneADHM<S>, n: usize, m: usize) -> Result<MonadCoeffs<S>> {
    if n == 0 {
        return Err(AdhmError::InvalidInput("n must be at least 1".into()));
    }
    let c = d.c;
    if m > c {
        return Err(AdhmError::IndexOutOfRange {
            index: m as i64,
            max: c,
        });
    }
    let (tb1, tb2, te) = d.transpose_data();
    let id = Matrix::<S>::identity(c);
    let pad = |top: &Matrix<S>| {
        let mut x = Matrix::zeros(c + 1, c);
        x.set_block(0, 0, top);
        x
    };
    let mut mc = MonadCoeffs::zeros(n, c, m);
    mc.alpha1[n] = id.clone();
    mc.alpha1[n + 1] = tb2.clone();
    mc.alpha2 = vec![pad(&id), pad(&tb1)];
    mc.beta1 = vec![id.clone(), tb1];
    mc.beta2[n] = Matrix::hstack(&[&-&id, &Matrix::zeros(c, 1)]);
    mc.beta2[n + 1] = Matrix::hstack(&[&-&tb2, &te]);
    mc.xi_bottom[(c, 0)] = S::one();
    Ok(mc)
}

/// `α ↦ ψαφ⁻¹`, `β ↦ χβψ⁻¹`, `ξ ↦ ψ|ℓ∞ ξ`.
pub fn gauge_action<S: Scalar>(
    g: &GaugeElement<S>,
    mc: &MonadCoeffs<S>,
    tol: f64,
) -> Result<MonadCoeffs<S>> {
    let MonadBasis { n, c, .. } = mc.basis;
    if g.psi12.len() != n {
        return Err(AdhmError::ShapeMismatch("ψ₁₂ needs n coefficients".into()));
    }
    let phi_inv = g.phi.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    let p11_inv = g.psi11.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    let p22_inv = g.psi22.inverse(tol).ok_or(AdhmError::SingularGauge)?;
    if !g.chi.is_invertible(tol) {
        return Err(AdhmError::SingularGauge);
    }
    let p12 = |q: isize| at(&g.psi12, q, c, c + 1);
    let (a20, a21) = (&mc.alpha2[0], &mc.alpha2[1]);
    let mut out = mc.clone();
    for q in 0..=n {
        let qi = q as isize;
        let shifted = &(&p12(qi) * a20) + &(&p12(qi - 1) * a21);
        out.alpha1[q] = &(&(&g.psi11 * &mc.alpha1[q]) + &shifted) * &phi_inv;
    }
    out.alpha1[n + 1] = &(&g.psi11 * &mc.alpha1[n + 1]) * &phi_inv;
    out.alpha2 = mc
        .alpha2
        .iter()
        .map(|a| &(&g.psi22 * a) * &phi_inv)
        .collect();
    out.beta1 = mc.beta1.iter().map(|b| &(&g.chi * b) * &p11_inv).collect();
    let (b10, b11) = (&(&mc.beta1[0] * &p11_inv), &(&mc.beta1[1] * &p11_inv));
    for q in 0..=n {
        let qi = q as isize;
        let shifted = &(b10 * &p12(qi)) + &(b11 * &p12(qi - 1));
        out.beta2[q] = &(&g.chi * &(&mc.beta2[q] - &shifted)) * &p22_inv;
    }
    out.beta2[n + 1] = &(&g.chi * &mc.beta2[n + 1]) * &p22_inv;
    out.xi_top = (0..n)
        .map(|q| &(&g.psi11 * &mc.xi_top[q]) + &(&g.psi12[q] * &mc.xi_bottom))
        .collect();
    out.xi_bottom = &g.psi22 * &mc.xi_bottom;
    Ok(out)
}

fn reexpand<S: Scalar>(coeffs: &[Matrix<S>], sig: &Matrix<S>) -> Vec<Matrix<S>> {
    let h = coeffs.len();
    (0..h)
        .map(|q| {
            (0..h).fold(
                Matrix::zeros(coeffs[0].rows(), coeffs[0].cols()),
                |acc, p| &acc + &coeffs[p].scale(&sig[(p, q)]),
            )
        })
        .collect()
}

/// Rewrites every polynomial block in the chart-`l` monomial basis, using
/// `y₂m^p y₁m^{h−p} = Σ_q σ^h_{l−m;pq} y₂l^q y₁l^{h−q}`.
pub fn reexpand_chart<S: Scalar>(mc: &MonadCoeffs<S>, l: usize) -> Result<MonadCoeffs<S>> {
    let MonadBasis { n, c, m } = mc.basis;
    if l > c {
        return Err(AdhmError::IndexOutOfRange {
            index: l as i64,
            max: c,
        });
    }
    if l == m {
        return Ok(mc.clone());
    }
    let k = l as i64 - m as i64;
    let s_n = sigma::<S>(n, k, c)?.entries;
    let s_1 = sigma::<S>(1, k, c)?.entries;
    let s_top = sigma::<S>(n - 1, k, c)?.entries;
    let mut out = mc.clone();
    out.basis.m = l;
    let a1 = reexpand(&mc.alpha1[..=n], &s_n);
    out.alpha1[..=n].clone_from_slice(&a1);
    let b2 = reexpand(&mc.beta2[..=n], &s_n);
    out.beta2[..=n].clone_from_slice(&b2);
    out.alpha2 = reexpand(&mc.alpha2, &s_1);
    out.beta1 = reexpand(&mc.beta1, &s_1);
    out.xi_top = reexpand(&mc.xi_top, &s_top);
    Ok(out)
}

/// Whether the data satisfy the four normal-form conditions of `Im j_m`.
pub fn is_normalized<S: Scalar>(mc: &MonadCoeffs<S>, tol: f64) -> bool {
    let MonadBasis { n, c, .. } = mc.basis;
    let scale = mc.scale();
    let near = |a: &Matrix<S>, b: &Matrix<S>| (a - b).is_negligible(tol, scale);
    let id = Matrix::<S>::identity(c);
    let mut a20 = Matrix::zeros(c + 1, c);
    a20.set_block(0, 0, &id);
    let b2n = Matrix::hstack(&[&-&id, &Matrix::zeros(c, 1)]);
    let mut xi = Matrix::zeros(c + 1, 1);
    xi[(c, 0)] = S::one();
    near(&mc.beta1[0], &id)
        && mc.beta2[..n].iter().all(|b| b.is_negligible(tol, scale))
        && near(&mc.alpha1[n], &id)
        && near(&mc.alpha2[0], &a20)
        && near(&mc.beta2[n], &b2n)
        && mc.xi_top.iter().all(|x| x.is_negligible(tol, scale))
        && near(&mc.xi_bottom, &xi)
}

/// Brings `mc` (re-expanded in chart `l` first) to the normal form of
/// `Im j_l` with `χ = 1`, returning the plane data and the composite gauge.
pub fn gauge_normalize<S: Scalar>(
    mc: &MonadCoeffs<S>,
    l: usize,
    tol: f64,
) -> Result<(PlaneADHM<S>, GaugeElement<S>)> {
    mc.validate()?;
    let mc = reexpand_chart(mc, l)?;
    let MonadBasis { n, c, .. } = mc.basis;
    let not = |step: u8| AdhmError::NotNormalizable { step };

    // step 1: β₁₀ = 1 and β₂q = 0 for q < n, via ψ₁₁ and ψ₁₂
    let psi11 = mc.beta1[0].clone();
    if !psi11.is_invertible(tol) {
        return Err(not(1));
    }
    let b11 = &mc.beta1[1] * &psi11.inverse(tol).ok_or(not(1))?;
    let mut psi12: Vec<Matrix<S>> = Vec::with_capacity(n);
    for q in 0..n {
        let prev = if q == 0 {
            Matrix::zeros(c, c + 1)
        } else {
            &b11 * &psi12[q - 1]
        };
        psi12.push(&mc.beta2[q] - &prev);
    }
    let mut gauge = GaugeElement {
        psi11,
        psi12,
        ..GaugeElement::identity(n, c)
    };
    let mut cur = gauge_action(&gauge, &mc, tol).map_err(|_| not(1))?;

    // step 2: α₁n = 1 via φ
    if !cur.alpha1[n].is_invertible(tol) {
        return Err(not(2));
    }
    let g2 = GaugeElement {
        phi: cur.alpha1[n].clone(),
        ..GaugeElement::identity(n, c)
    };
    cur = gauge_action(&g2, &cur, tol).map_err(|_| not(2))?;
    gauge = g2.compose(&gauge);

    // step 3: α₂₀ = (1; 0), β₂n = (−1, 0) via ψ₂₂ with ψ₂₂⁻¹ = (α₂₀ | κ), κ ∈ ker β₂n
    let kernel = cur.beta2[n].nullspace(tol);
    if kernel.cols() != 1 {
        return Err(not(3));
    }
    let basis = Matrix::hstack(&[&cur.alpha2[0], &kernel]);
    let psi22 = basis.inverse(tol).ok_or(not(3))?;
    let g3 = GaugeElement {
        psi22,
        ..GaugeElement::identity(n, c)
    };
    cur = gauge_action(&g3, &cur, tol).map_err(|_| not(3))?;
    gauge = g3.compose(&gauge);

    // step 4: ξ = (0, …, 0, 1) via the last entry of ψ₂₂
    let omega = cur.xi_bottom[(c, 0)].clone();
    if omega.is_negligible(tol, cur.scale()) {
        return Err(not(4));
    }
    let mut psi22 = Matrix::identity(c + 1);
    psi22[(c, c)] = S::one() / omega;
    let g4 = GaugeElement {
        psi22,
        ..GaugeElement::identity(n, c)
    };
    cur = gauge_action(&g4, &cur, tol).map_err(|_| not(4))?;
    gauge = g4.compose(&gauge);

    let b1 = cur.beta1[1].transpose();
    let b2 = cur.alpha1[n + 1].transpose();
    let e = cur.beta2[n + 1].select_columns(&[c]).transpose();
    Ok((PlaneADHM { c, b1, b2, e }, gauge))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use num_rational::BigRational;

    use super::*;
    use crate::random::{random_commuting, random_matrix, sample_rng};
    use crate::scalar::{C64, DEFAULT_TOL};
    use crate::xn::transition_phi;

    type Q = BigRational;

    // A section as a map from (exponent of y₁, exponent of y₂, s_E, s_∞) to
    // its matrix coefficient.
    type Section<S> = BTreeMap<(usize, usize, u8, u8), Matrix<S>>;

    fn add<S: Scalar>(s: &mut Section<S>, key: (usize, usize, u8, u8), m: Matrix<S>) {
        let entry = s
            .entry(key)
            .or_insert_with(|| Matrix::zeros(m.rows(), m.cols()));
        *entry = &*entry + &m;
    }

    fn product<S: Scalar>(a: &Section<S>, b: &Section<S>) -> Section<S> {
        let mut out = Section::new();
        for (ka, ma) in a {
            for (kb, mb) in b {
                add(
                    &mut out,
                    (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2, ka.3 + kb.3),
                    ma * mb,
                );
            }
        }
        out
    }

    fn sum<S: Scalar>(a: Section<S>, b: Section<S>) -> Section<S> {
        let mut out = a;
        for (k, m) in b {
            add(&mut out, k, m);
        }
        out
    }

    fn oracle_residual<S: Scalar>(mc: &MonadCoeffs<S>) -> Vec<Matrix<S>> {
        let n = mc.basis.n;
        let c = mc.basis.c;
        let lin = |a: &[Matrix<S>]| -> Section<S> {
            [((1, 0, 0, 0), a[0].clone()), ((0, 1, 0, 0), a[1].clone())]
                .into_iter()
                .collect()
        };
        let big = |a: &[Matrix<S>]| -> Section<S> {
            let mut s: Section<S> = (0..=n).map(|q| ((n - q, q, 1, 0), a[q].clone())).collect();
            s.insert((0, 0, 0, 1), a[n + 1].clone());
            s
        };
        let total = sum(
            product(&lin(&mc.beta1), &big(&mc.alpha1)),
            product(&big(&mc.beta2), &lin(&mc.alpha2)),
        );
        let mut keys: Vec<_> = (0..=n + 1).map(|q| (n + 1 - q, q, 1, 0)).collect();
        keys.extend([(1, 0, 0, 1), (0, 1, 0, 1)]);
        assert!(total.keys().all(|k| keys.contains(k)));
        keys.iter()
            .map(|k| total.get(k).cloned().unwrap_or_else(|| Matrix::zeros(c, c)))
            .collect()
    }

    fn random_monad(n: usize, c: usize, seed: u64) -> MonadCoeffs<C64> {
        let mut rng = sample_rng(seed, 0);
        let mut mc = MonadCoeffs::zeros(n, c, 0);
        for m in mc
            .alpha1
            .iter_mut()
            .chain(&mut mc.alpha2)
            .chain(&mut mc.beta1)
            .chain(&mut mc.beta2)
        {
            *m = random_matrix(m.rows(), m.cols(), &mut rng);
        }
        for x in mc.xi_top.iter_mut().chain([&mut mc.xi_bottom]) {
            *x = random_matrix(x.rows(), 1, &mut rng);
        }
        mc
    }

    #[test]
    fn zero_coefficients_give_zero_residuals() {
        let mc = MonadCoeffs::<Q>::zeros(3, 2, 1);
        assert_eq!(compose_residual(&mc).len(), 7);
        assert!(compose_residual(&mc).iter().all(Matrix::is_zero));
    }

    #[test]
    fn residual_matches_monomial_expansion() {
        for (n, c, seed) in [(1, 1, 1), (2, 3, 2), (4, 2, 3)] {
            let mc = random_monad(n, c, seed);
            for (a, b) in compose_residual(&mc).iter().zip(oracle_residual(&mc)) {
                assert!((a - &b).max_abs() < 1e-12);
            }
        }
    }

    #[test]
    fn scalar_image_by_hand() {
        // c = 1, (z, w, 1) with n = 2
        let d = PlaneADHM::<Q>::new(
            Matrix::from_int_rows(&[&[3]]),
            Matrix::from_int_rows(&[&[5]]),
            Matrix::from_int_rows(&[&[1]]),
        )
        .unwrap();
        let mc = build_jm(&d, 2, 0).unwrap();
        assert_eq!(mc.alpha1[2], Matrix::from_int_rows(&[&[1]]));
        assert_eq!(mc.alpha1[3], Matrix::from_int_rows(&[&[5]]));
        assert_eq!(mc.alpha2[1], Matrix::from_int_rows(&[&[3], &[0]]));
        assert_eq!(mc.beta2[2], Matrix::from_int_rows(&[&[-1, 0]]));
        assert_eq!(mc.beta2[3], Matrix::from_int_rows(&[&[-5, 1]]));
        assert!(compose_residual(&mc).iter().all(Matrix::is_zero));
        assert!(framing_residual(&mc).iter().all(Matrix::is_zero));
        assert!(is_normalized(&mc, 0.0));
        let (back, g) = gauge_normalize(&mc, 0, 0.0).unwrap();
        assert_eq!(back, d);
        assert_eq!(g, GaugeElement::identity(2, 1));
    }

    #[test]
    fn commutator_lands_in_one_slot() {
        let d = PlaneADHM::<Q>::new(
            Matrix::from_int_rows(&[&[0, 1], &[0, 0]]),
            Matrix::from_int_rows(&[&[1, 0], &[0, 2]]),
            Matrix::from_int_rows(&[&[1, 1]]),
        )
        .unwrap();
        let res = compose_residual(&build_jm(&d, 3, 0).unwrap());
        let expected = d.b2.commutator(&d.b1).transpose();
        assert!(res[..6].iter().all(Matrix::is_zero));
        assert_eq!(res[6], expected);
        assert!(!expected.is_zero());
    }

    #[test]
    fn gauge_action_basics() {
        let mc = random_monad(2, 2, 9);
        let same = gauge_action(&GaugeElement::identity(2, 2), &mc, DEFAULT_TOL).unwrap();
        assert_eq!(same, mc);
        let two = C64::new(2.0, 0.0);
        let g = GaugeElement {
            phi: Matrix::scalar(2, two),
            psi11: Matrix::scalar(2, two),
            psi12: vec![Matrix::zeros(2, 3); 2],
            psi22: Matrix::scalar(3, two),
            chi: Matrix::scalar(2, two),
        };
        let scaled = gauge_action(&g, &mc, DEFAULT_TOL).unwrap();
        assert_eq!(scaled.alpha1, mc.alpha1);
        assert_eq!(scaled.xi_bottom, mc.xi_bottom.scale(&two));
        let mut bad = g.clone();
        bad.psi22 = Matrix::zeros(3, 3);
        assert_eq!(
            gauge_action(&bad, &mc, DEFAULT_TOL),
            Err(AdhmError::SingularGauge)
        );
    }

    #[test]
    fn gauge_composition_is_an_action() {
        let mc = random_monad(3, 2, 4);
        let mut rng = sample_rng(4, 1);
        let mut g = || GaugeElement {
            phi: crate::random::random_gauge(2, &mut rng),
            psi11: crate::random::random_gauge(2, &mut rng),
            psi12: (0..3).map(|_| random_matrix(2, 3, &mut rng)).collect(),
            psi22: crate::random::random_gauge(3, &mut rng),
            chi: crate::random::random_gauge(2, &mut rng),
        };
        let (g1, g2) = (g(), g());
        let lhs = gauge_action(&g2.compose(&g1), &mc, DEFAULT_TOL).unwrap();
        let rhs = gauge_action(
            &g2,
            &gauge_action(&g1, &mc, DEFAULT_TOL).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        let diff = compose_residual(&lhs)
            .iter()
            .zip(compose_residual(&rhs))
            .map(|(a, b)| (a - &b).max_abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-9);
        assert!((&lhs.beta2[1] - &rhs.beta2[1]).max_abs() < 1e-9);
        assert!((&lhs.xi_top[2] - &rhs.xi_top[2]).max_abs() < 1e-9);
    }

    #[test]
    fn jm_is_equivariant() {
        let mut rng = sample_rng(12, 0);
        let d = random_commuting(3, &mut rng);
        let phi = crate::random::random_gauge(3, &mut rng);
        let moved = crate::plane::gl_action(&phi, &d, DEFAULT_TOL).unwrap();
        let lhs = build_jm(&moved, 2, 1).unwrap();
        let rhs = gauge_action(
            &GaugeElement::iota(&phi, 2, DEFAULT_TOL).unwrap(),
            &build_jm(&d, 2, 1).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap();
        assert!(compose_residual(&lhs).iter().all(|r| r.max_abs() < 1e-9));
        for (a, b) in lhs
            .alpha1
            .iter()
            .zip(&rhs.alpha1)
            .chain(lhs.beta2.iter().zip(&rhs.beta2))
        {
            assert!((a - b).max_abs() < 1e-9);
        }
    }

    #[test]
    fn reexpansion_roundtrip_and_covariance() {
        let mc = random_monad(3, 4, 21);
        let there = reexpand_chart(&mc, 3).unwrap();
        let back = reexpand_chart(&there, 0).unwrap();
        for (a, b) in mc
            .alpha1
            .iter()
            .zip(&back.alpha1)
            .chain(mc.xi_top.iter().zip(&back.xi_top))
        {
            assert!((a - b).max_abs() < 1e-10);
        }
        let before = compose_residual(&mc);
        let after = compose_residual(&there);
        let s4 = sigma::<C64>(4, 3, 4).unwrap().entries;
        let s1 = sigma::<C64>(1, 3, 4).unwrap().entries;
        let moved = reexpand(&before[..5], &s4);
        let rotated = reexpand(&before[5..], &s1);
        for (a, b) in moved.iter().chain(&rotated).zip(&after) {
            assert!((a - b).max_abs() < 1e-10);
        }
    }

    #[test]
    fn normalization_reproduces_the_transition() {
        for i in 0..30u64 {
            let mut rng = sample_rng(40, i);
            let (n, c) = (1 + (i % 4) as usize, 1 + (i % 3) as usize);
            let d = random_commuting(c, &mut rng);
            let (m, l) = ((i as usize) % (c + 1), (i as usize / 2) % (c + 1));
            let mc = build_jm(&d, n, m).unwrap();
            let expected = transition_phi(&d, m, l, n, DEFAULT_TOL).unwrap();
            let (got, g) = gauge_normalize(&mc, l, DEFAULT_TOL).unwrap();
            let err = [
                (&got.b1, &expected.b1),
                (&got.b2, &expected.b2),
                (&got.e, &expected.e),
            ]
            .iter()
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max);
            assert!(err < 1e-9, "n={n} c={c} m={m} l={l}: {err}");
            assert!((&g.chi - &Matrix::identity(c)).max_abs() < 1e-12);
            let normal = gauge_action(&g, &reexpand_chart(&mc, l).unwrap(), DEFAULT_TOL).unwrap();
            assert!(is_normalized(&normal, 1e-9));
            // closed form: φ = d₁^{−(n−1)}, ψ₁₁ = d₁, ψ₂₂ = diag(d₁^{−n}, 1), d₁ = ᵗ(c − s b₁)
            let d1 = crate::xn::overlap_matrix(&d.b1, m, l, c)
                .unwrap()
                .transpose();
            assert!((&g.psi11 - &d1).max_abs() < 1e-9);
            let id = Matrix::<C64>::identity(c);
            assert!((&(&g.phi * &d1.pow(n - 1)) - &id).max_abs() < 1e-8);
            assert!((&(&g.psi22.submatrix(0, 0, c, c) * &d1.pow(n)) - &id).max_abs() < 1e-8);
        }
    }

    #[test]
    fn boundary_of_the_overlap_is_not_normalizable() {
        // c = 1, m = 0, l = 1: d₁ = c₋₁ − s₋₁ b₁ vanishes at b₁ = −cot(π/2) = 0
        let z = |x: i64| Matrix::<C64>::from_int_rows(&[&[x]]);
        let d = PlaneADHM::new(z(0), z(1), z(1)).unwrap();
        let mc = build_jm(&d, 2, 0).unwrap();
        assert_eq!(
            gauge_normalize(&mc, 1, DEFAULT_TOL).unwrap_err(),
            AdhmError::NotNormalizable { step: 1 }
        );
        let ok = PlaneADHM::new(z(1), z(1), z(1)).unwrap();
        assert!(gauge_normalize(&build_jm(&ok, 2, 0).unwrap(), 1, DEFAULT_TOL).is_ok());
    }
}
