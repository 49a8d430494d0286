//! Seeded generators of test data: well-conditioned gauges, co-stable plane
//! triples, chart data and representations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg;
use crate::matrix::Matrix;
use crate::plane::{check_t2, PlaneADHM};
use crate::quiver::FramedRep;
use crate::scalar::{Scalar, C64, DEFAULT_TOL};
use crate::xn::{zeta_inverse_unchecked, ChartData};

/// The generator for sample `index` of a run seeded with `seed`, so that
/// samples are reproducible regardless of scheduling.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<S: Scalar, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix<S> {
    Matrix::from_fn(rows, cols, |_, _| S::random(rng))
}

/// An invertible complex matrix with smallest singular value at least 0.2.
pub fn random_gauge<R: Rng + ?Sized>(c: usize, rng: &mut R) -> Matrix<C64> {
    loop {
        let g =
            &Matrix::identity(c) + &random_matrix::<C64, _>(c, c, rng).scale(&C64::new(0.5, 0.0));
        if linalg::min_singular_value(&g) >= 0.2 {
            return g;
        }
    }
}

/// `c` points of the unit square in ℂ², pairwise at least `sep` apart.
pub fn random_points<R: Rng + ?Sized>(c: usize, sep: f64, rng: &mut R) -> Vec<(C64, C64)> {
    let mut pts: Vec<(C64, C64)> = Vec::with_capacity(c);
    while pts.len() < c {
        let p = (random_complex(rng), random_complex(rng));
        if pts
            .iter()
            .all(|q| ((p.0 - q.0).norm_sqr() + (p.1 - q.1).norm_sqr()).sqrt() >= sep)
        {
            pts.push(p);
        }
    }
    pts
}

/// Commuting `(b₁, b₂)` with a random framing. Either a conjugated pair of
/// diagonals, or a conjugated Jordan-type `b₁` (blocks of size ≤ 2) with
/// `b₂` a polynomial in `b₁`.
pub fn random_commuting<R: Rng + ?Sized>(c: usize, rng: &mut R) -> PlaneADHM<C64> {
    let p = random_gauge(c, rng);
    let pinv = p.inverse(DEFAULT_TOL).expect("well-conditioned gauge");
    let conj = |m: &Matrix<C64>| &(&p * m) * &pinv;
    let e = random_matrix::<C64, _>(1, c, rng);
    if c >= 2 && rng.gen_bool(0.3) {
        let mut j = Matrix::<C64>::zeros(c, c);
        let mut i = 0;
        while i < c {
            let z = random_complex(rng);
            j[(i, i)] = z;
            if i + 1 < c && rng.gen_bool(0.5) {
                j[(i + 1, i + 1)] = z;
                j[(i, i + 1)] = C64::new(1.0, 0.0);
                i += 2;
            } else {
                i += 1;
            }
        }
        let (a0, a1, a2) = (
            random_complex(rng),
            random_complex(rng),
            random_complex(rng),
        );
        let b2 = &(&Matrix::scalar(c, a0) + &j.scale(&a1)) + &j.pow(2).scale(&(a2 * 0.3));
        PlaneADHM {
            c,
            b1: conj(&j),
            b2: conj(&b2),
            e,
        }
    } else {
        let pts = random_points(c, 0.1, rng);
        let z: Vec<C64> = pts.iter().map(|x| x.0).collect();
        let w: Vec<C64> = pts.iter().map(|x| x.1).collect();
        PlaneADHM {
            c,
            b1: conj(&Matrix::diag(&z)),
            b2: conj(&Matrix::diag(&w)),
            e,
        }
    }
}

/// A co-stable commuting triple; `None` only if `attempts` draws all fail.
pub fn random_costable<R: Rng + ?Sized>(
    c: usize,
    attempts: usize,
    rng: &mut R,
) -> Option<PlaneADHM<C64>> {
    (0..attempts).find_map(|_| {
        let d = random_commuting(c, rng);
        check_t2(&d, DEFAULT_TOL).unwrap_or(false).then_some(d)
    })
}

/// Co-stable chart data in chart `m` with a random gauge as `A_{2m}`.
pub fn random_chart_data<R: Rng + ?Sized>(c: usize, m: usize, rng: &mut R) -> ChartData<C64> {
    let d = random_costable(c, 1000, rng).expect("co-stable triples are generic");
    ChartData {
        m,
        b: d.b1,
        e_m: d.b2,
        e: d.e,
        a2m: random_gauge(c, rng),
    }
}

/// A triple with a joint eigenvector in `ker e`: commuting diagonal data
/// conjugated by a gauge, with `e` annihilating one eigenvector.
pub fn random_common_kernel_violator<R: Rng + ?Sized>(c: usize, rng: &mut R) -> PlaneADHM<C64> {
    let mut d = random_commuting(c, rng);
    let joint = crate::plane::common_eigenvectors(&d.b1, &d.b2, DEFAULT_TOL).expect("complex");
    let v = joint[0].basis.column(0);
    // project e onto the annihilator of v
    let ev = (&d.e * &v)[(0, 0)];
    let vv = (&v.adjoint() * &v)[(0, 0)];
    d.e = &d.e - &v.adjoint().scale(&(ev / vv));
    d
}

/// A representation satisfying the relations with `f ≠ 0` (`n ≥ 2`,
/// `c ≥ 2`), built in chart `m` from `B`, `E` whose commutator is rank one:
/// block upper triangular with commuting diagonal blocks and `e = (0,…,0,1)`,
/// then conjugated by a random gauge.
pub fn random_framed_rep<R: Rng + ?Sized>(
    n: usize,
    c: usize,
    m: usize,
    rng: &mut R,
) -> FramedRep<C64> {
    assert!(n >= 2 && c >= 2, "nonzero framing needs n ≥ 2 and c ≥ 2");
    let mut b = Matrix::<C64>::zeros(c, c);
    let mut e_m = Matrix::<C64>::zeros(c, c);
    for i in 0..c {
        b[(i, i)] = random_complex(rng);
        e_m[(i, i)] = random_complex(rng);
    }
    for i in 0..c - 1 {
        b[(i, c - 1)] = random_complex(rng);
        e_m[(i, c - 1)] = random_complex(rng);
    }
    let mut e = Matrix::<C64>::zeros(1, c);
    e[(0, c - 1)] = C64::new(1.0, 0.0);
    let p = random_gauge(c, rng);
    let pinv = p.inverse(DEFAULT_TOL).expect("well-conditioned gauge");
    let cd = ChartData {
        m,
        b: &(&p * &b) * &pinv,
        e_m: &(&p * &e_m) * &pinv,
        e: &e * &pinv,
        a2m: random_gauge(c, rng),
    };
    let d = zeta_inverse_unchecked(&cd, n, DEFAULT_TOL).expect("invertible A2m");
    let ee = (&d.e * &d.e.adjoint())[(0, 0)];
    let f = (0..n - 1)
        .map(|q| {
            let rhs = &(&d.cs[q + 1] * &d.a2) - &(&d.cs[q] * &d.a1);
            (&rhs * &d.e.adjoint()).scale(&(C64::new(1.0, 0.0) / ee))
        })
        .collect();
    FramedRep::new(d.a1, d.a2, d.cs, d.e, f).expect("consistent shapes")
}
