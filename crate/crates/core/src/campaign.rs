//! Seeded verification campaigns. Each suite draws its samples from
//! `sample_rng(seed, index)` and reduces per-sample reports with sums and
//! maxima only, so the outcome does not depend on scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{AdhmError, Result};
use crate::fixtures::bruteforce_fixtures;
use crate::matrix::Matrix;
use crate::monad::{
    build_jm, compose_residual, gauge_action, gauge_normalize, is_normalized, reexpand_chart,
    GaugeElement,
};
use crate::pencil::{analyze_pencil, check_q3_star, staircase};
use crate::plane::{check_t1, sort_points, PlaneADHM};
use crate::quiver::{
    bridge_defect, brute_force_semistable, check_semistable_spectral, embed_xn_as_rep,
    moment_residual_n2, reduce_mod_p, relation_defects, u_m_residual, FramedRep, StabilityParams,
    Verdict, DEFAULT_BUDGET,
};
use crate::random::{
    random_chart_data, random_common_kernel_violator, random_commuting, random_complex,
    random_framed_rep, random_gauge, random_matrix, random_points, sample_rng,
};
use crate::scalar::{rotation, Scalar, C64};
use crate::xn::{
    chart_gl2_action, check_p2, check_p3_direct, check_p3_via_chart, from_xn_points,
    overlap_matrix, p1_residual, sigma, to_xn_points, transition_omega, transition_phi, zeta,
    zeta_inverse, zeta_inverse_unchecked, ChartData, XnADHM,
};
use crate::{linalg, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Roundtrip,
    Cocycle,
    Lmp3,
    Sigma,
    Pencil,
    Points,
    Quiver,
    Bruteforce,
    Moment,
    Um,
    MonadTransition,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Roundtrip,
        Suite::Cocycle,
        Suite::Lmp3,
        Suite::Sigma,
        Suite::Pencil,
        Suite::Points,
        Suite::Quiver,
        Suite::Bruteforce,
        Suite::Moment,
        Suite::Um,
        Suite::MonadTransition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Roundtrip => "roundtrip",
            Suite::Cocycle => "cocycle",
            Suite::Lmp3 => "lmp3",
            Suite::Sigma => "sigma",
            Suite::Pencil => "pencil",
            Suite::Points => "points",
            Suite::Quiver => "quiver",
            Suite::Bruteforce => "bruteforce",
            Suite::Moment => "moment",
            Suite::Um => "um",
            Suite::MonadTransition => "monad-transition",
        }
    }

    /// Sample counts of the acceptance runs. For `roundtrip` the count is
    /// per `(n, c)` pair; `sigma` and `bruteforce` ignore it.
    pub fn default_samples(self) -> usize {
        match self {
            Suite::Lmp3 => 200,
            Suite::Pencil | Suite::Points => 50,
            _ => 100,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = AdhmError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| AdhmError::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: u64,
    pub fail: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub checks: BTreeMap<String, Tally>,
    pub max_residuals: BTreeMap<String, f64>,
    /// The first few failure descriptions, sorted.
    pub failures: Vec<String>,
    pub elapsed_ms: u128,
}

const MAX_FAILURES: usize = 20;

impl Report {
    pub fn new(command: impl Into<String>, seed: u64, samples: usize) -> Self {
        Report {
            command: command.into(),
            seed,
            samples,
            ..Report::default()
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        let t = self.checks.entry(name.to_string()).or_default();
        if ok {
            t.pass += 1;
        } else {
            t.fail += 1;
            self.failures.push(format!("{name}: {}", detail()));
        }
    }

    /// Records a residual and checks it against `bound`; NaN fails.
    pub fn bounded(&mut self, name: &str, value: f64, bound: f64, detail: impl FnOnce() -> String) {
        self.residual(name, value);
        self.check(name, value <= bound, || {
            format!("{value:.3e} > {bound:.0e} ({})", detail())
        });
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        let slot = self.max_residuals.entry(name.to_string()).or_insert(0.0);
        if value.is_nan() || value > *slot {
            *slot = value;
        }
    }

    pub fn error(&mut self, name: &str, e: &AdhmError) {
        self.check(name, false, || format!("unexpected error: {e}"));
    }

    pub fn merge(mut self, other: Report) -> Report {
        for (k, t) in other.checks {
            let slot = self.checks.entry(k).or_default();
            slot.pass += t.pass;
            slot.fail += t.fail;
        }
        for (k, v) in other.max_residuals {
            self.residual(&k, v);
        }
        self.failures.extend(other.failures);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.values().all(|t| t.fail == 0)
    }

    pub fn total(&self) -> Tally {
        self.checks.values().fold(Tally::default(), |a, t| Tally {
            pass: a.pass + t.pass,
            fail: a.fail + t.fail,
        })
    }

    fn finish(mut self) -> Self {
        self.failures.sort();
        self.failures.dedup();
        self.failures.truncate(MAX_FAILURES);
        self
    }
}

fn rel_diff<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> f64 {
    (a - b).max_abs() / a.max_abs().max(b.max_abs()).max(1.0)
}

fn run_samples(
    total: usize,
    jobs: usize,
    f: impl Fn(u64) -> Report + Sync + Send,
) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| AdhmError::InvalidInput(e.to_string()))?;
    Ok(pool.install(|| {
        (0..total as u64)
            .into_par_iter()
            .map(&f)
            .reduce(Report::default, Report::merge)
    }))
}

/// Runs `suite` and fills in the report header.
pub fn run_campaign(
    suite: Suite,
    samples: usize,
    seed: u64,
    jobs: usize,
    tol: f64,
) -> Result<Report> {
    let start = Instant::now();
    let body = match suite {
        Suite::Roundtrip => run_samples(30 * samples, jobs, |i| roundtrip_sample(seed, i, tol))?,
        Suite::Cocycle => run_samples(samples, jobs, |i| cocycle_sample(seed, i, tol))?,
        Suite::Lmp3 => run_samples(samples, jobs, |i| lmp3_sample(seed, i, tol))?,
        Suite::Sigma => sigma_suite(),
        Suite::Pencil => run_samples(samples, jobs, |i| pencil_sample(seed, i, tol))?,
        Suite::Points => run_samples(samples, jobs, |i| points_sample(seed, i, tol))?,
        Suite::Quiver => run_samples(samples, jobs, |i| quiver_sample(seed, i, tol))?,
        Suite::Bruteforce => bruteforce_suite()?,
        Suite::Moment => moment_suite(samples, jobs, seed, tol)?,
        Suite::Um => run_samples(samples, jobs, |i| um_sample(seed, i, tol))?,
        Suite::MonadTransition => run_samples(samples, jobs, |i| monad_sample(seed, i, tol))?,
    };
    let mut report = Report::new(format!("campaign {suite}"), seed, samples)
        .merge(body)
        .finish();
    report.elapsed_ms = start.elapsed().as_millis();
    Ok(report)
}

const ROUNDTRIP_BOUND: f64 = 1e-9;
const COCYCLE_BOUND: f64 = 1e-8;
const EQUIVARIANCE_BOUND: f64 = 1e-9;
const SIGMA_BOUND: f64 = 1e-10;
const POINTS_BOUND: f64 = 1e-8;
const CHAIN_BOUND: f64 = 1e-9;
const UM_BOUND: f64 = 1e-9;
const MOMENT_BOUND: f64 = 1e-12;
const MONAD_BOUND: f64 = 1e-9;
const GAUGE_BOUND: f64 = 1e-10;

/// Largest condition number of `c_{m−l} − s_{m−l}b₁` for a sample to count as
/// inside the overlap; closer to its boundary rounding alone exceeds the
/// cocycle tolerance.
const OVERLAP_KAPPA: f64 = 1e2;

fn pair(i: u64) -> (usize, usize) {
    let k = (i % 30) as usize;
    (1 + k / 6, 1 + k % 6)
}

fn roundtrip_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let (n, c) = pair(i);
    let mut rng = sample_rng(seed, i);
    let m = rng.gen_range(0..=c);
    let cd = random_chart_data(c, m, &mut rng);
    let d = match zeta_inverse(&cd, n, tol) {
        Ok(d) => d,
        Err(e) => {
            r.error("zeta_inverse", &e);
            return r;
        }
    };
    let ctx = || format!("n={n} c={c} m={m} sample {i}");
    r.bounded("P1", p1_residual(&d), ROUNDTRIP_BOUND, ctx);
    r.check("P2", check_p2(&d, tol), ctx);
    r.check("P3", check_p3_direct(&d, tol).unwrap_or(false), ctx);
    match zeta(&d, m, tol) {
        Ok(back) => {
            let err = [
                (&back.b, &cd.b),
                (&back.e_m, &cd.e_m),
                (&back.e, &cd.e),
                (&back.a2m, &cd.a2m),
            ]
            .iter()
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max)
                / cd.scale();
            r.bounded("roundtrip", err, ROUNDTRIP_BOUND, ctx);
        }
        Err(e) => r.error("roundtrip", &e),
    }
    r
}

fn in_overlap(b: &Matrix<C64>, m: usize, l: usize, c: usize) -> bool {
    overlap_matrix(b, m, l, c).is_ok_and(|d1| {
        let sv = linalg::singular_values(&d1);
        let (lo, hi) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
        lo * OVERLAP_KAPPA >= hi
    })
}

fn chart_diff(a: &ChartData<C64>, b: &ChartData<C64>) -> f64 {
    [
        rel_diff(&a.b, &b.b),
        rel_diff(&a.e_m, &b.e_m),
        rel_diff(&a.e, &b.e),
        rel_diff(&a.a2m, &b.a2m),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn cocycle_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let c = 1 + (i % 6) as usize;
    let n = 1 + ((i / 6) % 5) as usize;
    let mut rng = sample_rng(seed, i);
    let m0 = rng.gen_range(0..=c);
    let base = random_chart_data(c, m0, &mut rng);
    // the sample read in every chart it comfortably lies in
    let charts: Vec<Option<ChartData<C64>>> = (0..=c)
        .map(|m| {
            if in_overlap(&base.b, m0, m, c) {
                transition_omega(&base, m, n, tol).ok()
            } else {
                None
            }
        })
        .collect();
    for (m, dm) in charts.iter().enumerate() {
        let Some(dm) = dm else { continue };
        for l in 0..=c {
            if !in_overlap(&dm.b, m, l, c) {
                continue;
            }
            let Ok(dl) = transition_omega(dm, l, n, tol) else {
                continue;
            };
            for k in 0..=c {
                if !in_overlap(&dl.b, l, k, c) || !in_overlap(&dm.b, m, k, c) {
                    continue;
                }
                let ctx = || format!("n={n} c={c} ({m},{l},{k}) sample {i}");
                let (Ok(direct), Ok(two_step)) = (
                    transition_omega(dm, k, n, tol),
                    transition_omega(&dl, k, n, tol),
                ) else {
                    r.check("cocycle", false, ctx);
                    continue;
                };
                let phi_direct = transition_phi(&dm.plane(), m, k, n, tol);
                let phi_two = transition_phi(&dl.plane(), l, k, n, tol);
                match (phi_direct, phi_two) {
                    (Ok(a), Ok(b)) => {
                        let err = [
                            rel_diff(&a.b1, &b.b1),
                            rel_diff(&a.b2, &b.b2),
                            rel_diff(&a.e, &b.e),
                        ]
                        .into_iter()
                        .fold(0.0, f64::max);
                        r.bounded("phi cocycle", err, COCYCLE_BOUND, ctx);
                    }
                    _ => r.check("phi cocycle", false, ctx),
                }
                r.bounded(
                    "omega cocycle",
                    chart_diff(&direct, &two_step),
                    COCYCLE_BOUND,
                    ctx,
                );
            }
        }
    }
    if i < 20 {
        let phi1 = random_gauge(c, &mut rng);
        let phi2 = random_gauge(c, &mut rng);
        for l in 0..=c {
            if !in_overlap(&base.b, m0, l, c) {
                continue;
            }
            let ctx = || format!("n={n} c={c} m={m0} l={l} sample {i}");
            let moved = chart_gl2_action(&phi1, &phi2, &base, tol)
                .and_then(|g| transition_omega(&g, l, n, tol));
            let after = transition_omega(&base, l, n, tol)
                .and_then(|t| chart_gl2_action(&phi1, &phi2, &t, tol));
            match (moved, after) {
                (Ok(a), Ok(b)) => r.bounded(
                    "omega equivariance",
                    chart_diff(&a, &b),
                    EQUIVARIANCE_BOUND,
                    ctx,
                ),
                _ => r.check("omega equivariance", false, ctx),
            }
        }
    }
    r
}

fn lmp3_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let c = 1 + (i % 6) as usize;
    let n = 1 + ((i / 6) % 5) as usize;
    let mut rng = sample_rng(seed, i);
    let m = rng.gen_range(0..=c);
    let (kind, d) = match i % 4 {
        0 | 1 => (
            "valid",
            zeta_inverse(&random_chart_data(c, m, &mut rng), n, tol),
        ),
        2 => {
            let d = zeta_inverse(&random_chart_data(c, m, &mut rng), n, tol);
            (
                "e=0",
                d.map(|mut d| {
                    d.e = Matrix::zeros(1, c);
                    d
                }),
            )
        }
        _ => {
            let plane = random_common_kernel_violator(c, &mut rng);
            let cd = ChartData {
                m,
                b: plane.b1,
                e_m: plane.b2,
                e: plane.e,
                a2m: random_gauge(c, &mut rng),
            };
            ("eigenvector", zeta_inverse_unchecked(&cd, n, tol))
        }
    };
    let d = match d {
        Ok(d) => d,
        Err(e) => {
            r.error("construction", &e);
            return r;
        }
    };
    let ctx = || format!("{kind} n={n} c={c} m={m} sample {i}");
    match (check_p3_direct(&d, tol), check_p3_via_chart(&d, tol)) {
        (Ok(a), Ok(b)) => {
            r.check("agreement", a == b, || {
                format!("direct {a}, via chart {b} ({})", ctx())
            });
            r.check("expected verdict", a == (kind == "valid"), ctx);
        }
        (Err(e), _) | (_, Err(e)) => r.error("agreement", &e),
    }
    r
}

fn sigma_suite() -> Report {
    let mut r = Report::default();
    for c in 1..=6usize {
        for h in 0..=4usize {
            let Ok(s0) = sigma::<C64>(h, 0, c) else {
                continue;
            };
            r.check(
                "sigma identity",
                s0.entries == Matrix::identity(h + 1),
                || format!("h={h} c={c}"),
            );
            let ci = c as i64;
            for a in -ci..=ci {
                for b in -ci..=ci {
                    let (Ok(sa), Ok(sb), Ok(sab)) = (
                        sigma::<C64>(h, a, c),
                        sigma::<C64>(h, b, c),
                        sigma::<C64>(h, a + b, c),
                    ) else {
                        r.check("sigma group law", false, || {
                            format!("h={h} c={c} a={a} b={b}")
                        });
                        continue;
                    };
                    let err = (&(&sa.entries * &sb.entries) - &sab.entries).max_abs();
                    r.bounded("sigma group law", err, SIGMA_BOUND, || {
                        format!("h={h} c={c} a={a} b={b}")
                    });
                }
            }
        }
    }
    // exact backends agree at quarter turns
    let q = sigma::<Rational>(3, 1, 1).expect("quarter turn");
    let f = sigma::<C64>(3, 1, 1).expect("float");
    r.check(
        "sigma exact quarter turn",
        rel_diff(&q.entries.to_complex().expect("rational"), &f.entries) == 0.0,
        || "c=1".into(),
    );
    r
}

/// `c × c` pencil with Kronecker blocks `L_ε`, a zero row, and a regular
/// diagonal block, conjugated by random gauges.
fn singular_pencil<R: Rng>(eps: usize, c: usize, rng: &mut R) -> (Matrix<C64>, Matrix<C64>) {
    let (mut a1, mut a2) = (Matrix::<C64>::zeros(c, c), Matrix::<C64>::zeros(c, c));
    let one = C64::new(1.0, 0.0);
    for k in 0..eps {
        a1[(k, k)] = one;
        a2[(k, k + 1)] = one;
    }
    // row eps stays zero; the regular block starts at (eps+1, eps+1)
    for k in eps + 1..c {
        a1[(k, k)] = one;
        a2[(k, k)] = random_complex(rng);
    }
    let p = random_gauge(c, rng);
    let q = random_gauge(c, rng);
    (&(&p * &a1) * &q, &(&p * &a2) * &q)
}

fn random_subspace<R: Rng>(c: usize, k: usize, rng: &mut R) -> Matrix<C64> {
    random_matrix(c, k, rng)
}

fn pencil_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let eps = (i % 3) as usize;
    let c = (eps + 1) + ((i / 3) as usize % (6 - eps));
    let mut rng = sample_rng(seed, i);
    let (a1, a2) = singular_pencil(eps, c, &mut rng);
    let ctx = || format!("eps={eps} c={c} sample {i}");
    let an = analyze_pencil(&a1, &a2, tol);
    r.check("singular verdict", !an.regular, ctx);
    r.check("minimal index", an.minimal_index == Some(eps), || {
        format!("got {:?} ({})", an.minimal_index, ctx())
    });
    if let Some(span) = an.solution_span() {
        r.bounded("chain residual", an.chain_residual, CHAIN_BOUND, ctx);
        r.check("solution independent", span.rank(tol) == eps + 1, ctx);
        r.check(
            "span violates Q3*",
            !check_q3_star(&a1, &a2, &span, tol),
            ctx,
        );
    }
    if eps > 0 {
        r.check(
            "minimality",
            staircase(&a1, &a2, eps - 1).nullspace(tol).cols() == 0,
            ctx,
        );
    }
    // the regular direction on a random pencil of the same size
    let (b1, b2) = (
        random_matrix::<C64, _>(c, c, &mut rng),
        random_matrix::<C64, _>(c, c, &mut rng),
    );
    let regular = analyze_pencil(&b1, &b2, tol).regular;
    r.check("random pencil regular", regular, ctx);
    let mut all = true;
    for k in 1..=c {
        for _ in 0..200 {
            all &= check_q3_star(&b1, &b2, &random_subspace(c, k, &mut rng), tol);
        }
    }
    r.check("regular satisfies Q3*", all == regular, ctx);
    r
}

fn mobius(p: (C64, C64), m: usize, l: usize, n: usize, c: usize) -> Option<(C64, C64)> {
    let (ck, sk) = rotation::<C64>(m as i64 - l as i64, c)?;
    let den = ck - sk * p.0;
    Some(((sk + ck * p.0) / den, den.powu(n as u32) * p.1))
}

fn points_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let c = 1 + (i % 5) as usize;
    let n = 1 + ((i / 5) % 5) as usize;
    let mut rng = sample_rng(seed, i);
    let m = rng.gen_range(0..=c);
    let pts = random_points(c, 0.1, &mut rng);
    let ctx = || format!("n={n} c={c} m={m} sample {i}");
    let read = from_xn_points(n, m, &pts, tol).and_then(|d| to_xn_points(&d, tol));
    let read = match read {
        Ok(x) => x,
        Err(e) => {
            r.error("points roundtrip", &e);
            return r;
        }
    };
    let diff = |a: &[(C64, C64)], b: &[(C64, C64)]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                ((x.0 - y.0).norm() / x.0.norm().max(1.0))
                    .max((x.1 - y.1).norm() / x.1.norm().max(1.0))
            })
            .fold(0.0, f64::max)
    };
    for l in 0..=c {
        let Some(expected) = pts
            .iter()
            .map(|&p| mobius(p, m, l, n, c))
            .collect::<Option<Vec<_>>>()
        else {
            continue;
        };
        // poles of the Möbius map amplify rounding; stay clear of them
        let (ck, sk) = rotation::<C64>(m as i64 - l as i64, c).expect("float");
        if pts.iter().any(|p| (ck - sk * p.0).norm() < 0.05) {
            continue;
        }
        let found = read.iter().find(|(k, _)| *k == l);
        let mut expected = expected;
        sort_points(&mut expected);
        match found {
            Some((_, got)) if got.len() == c => {
                let name = if l == m {
                    "points roundtrip"
                } else {
                    "chart reading"
                };
                r.bounded(name, diff(got, &expected), POINTS_BOUND, || {
                    format!("l={l} {}", ctx())
                });
            }
            _ => r.check("chart reading", false, || {
                format!("chart {l} missing ({})", ctx())
            }),
        }
    }
    r
}

fn quiver_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let mut rng = sample_rng(seed, i);
    let kind = i % 3;
    let (n, c) = if kind == 2 {
        (2 + (i / 3 % 4) as usize, 2 + (i / 12 % 5) as usize)
    } else {
        (1 + (i / 3 % 5) as usize, 1 + (i / 15 % 6) as usize)
    };
    let m = rng.gen_range(0..=c);
    let ctx = || format!("n={n} c={c} m={m} sample {i}");
    let rep = match kind {
        0 | 1 => {
            let d = match zeta_inverse(&random_chart_data(c, m, &mut rng), n, tol) {
                Ok(d) => d,
                Err(e) => {
                    r.error("construction", &e);
                    return r;
                }
            };
            let mut rep = embed_xn_as_rep(&d);
            if kind == 1 {
                rep.e = Matrix::zeros(1, c);
            }
            rep
        }
        _ => random_framed_rep(n, c, m, &mut rng),
    };
    let verdict = match check_semistable_spectral(&rep, tol) {
        Ok(v) => v,
        Err(e) => {
            r.error("verdict", &e);
            return r;
        }
    };
    match kind {
        0 => {
            r.check("embedding semistable", verdict == Verdict::Semistable, ctx);
            if n >= 2 {
                for l in 0..=c {
                    if let Ok(u) = u_m_residual(&rep, l, tol) {
                        r.bounded("u_m on semistable", u.max_abs(), UM_BOUND, ctx);
                    }
                    if let Ok(b) = bridge_defect(&rep, l, tol) {
                        r.bounded(
                            "bridge on semistable",
                            b.max_abs() / rep.scale().max(1.0).powi(2),
                            UM_BOUND,
                            ctx,
                        );
                    }
                }
            }
        }
        1 => r.check(
            "e = 0 not semistable",
            verdict == Verdict::NotSemistable,
            ctx,
        ),
        _ => {
            r.check(
                "nonzero f on regular pencil",
                verdict == Verdict::NotSemistable,
                ctx,
            );
        }
    }
    r
}

fn bruteforce_suite() -> Result<Report> {
    let mut r = Report::default();
    for fx in bruteforce_fixtures()? {
        if fx.p != 5 {
            return Err(AdhmError::InvalidInput(format!(
                "fixture {} uses p = {}",
                fx.name, fx.p
            )));
        }
        let spectral = check_semistable_spectral(&fx.rep, 0.0)?;
        let rp = reduce_mod_p::<5>(&fx.rep)
            .ok_or_else(|| AdhmError::InvalidInput(format!("{} does not reduce", fx.name)))?;
        let brute = brute_force_semistable(&rp, StabilityParams::for_c(fx.rep.v0), DEFAULT_BUDGET)?;
        let spectral_ss = spectral == Verdict::Semistable;
        r.check(
            "spectral decided",
            spectral != Verdict::Indeterminate,
            || fx.name.clone(),
        );
        r.check(
            "brute force equals spectral",
            brute.semistable == spectral_ss,
            || {
                format!(
                    "{}: enumeration {}, spectral {spectral:?}, violation {:?}",
                    fx.name, brute.semistable, brute.violation
                )
            },
        );
        r.check(
            "brute force equals recorded",
            brute.semistable == fx.semistable,
            || fx.name.clone(),
        );
    }
    Ok(r)
}

fn moment_suite(samples: usize, jobs: usize, seed: u64, tol: f64) -> Result<Report> {
    let mut r = run_samples(samples, jobs, |i| moment_sample(seed, i, tol))?;
    for fx in bruteforce_fixtures()?.into_iter().filter(|f| f.rep.n == 2) {
        let mu = moment_residual_n2(&fx.rep)?;
        r.check(
            "exact zero on fixtures",
            mu.vertex0.is_zero() && mu.vertex1.is_zero(),
            || fx.name.clone(),
        );
    }
    Ok(r)
}

fn moment_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let mut rng = sample_rng(seed, i);
    let c = 1 + (i % 6) as usize;
    let ctx = || format!("c={c} sample {i}");
    let rep = FramedRep::new(
        random_matrix(c, c, &mut rng),
        random_matrix(c, c, &mut rng),
        vec![random_matrix(c, c, &mut rng), random_matrix(c, c, &mut rng)],
        random_matrix(1, c, &mut rng),
        vec![random_matrix(c, 1, &mut rng)],
    )
    .expect("shapes");
    let check_identity = |r: &mut Report, rep: &FramedRep<C64>| -> Option<f64> {
        let mu = moment_residual_n2(rep).ok()?;
        let defects = relation_defects(rep);
        let s2 = rep.scale().powi(2);
        let err = (&mu.vertex0 - &defects[1])
            .max_abs()
            .max((&mu.vertex1 + &defects[0]).max_abs())
            / s2;
        r.bounded("moment equals defect", err, MOMENT_BOUND, ctx);
        Some(mu.vertex0.max_abs().max(mu.vertex1.max_abs()) / s2)
    };
    if check_identity(&mut r, &rep).is_none() {
        r.check("moment equals defect", false, ctx);
    }
    // relation-satisfying: an embedding and, for c ≥ 2, a rep with f ≠ 0
    let m = rng.gen_range(0..=c);
    let mut satisfying = Vec::new();
    if let Ok(d) = zeta_inverse(&random_chart_data(c, m, &mut rng), 2, tol) {
        satisfying.push(embed_xn_as_rep(&d));
    }
    if c >= 2 {
        satisfying.push(random_framed_rep(2, c, m, &mut rng));
    }
    for rep in satisfying {
        match check_identity(&mut r, &rep) {
            Some(v) => r.bounded("zero on relation locus", v, MOMENT_BOUND, ctx),
            None => r.check("zero on relation locus", false, ctx),
        }
    }
    r
}

fn um_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let mut rng = sample_rng(seed, i);
    let n = 2 + (i % 4) as usize;
    let c = 2 + (i / 4 % 4) as usize;
    let m = rng.gen_range(0..=c);
    let rep = random_framed_rep(n, c, m, &mut rng);
    let d = XnADHM {
        n,
        c,
        a1: rep.a1.clone(),
        a2: rep.a2.clone(),
        cs: rep.cs.clone(),
        e: rep.e.clone(),
    };
    for l in 0..=c {
        let Ok(cd) = zeta(&d, l, tol) else { continue };
        if linalg::min_singular_value(&cd.a2m) < 1e-2 {
            continue;
        }
        let ctx = || format!("n={n} c={c} chart {l} sample {i}");
        match bridge_defect(&rep, l, tol) {
            Ok(defect) => {
                let size = cd.b.commutator(&cd.e_m).max_abs().max(1.0);
                r.bounded("bridge identity", defect.max_abs() / size, UM_BOUND, ctx);
            }
            Err(e) => r.error("bridge identity", &e),
        }
    }
    r
}

fn monad_sample(seed: u64, i: u64, tol: f64) -> Report {
    let mut r = Report::default();
    let mut rng = sample_rng(seed, i);
    let c = 1 + (i % 6) as usize;
    let n = 1 + ((i / 6) % 5) as usize;
    let ctx = || format!("n={n} c={c} sample {i}");

    // (T1) ⟺ vanishing composition, on commuting and generic triples
    let d = random_commuting(c, &mut rng);
    let generic = PlaneADHM {
        c,
        b1: random_matrix(c, c, &mut rng),
        b2: random_matrix(c, c, &mut rng),
        e: random_matrix(1, c, &mut rng),
    };
    for (kind, x) in [("commuting", &d), ("generic", &generic)] {
        let Ok(mc) = build_jm(x, n, 0) else { continue };
        let res = compose_residual(&mc)
            .iter()
            .map(Matrix::max_abs)
            .fold(0.0, f64::max)
            / mc.scale().powi(2);
        let vanishes = res <= GAUGE_BOUND;
        let t1 = check_t1(x, tol);
        r.check("composition vanishes iff T1", vanishes == t1, || {
            format!("{kind}: residual {res:.2e}, T1 {t1} ({})", ctx())
        });
    }

    // gauge invariance of β∘α = 0
    let m = rng.gen_range(0..=c);
    let mc = build_jm(&d, n, m).expect("valid chart");
    let g = GaugeElement {
        phi: random_gauge(c, &mut rng),
        psi11: random_gauge(c, &mut rng),
        psi12: (0..n).map(|_| random_matrix(c, c + 1, &mut rng)).collect(),
        psi22: random_gauge(c + 1, &mut rng),
        chi: random_gauge(c, &mut rng),
    };
    match gauge_action(&g, &mc, tol) {
        Ok(moved) => {
            let res = compose_residual(&moved)
                .iter()
                .map(Matrix::max_abs)
                .fold(0.0, f64::max)
                / moved.scale().powi(2);
            r.bounded("gauge preserves composition", res, GAUGE_BOUND, ctx);
        }
        Err(e) => r.error("gauge preserves composition", &e),
    }

    // normalization in a chart of the overlap reproduces the transition
    let others: Vec<usize> = (0..=c)
        .filter(|&l| l != m && in_overlap(&d.b1, m, l, c))
        .collect();
    let l = if others.is_empty() {
        m
    } else {
        others[rng.gen_range(0..others.len())]
    };
    {
        let ctx = || format!("n={n} c={c} m={m} l={l} sample {i}");
        let normalized = reexpand_chart(&mc, l).and_then(|x| gauge_normalize(&x, l, tol));
        match (normalized, transition_phi(&d, m, l, n, tol)) {
            (Ok((got, gauge)), Ok(expected)) => {
                let err = [
                    rel_diff(&got.b1, &expected.b1),
                    rel_diff(&got.b2, &expected.b2),
                    rel_diff(&got.e, &expected.e),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                r.bounded("normalization equals transition", err, MONAD_BOUND, ctx);
                r.check(
                    "gauge has chi = 1",
                    rel_diff(&gauge.chi, &Matrix::identity(c)) == 0.0,
                    ctx,
                );
                let fixed = reexpand_chart(&mc, l).and_then(|x| gauge_action(&gauge, &x, tol));
                r.check(
                    "normal form reached",
                    fixed.is_ok_and(|x| is_normalized(&x, 1e-8)),
                    ctx,
                );
            }
            (a, b) => r.check("normalization equals transition", false, || {
                format!("{:?} / {:?} ({})", a.err(), b.err(), ctx())
            }),
        }
    }

    // boundary fixture: b₁ has the eigenvalue c_{m−l}/s_{m−l} for some l ≠ m
    {
        let l = (m + 1 + rng.gen_range(0..c)) % (c + 1);
        let (ck, sk) = rotation::<C64>(m as i64 - l as i64, c).expect("float");
        let mut diag = vec![ck / sk];
        diag.extend((1..c).map(|_| random_complex(&mut rng) * 3.0 + 5.0));
        let p = random_gauge(c, &mut rng);
        let pinv = p.inverse(tol).expect("gauge");
        let b1 = &(&p * &Matrix::diag(&diag)) * &pinv;
        let b2 = &(&b1 * &b1) + &Matrix::identity(c);
        let boundary = PlaneADHM {
            c,
            b1,
            b2,
            e: random_matrix(1, c, &mut rng),
        };
        let ctx = || format!("boundary n={n} c={c} m={m} l={l} sample {i}");
        let mc = build_jm(&boundary, n, m).expect("valid chart");
        let refused = matches!(
            gauge_normalize(&mc, l, tol),
            Err(AdhmError::NotNormalizable { .. })
        );
        r.check("boundary not normalizable", refused, ctx);
        r.check(
            "boundary outside transition domain",
            matches!(
                transition_phi(&boundary, m, l, n, tol),
                Err(AdhmError::NotInOverlap { .. })
            ),
            ctx,
        );
    }
    r
}
