//! Regenerates the prime-field brute-force fixtures under `vectors/bruteforce`.
//!
//! Candidates are integer representations built in chart 0, where
//! `A₁ = AB`, `A₂ = A`, `C_{p+1} = BᵖEA⁻¹` with `A` unimodular. Each
//! candidate is reduced mod 5 and its enumerated verdict is compared with the
//! spectral verdict over ℚ. Only agreeing candidates are kept; any
//! disagreement is printed.
//!
//! Run with `cargo run -p adhm-core --release --example gen_fixtures`.

use std::fs;
use std::path::Path;

use adhm_core::quiver::{
    brute_force_semistable, check_relations, check_semistable_spectral, reduce_mod_p, FramedRep,
    StabilityParams, Verdict, DEFAULT_BUDGET,
};
use adhm_core::{QMatrix, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const P: u64 = 5;

fn q(rows: &[&[i64]]) -> QMatrix {
    QMatrix::from_int_rows(rows)
}

fn unimodular(c: usize, rng: &mut ChaCha8Rng) -> (QMatrix, QMatrix) {
    if c == 1 {
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        return (q(&[&[s]]), q(&[&[s]]));
    }
    let t = rng.gen_range(-2..=2);
    let u = rng.gen_range(-1..=1);
    // [[1, t], [0, 1]] · [[1, 0], [u, 1]]
    let a = q(&[&[1 + t * u, t], &[u, 1]]);
    let ainv = q(&[&[1, -t], &[-u, 1 + t * u]]);
    (a, ainv)
}

fn build(
    n: usize,
    a: &QMatrix,
    ainv: &QMatrix,
    b: &QMatrix,
    e_m: &QMatrix,
    e: &QMatrix,
    f: Vec<QMatrix>,
) -> FramedRep<Rational> {
    let tail = e_m * ainv;
    let cs = (0..n).map(|p| &b.pow(p) * &tail).collect();
    FramedRep::new(a * b, a.clone(), cs, e.clone(), f).unwrap()
}

/// Framing forced by `f_q e = C_{q+1}A₂ − C_qA₁`, read off against a vector
/// `x` with `e·x = 1`.
fn forced_framing(r: &FramedRep<Rational>, x: &QMatrix) -> Vec<QMatrix> {
    (0..r.n - 1)
        .map(|k| &(&(&r.cs[k + 1] * &r.a2) - &(&r.cs[k] * &r.a1)) * x)
        .collect()
}

fn candidate(
    kind: usize,
    n: usize,
    c: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(FramedRep<Rational>, &'static str)> {
    let (a, ainv) = unimodular(c, rng);
    let mut small = |lo: i64, hi: i64| rng.gen_range(lo..=hi);
    let zero_f = |c: usize| vec![QMatrix::zeros(c, 1); n - 1];
    match kind {
        // distinct integer points with a generic framing
        0 => {
            let (x0, x1) = (small(-2, 2), small(-2, 2));
            let (y0, y1) = (small(-2, 2), small(-2, 2));
            let b = QMatrix::diag(
                &[
                    Rational::from_integer(x0.into()),
                    Rational::from_integer(x1.into()),
                ][..c],
            );
            let e_m = QMatrix::diag(
                &[
                    Rational::from_integer(y0.into()),
                    Rational::from_integer(y1.into()),
                ][..c],
            );
            let e = q(&[&[1, 1][..c]]);
            Some((
                build(n, &a, &ainv, &b, &e_m, &e, zero_f(c)),
                "diagonal chart data, framing (1,…,1)",
            ))
        }
        // framing annihilates a joint eigenvector
        1 => {
            let (x0, x1) = (small(-2, 2), small(-2, 2));
            let b = QMatrix::diag(
                &[
                    Rational::from_integer(x0.into()),
                    Rational::from_integer(x1.into()),
                ][..c],
            );
            let e_m = b.scale(&Rational::from_integer(small(-2, 2).into()));
            let e = if c == 1 { q(&[&[0]]) } else { q(&[&[0, 1]]) };
            Some((
                build(n, &a, &ainv, &b, &e_m, &e, zero_f(c)),
                "framing kills a joint eigenvector",
            ))
        }
        // a Jordan block whose framing kills its eigenvector
        2 if c == 2 => {
            let z = small(-2, 2);
            let b = q(&[&[z, 1], &[0, z]]);
            let (p0, p1) = (small(-2, 2), small(-2, 2));
            let e_m = &QMatrix::scalar(2, Rational::from_integer(p0.into()))
                + &b.scale(&Rational::from_integer(p1.into()));
            let e = q(&[&[0, 1]]);
            Some((
                build(n, &a, &ainv, &b, &e_m, &e, zero_f(c)),
                "framing kills the eigenvector of a Jordan block",
            ))
        }
        // a Jordan block framed nonzero on its eigenvector
        3 if c == 2 => {
            let z = small(-2, 2);
            let b = q(&[&[z, 1], &[0, z]]);
            let e_m = b.scale(&Rational::from_integer(small(1, 2).into()));
            let e = q(&[&[1, 0]]);
            Some((
                build(n, &a, &ainv, &b, &e_m, &e, zero_f(c)),
                "Jordan block, framing nonzero on its eigenvector",
            ))
        }
        // rank-one commutator [B, E] = u e with nonzero framing
        4 if c == 2 && n >= 2 => {
            let b = q(&[&[small(-2, 2), small(-2, 2)], &[0, small(-2, 2)]]);
            let e_m = q(&[&[small(-2, 2), small(-2, 2)], &[0, small(-2, 2)]]);
            let e = q(&[&[0, 1]]);
            let mut r = build(n, &a, &ainv, &b, &e_m, &e, zero_f(c));
            r.f = forced_framing(&r, &q(&[&[0], &[1]]));
            if r.framing_is_zero() {
                return None;
            }
            Some((r, "rank-one commutator, nonzero framing"))
        }
        // c = 1 with e = 0 leaves f free
        5 if c == 1 && n >= 2 => {
            let b = q(&[&[small(-2, 2)]]);
            let e_m = q(&[&[small(-2, 2)]]);
            let e = q(&[&[0]]);
            let f = (0..n - 1).map(|_| q(&[&[small(1, 3)]])).collect();
            Some((
                build(n, &a, &ainv, &b, &e_m, &e, f),
                "zero e, nonzero framing",
            ))
        }
        // zero arrows with nonzero e
        6 => {
            let z = QMatrix::zeros(c, c);
            let e = q(&[&[1, 2][..c]]);
            let r = FramedRep::new(z.clone(), z.clone(), vec![z; n], e, zero_f(c)).unwrap();
            Some((r, "zero pencil"))
        }
        _ => None,
    }
}

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("vectors/bruteforce");
    fs::create_dir_all(&dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20240);
    let mut manifest = Vec::new();
    let mut seen = Vec::new();
    let mut disagreements = 0;
    for n in 1..=3usize {
        for c in 1..=2usize {
            for kind in 0..7 {
                let mut kept = 0;
                for _ in 0..200 {
                    if kept == 1 {
                        break;
                    }
                    let Some((r, note)) = candidate(kind, n, c, &mut rng) else {
                        continue;
                    };
                    assert!(
                        check_relations(&r, 0.0),
                        "construction breaks the relations"
                    );
                    let spectral = match check_semistable_spectral(&r, 0.0) {
                        Ok(Verdict::Indeterminate) | Err(_) => continue,
                        Ok(v) => v == Verdict::Semistable,
                    };
                    let Some(rp) = reduce_mod_p::<P>(&r) else {
                        continue;
                    };
                    let brute =
                        brute_force_semistable(&rp, StabilityParams::for_c(c), DEFAULT_BUDGET)
                            .unwrap();
                    if brute.semistable != spectral {
                        disagreements += 1;
                        println!("disagreement n={n} c={c} ({note}): spectral {spectral}, F_{P} {brute:?}");
                        println!("{}", serde_json::to_string(&r).unwrap());
                        continue;
                    }
                    let text = serde_json::to_string(&r).unwrap();
                    if seen.contains(&text) {
                        continue;
                    }
                    seen.push(text.clone());
                    let name = format!("n{n}_c{c}_k{kind}.json");
                    fs::write(dir.join(&name), format!("{text}\n")).unwrap();
                    manifest.push(json!({
                        "file": name,
                        "p": P,
                        "n": n,
                        "c": c,
                        "semistable": brute.semistable,
                        "violation": brute.violation,
                        "construction": note,
                    }));
                    kept += 1;
                }
            }
        }
    }
    let doc = json!({
        "p": P,
        "generator": "examples/gen_fixtures.rs, seed 20240",
        "fixtures": manifest,
    });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&doc).unwrap() + "\n",
    )
    .unwrap();
    println!(
        "{} fixtures, {disagreements} disagreements",
        doc["fixtures"].as_array().unwrap().len()
    );
}
