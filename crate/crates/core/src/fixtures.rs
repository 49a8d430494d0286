//! Committed prime-field fixtures for the brute-force stability oracle.
//! Regenerate with the `gen_fixtures` example.

use serde::Deserialize;

use crate::error::{AdhmError, Result};
use crate::quiver::{FramedRep, Violated};
use crate::Rational;

const MANIFEST: &str = include_str!("../vectors/bruteforce/manifest.json");

const FILES: &[(&str, &str)] = &[
    (
        "n1_c1_k0.json",
        include_str!("../vectors/bruteforce/n1_c1_k0.json"),
    ),
    (
        "n1_c1_k1.json",
        include_str!("../vectors/bruteforce/n1_c1_k1.json"),
    ),
    (
        "n1_c1_k6.json",
        include_str!("../vectors/bruteforce/n1_c1_k6.json"),
    ),
    (
        "n1_c2_k0.json",
        include_str!("../vectors/bruteforce/n1_c2_k0.json"),
    ),
    (
        "n1_c2_k1.json",
        include_str!("../vectors/bruteforce/n1_c2_k1.json"),
    ),
    (
        "n1_c2_k2.json",
        include_str!("../vectors/bruteforce/n1_c2_k2.json"),
    ),
    (
        "n1_c2_k3.json",
        include_str!("../vectors/bruteforce/n1_c2_k3.json"),
    ),
    (
        "n1_c2_k6.json",
        include_str!("../vectors/bruteforce/n1_c2_k6.json"),
    ),
    (
        "n2_c1_k0.json",
        include_str!("../vectors/bruteforce/n2_c1_k0.json"),
    ),
    (
        "n2_c1_k1.json",
        include_str!("../vectors/bruteforce/n2_c1_k1.json"),
    ),
    (
        "n2_c1_k5.json",
        include_str!("../vectors/bruteforce/n2_c1_k5.json"),
    ),
    (
        "n2_c1_k6.json",
        include_str!("../vectors/bruteforce/n2_c1_k6.json"),
    ),
    (
        "n2_c2_k0.json",
        include_str!("../vectors/bruteforce/n2_c2_k0.json"),
    ),
    (
        "n2_c2_k1.json",
        include_str!("../vectors/bruteforce/n2_c2_k1.json"),
    ),
    (
        "n2_c2_k2.json",
        include_str!("../vectors/bruteforce/n2_c2_k2.json"),
    ),
    (
        "n2_c2_k3.json",
        include_str!("../vectors/bruteforce/n2_c2_k3.json"),
    ),
    (
        "n2_c2_k4.json",
        include_str!("../vectors/bruteforce/n2_c2_k4.json"),
    ),
    (
        "n2_c2_k6.json",
        include_str!("../vectors/bruteforce/n2_c2_k6.json"),
    ),
    (
        "n3_c1_k0.json",
        include_str!("../vectors/bruteforce/n3_c1_k0.json"),
    ),
    (
        "n3_c1_k1.json",
        include_str!("../vectors/bruteforce/n3_c1_k1.json"),
    ),
    (
        "n3_c1_k5.json",
        include_str!("../vectors/bruteforce/n3_c1_k5.json"),
    ),
    (
        "n3_c1_k6.json",
        include_str!("../vectors/bruteforce/n3_c1_k6.json"),
    ),
    (
        "n3_c2_k0.json",
        include_str!("../vectors/bruteforce/n3_c2_k0.json"),
    ),
    (
        "n3_c2_k1.json",
        include_str!("../vectors/bruteforce/n3_c2_k1.json"),
    ),
    (
        "n3_c2_k2.json",
        include_str!("../vectors/bruteforce/n3_c2_k2.json"),
    ),
    (
        "n3_c2_k3.json",
        include_str!("../vectors/bruteforce/n3_c2_k3.json"),
    ),
    (
        "n3_c2_k4.json",
        include_str!("../vectors/bruteforce/n3_c2_k4.json"),
    ),
    (
        "n3_c2_k6.json",
        include_str!("../vectors/bruteforce/n3_c2_k6.json"),
    ),
];

#[derive(Clone, Debug, Deserialize)]
struct Manifest {
    p: u64,
    fixtures: Vec<Entry>,
}

#[derive(Clone, Debug, Deserialize)]
struct Entry {
    file: String,
    n: usize,
    c: usize,
    semistable: bool,
    violation: Option<((usize, usize), Violated)>,
    construction: String,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub p: u64,
    pub rep: FramedRep<Rational>,
    /// Verdict recorded by enumeration when the fixture was generated.
    pub semistable: bool,
    pub violation: Option<((usize, usize), Violated)>,
    pub construction: String,
}

pub fn bruteforce_fixtures() -> Result<Vec<Fixture>> {
    let manifest: Manifest =
        serde_json::from_str(MANIFEST).map_err(|e| AdhmError::Parse(e.to_string()))?;
    manifest
        .fixtures
        .into_iter()
        .map(|entry| {
            let text = FILES
                .iter()
                .find(|(name, _)| *name == entry.file)
                .map(|(_, text)| *text)
                .ok_or_else(|| {
                    AdhmError::Parse(format!("fixture {} is not embedded", entry.file))
                })?;
            let rep: FramedRep<Rational> =
                serde_json::from_str(text).map_err(|e| AdhmError::Parse(e.to_string()))?;
            rep.validate()?;
            if (rep.n, rep.v0) != (entry.n, entry.c) {
                return Err(AdhmError::Parse(format!(
                    "fixture {} disagrees with the manifest",
                    entry.file
                )));
            }
            Ok(Fixture {
                name: entry.file,
                p: manifest.p,
                rep,
                semistable: entry.semistable,
                violation: entry.violation,
                construction: entry.construction,
            })
        })
        .collect()
}
