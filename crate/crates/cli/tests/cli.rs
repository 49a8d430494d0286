use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn adhm(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_adhm"))
        .args(args)
        .env_remove("ADHM_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&o.stdout)
        )
    })
}

fn entries(m: &Value) -> Vec<Value> {
    m["entries"].as_array().unwrap().clone()
}

fn check(data: &[u8], which: &str, backend: &str) -> (i32, Value) {
    let o = adhm(
        &["check", "--which", which, "--backend", backend],
        Some(data),
    );
    (code(&o), json(&o))
}

fn tally(report: &Value, name: &str) -> (u64, u64) {
    let t = &report["checks"][name];
    (t["pass"].as_u64().unwrap(), t["fail"].as_u64().unwrap())
}

#[test]
fn single_origin_point_has_zero_c() {
    let o = adhm(
        &[
            "gen", "--kind", "points", "--n", "2", "--c", "1", "--points", "0,0",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let d = json(&o);
    assert_eq!(d["c"], 1);
    assert_eq!(d["C"].as_array().unwrap().len(), 2);
    for c in d["C"].as_array().unwrap() {
        for z in entries(c) {
            assert_eq!(z, serde_json::json!([0.0, 0.0]));
        }
    }
    // the point (0, 0) gives B = E = 0, A₂ = 1, so A₁ = 0 and e = 1
    assert_eq!(entries(&d["A1"])[0], serde_json::json!([0.0, 0.0]));
    assert_eq!(entries(&d["A2"])[0], serde_json::json!([1.0, 0.0]));
}

#[test]
fn same_seed_same_bytes() {
    for kind in ["random-costable", "random-rep", "points"] {
        let args = [
            "gen", "--kind", kind, "--n", "3", "--c", "3", "--m", "1", "--seed", "42",
        ];
        let a = adhm(&args, None);
        let b = adhm(&args, None);
        assert_eq!(
            code(&a),
            0,
            "{kind}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        assert_eq!(a.stdout, b.stdout, "{kind}");
    }
    let a = adhm(
        &[
            "gen",
            "--kind",
            "random-costable",
            "--c",
            "3",
            "--seed",
            "1",
        ],
        None,
    );
    let b = adhm(
        &[
            "gen",
            "--kind",
            "random-costable",
            "--c",
            "3",
            "--seed",
            "2",
        ],
        None,
    );
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["gen", "--c", "0"][..],
        &["gen", "--n", "0", "--c", "1"],
        &["gen", "--kind", "nonsense"],
        &["gen", "--points", "1;2"],
        &["gen", "--points", "1,1;1,1"],
        &["gen", "--c", "2", "--m", "3"],
        &["gen", "--c", "3", "--points", "1,1"],
        &["gen", "--backend", "gf:17", "--points", "1,1"],
        &["gen", "--backend", "gf:4", "--points", "1,1"],
        &["gen", "--kind", "random-rep", "--n", "1"],
        &["campaign", "no-such-suite"],
        &["check", "--which", "X"],
    ] {
        assert_eq!(code(&adhm(args, None)), 2, "{args:?}");
    }
    let o = adhm(&["check", "--which", "P"], Some(b"{not json"));
    assert_eq!(code(&o), 2);
}

#[test]
fn retry_exhaustion_exits_three() {
    let o = adhm(
        &[
            "gen",
            "--kind",
            "random-costable",
            "--c",
            "2",
            "--retries",
            "0",
        ],
        None,
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_adhm"))
        .args(["gen", "--points", "1,1"])
        .env("ADHM_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_adhm"))
        .args(["gen", "--points", "1,1", "--tol", "1e-8"])
        .env("ADHM_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "the flag takes precedence");
}

#[test]
fn point_data_passes_p_and_zeroed_e_fails_p3() {
    let o = adhm(
        &[
            "gen",
            "--n",
            "2",
            "--m",
            "1",
            "--points",
            "1,2;3,-1+i;-2i,0.5",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let (c, r) = check(&o.stdout, "P", "complex");
    assert_eq!(c, 0);
    for name in ["P1", "P2", "P3"] {
        assert_eq!(tally(&r, name), (1, 0), "{name}");
    }

    let mut d = json(&o);
    let k = entries(&d["e"]).len();
    d["e"]["entries"] = Value::Array(vec![serde_json::json!([0.0, 0.0]); k]);
    let (c, r) = check(d.to_string().as_bytes(), "P", "complex");
    assert_eq!(c, 1);
    assert_eq!(tally(&r, "P1"), (1, 0));
    assert_eq!(tally(&r, "P3"), (0, 1));
    assert!(r["failures"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f.as_str().unwrap().starts_with("P3")));
}

#[test]
fn file_input_matches_stdin() {
    let o = adhm(
        &[
            "gen",
            "--kind",
            "random-costable",
            "--n",
            "2",
            "--c",
            "2",
            "--seed",
            "9",
        ],
        None,
    );
    let path = std::env::temp_dir().join(format!("adhm-cli-test-{}.json", std::process::id()));
    std::fs::write(&path, &o.stdout).unwrap();
    let from_file = adhm(&["check", path.to_str().unwrap(), "--which", "P"], None);
    std::fs::remove_file(&path).unwrap();
    let (c, from_stdin) = check(&o.stdout, "P", "complex");
    assert_eq!(c, 0);
    assert_eq!(json(&from_file)["checks"], from_stdin["checks"]);
}

fn zero_rep(backend: &str, entry: Value, one: Value) -> Vec<u8> {
    let m =
        |x: &Value| serde_json::json!({"backend": backend, "rows": 1, "cols": 1, "entries": [x]});
    serde_json::json!({
        "n": 2, "v0": 1, "v1": 1, "w": 1,
        "A1": m(&entry), "A2": m(&entry),
        "C": [m(&entry), m(&entry)],
        "e": m(&one),
        "f": [m(&entry)],
    })
    .to_string()
    .into_bytes()
}

#[test]
fn zero_rep_satisfies_relations_but_is_unstable() {
    let cases = [
        (
            "complex",
            "complex",
            serde_json::json!([0.0, 0.0]),
            serde_json::json!([1.0, 0.0]),
        ),
        (
            "rational",
            "rational",
            serde_json::json!("0"),
            serde_json::json!("1"),
        ),
        ("gf(5)", "gf:5", serde_json::json!(0), serde_json::json!(1)),
    ];
    for (tag, flag, zero, one) in cases {
        let (c, r) = check(&zero_rep(tag, zero, one), "Q", flag);
        assert_eq!(c, 1, "{flag}");
        assert_eq!(tally(&r, "relations"), (1, 0), "{flag}");
        assert_eq!(tally(&r, "semistable"), (0, 1), "{flag}");
    }
}

#[test]
fn plane_and_monad_outputs_check() {
    let plane = adhm(
        &[
            "gen",
            "--backend",
            "rational",
            "--points",
            "1/2,3;2,-1",
            "--emit",
            "plane",
        ],
        None,
    );
    assert_eq!(code(&plane), 0);
    let (c, r) = check(&plane.stdout, "T", "rational");
    assert_eq!(c, 0);
    assert_eq!(tally(&r, "T1"), (1, 0));
    assert_eq!(tally(&r, "T2"), (1, 0));

    let monad = adhm(
        &[
            "gen",
            "--backend",
            "rational",
            "--n",
            "3",
            "--points",
            "1,0;0,1",
            "--emit",
            "monad",
        ],
        None,
    );
    assert_eq!(code(&monad), 0);
    let (c, _) = check(&monad.stdout, "monad", "rational");
    assert_eq!(c, 0);

    // breaking commutativity shows up in the composition
    let mut d = json(&plane);
    d["b1"]["entries"][1] = serde_json::json!("1");
    let (c, r) = check(d.to_string().as_bytes(), "T", "rational");
    assert_eq!(c, 1);
    assert_eq!(tally(&r, "T1"), (0, 1));
}

#[test]
fn random_rep_has_nonzero_framing_and_fails_stability() {
    let o = adhm(
        &[
            "gen",
            "--kind",
            "random-rep",
            "--n",
            "2",
            "--c",
            "2",
            "--seed",
            "3",
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    let (c, r) = check(&o.stdout, "Q", "complex");
    assert_eq!(c, 1);
    assert_eq!(tally(&r, "relations"), (1, 0));
    assert_eq!(tally(&r, "semistable"), (0, 1));
}

#[test]
fn campaigns_report_and_pass() {
    for suite in [
        "cocycle",
        "lmp3",
        "moment",
        "um",
        "bruteforce",
        "monad-transition",
    ] {
        let o = adhm(&["campaign", suite, "--samples", "10", "--seed", "7"], None);
        assert_eq!(
            code(&o),
            0,
            "{suite}: {}",
            String::from_utf8_lossy(&o.stdout)
        );
        let r = json(&o);
        assert_eq!(r["seed"], 7);
        assert!(r["command"]
            .as_str()
            .unwrap()
            .starts_with(&format!("campaign {suite}")));
        assert!(r["failures"].as_array().unwrap().is_empty());
    }
    let o = adhm(
        &["campaign", "moment", "--samples", "20", "--seed", "1"],
        None,
    );
    let r = json(&o);
    for (_, v) in r["max_residuals"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn campaign_tallies_do_not_depend_on_jobs() {
    let strip = |o: &Output| {
        let mut r = json(o);
        r.as_object_mut().unwrap().remove("elapsed_ms");
        r.as_object_mut().unwrap().remove("command");
        r
    };
    let a = adhm(
        &[
            "campaign",
            "cocycle",
            "--samples",
            "12",
            "--seed",
            "4",
            "--jobs",
            "1",
        ],
        None,
    );
    let b = adhm(
        &[
            "campaign",
            "cocycle",
            "--samples",
            "12",
            "--seed",
            "4",
            "--jobs",
            "3",
        ],
        None,
    );
    assert_eq!(strip(&a), strip(&b));
}
