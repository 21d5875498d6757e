use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_steinlab"));
    c.env_remove("STEINLAB_THREADS");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn classify_fibonacci_at_modulus_100() {
    let dir = tempfile::tempdir().unwrap();
    let fib = write(dir.path(), "fib.json", r#"{"dim":2,"rows":[[1,1],[1,0]]}"#);
    let out = run(&[
        "classify",
        "--matrix",
        fib.to_str().unwrap(),
        "--modulus",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["kind"], "classify");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["payload"]["kind"], "NotSteinBaseOnly");
    assert_eq!(r["payload"]["certified"], true);
}

#[test]
fn classify_identity_at_two_infinity() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", "[[1,0],[0,1]]");
    let out = run(&[
        "classify",
        "--matrix",
        id.to_str().unwrap(),
        "--modulus",
        "2inf",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["payload"]["kind"], "Stein");
}

#[test]
fn usage_and_input_errors_exit_2() {
    let out = run(&["classify", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let singular = write(dir.path(), "s.json", "[[2,0],[0,1]]");
    let out = run(&[
        "classify",
        "--matrix",
        singular.to_str().unwrap(),
        "--modulus",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "classify",
        "--matrix",
        "/nonexistent/m.json",
        "--modulus",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .env("STEINLAB_THREADS", "zero")
        .args(["gaps", "--theta", "x", "--eps", "0.1", "--horizon", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let fib = write(dir.path(), "fib.json", "[[1,1],[1,0]]");
    let args = [
        "witness",
        "--matrix",
        fib.to_str().unwrap(),
        "--horizon",
        "20",
    ];
    let a = run(&args);
    let b = bin()
        .env("STEINLAB_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["payload"]["check"]["valid"], true);
    assert!(r["provenance"].get("wall_time_s").is_none());
    let timed = run(&[
        "witness",
        "--matrix",
        fib.to_str().unwrap(),
        "--horizon",
        "20",
        "--timing",
    ]);
    assert!(report(&timed)["provenance"]["wall_time_s"].is_number());
}

#[test]
fn provenance_hash_tracks_input_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", "[0.25]");
    let b = write(dir.path(), "b.json", "[0.25] ");
    let c = write(dir.path(), "c.json", "[0.25]");
    let hash = |p: &Path| {
        let out = run(&[
            "gaps",
            "--theta",
            p.to_str().unwrap(),
            "--eps",
            "0.5",
            "--horizon",
            "12",
        ]);
        assert_eq!(out.status.code(), Some(0));
        report(&out)["provenance"]["inputs_sha256"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_ne!(hash(&a), hash(&b));
    assert_eq!(hash(&a), hash(&c));
    let out = run(&[
        "gaps",
        "--theta",
        a.to_str().unwrap(),
        "--eps",
        "0.5",
        "--horizon",
        "12",
    ]);
    let r = report(&out);
    assert_eq!(
        r["payload"]["gap_set"]["members"],
        serde_json::json!([0, 4, 8, 12])
    );
}

#[test]
fn sz_margin_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("d2.csv");
    let out = run(&[
        "sz-margin",
        "-d",
        "2",
        "--format",
        "csv",
        "-o",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("poly,house_lo,house_hi,reciprocal,cyclotomic")
    );
    assert!(text.lines().any(|l| l.starts_with("x^2 - 2,")));
    let ckpt = dir.path().join("ckpt");
    let out = run(&[
        "sz-margin",
        "-d",
        "3",
        "--shards",
        "3",
        "--checkpoint",
        ckpt.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["payload"]["argmin_text"], "x^3 + x^2 - 1");
    assert!(ckpt.join("shard-0.json").exists());
}

#[test]
fn domain4_default_and_negative_control() {
    let out = run(&["build-domain4", "--horizon", "3", "--samples", "2"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    assert_eq!(r["payload"]["certified"], true);
    assert_eq!(r["payload"]["j_certificate"]["j"], 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "u.json", "[-10,-40,-60,-60]");
    let out = run(&["build-domain4", "--seed-vector", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis"));
}

#[test]
fn series_and_laurent() {
    let dir = tempfile::tempdir().unwrap();
    let fib = write(dir.path(), "fib.json", "[[1,1],[1,0]]");
    let w = write(dir.path(), "w.json", r#"{"re":0,"im":0}"#);
    let z = write(dir.path(), "z.json", r#"[{"re":1.5,"im":0.5},[0.7,-0.2]]"#);
    let out = run(&[
        "monomial-extend",
        "--matrix",
        fib.to_str().unwrap(),
        "-m",
        "10",
        "-k",
        "1,0",
        "--anchor",
        "0",
        "--eval",
        w.to_str().unwrap(),
        z.to_str().unwrap(),
        "--tol",
        "1e-8",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r = report(&out);
    let v = &r["payload"]["section"]["value"];
    assert!((v[0].as_f64().unwrap() - 1.5).abs() < 1e-8);
    assert!((v[1].as_f64().unwrap() - 0.5).abs() < 1e-8);

    let out = run(&[
        "laurent",
        "--matrix",
        fib.to_str().unwrap(),
        "-m",
        "10",
        "-k",
        "1,0",
        "--w",
        w.to_str().unwrap(),
        "--coeff",
        "1,1",
        "--samples",
        "16",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // g_{1.k}(w̃) = Ω(w̃+1)Δ(w̃+1)/Ω(w̃) = 0.
    let g = &report(&out)["payload"]["coefficient"];
    assert!(g[0].as_f64().unwrap().abs() < 1e-12);

    // Outside the strip |Im w| < m/(4π).
    let far = write(dir.path(), "far.json", "[0, 5]");
    let out = run(&[
        "monomial-extend",
        "--matrix",
        fib.to_str().unwrap(),
        "-m",
        "10",
        "-k",
        "1,0",
        "--eval",
        far.to_str().unwrap(),
        z.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // m·log ρ above 2π².
    let out = run(&[
        "monomial-extend",
        "--matrix",
        fib.to_str().unwrap(),
        "-m",
        "50",
        "-k",
        "1,0",
        "--eval",
        w.to_str().unwrap(),
        z.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn critical_modulus_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let fib = write(dir.path(), "fib.json", "[[1,1],[1,0]]");
    let out = run(&["critical-modulus", "--matrix", fib.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let enc = &r["payload"]["critical_modulus"]["enclosure"];
    let lo = enc[0].as_f64().unwrap();
    assert!((lo - 41.0195).abs() < 1e-3);
    let out = run(&[
        "critical-modulus",
        "--matrix",
        fib.to_str().unwrap(),
        "--format",
        "text",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind = critical-modulus\n"));
    assert!(text.contains("provenance.seed = "));
    let out = run(&[
        "critical-modulus",
        "--matrix",
        fib.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
