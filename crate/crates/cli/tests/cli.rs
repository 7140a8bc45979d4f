use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinid_cli::parse_spec;

fn spinid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const FIELD_X1: &str = "family = exchange_with_field\ntheta = 0.8, -1.1, 0.5\nmeasurement = X1\n";
const CHAIN_N1: &str = "family = exchange_no_field\nn = 1\ntheta = 1.3\n";

#[test]
fn analyze_field_chain_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "exchange_field_x1.tomlike", FIELD_X1);
    let out = spinid(&["analyze", "--spec", &spec]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("Unidentifiable"));
    let cert_path = dir.path().join("exchange_field_x1.certificate.json");
    assert!(text.contains(&format!("certificate = {}", cert_path.display())));
    let cert = spinid_core::identifiability::CounterexampleCertificate::from_json(
        &fs::read_to_string(cert_path).unwrap(),
    )
    .unwrap();
    assert!(cert.validate().unwrap().passes());
}

#[test]
fn analyze_chain_is_identifiable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "chain.tomlike",
        "family = exchange_no_field\ntheta = 0.4, -1.2, 0.9\n",
    );
    let out = spinid(&["analyze", "--spec", &spec, "--starts", "8"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().next(), Some("Identifiable"));
}

#[test]
fn oracle_check_two_qubit_chain() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "exchange_nofield_n1.tomlike", CHAIN_N1);
    let out = spinid(&["oracle-check", "--spec", &spec, "--tmax", "5"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let first = stdout(&out).lines().next().unwrap().to_string();
    let dev: f64 = first
        .trim_start_matches("max_deviation = ")
        .parse()
        .unwrap();
    assert!(dev <= 1e-9);
}

#[test]
fn identify_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "chain.tomlike",
        "family = exchange_no_field\ntheta = 0.1, 1.5, -0.8, 3.1\nN = 60\nnoise_sigma = 0.001\n",
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = spinid(&[
            "identify",
            "--spec",
            &spec,
            "--seed",
            "7",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    assert!(text.starts_with("param,row,col,coeff,theta_true,theta_hat,"));
    assert_eq!(text.lines().count(), 5);
    let other = spinid(&["identify", "--spec", &spec, "--seed", "8"]);
    assert_ne!(stdout(&other), text);
}

#[test]
fn reproduce_fig2_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = spinid(&[
            "reproduce-fig2",
            "--repeats",
            "5",
            "--seed",
            "42",
            "--grid",
            "10,30",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        fs::read_to_string(p).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "N,mean_rel_error,std_rel_error,repeats,seed");
    assert!(lines[1].starts_with("10,") && lines[1].ends_with(",5,42"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn dump_spec_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.tomlike",
        "# comment\nfamily = exchange-with-field\ntheta = 0.1,0.2, 0.30000000000000004 # trailing\nmeasurement = y1\n",
    );
    let out = spinid(&[
        "identify",
        "--spec",
        &spec,
        "--override",
        "N=30",
        "--dump-spec",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let dumped = stdout(&out);
    let original = parse_spec(&fs::read_to_string(&spec).unwrap()).unwrap();
    let again = parse_spec(&dumped).unwrap();
    assert_eq!(
        again.hamiltonian().unwrap(),
        original.hamiltonian().unwrap()
    );
    assert_eq!(again.samples, 30);
    // Dumping the dump changes nothing.
    let respec = write(dir.path(), "t.tomlike", &dumped);
    let out2 = spinid(&["identify", "--spec", &respec, "--dump-spec"]);
    assert_eq!(stdout(&out2), dumped);
}

fn assert_error(out: &Output, code: i32, kind: &str) {
    assert_eq!(out.status.code(), Some(code), "{}", stderr(out));
    let err = stderr(out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(
        err.starts_with(&format!("error kind={kind} code={code} message=\"")),
        "{err}"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(
        dir.path(),
        "k.tomlike",
        "family = exchange_no_field\ntheta = 1\nsigma = 3\n",
    );
    let out = spinid(&["identify", "--spec", &bad_key]);
    assert_error(&out, 2, "parse");
    assert!(stderr(&out).contains("'sigma'"));

    assert_error(&spinid(&["analyze", "--bogus"]), 2, "parse");

    let mismatch = write(
        dir.path(),
        "m.tomlike",
        "family = exchange_no_field\nn = 2\ntheta = 1\n",
    );
    assert_error(&spinid(&["identify", "--spec", &mismatch]), 3, "dimension");

    let chain = write(
        dir.path(),
        "c.tomlike",
        "family = exchange_no_field\ntheta = 0.5, 0.7\nN = 10\nq = 12\n",
    );
    assert_error(&spinid(&["identify", "--spec", &chain]), 3, "dimension");

    let flat = write(
        dir.path(),
        "f.tomlike",
        "family = exchange_no_field\ntheta = 0.5, 0.7\nN = 200\nq = 200\n",
    );
    assert_error(&spinid(&["identify", "--spec", &flat]), 4, "conditioning");

    let zero = write(
        dir.path(),
        "z.tomlike",
        "family = exchange_with_field\ntheta = 1.0, 0.0, 0.5\n",
    );
    assert_error(
        &spinid(&["analyze", "--spec", &zero, "--method", "construction"]),
        5,
        "atypical",
    );
    let out = spinid(&["analyze", "--spec", &zero, "--starts", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));

    let missing = dir.path().join("nope.tomlike");
    assert_error(
        &spinid(&["identify", "--spec", missing.to_str().unwrap()]),
        1,
        "io",
    );
}

#[test]
fn help_documents_exit_codes() {
    let out = spinid(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in ["2  parse", "3  dimension", "4  conditioning", "5  atypical"] {
        assert!(text.contains(needle), "{text}");
    }
}

#[test]
fn probe_atypical_reports_zero_frequencies() {
    let out = spinid(&["probe-atypical", "--n", "5", "--samples", "2000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.ends_with(" = 0")));
}
