use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use qrom::cli::{run_with, EXIT_IO, EXIT_OK, EXIT_PARAMS, EXIT_VERIFY};

fn qrom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrom"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_table(dir: &Path, name: &str, n: u64, b: u32) -> String {
    let mut text = format!("# sample\n{n} {b}\n");
    for x in 0..n {
        text.push_str(&format!("{}\n", (x * 11 + 3) % (1 << b)));
    }
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn build_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), "t.txt", 64, 8);
    let out = dir.path().join("c.txt");
    let o = qrom(&[
        "build",
        "--table",
        &table,
        "--lambda",
        "4",
        "--mu",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let s = stdout(&o);
    assert!(s.contains("toffoli=115\n"), "{s}");
    assert!(s.contains("qubits_dirty=6\n"));
    assert!(s.contains("qubits_work=4\n"));
    assert!(fs::read_to_string(out)
        .unwrap()
        .starts_with("REGISTER ctrl 1 control\n"));
}

#[test]
fn parameter_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), "t.txt", 64, 8);
    let out = dir.path().join("c.txt");
    let out = out.to_str().unwrap();

    let o = qrom(&[
        "build", "--table", &table, "--lambda", "3", "--mu", "2", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));
    assert!(String::from_utf8_lossy(&o.stderr).contains("power of two"));
    let o = qrom(&[
        "build", "--table", &table, "--lambda", "64", "--mu", "2", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));
    let o = qrom(&[
        "build", "--table", &table, "--lambda", "4", "--mu", "9", "--out", out,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));

    let missing = dir.path().join("missing.txt");
    let o = qrom(&[
        "build",
        "--table",
        missing.to_str().unwrap(),
        "--lambda",
        "4",
        "--mu",
        "2",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_IO));

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "3 2\n1\n7\n0\n").unwrap();
    let o = qrom(&[
        "build",
        "--table",
        bad.to_str().unwrap(),
        "--lambda",
        "2",
        "--mu",
        "1",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_IO));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(qrom(&["frobnicate"]).status.code(), Some(EXIT_PARAMS));
}

#[test]
fn verify_detects_injected_fault() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), "t.txt", 100, 5);
    let circuit = dir.path().join("c.txt");
    let c = circuit.to_str().unwrap();
    let o = qrom(&[
        "build", "--table", &table, "--lambda", "4", "--mu", "2", "--out", c,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let o = qrom(&["verify", "--table", &table, "--circuit", c]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).starts_with("cases_run=1000\nfailures=0\n"));

    let mut text = fs::read_to_string(&circuit).unwrap();
    text.push_str("X out 0\n");
    fs::write(&circuit, text).unwrap();
    let o = qrom(&["verify", "--table", &table, "--circuit", c]);
    assert_eq!(o.status.code(), Some(EXIT_VERIFY));
    assert!(stdout(&o).contains("first_failure: x=0"), "{}", stdout(&o));

    // a fault on a dirty qubit shows up as a restoration failure
    let o = qrom(&[
        "build", "--table", &table, "--lambda", "4", "--mu", "2", "--out", c,
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let mut text = fs::read_to_string(&circuit).unwrap();
    text.push_str("CNOT q 0 dirty 3\n");
    fs::write(&circuit, text).unwrap();
    let o = qrom(&["verify", "--table", &table, "--circuit", c]);
    assert_eq!(o.status.code(), Some(EXIT_VERIFY));
    assert!(stdout(&o).contains("dirty qubit(s) not restored"));
}

#[test]
fn verify_builds_each_construction() {
    let dir = tempfile::tempdir().unwrap();
    let table = write_table(dir.path(), "t.txt", 33, 4);
    for args in [
        vec!["--lambda", "8", "--mu", "3"],
        vec!["--lambda", "4", "--baseline", "selectswap"],
        vec!["--baseline", "plain"],
    ] {
        let mut full = vec!["verify", "--table", &table, "--trials", "4", "--seed", "9"];
        full.extend(args.iter().copied());
        let o = qrom(&full);
        assert_eq!(o.status.code(), Some(EXIT_OK), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("cases_run=132\n"));
    }
    let o = qrom(&["verify", "--table", &table, "--baseline", "selectswap"]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));
}

#[test]
fn estimate_reports_methods_and_optimum() {
    let o = qrom(&[
        "estimate",
        "--n",
        "64",
        "--b",
        "8",
        "--lambda",
        "4",
        "--mu",
        "8",
        "--all-methods",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let s = stdout(&o);
    let row = |name: &str| -> Vec<String> {
        s.lines()
            .find(|l| l.split_whitespace().next() == Some(name))
            .unwrap_or_else(|| panic!("{name} missing:\n{s}"))
            .split_whitespace()
            .map(str::to_owned)
            .collect()
    };
    assert_eq!(row("bit_packet")[1], "82");
    assert_eq!(row("berry")[1], "128");
    assert_eq!(row("low_dirty")[1], "160");
    assert_eq!(row("low_clean")[1], "48");
    assert_eq!(row("uncompute_prior")[1], "48");

    let o = qrom(&["estimate", "--n", "1048576", "--b", "8", "--budget", "31"]);
    assert_eq!(
        stdout(&o),
        "optimum: lambda=32 mu=1 toffoli=295452 dirty=31 budget=31\n"
    );
    let o = qrom(&["estimate", "--n", "64", "--b", "8", "--budget", "0"]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    assert!(stdout(&o).contains("infeasible") && stdout(&o).contains("toffoli=63"));
    let o = qrom(&["estimate", "--n", "64", "--b", "8"]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));
}

#[test]
fn sweep_writes_csv() {
    let o = qrom(&[
        "sweep", "--b", "8", "--budget", "31", "--n-min", "1048576", "--n-max", "1048576",
        "--points", "1",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_OK));
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(
        lines.next(),
        Some("N,berry,alpha1,alphab,best,lambda,mu,improvement")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    let improvement: f64 = fields[7].parse().unwrap();
    assert!((improvement - 1.775).abs() < 0.005);

    let o = qrom(&[
        "sweep",
        "--b",
        "64",
        "--budget",
        "255",
        "--n-min",
        "1073741824",
        "--n-max",
        "1073741824",
        "--points",
        "1",
    ]);
    let last = stdout(&o).lines().nth(1).unwrap().to_owned();
    let improvement: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!((improvement - 1.969).abs() < 0.005);

    let o = qrom(&[
        "sweep", "--b", "8", "--budget", "31", "--n-min", "16", "--n-max", "4096", "--points", "0",
    ]);
    assert_eq!(o.status.code(), Some(EXIT_PARAMS));
}

#[test]
fn sweep_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = qrom(&[
            "sweep",
            "--b",
            "8",
            "--budget",
            "31",
            "--n-min",
            "16",
            "--n-max",
            "1048576",
            "--points",
            "40",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(EXIT_OK));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let ns: Vec<u64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ns.first(), Some(&16));
    assert_eq!(ns.last(), Some(&1048576));
    assert!(ns.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn in_process_entry_point() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with(
        [
            "qrom", "estimate", "--n", "100", "--b", "5", "--lambda", "4", "--mu", "2",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, EXIT_OK);
    let text = String::from_utf8(out).unwrap();
    assert!(
        text.lines().nth(1).unwrap().split_whitespace().nth(1) == Some("125"),
        "{text}"
    );
    let code = run_with(["qrom", "--help"], &mut Vec::new(), &mut err);
    assert_eq!(code, EXIT_OK);
}
