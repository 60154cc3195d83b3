use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiclassical")).args(args).output().expect("spawn")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read(dir: &Path, file: &str) -> String {
    std::fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn verify_complex_line_passes_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "--model", "complex-line(2,0)", "--order", "3", "--kladder", "8,16,32,64", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("pass"));
    let csv = read(dir.path(), "verify.csv");
    assert!(csv.starts_with("k,exact,truncated,abs_err\n"));
    assert_eq!(csv.lines().count(), 5);
    let summary: serde_json::Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["report"]["pass"], true);
    assert!(summary["report"]["slope"].as_f64().unwrap() >= 4.5);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["verify", "--model", "t-star-s1", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0);
    }
    for f in ["verify.csv", "summary.json"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
}

#[test]
fn injected_defect_fails_verify() {
    let o = run(&["verify", "--model", "complex-line(2,0)", "--inject-defect", "lambda=3,k=32"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["verify", "--model", "foo"])), 2);
    assert_eq!(code(&run(&["verify", "--model", "t-star-s1", "--kladder", "8,16"])), 2);
    assert_eq!(code(&run(&["verify", "--model", "complex-line(3,0)"])), 2);
    assert_eq!(code(&run(&["em", "halfline", "--w", "3"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["kirillov", "--tol", "-1"])), 2);
}

#[test]
fn mystery_pair_at_hundred() {
    let o = run(&["functoriality", "mystery", "--k", "100"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(10000, 10000)"));
}

#[test]
fn restriction_detects_defect() {
    let o = run(&["functoriality", "restriction", "--k", "10"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = run(&["functoriality", "restriction", "--k", "10", "--inject-defect", "mu=3,k=2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("counterexample: k=2"));
}

#[test]
fn em_tables_are_exact() {
    let o = run(&["em", "fulllattice", "--order", "3"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    for c in ["1/2", "-1/12", "1/720"] {
        assert!(s.contains(c), "{s}");
    }
    let o = run(&["em", "halfline", "--w", "2", "--a", "1", "--order", "3"]);
    assert!(stdout(&o).contains("-7/720"));
}

#[test]
fn kirillov_and_twisted_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["kirillov", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(read(dir.path(), "kirillov.csv").lines().count(), 11);
    assert_eq!(code(&run(&["twisted", "--zeta", "1/2", "--k", "64"])), 0);
    assert_eq!(code(&run(&["twisted", "--model", "complex-line(2,0)", "--zeta", "1/4", "--order", "2"])), 0);
}

#[test]
fn config_file_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "version = 1\ncommand = \"verify\"\nmodel = \"complex-line(2,0)\"\norder = 2\nkladder = [8, 16, 32]\n",
    )
    .unwrap();
    let o = run(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("N=2"));
    assert_eq!(code(&run(&["twisted", "--config", cfg.to_str().unwrap()])), 2);
    std::fs::write(&cfg, "version = 7\n").unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

const LATTICE: &str = r#"format = "piecewise-qp"
version = 1
rank = 1

[[piece]]
coeff = 1
halfspaces = []
qp.period = 1
qp.classes = [{ residues = [0, 0], terms = [{ exp = [0, 0], coeff = "1" }] }]
"#;

#[test]
fn custom_model_file() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("lattice.toml");
    std::fs::write(&full, LATTICE).unwrap();
    let full = full.to_str().unwrap();
    let o = run(&["twisted", "--model-file", full, "--zeta", "1/2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let half = dir.path().join("half.toml");
    std::fs::write(&half, LATTICE.replace("halfspaces = []", "halfspaces = [{ normal = [\"1\"], offset = \"0\" }]")).unwrap();
    assert_eq!(code(&run(&["twisted", "--model-file", half.to_str().unwrap(), "--zeta", "1/2", "--k", "32"])), 1);
    assert_eq!(code(&run(&["verify", "--model-file", full])), 2);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "format = \"other\"\n").unwrap();
    assert_eq!(code(&run(&["twisted", "--model-file", bad.to_str().unwrap()])), 2);
}
