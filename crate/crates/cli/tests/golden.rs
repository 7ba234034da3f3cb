//! Golden outputs for the command-line surface. Set `QDHA_BLESS=1` to
//! rewrite the files under `tests/golden/`.

use std::path::{Path, PathBuf};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn data(name: &str) -> String {
    root().join("data").join(name).to_string_lossy().into_owned()
}

fn golden(name: &str, args: &[&str], code: i32) {
    let mut argv = vec!["qdha".to_string()];
    argv.extend(args.iter().map(|a| a.to_string()));
    let out = qdha_cli::run(argv);
    assert_eq!(out.code, code, "exit code for {args:?}; stderr: {}", out.stderr);
    let path: PathBuf = root().join("golden").join(name);
    if std::env::var_os("QDHA_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &out.stdout).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(Path::new(&path))
        .unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out.stdout, expected, "output of {args:?} differs from {name}");
}

#[test]
fn check_cyclic() {
    golden("check_cyclic3.txt", &["check", &data("cyclic3.qdh")], 0);
    golden("check_cyclic3.json", &["--json", "check", &data("cyclic3.qdh")], 0);
}

#[test]
fn cocycles_cyclic() {
    golden("cocycles_cyclic3.json", &["cocycles", "--json", &data("cyclic3.qdh")], 0);
}

#[test]
fn pbw_verdicts() {
    golden("pbw_cyclic3.txt", &["pbw", &data("cyclic3.qdh")], 0);
    golden("pbw_cyclic3_bad.json", &["--json", "pbw", &data("cyclic3_bad.qdh")], 1);
    golden("pbw_s3_mixed.txt", &["pbw", &data("s3_mixed.qdh")], 1);
}

#[test]
fn multiplication() {
    golden("mul_v2_v1.txt", &["mul", &data("cyclic3.qdh"), "v2", "v1"], 0);
    golden(
        "mul_cubic.json",
        &["--json", "mul", &data("cyclic3.qdh"), "v3*v2", "v2*v1 + 1/2*g"],
        0,
    );
    golden(
        "mul_cubic_tcap0.txt",
        &["mul", &data("cyclic3.qdh"), "v3*v2", "v2*v1 + 1/2*g", "--tcap", "0"],
        0,
    );
}

#[test]
fn mul_refuses_non_pbw_kappa() {
    let out = qdha_cli::run(["qdha", "mul", &data("cyclic3_bad.qdh"), "v1", "v2"]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("PBW"));
}

#[test]
fn diagonal_hochschild() {
    golden(
        "diag_hh_cyclic3.json",
        &["--json", "diag-hh", &data("cyclic3.qdh"), "--degree", "2", "--polycap", "0"],
        0,
    );
}

#[test]
fn classify_families() {
    golden("classify_s3.json", &["--json", "classify", "--family", "natural", "--m", "1", "--n", "3"], 0);
    golden("classify_g222.txt", &["classify", "--family", "natural", "--m", "2", "--p", "2", "--n", "2"], 0);
    golden("classify_sym22.txt", &["classify", "--family", "symplectic", "--m", "2", "--n", "2"], 0);
    golden("classify_diag332.json", &["--json", "classify", "--family", "diagonal", "--m", "3", "--p", "3", "--n", "2"], 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["qdha", "--json", "classify", "--family", "natural", "--m", "2", "--n", "3"];
    let a = qdha_cli::run(args);
    let b = qdha_cli::run(args);
    let c = qdha_cli::run(["qdha", "--threads", "1", "--json", "classify", "--family", "natural", "--m", "2", "--n", "3"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}
