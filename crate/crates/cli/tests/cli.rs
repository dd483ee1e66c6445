//! End-to-end checks of the binary: exit codes, output plumbing, the
//! failure hook, and expression-backed spacetime configs.

use std::io::Write;
use std::process::Command;

use spinor_forge::config::load_custom_spacetime;
use spinor_forge_core::geometry::{Spacetime, Tetrad};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spinor-forge"))
}

fn write_config(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f.flush().unwrap();
    f
}

const SCHWARZSCHILD_CONFIG: &str = "\
name = schwarzschild-custom
coords = t, r, th, ph

[metric]
g00 = 1 - 2/r
g01 = 0
g02 = 0
g03 = 0
g11 = -1/(1 - 2/r)
g12 = 0
g13 = 0
g22 = -r^2
g23 = 0
g33 = -(r*sin(th))^2

[domain]
constraint = r - 2.1
probe = 0, 10, 1.5707963, 0
box = 0 1, 4 50, 0.4 2.74, 0 6.2

[tetrad]
h00 = sqrt(1 - 2/r)
h11 = 1/sqrt(1 - 2/r)
h22 = r
h33 = r*sin(th)
";

#[test]
fn selftest_passes_with_exit_zero() {
    let out = bin()
        .args(["algebra-selftest", "--seed", "3", "--format", "text"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("overall: pass"));
}

#[test]
fn selftest_verdicts_stable_across_seeds() {
    for seed in ["0", "1", "2", "3", "4"] {
        let out = bin()
            .args(["algebra-selftest", "--seed", seed])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "seed {seed}");
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for check in doc["suites"][0]["checks"].as_array().unwrap() {
            assert_eq!(check["verdict"], "pass", "seed {seed}: {check}");
        }
    }
}

#[test]
fn corrupted_product_table_fails_with_exit_one() {
    let out = bin()
        .args(["algebra-selftest", "--corrupt-product-table"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["overall"], "fail");
}

#[test]
fn report_exit_codes_follow_verdicts() {
    let out = bin()
        .args(["report", "--spacetime", "minkowski", "--tetrad", "inertial", "--points", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["classification"], "TELEPARALLEL");
    assert_eq!(doc["overall"], "pass");

    let out = bin()
        .args(["report", "--spacetime", "eds", "--points", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["classification"], "GEODESIC_FERMI");
    assert_eq!(doc["overall"], "fail");
}

#[test]
fn usage_errors_exit_64() {
    let cases: &[&[&str]] = &[
        &["report", "--spacetime", "kerr"],
        &["report", "--spacetime", "minkowski", "--tetrad", "static"],
        &["report"],
        &["report", "--spacetime", "eds", "--points", "0"],
        &["report", "--spacetime", "eds", "--tol-geo", "-1"],
        &["bogus-subcommand"],
        &["report", "--config", "/nonexistent/path.cfg"],
    ];
    for args in cases {
        let out = bin().args(*args).output().unwrap();
        assert_eq!(out.status.code(), Some(64), "args {args:?}: {out:?}");
    }
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn output_file_and_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bin()
        .env("SPINOR_FORGE_THREADS", "1")
        .args([
            "report",
            "--spacetime",
            "minkowski",
            "--points",
            "4",
            "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["config"]["points"], 4);
}

#[test]
fn custom_config_reproduces_builtin_schwarzschild() {
    let f = write_config(SCHWARZSCHILD_CONFIG);
    let loaded = load_custom_spacetime(f.path()).unwrap();
    assert!(loaded.has_custom_tetrad);

    let builtin = Spacetime::schwarzschild(1.0);
    let static_tetrad = Tetrad::schwarzschild_static();
    for x in builtin.sample_points(16, 5) {
        let g_custom = loaded.spacetime.metric(&x).unwrap();
        let g_builtin = builtin.metric(&x).unwrap();
        let h_custom = loaded.tetrad.h(&loaded.spacetime, &x).unwrap();
        let h_builtin = static_tetrad.h(&builtin, &x).unwrap();
        for mu in 0..4 {
            for nu in 0..4 {
                assert!(
                    (g_custom[mu][nu] - g_builtin[mu][nu]).abs() <= 1e-12,
                    "metric at {x:?}"
                );
                assert!(
                    (h_custom[mu][nu] - h_builtin[mu][nu]).abs() <= 1e-12,
                    "tetrad at {x:?}"
                );
            }
        }
        // the finite-difference connection agrees with the analytic one
        let gamma_custom = loaded.spacetime.christoffel(&x).unwrap();
        let gamma_builtin = builtin.christoffel(&x).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    assert!(
                        (gamma_custom[a][b][c] - gamma_builtin[a][b][c]).abs() <= 1e-9,
                        "christoffel at {x:?}"
                    );
                }
            }
        }
    }

    // end to end: same classification and verdicts as the built-in run
    let out = bin()
        .args(["report", "--config", f.path().to_str().unwrap(), "--points", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["classification"], "NONE");
}

#[test]
fn wrong_signature_config_rejected() {
    let cfg = "\
name = broken
[metric]
g00 = -1
g01 = 0
g02 = 0
g03 = 0
g11 = -1
g12 = 0
g13 = 0
g22 = -1
g23 = 0
g33 = -1
[domain]
probe = 0, 0, 0, 0
";
    let f = write_config(cfg);
    let err = load_custom_spacetime(f.path()).unwrap_err();
    assert!(
        err.to_string().contains("signature"),
        "unexpected error: {err}"
    );
    let out = bin()
        .args(["report", "--config", f.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn missing_component_config_rejected() {
    let cfg = "\
name = incomplete
[metric]
g00 = 1
g01 = 0
g02 = 0
g03 = 0
g11 = -1
g12 = 0
g13 = 0
g22 = -1
g23 = 0
[domain]
probe = 0, 0, 0, 0
";
    let f = write_config(cfg);
    let err = load_custom_spacetime(f.path()).unwrap_err();
    assert!(err.to_string().contains("g33"), "unexpected error: {err}");
}

#[test]
fn parse_errors_carry_location() {
    let cfg = "\
name = broken
[metric]
g00 = 1 + @
g01 = 0
g02 = 0
g03 = 0
g11 = -1
g12 = 0
g13 = 0
g22 = -1
g23 = 0
g33 = -1
[domain]
probe = 0, 0, 0, 0
";
    let f = write_config(cfg);
    let err = load_custom_spacetime(f.path()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains(":3:"), "missing line number: {text}");
    assert!(text.contains("column"), "missing column: {text}");
}

/// A weak, slowly varying field leaves every frame residual inside the
/// inconclusive band between tol_geo and ten times tol_geo, which is the
/// exit-code-2 path.
#[test]
fn near_flat_config_reports_inconclusive() {
    let cfg = "\
name = weak-field
coords = t, x, y, z
[metric]
g00 = 1 + 0.00008*sin(x)
g01 = 0
g02 = 0
g03 = 0
g11 = -1
g12 = 0
g13 = 0
g22 = -1
g23 = 0
g33 = -1
[domain]
probe = 0, 0, 0, 0
";
    let f = write_config(cfg);
    let out = bin()
        .args(["report", "--config", f.path().to_str().unwrap(), "--points", "16"])
        .output()
        .unwrap();
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", doc);
    assert_eq!(doc["overall"], "inconclusive");
}
