use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fraclap_core::kernelnd::{build_kernel_table, KernelOrder, KernelTable};
use fraclap_core::operators::{
    apply_with, KernelSource, KernelSourceKind, OperatorKind, OperatorSpec, Window,
};
use fraclap_core::{GridFunction, LatticePoint, QuadratureConfig};
use tempfile::TempDir;

fn fraclap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(args)
        .current_dir(dir)
        .env_remove("FRACLAP_QUAD_TOL")
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_delta(dir: &Path, dimension: usize) -> String {
    let f = GridFunction::delta(dimension, LatticePoint::origin(dimension));
    let path = dir.join(format!("delta{dimension}.json"));
    fs::write(&path, f.to_json()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn kernel_table_one_dimension() {
    let dir = TempDir::new().unwrap();
    let out = fraclap(
        &[
            "kernel", "--dim", "1", "--s", "0.5", "--radius", "10", "--output", "k.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("21 entries"));
    let table =
        KernelTable::from_json(&fs::read_to_string(dir.path().join("k.json")).unwrap()).unwrap();
    let k1 = table.get(&LatticePoint::new(vec![1])).unwrap();
    assert!((k1 - 4.0 / (3.0 * std::f64::consts::PI)).abs() < 1e-12);
}

#[test]
fn kernel_table_zero_order_is_symmetric() {
    let dir = TempDir::new().unwrap();
    let out = fraclap(
        &[
            "kernel",
            "--dim",
            "2",
            "--zero-order",
            "--radius",
            "5",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("m_1,m_2,value"));
    let rows: Vec<(i64, i64, String)> = lines
        .map(|l| {
            let mut it = l.split(',');
            (
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().parse().unwrap(),
                it.next().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 121);
    let lookup = |a: i64, b: i64| {
        rows.iter()
            .find(|r| r.0 == a && r.1 == b)
            .unwrap()
            .2
            .clone()
    };
    assert_eq!(lookup(0, 0).parse::<f64>().unwrap(), 0.0);
    assert_eq!(lookup(2, -3), lookup(-3, 2));
    assert_eq!(lookup(1, 4), lookup(-4, -1));
}

#[test]
fn kernel_rejects_bad_flags() {
    let dir = TempDir::new().unwrap();
    let out = fraclap(
        &["kernel", "--dim", "1", "--s", "1.5", "--radius", "4"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--s"));
    assert_eq!(
        code(&fraclap(
            &["kernel", "--dim", "0", "--s", "0.5", "--radius", "4"],
            dir.path()
        )),
        2
    );
    assert_eq!(
        code(&fraclap(
            &["kernel", "--dim", "1", "--radius", "4"],
            dir.path()
        )),
        2
    );
}

#[test]
fn quadrature_tolerance_flag_and_environment() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        code(&fraclap(
            &["--quad-tol", "-1", "rho", "--dim", "2"],
            dir.path()
        )),
        2
    );
    let from_env = Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(["rho", "--dim", "2"])
        .env("FRACLAP_QUAD_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&from_env), 0);
    assert!(String::from_utf8_lossy(&from_env.stdout).contains("rel_tol 1e-6"));
    let bad_env = Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(["rho", "--dim", "2"])
        .env("FRACLAP_QUAD_TOL", "tight")
        .output()
        .unwrap();
    assert_eq!(code(&bad_env), 2);
}

#[test]
fn apply_log_laplacian_to_delta() {
    let dir = TempDir::new().unwrap();
    let input = write_delta(dir.path(), 1);
    let out = fraclap(
        &[
            "apply",
            &input,
            "--op",
            "log-laplacian",
            "--radius",
            "12",
            "-o",
            "out.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("tail bound"));
    let g =
        GridFunction::from_json(&fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(g.get(&LatticePoint::new(vec![0])), 0.0);
    for n in 1..=12i64 {
        assert_eq!(g.get(&LatticePoint::new(vec![n])), -1.0 / n as f64);
        assert_eq!(g.get(&LatticePoint::new(vec![-n])), -1.0 / n as f64);
    }
}

#[test]
fn apply_with_spectral_comparison() {
    let dir = TempDir::new().unwrap();
    let input = write_delta(dir.path(), 1);
    let out = fraclap(
        &[
            "apply",
            &input,
            "--op",
            "fractional",
            "--s",
            "0.5",
            "--radius",
            "20",
            "--spectral",
            "-o",
            "o.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    let gap: f64 = stdout
        .split("max gap ")
        .nth(1)
        .and_then(|rest| rest.split(',').next())
        .and_then(|v| v.parse().ok())
        .expect("gap is reported");
    assert!(gap < 1e-8, "{stdout}");
}

#[test]
fn apply_rejects_malformed_json_with_position() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(
        &path,
        "{\n  \"dimension\": 1,\n  \"entries\": [ {\"coords\": [0], \"value\": } ]\n}\n",
    )
    .unwrap();
    let out = fraclap(
        &["apply", path.to_str().unwrap(), "--op", "laplacian"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    let msg = stderr(&out);
    assert!(msg.contains("line 3") && msg.contains("column"), "{msg}");
}

#[test]
fn apply_window_failure_is_numeric() {
    let dir = TempDir::new().unwrap();
    let input = write_delta(dir.path(), 1);
    let out = fraclap(
        &[
            "apply",
            &input,
            "--op",
            "fractional",
            "--s",
            "0.5",
            "--radius",
            "3",
            "--tail-tol",
            "1e-9",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn kernel_then_apply_round_trip_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = GridFunction::from_entries(
        2,
        1.0,
        vec![
            (LatticePoint::new(vec![0, 0]), 1.0),
            (LatticePoint::new(vec![1, -2]), -0.3),
            (LatticePoint::new(vec![-1, 1]), 0.7),
        ],
    )
    .unwrap();
    fs::write(dir.path().join("f.json"), f.to_json()).unwrap();
    let out = fraclap(
        &[
            "kernel",
            "--dim",
            "2",
            "--s",
            "0.3",
            "--radius",
            "9",
            "-o",
            "table.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = fraclap(
        &[
            "apply",
            "f.json",
            "--op",
            "fractional",
            "--s",
            "0.3",
            "--table",
            "table.json",
            "--radius",
            "6",
            "-o",
            "cli.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let quad = QuadratureConfig::default();
    let table = build_kernel_table(2, KernelOrder::Fractional(0.3), 9, &quad).unwrap();
    let spec = OperatorSpec::new(
        OperatorKind::Fractional,
        Some(0.3),
        2,
        1.0,
        KernelSourceKind::Quadrature(quad),
    )
    .unwrap();
    let direct = apply_with(&f, &spec, &KernelSource::Table(&table), &Window::radius(6)).unwrap();
    let cli_bytes = fs::read(dir.path().join("cli.json")).unwrap();
    assert_eq!(cli_bytes, (direct.function.to_json() + "\n").into_bytes());

    let again = fraclap(
        &[
            "apply",
            "f.json",
            "--op",
            "fractional",
            "--s",
            "0.3",
            "--table",
            "table.json",
            "--radius",
            "6",
            "-o",
            "cli2.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&again), 0);
    assert_eq!(cli_bytes, fs::read(dir.path().join("cli2.json")).unwrap());
}

#[test]
fn table_order_must_match_operator() {
    let dir = TempDir::new().unwrap();
    let input = write_delta(dir.path(), 1);
    assert_eq!(
        code(&fraclap(
            &["kernel", "--dim", "1", "--s", "0.5", "--radius", "8", "-o", "t.json"],
            dir.path()
        )),
        0
    );
    let out = fraclap(
        &[
            "apply",
            &input,
            "--op",
            "fractional",
            "--s",
            "0.4",
            "--table",
            "t.json",
            "--radius",
            "2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn rho_commands() {
    let dir = TempDir::new().unwrap();
    let out = fraclap(&["rho", "--dim", "1"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("rho_1 = 0.000000000000"));

    let out = fraclap(
        &["rho", "--dim", "2", "--cross-check", "--output", "rho.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rho.json")).unwrap()).unwrap();
    let a = v["rho"].as_f64().unwrap();
    let b = v["rho_lattice_sum"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-7);
    assert!((a - 1.166_243_616_123_275).abs() < 1e-9);

    assert_eq!(code(&fraclap(&["rho", "--dim", "0"], dir.path())), 2);
}

#[test]
fn verify_commands() {
    let dir = TempDir::new().unwrap();
    let out = fraclap(&["verify", "all", "--deterministic"], dir.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("fraclap-verify-all.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["suite"], "all");
    assert_eq!(report["passed"], true);
    assert_eq!(report["timestamp"], "2023-11-14T22:13:20Z");

    let first = fs::read(dir.path().join("fraclap-verify-all.json")).unwrap();
    let out = fraclap(
        &[
            "verify",
            "all",
            "--deterministic",
            "--parallel",
            "-o",
            "second.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let second: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("second.json")).unwrap()).unwrap();
    let first: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(first["entries"], second["entries"]);

    let out = fraclap(
        &["verify", "derivative-minus", "-o", "minus.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("derivative-minus-delta-1d"));

    assert_eq!(code(&fraclap(&["verify", "bogus"], dir.path())), 2);
}

#[test]
fn spectral_command() {
    let dir = TempDir::new().unwrap();
    let input = write_delta(dir.path(), 1);
    let out = fraclap(
        &[
            "spectral", &input, "--symbol", "log", "--radius", "5", "--tol", "1e-7",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let g = GridFunction::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!((g.get(&LatticePoint::new(vec![3])) + 1.0 / 3.0).abs() < 1e-6);
    let out = fraclap(
        &[
            "spectral", &input, "--symbol", "log", "--grid", "64", "--tol", "1e-15",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3);
    assert_eq!(
        code(&fraclap(
            &["spectral", &input, "--symbol", "heat"],
            dir.path()
        )),
        2
    );
}
