use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hyperspec"));
    c.env_remove("HYPERSPEC_THREADS");
    c
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("hyperspec-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn run(mut c: Command) -> Output {
    let o = c.output().unwrap();
    eprintln!("stdout:\n{}\nstderr:\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    o
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

#[test]
fn empty_suite_is_a_usage_error() {
    for s in ["", ",", "nope"] {
        let d = scratch("empty");
        let mut c = bin();
        c.args(["verify", "--suite", s, "--out"]).arg(&d);
        assert_eq!(run(c).status.code(), Some(1), "suite '{s}'");
    }
}

#[test]
fn bad_arguments_exit_1() {
    let mut c = bin();
    c.args(["verify"]);
    assert_eq!(run(c).status.code(), Some(1));
    let mut c = bin();
    c.args(["frobnicate"]);
    assert_eq!(run(c).status.code(), Some(1));
    let mut c = bin();
    c.arg("run");
    assert_eq!(run(c).status.code(), Some(1), "run without --config");
    let mut c = bin();
    c.env("HYPERSPEC_THREADS", "zero").args(["verify", "--suite", "geometry", "--out"]).arg(scratch("threads"));
    assert_eq!(run(c).status.code(), Some(1));
}

#[test]
fn malformed_json_reports_line_and_column() {
    let d = scratch("malformed");
    let cfg = d.join("bad.json");
    fs::write(&cfg, "{\n  \"grid\": {\"nx\": 96,\n  \"ny\": }\n}\n").unwrap();
    let mut c = bin();
    c.arg("run").arg("--config").arg(&cfg).arg("--out").arg(d.join("out"));
    let o = run(c);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");

    fs::write(&cfg, r#"{"grid": {"nx": 96, "ny": 96, "Lx": 1, "Ly": 1}, "metric": {"kind": "constant"}, "colour": 1}"#).unwrap();
    let mut c = bin();
    c.arg("run").arg("--config").arg(&cfg).arg("--out").arg(d.join("out"));
    let o = run(c);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    // valid JSON, invalid experiment
    fs::write(&cfg, r#"{"grid": {"nx": 96, "ny": 96, "Lx": 1, "Ly": 1}, "metric": {"kind": "constant"}, "control": {"T": 0.01}}"#).unwrap();
    let mut c = bin();
    c.arg("run").arg("--config").arg(&cfg).arg("--out").arg(d.join("out"));
    assert_eq!(run(c).status.code(), Some(1));
    assert!(!d.join("out").exists(), "config errors leave no output behind");
}

#[test]
fn verify_writes_manifest() {
    let d = scratch("verify");
    let mut c = bin();
    c.args(["verify", "--suite", "geometry,eisenstein", "--quick", "--seed", "7", "--out"]).arg(&d);
    let o = run(c);
    assert_eq!(o.status.code(), Some(0));
    let m = manifest(&d);
    assert_eq!(m["passed"], Value::Bool(true));
    assert_eq!(m["seed"], 7);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert!(m["tolerances"]["eisenstein/unitarity"].as_f64().unwrap() == 1e-9);
    assert!(m["checks"].as_array().unwrap().iter().all(|c| c["pass"] == Value::Bool(true)));
    assert!(m["stages"].as_array().unwrap().iter().any(|s| s["name"] == "total"));
    let csv = fs::read_to_string(d.join("eisenstein/smatrix.csv")).unwrap();
    assert!(csv.starts_with("t,abs_s,arg_s\n"));
    assert!(!csv.contains('\r'));
    assert_eq!(csv.lines().count(), 51);
    assert!(!d.read_dir().unwrap().any(|e| e.unwrap().file_name().to_string_lossy().contains(".tmp")));
}

#[test]
fn eisenstein_unitarity_csv_is_reproducible() {
    let mut outs = vec![];
    for i in 0..2 {
        let d = scratch(&format!("unitarity{i}"));
        let mut c = bin();
        c.args(["eisenstein", "--check", "unitarity", "--t-max", "25", "--out"]).arg(&d);
        assert_eq!(run(c).status.code(), Some(0));
        outs.push(fs::read(d.join("unitarity.csv")).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs.remove(0)).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "5.000000000000e-01");
    assert_eq!(row.len(), 3);
}

#[test]
fn eisenstein_checks_and_failure_exit() {
    let d = scratch("eis");
    for check in ["invariance", "constant-term"] {
        let mut c = bin();
        c.args(["eisenstein", "--check", check, "--s-re", "2", "--s-im", "0.5", "--y", "3", "--out"]).arg(&d);
        assert_eq!(run(c).status.code(), Some(0), "{check}");
    }
    // the smallest lattice box cannot meet the constant-term tolerance
    let mut c = bin();
    c.args(["eisenstein", "--check", "constant-term", "--truncation", "10", "--out"]).arg(&d);
    assert_eq!(run(c).status.code(), Some(2));
    assert_eq!(manifest(&d)["passed"], Value::Bool(false));
    for bad in [["--y", "-1"], ["--truncation", "2"]] {
        let mut c = bin();
        c.args(["eisenstein", "--check", "constant-term"]).args(bad).arg("--out").arg(&d);
        assert_eq!(run(c).status.code(), Some(1), "{bad:?}");
    }
}

#[test]
fn radon_and_wave_scenes() {
    let d = scratch("scene");
    let scene = d.join("scene.json");
    fs::write(&scene, r#"{"centers": [[0.0, 1.0], [1.0, 0.7]], "widths": [0.8, 0.6], "amplitudes": [1.0, 0.5], "grid": {"nodes": 512, "y_min": 1e-3, "y_max": 1e3, "period": 16, "nx": 16}, "times": [1.0]}"#).unwrap();
    for cmd in ["radon", "wave"] {
        let out = d.join(cmd);
        let mut c = bin();
        c.arg(cmd).arg("--config").arg(&scene).arg("--out").arg(&out);
        assert_eq!(run(c).status.code(), Some(0), "{cmd}");
        let csv = fs::read_to_string(out.join(format!("{cmd}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 1 + 512 * 16);
    }
    fs::write(&scene, r#"{"centers": [[0.0, 1.0]], "widths": [0.5, 0.4], "amplitudes": [1.0]}"#).unwrap();
    let mut c = bin();
    c.arg("radon").arg("--config").arg(&scene).arg("--out").arg(d.join("bad"));
    assert_eq!(run(c).status.code(), Some(1));
}

#[test]
fn shipped_configs_parse() {
    for f in ["bc_constant.json", "bc_lens.json"] {
        let c: hyperspec::bc::pipeline::BcConfig = serde_json::from_str(&fs::read_to_string(config_path(f)).unwrap()).unwrap();
        c.validate().unwrap();
    }
    let s: hyperspec::scene::Scene = serde_json::from_str(&fs::read_to_string(config_path("scene.json")).unwrap()).unwrap();
    s.validate().unwrap();
}

#[test]
fn bc_run_is_bit_reproducible() {
    let d = scratch("bc");
    let cfg = d.join("small.json");
    fs::write(
        &cfg,
        r#"{"grid": {"nx": 64, "ny": 64, "Lx": 1, "Ly": 1}, "metric": {"kind": "lens"}, "modes": 120,
            "control": {"B": 400, "T": 0.4, "reg": 1e-6}, "probes": [[0.5, 0.5], [0.3, 0.4]],
            "heat": {"modes": 150}}"#,
    )
    .unwrap();
    let mut files = vec![];
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = d.join(format!("run{i}"));
        let mut c = bin();
        c.env("HYPERSPEC_THREADS", threads).arg("run").arg("--config").arg(&cfg).arg("--out").arg(&out);
        let code = run(c).status.code();
        assert!(code == Some(0) || code == Some(2), "{code:?}");
        let m = manifest(&out);
        let outputs: Vec<String> = m["outputs"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
        for f in ["bsd.csv", "distances.csv", "recovery.csv", "lcurve.csv"] {
            assert!(outputs.iter().any(|o| o == f), "{f} missing from {outputs:?}");
        }
        files.push(outputs.iter().map(|o| (o.clone(), fs::read(out.join(o)).unwrap())).collect::<Vec<_>>());
    }
    assert_eq!(files[0], files[1]);
}
