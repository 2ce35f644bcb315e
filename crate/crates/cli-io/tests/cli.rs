use std::fs;
use std::path::Path;
use std::process::Command as Process;

use cli_io::{compare_csv, RunConfig};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_adiabat"))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> std::path::PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn run(cmd: &str, cfg: &RunConfig, out: &Path) -> std::process::Output {
    let c = write_config(out.parent().unwrap(), cfg);
    bin().args([cmd, "--config"]).arg(&c).arg("--out").arg(out).output().unwrap()
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn fig1_populations_sum_to_one_with_lf_endings() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    let res = run("fig1", &RunConfig::quick(), &out);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for (name, header) in [("fig1_path.csv", "t,x,y"), ("fig1_bare.csv", "t,p0,p1"), ("fig1_instantaneous.csv", "t,p_plus,p_minus")] {
        let text = fs::read_to_string(out.join(name)).unwrap();
        assert!(!text.contains('\r'));
        assert_eq!(text.lines().next().unwrap(), header);
        if name != "fig1_path.csv" {
            for r in rows(&text) {
                assert!((r[1] + r[2] - 1.0).abs() < 1e-8, "{name}: {r:?}");
            }
        }
    }
    let inst = rows(&fs::read_to_string(out.join("fig1_instantaneous.csv")).unwrap());
    assert!((inst[0][1] - 0.2).abs() < 1e-9 && (inst[0][2] - 0.8).abs() < 1e-9);
    assert!(out.join("manifest.json").exists());
}

#[test]
fn manifest_checksums_match_the_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    assert!(run("sweep", &RunConfig::quick(), &out).status.success());
    let m: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    let outputs = m["outputs"].as_object().unwrap();
    assert_eq!(outputs.len(), 1);
    for (name, sum) in outputs {
        assert_eq!(sum.as_str().unwrap(), cli_io::sha256_hex(&fs::read(out.join(name)).unwrap()));
    }
    assert_eq!(m["command"], "sweep");
    assert_eq!(m["status"], "ok");
}

#[test]
fn uncoupled_open_run_stays_pure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("open");
    let mut cfg = RunConfig::quick();
    cfg.open.epsilon = 0.0;
    assert!(run("open", &cfg, &out).status.success());
    for r in rows(&fs::read_to_string(out.join("open.csv")).unwrap()) {
        assert!((r[4] - 1.0).abs() < 1e-10 && (r[6] - 1.0).abs() < 1e-10, "{r:?}");
    }
}

#[test]
fn charge_report_gives_opposite_unit_charges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("charge");
    assert!(run("charge", &RunConfig::quick(), &out).status.success());
    let rep: serde_json::Value = serde_json::from_slice(&fs::read(out.join("charge.json")).unwrap()).unwrap();
    let got: Vec<(i64, i64)> = rep["bands"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| (b["plaquette_charge"].as_i64().unwrap(), b["cocycle_charge"].as_i64().unwrap()))
        .collect();
    assert_eq!(got, vec![(-1, -1), (1, 1)]);
}

#[test]
fn cone_field_map_is_flat_off_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("field");
    let mut cfg = RunConfig::quick();
    cfg.field_map.nx = 6;
    cfg.field_map.ny = 6;
    assert!(run("field-map", &cfg, &out).status.success());
    let data = rows(&fs::read_to_string(out.join("field_map.csv")).unwrap());
    assert_eq!(data.len(), 36);
    for r in data {
        let r2 = r[0] * r[0] + r[1] * r[1];
        // The curl is a finite difference whose truncation error grows towards the crossing.
        let tol = if r2 >= 0.5 { gauge_geometry::fields::CURVATURE_TOL } else { 1e-3 };
        assert!(r[4].abs() < tol && r[5].abs() < 1e-12, "{r:?}");
        assert!((r[2] + r[1] / (2.0 * r2)).abs() < 1e-6 && (r[3] - r[0] / (2.0 * r2)).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::quick();
    for cmd in ["wormhole-scan", "koopman"] {
        let (a, b) = (dir.path().join(format!("{cmd}-a")), dir.path().join(format!("{cmd}-b")));
        assert!(run(cmd, &cfg, &a).status.success());
        assert!(run(cmd, &cfg, &b).status.success());
        for entry in fs::read_dir(&a).unwrap() {
            let name = entry.unwrap().file_name();
            if name == "manifest.json" {
                continue;
            }
            let (x, y) = (fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
            assert_eq!(x, y, "{cmd}: {name:?}");
            assert!(compare_csv(std::str::from_utf8(&x).unwrap(), std::str::from_utf8(&y).unwrap(), 1e-9).is_none());
        }
    }
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, "{\n  \"koopman\": {\n    \"grids\": [2]\n  }\n}\n").unwrap();
    let res = bin().args(["koopman", "--config"]).arg(&p).output().unwrap();
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
    fs::write(&p, "{ \"fig1\": ").unwrap();
    assert_eq!(bin().args(["fig1", "--config"]).arg(&p).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("charge");
    let mut cfg = RunConfig::quick();
    // A sphere through the crossing makes the flux ill-defined.
    cfg.charge.center = [0.0, 0.0, 1.0];
    let res = run("charge", &cfg, &out);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
}
