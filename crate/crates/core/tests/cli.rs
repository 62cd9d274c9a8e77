//! End-to-end runs of the `staticflow` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use staticflow::cli::{
    emit_expansion_json, emit_flow_csv, read_expansion_json, run, Command as Cmd, RunConfig,
    FLOW_CSV_HEADER,
};
use staticflow::expansion::{expand, EinsteinBoundary};
use staticflow::flow::{evolve, FlowControls};
use staticflow::solutions::ads;
use staticflow::RadialGrid;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn staticflow(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_staticflow"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, json).unwrap();
    p
}

#[test]
fn expand_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sphere5.json");
    let cfg = data("expand_sphere5.json");
    let (code, _, err) = staticflow(&["expand", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let golden = fs::read_to_string(data("expand_sphere5.golden.json")).unwrap();
    assert_eq!(fs::read_to_string(&out).unwrap(), golden);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for (cmd, cfg, ext) in [("flow", "flow_ads.json", "csv"), ("expand", "expand_sphere5.json", "json")] {
        let cfg = data(cfg);
        let run_once = |i: usize| {
            let out = dir.path().join(format!("{cmd}-{i}.{ext}"));
            let (code, _, err) = staticflow(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
            assert_eq!(code, 0, "{err}");
            fs::read(out).unwrap()
        };
        assert_eq!(run_once(0), run_once(1), "{cmd}");
    }
}

#[test]
fn flow_csv_layout() {
    let (code, stdout, _) = staticflow(&["flow", "--config", data("flow_ads.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some(FLOW_CSV_HEADER));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 3);
    assert!(rows.iter().all(|r| r.len() == 5));
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][1], 0.0);
    assert_eq!(rows.last().unwrap()[0], 0.01);
    assert!(stdout.ends_with('\n'));
}

#[test]
fn empty_report_writes_header_only() {
    let dir = TempDir::new().unwrap();
    let gr = RadialGrid::new(1.0, 4.0, 31).unwrap();
    let t = ads(3, gr).unwrap();
    let mut lapse = t.lapse().values().to_vec();
    lapse[3] = -1.0;
    let report = staticflow::flow::evolve_profiles(
        t.metric(),
        &staticflow::Profile::new(gr, lapse).unwrap(),
        &FlowControls::new(0.01).unwrap(),
    )
    .unwrap();
    let p = dir.path().join("empty.csv");
    emit_flow_csv(&report, &p).unwrap();
    assert_eq!(fs::read_to_string(p).unwrap(), format!("{FLOW_CSV_HEADER}\n"));

    let full = evolve(&t, &FlowControls::new(0.001).unwrap());
    emit_flow_csv(&full, &dir.path().join("full.csv")).unwrap();
}

#[test]
fn expansion_json_round_trips_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    for (n, scal) in [(3, 2.0), (6, 7.3), (8, -9.123456789)] {
        let res = expand(&EinsteinBoundary::new(n, scal).unwrap(), n - 1).unwrap();
        let p = dir.path().join(format!("e{n}.json"));
        emit_expansion_json(&res, &p).unwrap();
        let back = read_expansion_json(&p).unwrap();
        assert!(back.parity_ok);
        let back = back.into_result();
        assert_eq!(back, res);
        for (x, y) in back.c.coeffs().iter().zip(res.c.coeffs()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn expansion_json_keys_and_zero_forcing() {
    let cfg = r#"{"n": 6, "expansion": {"scal": 0.0, "order": 5}}"#;
    let config = RunConfig::from_json(cfg).unwrap();
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("flat.json");
    let outcome = run(&config, Cmd::Expand, Some(&p)).unwrap();
    assert_eq!(outcome.status.code(), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for k in ["n", "scal", "max_order", "c", "u", "determinants", "parity_ok"] {
        assert!(keys.contains(&k), "{k}");
    }
    let c = v["c"].as_array().unwrap();
    assert!(c[1..].iter().all(|x| x.as_f64() == Some(0.0)));
    let d = v["determinants"].as_array().unwrap();
    assert!(d.last().unwrap().as_f64().unwrap().abs() < 1e-12);
    assert_eq!(d.len(), 6);
}

#[test]
fn sphere_n3_reports_max_order_two() {
    let config = RunConfig::from_json(r#"{"n": 3, "expansion": {"scal": 2.0, "order": 2}}"#).unwrap();
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("s3.json");
    run(&config, Cmd::Expand, Some(&p)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["max_order"], 2);
    assert_eq!(v["parity_ok"], true);
}

#[test]
fn invalid_configurations_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad_grid = write_config(
        &dir,
        "grid.json",
        r#"{"n": 3, "grid": {"r_min": 1.0, "r_max": 4.0, "count": 3},
            "initial": {"kind": "ads"}, "flow": {"t_end": 0.1}}"#,
    );
    let (code, _, err) = staticflow(&["flow", "--config", bad_grid.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("grid"), "{err}");

    let unknown = write_config(&dir, "unknown.json", "{\n  \"n\": 3,\n  \"nn\": 4\n}");
    let (code, _, err) = staticflow(&["expand", "--config", unknown.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");

    let (code, _, _) = staticflow(&["expand", "--config", "/nonexistent/config.json"]);
    assert_eq!(code, 2);

    let wrong_cmd = write_config(&dir, "cmd.json", r#"{"command": "flow", "n": 5, "expansion": {"scal": 1.0, "order": 2}}"#);
    let (code, _, _) = staticflow(&["expand", "--config", wrong_cmd.to_str().unwrap()]);
    assert_eq!(code, 2);

    let too_deep = write_config(&dir, "deep.json", r#"{"n": 4, "expansion": {"scal": 1.0, "order": 4}}"#);
    let (code, _, _) = staticflow(&["expand", "--config", too_deep.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn early_termination_exits_with_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "budget.json",
        r#"{"n": 3, "grid": {"r_min": 1.0, "r_max": 6.0, "count": 101},
            "initial": {"kind": "perturbed",
                        "perturbation": {"amplitude": 0.2, "center": 3.0, "width": 1.0, "decay": 1.0, "target": "V"}},
            "flow": {"t_end": 0.05, "monitor_every": 1, "deviation_budget": 1e-3}}"#,
    );
    let out = dir.path().join("b.csv");
    let (code, _, err) = staticflow(&["flow", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("BudgetExceeded"), "{err}");
    assert!(fs::read_to_string(out).unwrap().starts_with(FLOW_CSV_HEADER));
}

#[test]
fn verify_and_residual_on_ads() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "verify.json",
        r#"{"n": 3, "grid": {"r_min": 1.0, "r_max": 3.0, "count": 2001}, "initial": {"kind": "ads"}}"#,
    );
    let (code, stdout, err) = staticflow(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    for k in ["static_residual", "sectional_defect", "lift_block_check"] {
        assert!(v[0][k].as_f64().unwrap() < 1e-4, "{k}");
    }
    let (code, stdout, _) = staticflow(&["residual", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v[0]["sup"].as_f64().unwrap() < 1e-4);
}

#[test]
fn verify_flags_oracle_mismatch_with_four() {
    // on a coarse grid the block identity check exceeds its tolerance
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "coarse.json",
        r#"{"n": 3, "grid": {"r_min": 1.0, "r_max": 6.0, "count": 41}, "initial": {"kind": "ads"}}"#,
    );
    let (code, _, err) = staticflow(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(err.contains("block identity"), "{err}");
}

#[test]
fn mass_sweep_writes_one_file_per_mass_in_order() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "sweep.json",
        r#"{"n": 3, "grid": {"r_min": 1.0, "r_max": 4.0, "count": 41},
            "initial": {"kind": "schwarzschild_ads", "masses": [0.1, 0.3, 0.5]},
            "flow": {"t_end": 0.005, "monitor_every": 10}}"#,
    );
    let out = dir.path().join("sweep.csv");
    let (code, _, err) = staticflow(&["flow", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let files: Vec<String> = (0..3)
        .map(|i| fs::read_to_string(dir.path().join(format!("sweep-{i}.csv"))).unwrap())
        .collect();
    assert!(files.iter().all(|f| f.starts_with(FLOW_CSV_HEADER)));
    // at ρ = 1 the lapse is sqrt(2 - 2m)
    let min_lapse = |f: &String| -> f64 {
        f.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap()
    };
    assert!(min_lapse(&files[0]) > min_lapse(&files[1]));
    assert!(min_lapse(&files[1]) > min_lapse(&files[2]));
}
