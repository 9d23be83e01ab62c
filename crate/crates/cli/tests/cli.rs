use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bglue(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bglue")).args(args).current_dir(dir).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn disk_annulus(stretch: Value, bits: usize, verify: Value) -> Value {
    json!({
        "scene": {
            "pieces": [
                { "model": "disk", "action": "disk_blowup" },
                { "model": "annulus", "action": "annulus_blowup" }
            ],
            "gluings": [{ "pairs": [{ "component1": "minus", "component2": "minus" }] }]
        },
        "stretch": stretch,
        "precision_bits": bits,
        "verify": verify,
        "orbit": { "random_seeds": 4, "iterates": 60 },
        "out_dir": "out"
    })
}

fn identity_scene() -> Value {
    json!({
        "scene": {
            "pieces": [{ "model": "disk" }, { "model": "annulus" }],
            "gluings": [{ "pairs": [{ "component1": "minus", "component2": "minus" }] }]
        },
        "stretch": null,
        "precision_bits": 128,
        "out_dir": "out"
    })
}

#[test]
fn identity_scene_verifies() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "id.json", &identity_scene());
    let o = bglue(&["verify", "--config", cfg.to_str().unwrap(), "--order", "4"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/smoothness.json")).unwrap()).unwrap();
    assert_eq!(rep["pass"], json!(true));
    assert_eq!(rep["precision_bits"], json!(128));
    assert_eq!(rep["required_order"], json!(4));
}

#[test]
fn plain_gluing_fails_at_order_two() {
    let tmp = TempDir::new().unwrap();
    let verify = json!({ "orders": 2, "generators": ["X"], "seam_points": [0.0] });
    let cfg = write_config(tmp.path(), "plain.json", &disk_annulus(Value::Null, 128, verify));
    let o = bglue(&["verify", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("order 2: Fail"));

    // the same map is C^1
    let o = bglue(&["verify", "--config", cfg.to_str().unwrap(), "--order", "1"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn smoothed_gluing_passes_order_three() {
    let tmp = TempDir::new().unwrap();
    let verify = json!({ "orders": 3, "generators": ["X", "Y"], "seam_points": [0.7] });
    let stretch = json!({ "y0": 0.2, "y1": 0.8, "blend": "phi-step" });
    let cfg = write_config(tmp.path(), "smooth.json", &disk_annulus(stretch, 128, verify));
    let o = bglue(&["verify", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn decay_report_is_written() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = identity_scene();
    cfg["decay"] = json!({
        "germ": {
            "kind": "collar_germ",
            "tangential": [{ "op": "var", "index": 0 }],
            "factor": { "op": "const", "value": 2.0 }
        },
        "sandwich_a": 2.0
    });
    cfg["precision_bits"] = json!(256);
    let p = write_config(tmp.path(), "decay.json", &cfg);
    let o = bglue(&["verify", "--config", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rep: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/decay.json")).unwrap()).unwrap();
    let k = rep["report"]["constant_fit"].as_f64().unwrap();
    assert!((k - 2f64.ln().ln()).abs() < 0.05);
    assert_eq!(rep["sandwich"]["pass"], json!(true));
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let bad = write_config(tmp.path(), "bad.json", &json!({ "precision": 128 }));
    assert_eq!(bglue(&["verify", "--config", bad.to_str().unwrap()], tmp.path()).status.code(), Some(2));
    assert_eq!(bglue(&["verify", "--config", "missing.json"], tmp.path()).status.code(), Some(2));
    assert_eq!(bglue(&["frobnicate"], tmp.path()).status.code(), Some(2));
    assert_eq!(bglue(&["verify", "--precision", "8"], tmp.path()).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_bglue"))
        .args(["distortion", "--n-max", "2"])
        .env("BGLUE_THREADS", "many")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn distortion_table() {
    let tmp = TempDir::new().unwrap();
    let o = bglue(&["distortion", "--n-max", "8", "--radius", "6", "--out", "d"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("|Z| = 4"));
    let text = fs::read_to_string(tmp.path().join("d/distortion.csv")).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 64);
    for n in 1..=8usize {
        let len: usize = rows[n * n - 1][1].parse().unwrap();
        assert!(len <= 4 * n);
    }
}

#[test]
fn disk_orbits_split_by_half() {
    let tmp = TempDir::new().unwrap();
    let seeds: Vec<Value> = [0.7, 1.4, 2.1, -0.7, -1.4, -2.1]
        .iter()
        .map(|t| json!({ "coords": [t, 0.5] }))
        .collect();
    let cfg = json!({
        "scene": { "pieces": [{ "model": "disk", "action": "disk_blowup" }] },
        "stretch": null,
        "precision_bits": 96,
        "orbit": { "word": "Y", "iterates": 800, "seeds": seeds, "fixed_point_grid": 8 },
        "out_dir": "out"
    });
    let p = write_config(tmp.path(), "disk.json", &cfg);
    let o = bglue(&["orbit", "--config", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(tmp.path().join("out/orbits.csv")).unwrap();
    let mut last = std::collections::BTreeMap::new();
    for r in csv::Reader::from_reader(text.as_bytes()).records() {
        let r = r.unwrap();
        last.insert(r[0].to_string(), (r[6].parse::<f64>().unwrap(), r[7].parse::<f64>().unwrap()));
    }
    for i in 0..6 {
        let (x, y) = last[&format!("orbit{i}")];
        let want = if i < 3 { 0.5 } else { -0.5 };
        assert!((x - want).abs() < 0.02 && y.abs() < 0.02, "orbit{i} ends at ({x}, {y})");
    }
    let svg = fs::read_to_string(tmp.path().join("out/orbits.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<polyline").count() == 6);
}

#[test]
fn torus_orbit_reports_density() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "scene": { "pieces": [{ "model": "torus", "action": "torus" }] },
        "stretch": null,
        "precision_bits": 96,
        "orbit": { "word": "X Y", "random_seeds": 2, "iterates": 50, "density": { "bases": 2 } },
        "out_dir": "out"
    });
    let p = write_config(tmp.path(), "torus.json", &cfg);
    let o = bglue(&["orbit", "--config", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("dense by word length").count(), 2);
}

#[test]
fn glued_orbit_prints_the_straddle_defect() {
    let tmp = TempDir::new().unwrap();
    let stretch = json!({ "y0": 0.2, "y1": 0.8 });
    let p = write_config(tmp.path(), "glued.json", &disk_annulus(stretch, 128, json!({})));
    let o = bglue(&["orbit", "--config", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().find(|l| l.contains("straddle defect")).unwrap().to_string();
    let d: f64 = line.split(": ").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    // the two probe points are 2e-9 apart; a jump would show up as O(1)
    assert!(d < 1e-8, "{line}");
}

#[test]
fn outputs_are_deterministic() {
    let stretch = json!({ "y0": 0.2, "y1": 0.8 });
    let verify = json!({ "orders": 2, "generators": ["Y"], "seam_points": [0.3] });
    let cfg = disk_annulus(stretch, 128, verify);
    let mut seen = Vec::new();
    for _ in 0..2 {
        let tmp = TempDir::new().unwrap();
        let p = write_config(tmp.path(), "s.json", &cfg);
        for cmd in ["verify", "orbit", "scene-dump"] {
            let o = bglue(&[cmd, "--config", p.to_str().unwrap(), "--seed", "9"], tmp.path());
            assert_eq!(o.status.code(), Some(0), "{cmd}");
        }
        let files: Vec<Vec<u8>> = ["smoothness.json", "orbits.csv", "orbits.svg", "scene.json"]
            .iter()
            .map(|f| fs::read(tmp.path().join("out").join(f)).unwrap())
            .collect();
        seen.push(files);
    }
    assert!(seen[0] == seen[1], "outputs differ between identical runs");
}

#[test]
fn scene_dump_describes_the_surface() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "scene": {
            "pieces": [{ "model": "annulus" }],
            "gluings": [{ "pairs": [{ "component1": "minus", "component2": "plus" }] }]
        },
        "stretch": null,
        "precision_bits": 96,
        "out_dir": "out"
    });
    let p = write_config(tmp.path(), "t.json", &cfg);
    let o = bglue(&["scene-dump", "--config", p.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dump: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("out/scene.json")).unwrap()).unwrap();
    assert_eq!(dump["euler_characteristic"], json!(0));
    assert_eq!(dump["closed_surface"]["model"], json!("torus"));
    assert_eq!(dump["maps"]["id"].as_array().unwrap().len(), 1);
}
