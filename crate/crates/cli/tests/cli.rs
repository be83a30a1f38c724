use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qprobe(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qprobe"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("QPROBE_OUT")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn drop_nulls(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|_, x| !x.is_null());
            map.values_mut().for_each(drop_nulls);
        }
        Value::Array(items) => items.iter_mut().for_each(drop_nulls),
        _ => {}
    }
}

const SMALL_RING: &str = r#"
[model]
kind = "kitaev"
sites = 21
hopping = 5.0
range_exponent = 0.3
beta = 0.02

[probe]
coupling = 1e-4

[noise]
relative_error = 0.02
seeds = 4
"#;

#[test]
fn same_config_and_seed_give_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ring.toml", SMALL_RING);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = qprobe(&["reconstruct", "--config", &cfg, "--seed", "9", "--format", "csv", "--format", "json"], dir);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for name in ["dispersion.csv", "noise_scores.csv", "reconstruct.json"] {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        assert!(x == y, "{name} differs between runs");
    }
    // manifests differ only in the output directory
    let (mut ma, mut mb) = (manifest(&a), manifest(&b));
    ma["resolved_config"]["output"]["directory"] = Value::Null;
    mb["resolved_config"]["output"]["directory"] = Value::Null;
    assert_eq!(ma, mb);
    let m = ma;
    assert_eq!(m["seed"], 9);
    assert_eq!(m["summary"]["noise_seeds"], serde_json::json!([9, 10, 11, 12]));
}

#[test]
fn different_thread_counts_give_identical_csv() {
    let tmp = tempfile::tempdir().unwrap();
    // 140k points: several parallel chunks
    let text = "[model]\nkind = \"kitaev\"\nsites = 21\nhopping = 5.0\nrange_exponent = 0.3\n\
                [probe]\ntime = 100.0\nnu_min = 0.0\nnu_max = 140.0\nnu_step = 0.001\n";
    let cfg = write_config(tmp.path(), "ring.toml", text);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let o = qprobe(&["sweep", "--config", &cfg, "--threads", threads], dir);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(fs::read(a.join("sweep.csv")).unwrap() == fs::read(b.join("sweep.csv")).unwrap());
}

#[test]
fn manifest_echoes_resolved_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "ring.toml", SMALL_RING);
    let out = tmp.path().join("o");
    assert!(qprobe(&["reconstruct", "--config", &cfg], &out).status.success());
    let m = manifest(&out);
    let probe = &m["resolved_config"]["probe"];
    for key in ["time", "ratios", "detect_threshold", "nu_min", "nu_max", "nu_step", "window", "time_factor"] {
        assert!(!probe[key].is_null(), "probe.{key} missing from the manifest");
    }
    assert_eq!(m["resolved_config"]["task"], "reconstruct");
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    let file = &m["files"][0];
    assert_eq!(file["path"], "dispersion.csv");
    assert_eq!(file["sha256"].as_str().unwrap().len(), 64);

    // the echoed config reproduces the run; options this task leaves unused are null
    let mut resolved = m["resolved_config"].clone();
    drop_nulls(&mut resolved);
    let echoed = toml::to_string(&resolved).unwrap();
    let again = write_config(tmp.path(), "echo.toml", &echoed);
    let out2 = tmp.path().join("o2");
    assert!(qprobe(&["reconstruct", "--config", &again], &out2).status.success());
    assert!(fs::read(out.join("dispersion.csv")).unwrap() == fs::read(out2.join("dispersion.csv")).unwrap());
}

#[test]
fn empty_result_gives_header_only_csv_and_valid_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "empty.toml",
        "[model]\nkind = \"kitaev\"\nsites = 11\nhopping = 1.0\nrange_exponent = 2.0\n[correlations]\nmax_separation = 0\n",
    );
    let out = tmp.path().join("o");
    let o = qprobe(&["correlations", "--config", &cfg], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("correlations.csv")).unwrap(), "r,t,connected_correlation\n");
    assert_eq!(fs::read_to_string(out.join("arrivals.csv")).unwrap(), "r,arrival_time\n");
    let m = manifest(&out);
    assert_eq!(m["status"], "ok");
    assert_eq!(m["files"][0]["rows"], 0);
}

#[test]
fn heat_map_on_one_dimensional_data_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "heat.toml", "[output]\nplot = \"heat\"\n");
    let out = tmp.path().join("o");
    let o = qprobe(&["lindblad", "--config", &cfg, "--format", "svg"], &out);
    assert!(!o.status.success());
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "dimension_mismatch");
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn correlation_map_renders_as_heat_map() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "map.toml",
        "[model]\nkind = \"kitaev\"\nsites = 21\nhopping = 5.0\nrange_exponent = 50.0\n[correlations]\nt_max = 1.0\nt_step = 0.1\n",
    );
    let out = tmp.path().join("o");
    assert!(qprobe(&["correlations", "--config", &cfg, "--format", "svg"], &out).status.success());
    let svg = fs::read_to_string(out.join("correlations.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<rect"));
}

#[test]
fn schema_violations_fail_with_error_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "[probe]\ncoupling = 1e-6\nmystery = 2\n");
    let out = tmp.path().join("o");
    let o = qprobe(&["reconstruct", "--config", &cfg], &out);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");
    assert!(err["error"]["message"].as_str().unwrap().contains("mystery"));

    let wrong_task = write_config(tmp.path(), "task.toml", "task = \"bloch\"\n");
    let o = qprobe(&["lindblad", "--config", &wrong_task], &out);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn model_errors_carry_their_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg =
        write_config(tmp.path(), "even.toml", "[model]\nkind = \"kitaev\"\nsites = 20\nhopping = 5.0\nrange_exponent = 0.3\n");
    let o = qprobe(&["spectrum", "--config", &cfg], &tmp.path().join("o"));
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");
    assert_eq!(err["error"]["context"], "task spectrum");
}

#[test]
fn validate_passes_and_prints_a_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = qprobe(&["validate"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.matches("PASS").count(), 8, "{stdout}");
    assert_eq!(manifest(&out)["summary"]["failed"], 0);
}

#[test]
fn output_directory_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let target = tmp.path().join("from_env");
    let o = Command::new(env!("CARGO_BIN_EXE_qprobe")).arg("bloch").env("QPROBE_OUT", &target).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(target.join("bloch.csv").exists());
    let rows = fs::read_to_string(target.join("bloch.csv")).unwrap().lines().count();
    assert_eq!(rows, 65);
}
