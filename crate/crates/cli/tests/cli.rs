use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn elaa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elaa"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("ELAA_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("config.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn sidecar(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_slice(&fs::read(dir.join(format!("{name}.meta.json"))).unwrap()).unwrap()
}

#[test]
fn distances_report() {
    let dir = TempDir::new().unwrap();
    let out = elaa(&["distances"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("distances.json")).unwrap()).unwrap();
    let get = |k: &str| v[k].as_f64().unwrap();
    // a = λ/4 = 0.025 m, D = a√2, W = 100·D
    let big_d = 0.025 * 2f64.sqrt();
    assert!((get("D") - big_d).abs() < 1e-15);
    assert!((get("d_F") - 0.025).abs() < 1e-12);
    assert!((get("d_B") - 7.0710678).abs() < 1e-6);
    assert!((get("d_FA") - 250.0).abs() < 1e-9);
    assert!((get("W") - 100.0 * big_d).abs() < 1e-12);
    assert!((get("dof_limit") - std::f64::consts::PI * 6.25 / 0.01).abs() < 1e-9);
}

#[test]
fn gain_sweep_reaches_asymptotes() {
    let dir = TempDir::new().unwrap();
    let out = elaa(&["gain-sweep"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("gain-sweep.csv"));
    assert_eq!(header, ["N", "diagonal_m", "gain_exact", "gain_p12", "gain_p1", "gain_farfield"]);
    let last = rows.last().unwrap();
    let f = |i: usize| last[i].parse::<f64>().unwrap();
    assert_eq!(last[0], "1000000000000");
    assert!((f(2) - 1.0 / 3.0).abs() < 1e-3);
    assert!((f(3) - 0.5).abs() < 2e-2);
    assert!(f(4) > 1.0 && f(5) > 1.0);
    let meta = sidecar(dir.path(), "gain-sweep");
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["experiment"], "gain-sweep");
    assert_eq!(meta["all_checks_passed"], true);
    assert!(meta["residuals"]["exact_closed_form_vs_quadrature_rel"].as_f64().unwrap() < 1e-6);
    assert_eq!(meta["config"]["array"]["num_antennas"], 10_000);
    assert!(meta["reference_antenna"]["fraunhofer_distance_m"].as_f64().is_some());
}

#[test]
fn sum_se_slope_and_columns() {
    let dir = TempDir::new().unwrap();
    let out = elaa(&["sum-se"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("sum-se.csv"));
    assert_eq!(
        header,
        ["snr_db", "se_zf", "se_sched", "se_user_1", "se_user_2", "se_user_3", "se_user_4", "se_user_5"]
    );
    let at = |db: f64| rows.iter().find(|r| r[0].parse::<f64>().unwrap() == db).unwrap();
    let zf = |r: &Vec<String>| r[1].parse::<f64>().unwrap();
    let slope = (zf(at(50.0)) - zf(at(30.0))) / (2.0 * 10f64.log2());
    assert!((slope / 5.0 - 1.0).abs() < 0.05, "{slope}");
    let r20 = at(20.0);
    let ratio = zf(r20) / r20[2].parse::<f64>().unwrap();
    assert!((3.0..=5.0).contains(&ratio), "{ratio}");
    let streams = sidecar(dir.path(), "sum-se")["residuals"]["zf_high_snr_streams"].as_f64().unwrap();
    assert!((streams - 5.0).abs() < 0.25);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for exp in ["focus", "scaling-law", "multiplex"] {
        assert!(elaa(&[exp, "--threads", "1"], a.path()).status.success());
        assert!(elaa(&[exp, "--threads", "3"], b.path()).status.success());
        let name = format!("{exp}.csv");
        assert_eq!(fs::read(a.path().join(&name)).unwrap(), fs::read(b.path().join(&name)).unwrap(), "{exp}");
    }
}

#[test]
fn focal_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let out = elaa(&["focus", "--focal", "inf,d_FA/20"], dir.path());
    assert!(out.status.success());
    let (header, rows) = read_csv(&dir.path().join("focus.csv"));
    assert_eq!(header, ["d_over_dF", "gain", "focal_label"]);
    let labels: std::collections::BTreeSet<_> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), ["d_FA/20", "inf"]);
    let bad = elaa(&["focus", "--focal", "nowhere"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn multiplex_labels_follow_the_ladder() {
    let dir = TempDir::new().unwrap();
    assert!(elaa(&["multiplex"], dir.path()).status.success());
    let (_, rows) = read_csv(&dir.path().join("multiplex.csv"));
    let mut labels: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    labels.dedup();
    assert_eq!(labels, ["inf", "d_FA/20", "d_FA/40", "d_FA/60", "d_FA/80"]);
}

#[test]
fn validate_empty_config_prints_defaults() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "");
    let out = elaa(&["validate", "--config", &cfg], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(parsed["experiment"].as_str(), Some("gain-sweep"));
    assert_eq!(parsed["array"]["num_antennas"].as_integer(), Some(10_000));
    assert!((parsed["array"]["antenna_area"].as_float().unwrap() - 0.000625).abs() < 1e-18);
    assert_eq!(parsed["source"]["distance"].as_float(), Some(20.0));
    assert!(parsed["sweep"]["n_list"].as_array().unwrap().len() > 40);
}

#[test]
fn validate_lists_every_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[array]\nnum_antennas = 10\n\n[source]\nangle_rad = 1.6580627893946132\n");
    let out = elaa(&["validate", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("array.num_antennas") && err.contains("perfect square"), "{err}");
    assert!(err.contains("source.angle_rad") && err.contains("π/2"), "{err}");
}

#[test]
fn parse_errors_name_the_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[array]\nwavelength = \"short\"\n");
    let out = elaa(&["gain-sweep", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("wavelength"), "{err}");
}

#[test]
fn bad_tolerance_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = elaa(&["gain-sweep", "--tolerance", "0"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("quadrature.rel_tol"));
}

#[test]
fn numerical_failure_exits_nonzero_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "[array]\nnum_antennas = 16\n\n[sweep]\nd_over_df = [1.0]\n");
    let out = elaa(&["array-gain", "--config", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("reactive near-field"));
}

#[test]
fn thread_count_from_environment() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_elaa"))
        .args(["distances", "--out"])
        .arg(dir.path())
        .env("ELAA_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(sidecar(dir.path(), "distances")["threads"], 2);
}
