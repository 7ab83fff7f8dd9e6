use std::path::Path;
use std::process::{Command, Output};

fn bandtouch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandtouch")).args(args).env_remove("BANDTOUCH_THREADS").output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn parse_list(line: &str) -> Vec<f64> {
    let inner = line.split_once('[').unwrap().1.split_once(']').unwrap().0;
    inner.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse().unwrap()).collect()
}

#[test]
fn fis_peaks_of_gl4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("chi.csv");
    let o = bandtouch(&["fis", "--model", "gl", "--n", "4", "--delta1", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mfp = parse_list(text.lines().find(|l| l.starts_with("mfp")).unwrap());
    let expected = 0.5f64.sqrt();
    assert_eq!(mfp.len(), 2);
    assert!((mfp[0] + expected).abs() < 1e-6 && (mfp[1] - expected).abs() < 1e-6, "{mfp:?}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("lambda,chi"));
    assert_eq!(csv.lines().count(), 401);
}

#[test]
fn fis_json_has_profile_fields() {
    let o = bandtouch(&["fis", "--model", "gp", "--n", "2", "--delta2", "0.5", "--range", "-1:1:50", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["lambdas"].as_array().unwrap().len(), 50);
    assert!(v["mgp"].is_number());
}

#[test]
fn evolve_gp1_probability() {
    let o = bandtouch(&["evolve", "--model", "gp", "--n", "1", "--delta2", "0.5", "--c", "1", "--sample-every", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let err = String::from_utf8_lossy(&o.stderr);
    let p: f64 = err.lines().find_map(|l| l.strip_prefix("P = ")).unwrap().parse().unwrap();
    assert!((p - 0.4559).abs() < 0.02, "P = {p}");
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some(bandtouch::dynamics::TRAJECTORY_CSV_HEADER));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn config_file_replaces_model_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("model.json");
    std::fs::write(&cfg, bandtouch::ModelSpec::gp(1, 0.5).to_json()).unwrap();
    let a = bandtouch(&["evolve", "--config", cfg.to_str().unwrap(), "--c", "1", "--sample-every", "0"]);
    let b = bandtouch(&["evolve", "--model", "gp", "--n", "1", "--delta2", "0.5", "--c", "1", "--sample-every", "0"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn phase_json_reconstructs_probability() {
    let o = bandtouch(&["phase", "--model", "gp", "--n", "2", "--delta2", "0.3", "--c", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let direct = v["p_direct"].as_f64().unwrap();
    let rec = v["p_reconstructed"].as_f64().unwrap();
    assert!((direct - rec).abs() < 1e-8);
}

fn sweep_file(dir: &Path, threads: &str) -> Vec<u8> {
    let out = dir.join(format!("sweep_{threads}.csv"));
    let o = bandtouch(&[
        "sweep", "--model", "gp", "--n", "2", "--delta2", "0.1", "--axis", "delta", "--range", "0.05:1.0:12",
        "--c", "1", "--lambda-inf", "5", "--measure", "p,delta-phi", "--threads", threads, "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read(out).unwrap()
}

#[test]
fn sweep_output_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let one = sweep_file(dir.path(), "1");
    let many = sweep_file(dir.path(), "8");
    assert_eq!(one, many);
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().next(), Some("axis_value,p,delta_phi"));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn sweep_values_list() {
    let o = bandtouch(&["sweep", "--model", "gp", "--n", "1", "--delta2", "0.5", "--axis", "speed", "--values", "0.5,1,2", "--lambda-inf", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let p: Vec<f64> = stdout(&o).lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(p.len(), 3);
    assert!(p[0] < p[1] && p[1] < p[2], "{p:?}");
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["fis", "--model", "gl", "--delta1", "0.5"][..],
        &["fis", "--model", "gp", "--n", "2", "--delta2", "-1"],
        &["fis", "--model", "gl", "--n", "2", "--delta1", "1", "--range", "1:0:10"],
        &["evolve", "--model", "gl", "--n", "2", "--delta1", "1", "--c", "-1"],
        &["phase", "--model", "gl", "--n", "2", "--delta1", "1", "--protocol", "pl1"],
        &["sweep", "--model", "graphene-tb", "--axis", "delta", "--values", "1,2"],
        &["fis", "--model", "gl", "--n", "2", "--delta1", "1", "--plot-script", "x.gp"],
        &["nonsense"],
    ] {
        let o = bandtouch(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn oracle_disagreement_exits_3() {
    let base = ["oracle-check", "--model", "gl", "--n", "2", "--delta1", "0.5", "--c", "1", "--lambda-inf", "3"];
    let ok = bandtouch(&base);
    assert_eq!(ok.status.code(), Some(0));
    let strict: Vec<&str> = base.iter().copied().chain(["--tol", "1e-15"]).collect();
    assert_eq!(bandtouch(&strict).status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_1() {
    let o = bandtouch(&["fis", "--model", "gl", "--n", "2", "--delta1", "1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_script_for_phase_sweep_uses_second_axis() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let gp = dir.path().join("s.gp");
    let o = bandtouch(&[
        "sweep", "--model", "gp", "--n", "2", "--delta2", "0.1", "--axis", "delta", "--values", "0.2,0.4,0.6",
        "--c", "1", "--lambda-inf", "5", "--measure", "p,delta-phi", "--out", out.to_str().unwrap(), "--plot-script",
        gp.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let script = std::fs::read_to_string(&gp).unwrap();
    assert!(script.contains("pngcairo"));
    assert!(script.contains(out.to_str().unwrap()));
    assert!(script.contains("axes x1y2"));
    assert!(script.contains("set y2tics"));
}
