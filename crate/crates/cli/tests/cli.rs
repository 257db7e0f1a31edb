use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn toponogov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toponogov")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_the_builtins() {
    let o = toponogov(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("flat") && text.contains("f(t) = t"));
    assert!(text.contains("gauss_tanh") && text.contains("f(t) = e^{-t^2} tanh t"));
    assert!(text.contains("warped_polar"));
}

#[test]
fn run_writes_versioned_csvs_and_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = toponogov(&["run", scenario("gauss_curvature.toml").to_str().unwrap(), "--out-dir", out, "--seed", "42"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let run = dir.path().join("gauss_curvature");
    let mut csvs = 0;
    for entry in std::fs::read_dir(&run).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "csv") {
            let text = std::fs::read_to_string(&path).unwrap();
            let table = path.file_stem().unwrap().to_str().unwrap();
            assert!(text.starts_with(&format!("# schema: {table} v1\n")), "{}", path.display());
            csvs += 1;
        }
    }
    assert!(csvs >= 2);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 42);
    assert_eq!(report["passed"], true);
    for check in report["checks"].as_array().unwrap() {
        assert!(check.get("tolerance").is_some() && check.get("bound").is_some());
    }

    let r = toponogov(&["report", run.join("report.json").to_str().unwrap()]);
    assert!(r.status.success());
    assert!(stdout(&r).contains("PASS curvature_limit"));
}

#[test]
fn failing_checks_give_a_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let o = toponogov(&["run", scenario("roundtrip_gauss_tanh.toml").to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap(), "--tolerance-scale", "1e-12"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL warp_roundtrip"));
    let r = toponogov(&["report", dir.path().join("roundtrip_gauss_tanh/report.json").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn unknown_family_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("chain_gauss.toml")).unwrap().replace("\"gauss_tanh\"", "\"torus\"");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, text).unwrap();
    let o = toponogov(&["run", bad.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("surface.family"));
}
