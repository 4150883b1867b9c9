use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entire-dyn"))
}

fn tmp(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ed-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

#[test]
fn classical_writes_report_and_rows() {
    let out = tmp("classical");
    let s = bin().args(["--seed", "9", "--out"]).arg(&out).arg("classical").output().unwrap();
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(j["verdict"], "Pass");
    assert_eq!(j["parameters"]["seed"], 9);
    let csv = std::fs::read_to_string(out.join("rows.csv")).unwrap();
    assert!(csv.starts_with("n,lhs_tower,rhs_tower,margin_log"));
}

#[test]
fn render_single_pixel() {
    let out = tmp("render");
    let s = bin().arg("--out").arg(&out).args(["render", "--width", "1", "--height", "1"]).output().unwrap();
    assert!(s.status.success());
    let img = std::fs::read(out.join("escape.ppm")).unwrap();
    assert!(img.starts_with(b"P6\n1 1\n255\n"));
}

#[test]
fn thm3_bad_start_is_reported() {
    let out = tmp("thm3");
    let s = bin().arg("--out").arg(&out).args(["thm3", "--x0", "10"]).output().unwrap();
    assert!(s.status.success());
    let stdout = String::from_utf8_lossy(&s.stdout);
    assert!(stdout.contains("thm3: Fail"), "{stdout}");
}

#[test]
fn config_errors_exit_with_status_two() {
    let out = tmp("badcfg");
    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("c.json");
    std::fs::write(&cfg, r#"{"thm7": {"no_such_field": 1}}"#).unwrap();
    let s = bin().arg("--config").arg(&cfg).arg("thm7").output().unwrap();
    assert_eq!(s.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&s.stderr).contains("no_such_field"));
}

#[test]
fn orbits_from_csv() {
    let out = tmp("orbits");
    std::fs::create_dir_all(&out).unwrap();
    let starts = out.join("starts.csv");
    std::fs::write(&starts, "re,im\n1.0,0.0\n0.5,0.0\n").unwrap();
    let s = bin()
        .arg("--out")
        .arg(&out)
        .args(["orbits", "--function", r#"{"variant":"polynomial","coefficients":[[0,0],[0,0],[1,0]]}"#, "--horizon", "16", "--starts"])
        .arg(&starts)
        .output()
        .unwrap();
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let csv = std::fs::read_to_string(out.join("orbits.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
