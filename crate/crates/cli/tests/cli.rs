use std::process::{Command, Output};

use serde_json::Value;

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .env_remove("QWALK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn k3_pst_check() {
    let v = json(&qwalk(&["pst-check", "--family", "oriented-k3", "--from", "0", "--to", "1"]));
    assert_eq!(v["kind"], "PST-certified");
    let tau = v["time"].as_f64().unwrap();
    let want = 2.0 * std::f64::consts::PI / (3.0 * 3f64.sqrt());
    assert!((tau - want).abs() < 1e-12);
    assert!((tau - 1.2092).abs() < 1e-4);
    assert!(v["fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
}

#[test]
fn search_upst_four_vertices() {
    let o = qwalk(&["search-upst", "--n", "4"]);
    assert!(o.status.success());
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 80);
    assert!(lines.iter().all(|r| r["verdict"] != "survives"));
}

#[test]
fn classify_star_table() {
    let o = qwalk(&["classify-star", "--m", "1..30"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "m,case,pgst,s,h,k");
    assert_eq!(rows.len(), 31);
    let no: Vec<&str> = rows[1..]
        .iter()
        .filter(|r| r.split(',').nth(2) == Some("false"))
        .map(|r| r.split(',').next().unwrap())
        .collect();
    // 3s with s or 4s+1 a square whose root is not a multiple of 3
    assert_eq!(no, ["3", "12", "18"]);
    assert!(rows.contains(&"27,27k^2,true,9,3,1"));
}

#[test]
fn star_pgst_check_follows_the_table() {
    // roots of the stars at triangle vertices 0 and 1 sit at 0 and m + 1
    let yes = json(&qwalk(&["pgst-check", "--family", "star:6", "--from", "0", "--to", "7"]));
    assert_eq!(yes["kind"], "PGST-certified");
    let no = json(&qwalk(&["pgst-check", "--family", "star:3", "--from", "0", "--to", "4"]));
    assert_eq!(no["kind"], "absent-certified");
}

#[test]
fn looped_path_pgst_check() {
    let v = json(&qwalk(&["pgst-check", "--family", "looped-path:2", "--from", "0", "--to", "2"]));
    assert_eq!(v["kind"], "PGST-certified");
}

#[test]
fn construct_then_analyze_roundtrip() {
    let dir = std::env::temp_dir().join(format!("qwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k3.json");
    let p = path.to_str().unwrap();
    assert!(qwalk(&["construct", "--family", "oriented-k3", "--out", p]).status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(m["dim"], 3);
    assert_eq!(m["im"][0][1], -1.0);

    let a = json(&qwalk(&["analyze", "--matrix", p]));
    let spec = a["spectrum"].as_array().unwrap();
    assert_eq!(spec.len(), 3);
    assert_eq!(spec[2]["exact"], "√3");
    assert_eq!(a["strongly_cospectral"].as_array().unwrap().len(), 3);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_csv() {
    let o = qwalk(&[
        "sweep", "--family", "oriented-k3", "--from", "0", "--to", "1", "--t-max", "2", "--steps", "3",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "t,fidelity");
    assert_eq!(rows.len(), 4);
    assert!(rows[2].starts_with("1.0000000000000000e0,"));
    let digits = rows[2].split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(digits.replace('.', "").len(), 17);
}

#[test]
fn exit_codes() {
    assert_eq!(qwalk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qwalk(&["pst-check", "--family", "oriented-k3", "--from", "0"]).status.code(), Some(2));
    assert_eq!(
        qwalk(&["pst-check", "--family", "oriented-k3", "--from", "0", "--to", "9"]).status.code(),
        Some(2)
    );
    assert_eq!(qwalk(&["analyze", "--family", "no-such-family"]).status.code(), Some(2));
    assert_eq!(qwalk(&["classify-star", "--m", "5..2"]).status.code(), Some(2));
    assert_eq!(qwalk(&["search-upst", "--n", "1"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["search-upst", "--n", "4"])
        .env("QWALK_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn verify_paper_single_criterion() {
    let o = qwalk(&["verify-paper", "--criterion", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("criterion 6: PASS"));
    assert_eq!(qwalk(&["verify-paper", "--criterion", "12"]).status.code(), Some(2));
}

#[test]
fn threads_env_is_honoured() {
    let o = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["search-upst", "--n", "4"])
        .env("QWALK_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stdout(&o), stdout(&qwalk(&["search-upst", "--n", "4"])));
}
