use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_enbrauer"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn dims_and_levi_pass() {
    let (code, json) = run(&[
        "--form",
        "orthogonal",
        "--n",
        "4",
        "--r",
        "2",
        "--checks",
        "dims,levi",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let levels: Vec<u64> = v["reports"][0]["per_level"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["dim"].as_u64().unwrap())
        .collect();
    assert_eq!(levels, vec![1, 4, 3]);
    assert_eq!(v["reports"][1]["check"], "levi");
}

#[test]
fn odd_symplectic_is_usage_error() {
    let (code, _) = run(&["--form", "symplectic", "--n", "5", "--r", "2"]);
    assert_eq!(code, 2);
    let (code, _) = run(&["--checks", "nonsense"]);
    assert_eq!(code, 2);
}

#[test]
fn r3_total_dimension() {
    let (code, json) = run(&[
        "--form",
        "orthogonal",
        "--n",
        "6",
        "--r",
        "3",
        "--checks",
        "dims",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["reports"][0]["sides"][1]["dim"], 52);
}

#[test]
fn failing_check_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let code = bin()
        .args([
            "--form",
            "orthogonal",
            "--n",
            "4",
            "--r",
            "2",
            "--checks",
            "parabolic",
            "--out",
        ])
        .arg(&out)
        .output()
        .unwrap()
        .status
        .code()
        .unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["reports"][0]["check"], "parabolic");
    let expected = if v["status"] == "pass" { 0 } else { 1 };
    assert_eq!(code, expected);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--suite", "default", "--seed", "11"];
    let (_, a) = run(&args);
    let (_, b) = run(&args);
    assert_eq!(a, b);
    assert!(!a.contains("elapsed_ms"));
    let (_, timed) = run(&[
        "--form",
        "orthogonal",
        "--n",
        "4",
        "--r",
        "2",
        "--checks",
        "dims",
        "--timings",
    ]);
    assert!(timed.contains("elapsed_ms"));
}

#[test]
fn csv_export() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dims.csv");
    let (code, _) = run(&[
        "--form",
        "symplectic",
        "--n",
        "6",
        "--r",
        "2",
        "--checks",
        "dims",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "check,scenario,epsilon,n,r,l,dim,expected,match");
    assert_eq!(
        lines[1..],
        [
            "dims,Sp(6) r=2,-1,6,2,0,1,1,true",
            "dims,Sp(6) r=2,-1,6,2,1,4,4,true",
            "dims,Sp(6) r=2,-1,6,2,2,3,3,true"
        ]
    );
}
