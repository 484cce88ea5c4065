use std::process::{Command, Output};

use serde_json::Value;

fn virstag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_virstag")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_of(args: &[&str]) -> (Value, String, i32) {
    let mut a = args.to_vec();
    a.push("--json");
    let o = virstag(&a);
    let s = stdout(&o);
    let v: Value = serde_json::from_str(&s).unwrap_or_else(|e| panic!("bad JSON ({e}): {s}"));
    (v, s, o.status.code().unwrap())
}

#[test]
fn exists_unique_beta() {
    let o = virstag(&["exists", "--t", "3/2", "--left", "0/2", "--right", "1/5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("beta = -1/2"), "{}", stdout(&o));

    let (v, _, code) = json_of(&["exists", "--t", "3/2", "--left", "0/2", "--right", "1/5"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "affine");
    assert_eq!(v["beta_dim"], 1);
    assert_eq!(v["solutions"]["dimension"], 0);
    assert_eq!(v["solutions"]["point"], serde_json::json!(["-1/2"]));
}

#[test]
fn central_charge_selects_same_parameter() {
    let (a, _, _) = json_of(&["exists", "--t", "3/2", "--left", "0/2", "--right", "1/5"]);
    let (b, _, _) = json_of(&["exists", "--c", "0", "--left", "0/2", "--right", "1/5"]);
    assert_eq!(a, b);
}

#[test]
fn relative_grade_notation() {
    let (a, _, _) = json_of(&["exists", "--t", "2", "--left", "0:3", "--right", "1:2"]);
    let (b, _, _) = json_of(&["exists", "--t", "2", "--left", "0/3", "--right", "1/3"]);
    assert_eq!(a, b);
    assert_eq!(a["solutions"]["point"], serde_json::json!(["4/5"]));
}

#[test]
fn intersection_grade_five() {
    let o = virstag(&["intersection", "--m", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("d(5) = 1"));
    assert!(text.contains("(L1^2 L2 + 6 L2^2 - L1 L3 + 2 L4) L_1 = (L1^3 + 6 L1 L2 + 12 L3) L_2"), "{text}");
    let (v, _, _) = json_of(&["intersection", "--m", "9"]);
    assert_eq!(v["dimension"], 7);
}

#[test]
fn exit_codes() {
    // Neither --t nor --c.
    assert_eq!(virstag(&["exists", "--left", "0", "--right", "1"]).status.code(), Some(2));
    // Both.
    assert_eq!(
        virstag(&["exists", "--t", "2", "--c", "-2", "--left", "0", "--right", "1"]).status.code(),
        Some(2)
    );
    // No singular vector of weight 5 in V_1 at t = 2.
    assert_eq!(virstag(&["exists", "--t", "2", "--left", "0", "--right", "1/5"]).status.code(), Some(2));
    // Unknown flag.
    assert_eq!(virstag(&["exists", "--bogus"]).status.code(), Some(2));
    // A right generator at weight 1 does not kill omega_0 = L_-1 x.
    let o = virstag(&["exists", "--t", "2", "--left", "0", "--right", "0/1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("no staggered module"));
    let (v, _, code) = json_of(&["exists", "--t", "2", "--left", "0", "--right", "0/1"]);
    assert_eq!(code, 3);
    assert_eq!(v["status"], "empty");
    assert!(v["reason"].is_string());
    assert_eq!(virstag(&["reproduce", "ex-9.9"]).status.code(), Some(2));
}

#[test]
fn json_round_trips() {
    let cases: [&[&str]; 5] = [
        &["exists", "--t", "3/2", "--left", "0/2", "--right", "1/5"],
        &["classify", "--t", "3/2", "--h", "0", "--max-grade", "8"],
        &["singular", "--t", "2", "--h", "0", "--grade", "3"],
        &["table-6-12", "--r", "2", "--s", "2"],
        &["beta", "--t", "2", "--left", "0", "--right", "3", "--beta", "1/2"],
    ];
    for args in cases {
        let (v, s, code) = json_of(args);
        assert_eq!(code, 0, "{args:?}");
        let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
        assert_eq!(again, s, "{args:?}");
    }
}

#[test]
fn beta_from_data_and_gauge() {
    let (v, _, code) = json_of(&["beta", "--t", "2", "--left", "0", "--right", "3", "--beta", "-3/7", "--seed", "11"]);
    assert_eq!(code, 0);
    assert_eq!(v["beta"]["beta"], "-3/7");
    assert_eq!(v["gauge_invariant"], true);
    // Feed the data back in.
    let data = serde_json::json!({"omega1": v["data"]["omega1"], "omega2": v["data"]["omega2"]}).to_string();
    let (w, _, code) = json_of(&["beta", "--t", "2", "--left", "0", "--right", "3", "--data", &data]);
    assert_eq!(code, 0);
    assert_eq!(w["beta"], v["beta"]);
}

#[test]
fn oracle_witness() {
    let (v, _, code) = json_of(&["oracle", "--t", "3/2", "--left", "0/2", "--right", "1/5", "--beta", "-1/2"]);
    assert_eq!(code, 0);
    assert!(v["varpi"].is_array());
    let (v, _, _) = json_of(&["oracle", "--t", "3/2", "--left", "0/2", "--right", "1/5", "--beta", "1"]);
    assert!(v["varpi"].is_null());
}

#[test]
fn kacdet_and_gram() {
    let o = virstag(&["kacdet-check", "--t", "-2", "--max-grade", "4", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("NOT"));
    let (v, _, _) = json_of(&["gram", "--t", "2", "--h", "1/3", "--grade", "2"]);
    // <L-1^2 x, L-1^2 x> = 8h^2 + 4h, <L-2 x, L-2 x> = 4h + c/2 with c = -2.
    assert_eq!(v["matrix"][0][0], "20/9");
    assert_eq!(v["matrix"][1][1], "1/3");
}

#[test]
fn reproduce_quick_examples() {
    for id in ["ex-5.16", "ex-6.3b", "ex-6.6", "ex-6.11"] {
        let o = virstag(&["reproduce", id]);
        let text = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{text}");
        assert!(text.contains("PASS") && !text.contains("FAIL"), "{text}");
    }
}
