use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arakelov")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const Y2_Y_X3: &str = r#"{"genus":1,"P":["0","0","0","1"],"Q":["1"]}"#;

#[test]
fn curve_disc_is_exact() {
    let o = run(&["curve", "disc", "--curve", Y2_Y_X3]);
    assert!(o.status.success());
    assert_eq!(json(&o)["discriminant"], "-27");
    assert!(String::from_utf8_lossy(&o.stderr).contains("discriminant: -27"));
}

#[test]
fn faltings_document_shape() {
    let o = run(&["elliptic", "faltings", "--curve", Y2_Y_X3]);
    assert!(o.status.success());
    let d = json(&o);
    let total: f64 = d["total"].as_str().unwrap().parse().unwrap();
    assert!((total - 0.1701860477013349).abs() < 1e-14);
    assert_eq!(d["precision_bits"], 128);
    let places = d["places"].as_array().unwrap();
    assert_eq!(places[0]["place"], "inf");
    assert_eq!(places[1]["place"], "p=3");
    for key in ["d_v", "alpha", "lambda", "mu", "beta", "contribution"] {
        assert!(places[0].get(key).is_some(), "{key}");
    }
    let keys: Vec<&String> = d.as_object().unwrap().keys().collect();
    assert_eq!(&keys[..4], ["total", "places", "precision_bits", "warnings"]);
}

#[test]
fn warnings_are_reported() {
    let o = run(&["elliptic", "faltings", "--curve", r#"{"genus":1,"P":["16","0","0","1"]}"#]);
    let w = json(&o)["warnings"].to_string();
    assert!(w.contains("not minimal"), "{w}");
    let o = run(&["elliptic", "faltings", "--curve", r#"{"genus":1,"P":["0","-1","0","1"],"Q":["1"]}"#]);
    assert!(json(&o)["warnings"].to_string().contains("semistability not verified"));
    let o = run(&["jacobian", "faltings", "--tau", "[0.1, 1.3]", "--places", r#"[{"p":3,"ord_delta_min":3}]"#]);
    assert!(o.status.success());
    assert!(json(&o)["warnings"].to_string().contains("defaulted to 0"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["curve", "disc", "--curve", "{"]).status.code(), Some(2));
    assert_eq!(run(&["--prec", "32", "curve", "disc", "--curve", Y2_Y_X3]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // singular: y² = x³
    let sing = r#"{"genus":1,"P":["0","0","0","1"]}"#;
    assert_eq!(run(&["elliptic", "faltings", "--curve", sing]).status.code(), Some(3));
    // f_5 < 0
    let bad = run(&["jacobian", "faltings", "--tau-preset", "bomemo", "--places", r#"[{"p":5,"ord_delta_min":5,"e":1}]"#]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("f_5"));
    // 2-torsion point
    let tors = run(&["elliptic", "height", "--curve", r#"{"genus":1,"P":["0","-1","0","1"]}"#, "--point", "0,0"]);
    assert_eq!(tors.status.code(), Some(3));
    // ill-conditioned τ
    assert_eq!(run(&["theta", "eval", "--tau", "0.01i"]).status.code(), Some(3));
    // theta box too large
    let diag3 = r#"[["0.1i","0","0"],["0","0.1i","0"],["0","0","0.1i"]]"#;
    let huge = run(&["--prec", "4096", "theta", "eval", "--tau", diag3, "--z", r#"["0","0","0"]"#]);
    assert_eq!(huge.status.code(), Some(4));
}

#[test]
fn deterministic_output() {
    let args = ["check", "identities", "--seed", "3", "--samples", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = run(&["check", "identities", "--seed", "4", "--samples", "3"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn out_file_and_table_routing() {
    let dir = std::env::temp_dir().join(format!("arakelov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.json");
    let o = run(&["elliptic", "height", "--curve", r#"{"genus":1,"P":["0","-1","0","1"],"Q":["1"]}"#, "--point", "0,0", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("place") && table.contains("h_O"));
    let d: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let h: f64 = d["h_O"].as_str().unwrap().parse().unwrap();
    assert!((h - 0.0255557041199844).abs() < 1e-14);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_reports_small_delta() {
    let o = run(&["--verify", "elliptic", "faltings", "--curve", Y2_Y_X3]);
    let d = json(&o);
    assert_eq!(d["verify"]["precision_bits"], 192);
    let delta: f64 = d["verify"]["max_delta"].as_str().unwrap().parse().unwrap();
    assert!(delta < 1e-30, "{delta}");
}

#[test]
fn subcommands_run() {
    let ok = |args: &[&str]| {
        let o = run(args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        json(&o)
    };
    let t = ok(&["theta", "eval", "--tau", "i", "--z", "0"]);
    assert_eq!(t["theta1"]["re"], "0");
    ok(&["theta", "eval", "--tau", r#"[["1.1i","0.2"],["0.2","1.3i"]]"#, "--z", r#"["0.1","0.2i"]"#, "--char", "1/2,0;0,1/2"]);
    let r = ok(&["siegel", "reduce", "--tau", "0.3+0.05i"]);
    assert_eq!(r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).count(), 0);
    assert_eq!(ok(&["siegel", "check", "--tau", "i"])["reduced"], true);
    let dec = ok(&["elliptic", "decompose", "--curve", Y2_Y_X3, "--z", "0.25,0.1"]);
    assert!(dec["places"][0]["mu"].is_string() && dec["places"][0]["beta"].is_string());
    let j = ok(&["jacobian", "faltings", "--tau-preset", "bomemo", "--places", "[]"]);
    let h: f64 = j["total"].as_str().unwrap().parse().unwrap();
    assert!((h - 0.385367826763701).abs() < 1e-12);
    ok(&["check", "matrix-lemma", "--samples", "5"]);
    ok(&["check", "autissier", "--tau", "i", "--grid", "64"]);
}
