use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopchart"))
        .args(args)
        .env_remove("LOOPCHART_CAP")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &[u8]) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn parse_echoes_canonical_form() {
    let out = run(&["parse", "((a))+(b.c)"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "a+b.c");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(run(&["parse", "a+"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["chart", "(a*.b*)*", "--cap", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["lee"]).status.code(), Some(2));
}

#[test]
fn cap_can_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_loopchart"))
        .args(["chart", "(a*.b*)*"])
        .env("LOOPCHART_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lee_reports_no_and_budget() {
    let out = run(&["lee", "--expr", "(a*.b*)*"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "NO");
    let out = run(&["lee", "--expr", "(a*.b*)*", "--budget", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "BUDGET");
}

#[test]
fn lee_on_chart_file() {
    let chart = run(&["chart", "((1.a).(c.a+a.(b+b.a))*).0"]);
    let path = scratch("g0.json", &chart.stdout);
    let out = run(&["lee", &path]);
    assert_eq!(out.status.code(), Some(0));
    let run_json = json(&out);
    assert!(!run_json["steps"].as_array().unwrap().is_empty());
    assert_eq!(run_json["residual"]["kind"], "chart");
}

#[test]
fn llee_verify_both_modes() {
    let labeled = run(&["labeled", "(a*.b*)*"]);
    let path = scratch("e-labeled.json", &labeled.stdout);
    for extra in [None, Some("--alt")] {
        let mut args = vec!["llee-verify", path.as_str()];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(json(&out)["verdict"], "PASS");
    }

    let mut broken = json(&labeled);
    for t in broken["transitions"].as_array_mut().unwrap() {
        if t["marking"] == 0 {
            t["marking"] = 9.into();
            break;
        }
    }
    let path = scratch("e-broken.json", broken.to_string().as_bytes());
    let out = run(&["llee-verify", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "FAIL");
    assert!(json(&out)["condition"].as_str().unwrap().starts_with('W'));
    let out = run(&["llee-verify", &path, "--alt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bisim_and_collapse() {
    let e = scratch("e.json", &run(&["chart", "(a*.b*)*"]).stdout);
    let ab = scratch("ab.json", &run(&["chart", "(a+b)*"]).stdout);
    let a = scratch("a.json", &run(&["chart", "a*"]).stdout);
    let out = run(&["bisim", &e, &ab]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["pairs"].as_array().unwrap().len(), 6);
    let out = run(&["bisim", &e, &a]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["collapse", &format!("@{e}")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["chart"]["vertices"].as_array().unwrap().len(), 1);
    assert_eq!(v["map"]["map"].as_object().unwrap().len(), 3);
}

#[test]
fn induce_from_file_and_expression_agree() {
    let one = scratch("e-one.json", &run(&["onechart", "(a*.b*)*"]).stdout);
    let from_file = run(&["induce", &format!("@{one}"), "--gc"]);
    let from_expr = run(&["induce", "(a*.b*)*", "--gc"]);
    assert_eq!(from_file.stdout, from_expr.stdout);
    assert_eq!(json(&from_expr)["vertices"].as_array().unwrap().len(), 3);
}

#[test]
fn expressions_can_come_from_files() {
    let path = scratch("f.txt", b"(a1.(1+b1.0)+a2.(1+b2.0)+a3.(1+b3.0))*.0\n");
    let out = run(&["thm59", &format!("@{path}")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["bijective"], true);
}

#[test]
fn dot_output() {
    let out = run(&["labeled", "a*", "--format", "dot"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("[1]"));
}

#[test]
fn corpus_summary() {
    let out = run(&[
        "corpus",
        "--seed",
        "7",
        "--count",
        "30",
        "--check",
        "thm59,thm514,props",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["mutations"]["disagreements"], 0);
    assert_eq!(run(&["corpus", "--count", "0"]).status.code(), Some(2));
}
