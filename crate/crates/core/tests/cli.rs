use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steinlab"))
        .args(args)
        .env_remove("STEINLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value, path: &str) -> f64 {
    v.pointer(path).and_then(Value::as_f64).unwrap_or_else(|| panic!("{path} missing in {v}"))
}

#[test]
fn zip_bound_examples() {
    let v = json(&["bound", "zip", "--p", "0.9", "--lambda", "2"]);
    assert!((num(&v, "/bound/total") - 0.1 * (1.0 - (-2.0f64).exp())).abs() < 1e-11);
    assert_eq!(num(&v, "/bound/p_used"), 0.9);
    let v = json(&["bound", "zip", "--p", "1", "--lambda", "2"]);
    assert!(num(&v, "/bound/total").abs() < 1e-11);
}

#[test]
fn sampling_bound_example() {
    let v = json(&["bound", "sampling", "--values", "0,1,1,2", "--m", "2"]);
    assert_eq!(num(&v, "/sampling/mu"), 2.0);
    assert!((num(&v, "/sampling/var") - 2.0 / 3.0).abs() < 1e-11);
    assert_eq!(num(&v, "/sampling/p"), 0.5);
    assert!((num(&v, "/sampling/bound/total") - 2.594).abs() < 1e-3);
}

#[test]
fn verify_examples_pass() {
    let v = json(&["verify", "zip", "--p", "0.9", "--lambda", "2"]);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!((num(&v, "/bound") - num(&v, "/oracle")).abs() < 1e-11);

    let v = json(&["verify", "sampling", "--values", "0,1,1,2", "--m", "2"]);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!((num(&v, "/oracle") - 0.278).abs() < 1e-3);

    let v = json(&["verify", "poincare", "--dist", "poisson", "--lambda", "3"]);
    assert_eq!(v["pass"], Value::Bool(true));
    assert!((num(&v, "/oracle") / 3.0 - 1.0).abs() < 0.01);
}

#[test]
fn simulate_examples() {
    let v = json(&["simulate", "lightbulb", "--n", "2", "--reps", "10"]);
    assert_eq!(v.pointer("/lightbulb/law/counts").unwrap(), &serde_json::json!([0, 10]));

    let v = json(&[
        "simulate", "epidemic", "--n", "100", "--d", "3", "--q", "0.99", "--reps", "100000", "--seed",
        "7",
    ]);
    let target = 0.99 * 4.752_999_906_592_162;
    let (mean, se) = (num(&v, "/isolated/mean"), num(&v, "/isolated/mean_stderr"));
    assert!((mean - target).abs() <= 3.0 * se, "{mean} vs {target} ({se})");

    let v = json(&[
        "simulate", "extremes", "--n", "50", "--m", "50", "--lambda", "1", "--reps", "100000",
        "--seed", "7",
    ]);
    let (mean, se) = (num(&v, "/extremes/mean"), num(&v, "/extremes/mean_stderr"));
    assert!((mean - 1.0).abs() <= 3.0 * se, "{mean} ({se})");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bound", "zip", "--p", "0.9", "--lambda", "2"]).status.code(), Some(0));
    // a coupling probability above the admissible one breaks the bound
    let out = run(&[
        "verify", "zip", "--p", "0.5", "--lambda", "2", "--lambda-used", "1", "--p-used", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], Value::Bool(false));
    assert_eq!(v.pointer("/details/admissible"), Some(&Value::Bool(false)));

    for bad in [
        &["bound", "zip", "--p", "1.5", "--lambda", "2"][..],
        &["bound", "zip", "--p", "0.5"],
        &["bound", "sampling", "--values", "0,0,0", "--m", "1"],
        &["bound", "nosuchmodel"],
        &["simulate", "lightbulb", "--n", "7"],
        &["verify", "poincare", "--dist", "poisson"],
        &["--reps", "abc", "bound", "zip", "--p", "0.5", "--lambda", "1"],
    ] {
        let out = run(bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn error_names_the_parameter() {
    let out = run(&["bound", "zip", "--p", "1.5", "--lambda", "2"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`p`"));
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let args = [
        "simulate", "extremes", "--n", "100", "--m", "90", "--lambda", "2", "--reps", "20000",
        "--seed", "11",
    ];
    let base = run(&[&args[..], &["--threads", "1"]].concat()).stdout;
    for t in ["2", "3", "8"] {
        assert_eq!(run(&[&args[..], &["--threads", t]].concat()).stdout, base, "threads {t}");
    }
    let env = Command::new(env!("CARGO_BIN_EXE_steinlab"))
        .args(args)
        .env("STEINLAB_THREADS", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, base);
}

#[test]
fn seed_changes_the_draws() {
    let a = run(&["simulate", "lightbulb", "--n", "10", "--reps", "500", "--seed", "1"]).stdout;
    let b = run(&["simulate", "lightbulb", "--n", "10", "--reps", "500", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(&[
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
        "verify",
        "zip",
        "--p",
        "0.9",
        "--lambda",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("field,value"));
    assert_eq!(lines.next(), Some("bound,0.0864664716763"));
    assert!(text.contains("\npass,true\n"));
}

#[test]
fn floats_have_twelve_significant_digits() {
    let out = run(&["bound", "zip", "--p", "0.9", "--lambda", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"total\": 0.0864664716763,"), "{text}");
}

#[test]
fn lightbulb_and_epidemic_commands() {
    let v = json(&["bound", "lightbulb", "--n", "100", "--k", "25", "--alpha", "0.2"]);
    assert!(v.is_object());
    let v = json(&["verify", "lightbulb", "--n", "50"]);
    assert_eq!(v["pass"], Value::Bool(true));
    let v = json(&["bound", "epidemic", "--n", "100", "--d", "3", "--q", "0.99"]);
    assert!((num(&v, "/capital_lambda") - 4.752_999_906_592_162).abs() < 1e-10);
    let v = json(&["oracle", "poincare", "--dist", "binomial", "--n", "10", "--q", "0.3"]);
    assert!(v.is_object());
}
