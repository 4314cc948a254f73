use std::process::{Command, Output};

use serde_json::Value;

fn somos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_somos")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn generate_somos4_csv() {
    let out = somos(&["generate", "--eq", "somos4", "--alpha", "1", "--beta", "1", "--init", "1,1,1,1", "--range", "0..8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,t_n"));
    assert_eq!(text.lines().last(), Some("8,59"));
}

#[test]
fn generate_somos4_to_eleven() {
    let out = somos(&["generate"]);
    assert_eq!(out.status.code(), Some(0));
    let terms: Vec<String> =
        json(&out)["result"]["terms"].as_array().unwrap().iter().map(|t| t["t"].as_str().unwrap().to_string()).collect();
    assert_eq!(terms, ["1", "1", "1", "1", "2", "3", "7", "23", "59", "314", "1529", "8209"]);
}

#[test]
fn generate_backward_fibonacci() {
    let out = somos(&["generate", "--eq", "linear", "--P", "1", "--Q", "-1", "--t0", "0", "--t1", "1", "--range", "-3..5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let terms = doc["result"]["terms"].as_array().unwrap();
    assert_eq!(terms[0]["n"], -3);
    let at = |n: i64| terms.iter().find(|t| t["n"] == n).unwrap()["t"].as_str().unwrap().to_string();
    assert_eq!(at(-1), "1");
    assert_eq!(at(-3), "2");
    assert_eq!(at(5), "5");
    assert_eq!(doc["manifest"]["params"]["Q"], "-1");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["generate", "--range", "5..2"][..],
        &["generate", "--alpha", "1.5"],
        &["generate", "--eq", "somosN"],
        &["generate", "--eq", "gale-robinson", "--N", "5", "--p", "2", "--q", "1"],
        &["verify", "--identity", "nope"],
        &["frobnicate"],
    ] {
        let out = somos(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(somos(&["--help"]).status.code(), Some(0));
}

#[test]
fn vanishing_term_flushes_partial_output() {
    let out = somos(&["generate", "--beta", "-1", "--range", "0..12", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("4,0\n"));
    assert!(String::from_utf8(out.stderr).unwrap().contains("vanishing term"));
}

#[test]
fn verify_all_default_passes() {
    let out = somos(&["verify-all", "--seed", "42", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["result"]["all_pass"], true);
    assert_eq!(doc["manifest"]["failed"], 0);
    assert_eq!(doc["manifest"]["seed"], 42);
}

#[test]
fn injected_fault_is_a_counterexample() {
    let out = somos(&["verify", "--identity", "vajda", "--trials", "30", "--inject-fault", "vajda-sign-flip"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json(&out);
    assert_eq!(doc["result"]["status"], "fail");
    assert!(!doc["result"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn zero_trials_is_vacuous() {
    let out = somos(&["verify-all", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json(&out)["result"]["reports"].as_array().unwrap().clone();
    assert!(reports.iter().all(|r| r["trials_run"] == 0));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [&["verify", "--identity", "lucas", "--trials", "25", "--seed", "7"][..], &["volterra", "--x-max", "0.2"]] {
        let (a, b) = (somos(args), somos(args));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn companion_on_classic_orbit() {
    let out = somos(&["companion", "--d", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!((r["g2"].as_str(), r["g3"].as_str(), r["discriminant"].as_str()), (Some("4"), Some("-1"), Some("37")));
    assert_eq!(r["subsequence_coeffs"]["alpha"], "25");
    assert_eq!(r["subsequence_coeffs"]["beta"], "-29");
}

#[test]
fn ward_seeds() {
    let out = somos(&["ward", "--init", "1,2,3", "--order", "30"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["result"]["divisibility_failures"].as_array().unwrap().is_empty());
    assert_eq!(somos(&["ward", "--init", "2,1,3"]).status.code(), Some(2));
}

#[test]
fn float_fields_are_labeled() {
    let out = somos(&["volterra", "--x-max", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let dev = doc["result"]["closed_form"]["rk4_max_deviation"].as_str().unwrap();
    assert!(dev.starts_with('~'), "{dev}");
    assert_eq!(doc["result"]["closed_form"]["h4"], "1");
    let csv = String::from_utf8(somos(&["volterra", "--x-max", "0.01", "--dx", "0.005", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("x,n,Y_n"));
    assert!(csv.lines().nth(1).unwrap().starts_with("~0,1,~"));
}

#[test]
fn exact_subcommands_pass() {
    for args in [
        &["laurent-check", "--trials", "5"][..],
        &["lattice", "--N", "6", "--alpha", "2", "--beta", "-1/3"],
        &["series", "--P", "1", "--Q", "2", "--t0", "1", "--t1", "1", "--order", "6"],
        &["triangles", "--order", "10"],
        &["conjecture", "--P", "2", "--Q", "3", "--r", "3"],
        &["lambda-enum", "--d", "3", "--trials", "20"],
    ] {
        let out = somos(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["manifest"]["failed"], 0, "{args:?}");
    }
    let conj = json(&somos(&["conjecture", "--r", "2"]));
    assert_eq!(conj["result"]["status"], "conjecture: supported at desk scale");
}
