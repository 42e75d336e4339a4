use std::fs;
use std::path::{Path, PathBuf};

use marc_cli::{run, ExitCode, Outcome};
use serde_json::Value;

fn marc(args: &[&str]) -> Outcome {
    run(std::iter::once("marc").chain(args.iter().copied()))
}

fn ok(args: &[&str]) -> String {
    let out = marc(args);
    assert_eq!(out.code, 0, "{args:?} failed: {}", out.stderr);
    out.stdout
}

fn structured(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "structured"]);
    serde_json::from_str(&ok(&a)).expect("structured output is json")
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> String {
    scenarios_dir().join(name).to_string_lossy().into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn cpm_identity_sits_on_the_boundary_of_5f() {
    let v = structured(&["check", "--scenario", &scenario("somarc-cpm.toml"), "--scheme", "thm2"]);
    let r = &v["result"];
    assert_eq!(r["overall"], false);
    let f = r["conditions"].as_array().unwrap().iter().find(|c| c["id"] == "5f").unwrap();
    assert_eq!(f["margin_bits"].as_f64().unwrap(), 0.0);
    assert_eq!(f["boundary"], true);
}

#[test]
fn bound_reports_verdict_line() {
    let text = ok(&["bound", "--preset", "somarc-eq3", "--optimize"]);
    assert!(text.contains("separation infeasible: H = 1.58496 > 1.5"), "{text}");
}

#[test]
fn six_conditions_give_seven_csv_lines() {
    let csv = ok(&["check", "--scenario", &scenario("somarc-cpm.toml"), "--format", "csv"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "scheme,id,lhs_bits,rhs_bits,margin_bits,satisfied,boundary");
}

#[test]
fn thm1_text_lists_conditions_in_order() {
    let text =
        ok(&["check", "--preset", "somarc-eq3", "--scheme", "thm1", "--optimize", "--restarts", "2", "--iters", "20"]);
    let pos: Vec<usize> = ["2a", "2b", "2c", "2d", "2e", "2f"]
        .iter()
        .map(|id| text.find(&format!("\n{id} ")).unwrap_or_else(|| panic!("{id} missing in\n{text}")))
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
    assert!(text.contains("no cardinality bound is known"));
}

#[test]
fn structured_round_trips_numbers() {
    let text = ok(&["check", "--scenario", &scenario("relay-parity.toml"), "--format", "structured"]);
    let v: Value = serde_json::from_str(&text).unwrap();
    // re-serializing the parsed document reproduces it exactly
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again, text);
    let csv = ok(&["check", "--scenario", &scenario("relay-parity.toml"), "--format", "csv"]);
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    for (row, c) in rows.iter().zip(v["result"]["conditions"].as_array().unwrap()) {
        let m: f64 = row[4].parse().unwrap();
        assert_eq!(m.to_bits(), c["margin_bits"].as_f64().unwrap().to_bits());
    }
}

#[test]
fn structured_output_has_documented_fields() {
    let v = structured(&["info", "--preset", "somarc-eq3"]);
    for key in ["tool", "command", "scenario_digest", "result"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(v["tool"]["name"], "marc");
    assert_eq!(v["command"]["name"], "info");
    assert_eq!(v["scenario_digest"].as_str().unwrap().len(), 64);
    let h = v["result"]["source"]["quantities"]["H(S1,S2)"].as_f64().unwrap();
    assert!((h - 3f64.log2()).abs() < 1e-12);
    assert!(v.to_string().find("elapsed").is_none());
}

#[test]
fn structured_output_is_byte_identical() {
    let args = [
        "optimize",
        "--preset",
        "somarc-eq3",
        "--scheme",
        "thm2",
        "--restarts",
        "3",
        "--iters",
        "30",
        "--format",
        "structured",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a, b);
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "3"]);
    assert_eq!(a, ok(&threaded));
}

#[test]
fn digest_ignores_field_order() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(&dir, "a.toml", "preset = \"somarc-eq3\"\n[chain]\nfamily = \"thm2\"\npreset = \"cpm-identity\"\n");
    let b = write(&dir, "b.toml", "[chain]\npreset = \"cpm-identity\"\nfamily = \"thm2\"\n");
    let b = {
        let text = format!("preset = \"somarc-eq3\"\n{}", fs::read_to_string(&b).unwrap());
        write(&dir, "b.toml", &text)
    };
    let da = structured(&["info", "--scenario", &a])["scenario_digest"].clone();
    let db = structured(&["info", "--scenario", &b])["scenario_digest"].clone();
    assert_eq!(da, db);
}

#[test]
fn commands_leave_the_scenario_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenarios_dir().join("relay-noiseless.toml")).unwrap();
    let path = write(&dir, "s.toml", &text);
    let trace = dir.path().join("trace.csv").to_string_lossy().into_owned();
    ok(&["info", "--scenario", &path]);
    ok(&["check", "--scenario", &path]);
    ok(&["optimize", "--scenario", &path, "--restarts", "1", "--iters", "5"]);
    ok(&["simulate", "--scenario", &path, "--n", "4", "--trials", "5", "--trace", &trace]);
    assert_eq!(fs::read_to_string(&path).unwrap(), text);
    let rows = fs::read_to_string(&trace).unwrap();
    assert!(rows.starts_with("trial,block,stage,verdict\n"));
}

#[test]
fn exit_codes_are_distinct() {
    let codes: Vec<i32> = ExitCode::ALL.iter().map(|c| c.code()).collect();
    let mut sorted = codes.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), codes.len());
}

#[test]
fn error_paths_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_sum = write(
        &dir,
        "sum.toml",
        "[source]\nsizes = [2, 1, 1, 1]\nentries = [{ at = [0, 0, 0, 0], p = 0.5 }, { at = [1, 0, 0, 0], p = 0.48 }]\n[channel]\npreset = \"somarc-eq3\"\n",
    );
    let broken = write(&dir, "broken.toml", "preset = \n");
    let not_somarc = scenario("relay-noiseless.toml");
    let missing = dir.path().join("missing.toml").to_string_lossy().into_owned();
    let cases: Vec<(Vec<&str>, ExitCode)> = vec![
        (vec!["check", "--bogus"], ExitCode::Usage),
        (vec!["check"], ExitCode::Usage),
        (vec!["check", "--scenario", &bad_sum, "--scheme", "mac"], ExitCode::Normalization),
        (vec!["info", "--scenario", &broken], ExitCode::Malformed),
        (vec!["info", "--preset", "no-such-preset"], ExitCode::UnknownPreset),
        (vec!["info", "--scenario", &missing], ExitCode::Io),
        (vec!["bound", "--scenario", &not_somarc], ExitCode::Mismatch),
        (vec!["simulate", "--scenario", &not_somarc, "--epsilon", "0"], ExitCode::Budget),
        (vec!["simulate", "--scenario", &not_somarc, "--rate1", "10", "--rate2", "10"], ExitCode::Budget),
    ];
    for (args, code) in cases {
        let out = marc(&args);
        assert_eq!(out.code, code.code(), "{args:?}: {}", out.stderr);
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_conditions_still_exit_zero() {
    let out = marc(&["check", "--scenario", &scenario("relay-parity.toml")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("overall false"));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(marc(&["--help"]).code, 0);
    assert!(marc(&["--version"]).stdout.contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn uncoded_cpm_small_run() {
    let v = structured(&["simulate", "--uncoded-cpm", "--trials", "5000"]);
    assert_eq!(v["result"]["samples"], 5000);
    assert_eq!(v["result"]["errors"], 0);
    let out = marc(&["simulate", "--uncoded-cpm", "--scenario", &scenario("relay-noiseless.toml")]);
    assert_eq!(out.code, ExitCode::Mismatch.code());
}

#[test]
fn crbc_schemes_need_a_single_source_view() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        &dir,
        "crbc.toml",
        "[source]\nsizes = [2, 1, 2, 1]\nentries = [{ at = [0, 0, 0, 0], p = 0.4 }, { at = [1, 0, 1, 0], p = 0.6 }]\n\
         [channel]\ninputs = [2, 1, 2]\ny = { size = 4, table = [0, 1, 2, 3] }\ny3 = { size = 2, table = [0, 0, 1, 1] }\n\
         [chain]\nfamily = \"product\"\npreset = \"uniform\"\n",
    );
    for scheme in ["crbc9", "crbc10"] {
        let v = structured(&["check", "--scenario", &path, "--scheme", scheme]);
        assert_eq!(v["result"]["conditions"].as_array().unwrap().len(), 2);
    }
    let out = marc(&["check", "--scenario", &scenario("relay-noiseless.toml"), "--scheme", "crbc9"]);
    assert_eq!(out.code, ExitCode::Mismatch.code(), "{}", out.stderr);
}

#[test]
fn seed_flag_changes_simulation_but_default_is_fixed() {
    let base = ["simulate", "--scenario", &scenario("relay-noiseless.toml"), "--n", "6", "--trials", "40"];
    let a = structured(&base);
    assert_eq!(a["command"]["options"]["seed"], 20_240_917);
    let mut seeded = base.to_vec();
    seeded.extend(["--seed", "7"]);
    let b = structured(&seeded);
    assert_eq!(b["command"]["options"]["seed"], 7);
}
