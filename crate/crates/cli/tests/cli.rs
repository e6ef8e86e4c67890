//! End-to-end checks of the `mil` binary and the shipped map configs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mil_cli::config::{parse_config, serialize_config};
use mil_core::constructions::make_eqnonadapt;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mil"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env_remove("MIL_DEPTH").output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn stderr_of_failure(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "expected failure for {args:?}");
    String::from_utf8(out.stderr).expect("utf8 stderr")
}

fn maps_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../maps")
}

#[test]
fn shipped_borderline_config_matches_the_builder() {
    let text = fs::read_to_string(maps_dir().join("eqnonadapt.map")).expect("shipped file");
    let cfg = parse_config(&text).expect("shipped config parses");
    let from_file = cfg.to_map();
    let built = make_eqnonadapt();

    assert_eq!(from_file.partition, built.partition, "same partition");
    assert_eq!(
        format!("{:?}", from_file.branches),
        format!("{:?}", built.branches),
        "same branch parameters"
    );
    for i in 0..=100 {
        let x = i as f64 / 100.0;
        let a = from_file.apply(x).expect("in domain");
        let b = built.apply(x).expect("in domain");
        assert!((a - b).abs() < 1e-15, "values differ at {x}: {a} vs {b}");
    }
}

#[test]
fn shipped_configs_round_trip_through_serialization() {
    let mut seen = 0;
    for entry in fs::read_dir(maps_dir()).expect("maps dir") {
        let path = entry.expect("entry").path();
        if path.extension().and_then(|e| e.to_str()) != Some("map") {
            continue;
        }
        let text = fs::read_to_string(&path).expect("readable");
        let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let once = serialize_config(&cfg);
        let again = serialize_config(&parse_config(&once).expect("serialized form reparses"));
        assert_eq!(once, again, "{path:?} round-trips");
        seen += 1;
    }
    assert!(seen >= 7, "expected the full gallery on disk, found {seen}");
}

#[test]
fn out_of_order_partition_is_a_parse_error_with_its_line() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.map");
    fs::write(&path, "partition = 0, 3/4, 1/2, 1\n\n[branch]\nkind = affine\nslope = 4\nintercept = 0\n\n[branch]\nkind = affine\nslope = 4\nintercept = -3\n\n[branch]\nkind = affine\nslope = 4\nintercept = -3\n").expect("write");
    let stderr = stderr_of_failure(&["classify", path.to_str().expect("utf8 path")]);
    assert!(stderr.contains("line 1"), "names the line: {stderr}");
    assert!(stderr.contains("strictly increasing"), "names the defect: {stderr}");
}

#[test]
fn missing_grid_image_is_a_markov_violation() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("notmarkov.map");
    fs::write(&path, "partition = 0, 1/2, 1\n\n[branch]\nkind = affine\nslope = 3/2\nintercept = 0\n\n[branch]\nkind = affine\nslope = 2\nintercept = -1\n").expect("write");
    let stderr = stderr_of_failure(&["validate", path.to_str().expect("utf8 path")]);
    assert!(
        stderr.contains("misses every partition point"),
        "reports the Markov defect: {stderr}"
    );
}

#[test]
fn classify_is_exact_and_deterministic() {
    let first = stdout_of(&["classify", "example:eqnonadapt"]);
    let second = stdout_of(&["classify", "example:eqnonadapt"]);
    assert_eq!(first, second, "classify output is deterministic");
    assert_eq!(
        first.lines().next(),
        Some("NONADAPTED (exact power law at a fixed singular point with h = log alpha)")
    );
}

#[test]
fn integral_csv_hits_the_quarter_log_two_partial_sum() {
    let csv = stdout_of(&["integral", "example:nonpolynonadapt", "--depth", "100"]);
    assert!(csv.ends_with('\n'), "newline-terminated");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,lower_term,upper_term,lower_partial,upper_partial");
    assert_eq!(lines.len(), 101, "header plus one row per ring");

    let last: Vec<&str> = lines[100].split(',').collect();
    assert_eq!(last[0], "100");
    for field in &last[1..] {
        let (mantissa, _) = field.split_once('e').expect("scientific notation");
        let (_, frac) = mantissa.split_once('.').expect("decimal point");
        assert_eq!(frac.len(), 15, "15 digits after the point: {field}");
    }
    let lower_partial: f64 = last[3].parse().expect("numeric");
    let expected = 25.0 * std::f64::consts::LN_2;
    assert!(
        (lower_partial - expected).abs() <= 1e-9,
        "lower partial at n=100: {lower_partial} vs {expected}"
    );
}

#[test]
fn lorenz_arithmetic_is_reported_from_the_command_line() {
    let out = stdout_of(&[
        "lorenz", "--lambda1", "1", "--lambda2", "-3", "--lambda3", "-0.6", "--scenario",
        "periodic", "--period", "1", "--entropy", "0.693147",
    ]);
    assert!(out.starts_with("ADAPTED"), "verdict line first: {out}");
    assert!(out.contains("alpha = 1.6666666666666667"), "branch exponent: {out}");

    let stderr = stderr_of_failure(&[
        "lorenz", "--lambda1", "1", "--lambda2", "-3", "--lambda3", "-0.45", "--scenario",
        "periodic", "--period", "1", "--entropy", "0.693147",
    ]);
    assert!(stderr.contains("eigenvalues must satisfy"), "explains the rejection: {stderr}");
}

#[test]
fn depth_resolves_flag_over_env_over_config() {
    let count_rows = |out: &str| out.lines().count() - 1;

    let from_env = bin()
        .args(["integral", "example:nonpolynonadapt"])
        .env("MIL_DEPTH", "50")
        .output()
        .expect("binary runs");
    assert!(from_env.status.success());
    assert_eq!(count_rows(&String::from_utf8_lossy(&from_env.stdout)), 50);

    let flag_wins = bin()
        .args(["integral", "example:nonpolynonadapt", "--depth", "37"])
        .env("MIL_DEPTH", "50")
        .output()
        .expect("binary runs");
    assert!(flag_wins.status.success());
    assert_eq!(count_rows(&String::from_utf8_lossy(&flag_wins.stdout)), 37);

    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("depth.map");
    let shipped =
        fs::read_to_string(maps_dir().join("nonpolynonadapt.map")).expect("shipped file");
    fs::write(&path, format!("depth = 25\n{shipped}")).expect("write");
    let from_config = stdout_of(&["integral", path.to_str().expect("utf8 path")]);
    assert_eq!(count_rows(&from_config), 25);

    let garbage = bin()
        .args(["integral", "example:nonpolynonadapt"])
        .env("MIL_DEPTH", "soon")
        .output()
        .expect("binary runs");
    assert!(!garbage.status.success());
    assert!(String::from_utf8_lossy(&garbage.stderr).contains("MIL_DEPTH"));
}

#[test]
fn gallery_listing_names_every_entry() {
    let listing = stdout_of(&["example"]);
    for name in
        ["eqnonadapt", "eqadapt", "nonpolynonadapt", "fig_b", "fig_c", "fig1", "fig1_notholder", "nonsing", "lorenz"]
    {
        assert!(listing.contains(name), "listing mentions {name}");
    }
}

#[test]
fn example_output_feeds_back_as_a_config() {
    let printed = stdout_of(&["example", "fig_c"]);
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("fig_c.map");
    fs::write(&path, &printed).expect("write");
    let verdict = stdout_of(&["classify", path.to_str().expect("utf8 path")]);
    assert!(
        verdict.starts_with("ALL_MEASURES_ADAPTED"),
        "nonreturning orbit adapts every measure: {verdict}"
    );
}

#[test]
fn example_eqadapt_carries_the_series_note() {
    let out = stdout_of(&["example", "eqadapt"]);
    assert!(out.contains("INDETERMINATE"), "mentions the bare classifier verdict");
    assert!(out.contains("stabilized at term"), "reports where the series settled");
    assert!(out.contains("the series converges"), "states the conclusion");
}

#[test]
fn example_nonsing_summarizes_the_renewal_measure() {
    let out = stdout_of(&["example", "nonsing"]);
    assert!(out.contains("renewal tower"), "names the object: {out}");
    assert!(out.contains("mean return time"), "reports the mean: {out}");
    assert!(out.contains("entropy h ="), "reports the entropy: {out}");
}

#[test]
fn tolerance_flags_rescue_a_slightly_off_image() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("offgrid.map");
    fs::write(&path, "partition = 0, 1/2, 1\n\n[branch]\nkind = affine\nslope = 2.000002\nintercept = 0\n\n[branch]\nkind = affine\nslope = 2\nintercept = -1\n").expect("write");
    let path = path.to_str().expect("utf8 path");

    let strict = stderr_of_failure(&["validate", path]);
    assert!(strict.contains("misses every partition point"), "default is strict: {strict}");

    let loose = stdout_of(&["validate", path, "--eps-markov", "1e-3"]);
    assert!(loose.ends_with("OK\n"), "override accepts the 1e-6 mismatch: {loose}");
}

#[test]
fn unknown_example_names_fail_with_the_known_list() {
    let stderr = stderr_of_failure(&["classify", "example:weird"]);
    assert!(stderr.contains("unknown example"), "{stderr}");
    assert!(stderr.contains("eqnonadapt"), "lists what exists: {stderr}");

    let hint = stderr_of_failure(&["classify", "example:nonsing"]);
    assert!(hint.contains("mil example nonsing"), "redirects to the summary: {hint}");
}
