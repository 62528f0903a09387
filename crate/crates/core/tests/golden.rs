use std::fs;
use std::path::PathBuf;

use octobench_core::generator::{generate, GeneratorParams};
use octobench_core::report::{csv_string, json_string, read_json, RAW_HEADER, SUMMARY_HEADER};
use octobench_core::text::write_generated;
use octobench_core::Octagon;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a checked-in file; `OCTOBENCH_BLESS=1` rewrites it.
fn check_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("OCTOBENCH_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, want, "{name} drifted from its golden copy");
}

#[test]
fn csv_headers_are_exact() {
    assert_eq!(RAW_HEADER, "op,domain,n,density,seed,iteration,phase,time_ns");
    assert_eq!(SUMMARY_HEADER, "op,domain,n,density,mean_ms,stddev_ms,min_ms,max_ms,iters");
}

#[test]
fn json_golden_round_trip_is_byte_identical() {
    let text = fs::read_to_string(golden("report.json")).unwrap();
    let report = read_json(&text).unwrap();
    assert_eq!(json_string(&report), text);
    check_golden("report.csv", &csv_string(&report));
}

#[test]
fn csv_golden_starts_with_both_headers() {
    let csv = fs::read_to_string(golden("report.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(RAW_HEADER));
    let (_, summary) = csv.split_once("\n\n").expect("blank line between tables");
    assert_eq!(summary.lines().next(), Some(SUMMARY_HEADER));
    assert_eq!(summary.lines().count(), 1 + 4);
}

#[test]
fn generated_state_golden() {
    let g = generate::<Octagon>(&GeneratorParams::new(10, 0.5, 42)).unwrap();
    check_golden("state_n10_d05_s42.txt", &write_generated(&g));
}
