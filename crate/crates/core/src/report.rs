//! Serialization of benchmark results: a two-table CSV, one JSON document,
//! and an aligned console table.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::checks::CheckReport;
use crate::domain::DomainKind;
use crate::harness::{summarize, HarnessConfig, SummaryStats};
use crate::op::{GridCell, OpId};

pub const RAW_HEADER: &str = "op,domain,n,density,seed,iteration,phase,time_ns";
pub const SUMMARY_HEADER: &str = "op,domain,n,density,mean_ms,stddev_ms,min_ms,max_ms,iters";

pub const BOOST_CAVEAT: &str =
    "CPU frequency scaling and turbo boost are not controlled; compare timings only within one run on one machine";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub passed: u64,
    pub failed: u64,
    pub failures: Vec<Failure>,
}

impl CheckTally {
    pub fn record_failures(&mut self, reports: Vec<CheckReport>) {
        self.failed += reports.len() as u64;
        self.failures.extend(reports.into_iter().map(|r| Failure {
            check: r.check,
            detail: r.detail,
        }));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub op: OpId,
    pub domain: DomainKind,
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub samples_ns: Vec<u64>,
    pub warmup_ns: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stddev_ms: Option<f64>,
    pub checks: CheckTally,
}

impl CellRecord {
    pub fn empty(cell: &GridCell) -> CellRecord {
        CellRecord {
            op: cell.op,
            domain: cell.domain,
            n: cell.n,
            density: cell.density,
            seed: cell.seed,
            samples_ns: Vec::new(),
            warmup_ns: Vec::new(),
            mean_ms: None,
            stddev_ms: None,
            checks: CheckTally::default(),
        }
    }

    /// Fills in the mean and deviation from the measurement samples.
    pub fn finish(&mut self) {
        if let Some(s) = self.summary() {
            self.mean_ms = Some(s.mean_ms);
            self.stddev_ms = Some(s.stddev_ms);
        }
    }

    pub fn failed(&self) -> bool {
        self.checks.failed > 0
    }

    pub fn summary(&self) -> Option<SummaryStats> {
        (!self.failed() && !self.samples_ns.is_empty()).then(|| summarize(&self.samples_ns))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub host: String,
    pub os: String,
    pub arch: String,
    pub clock_resolution_ns: u64,
    /// ISO-8601 UTC.
    pub generated_at: String,
    pub note: String,
}

impl Environment {
    pub fn probe(generated_at: String) -> Environment {
        Environment {
            host: host_name(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            clock_resolution_ns: clock_resolution_ns(),
            generated_at,
            note: BOOST_CAVEAT.into(),
        }
    }
}

fn host_name() -> String {
    std::fs::read_to_string("/etc/hostname")
        .ok()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .or_else(|| std::env::var("HOSTNAME").ok())
        .or_else(|| std::env::var("COMPUTERNAME").ok())
        .unwrap_or_else(|| "unknown".into())
}

/// Smallest non-zero step observed between consecutive clock reads.
pub fn clock_resolution_ns() -> u64 {
    let mut best = u64::MAX;
    for _ in 0..200 {
        let a = Instant::now();
        let mut b = Instant::now();
        while b == a {
            b = Instant::now();
        }
        best = best.min((b - a).as_nanos() as u64);
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub config: HarnessConfig,
    pub environment: Environment,
    pub cells: Vec<CellRecord>,
    pub total_wall_ms: f64,
}

impl BenchReport {
    pub fn any_failed(&self) -> bool {
        self.cells.iter().any(CellRecord::failed)
    }

    pub fn check_totals(&self) -> (u64, u64) {
        self.cells
            .iter()
            .fold((0, 0), |(p, f), c| (p + c.checks.passed, f + c.checks.failed))
    }
}

pub fn csv_string(r: &BenchReport) -> String {
    let mut out = String::new();
    out.push_str(RAW_HEADER);
    out.push('\n');
    for c in &r.cells {
        for (phase, samples) in [("warmup", &c.warmup_ns), ("measure", &c.samples_ns)] {
            for (i, t) in samples.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{:.1},{},{},{},{}",
                    c.op, c.domain, c.n, c.density, c.seed, i, phase, t
                )
                .unwrap();
            }
        }
    }
    out.push('\n');
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for c in &r.cells {
        write!(out, "{},{},{},{:.1},", c.op, c.domain, c.n, c.density).unwrap();
        match c.summary() {
            Some(s) => writeln!(
                out,
                "{:.3},{:.3},{:.3},{:.3},{}",
                s.mean_ms,
                s.stddev_ms,
                s.min_ms,
                s.max_ms,
                c.samples_ns.len()
            )
            .unwrap(),
            None => out.push_str("fail,fail,fail,fail,0\n"),
        }
    }
    out
}

/// Raw samples, a blank line, then one summary row per cell. A failed cell
/// has no raw rows and `fail` in its summary columns.
pub fn write_csv(r: &BenchReport, sink: &mut impl Write) -> io::Result<()> {
    sink.write_all(csv_string(r).as_bytes())
}

pub fn json_string(r: &BenchReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serializes");
    s.push('\n');
    s
}

pub fn write_json(r: &BenchReport, sink: &mut impl Write) -> io::Result<()> {
    sink.write_all(json_string(r).as_bytes())
}

pub fn read_json(text: &str) -> Result<BenchReport, serde_json::Error> {
    serde_json::from_str(text)
}

fn join_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn render_console(r: &BenchReport) -> String {
    let c = &r.config;
    let mut out = String::new();
    writeln!(
        out,
        "ops={} domain={} ns={} densities={} seed={} warmup={} iters={} batch={} checks={}",
        join_list(&c.ops),
        c.domain,
        join_list(&c.n_set),
        c.density_set.iter().map(|d| format!("{d:.1}")).collect::<Vec<_>>().join(","),
        c.base_seed,
        c.warmup_iters,
        c.measure_iters,
        c.batch,
        if c.checks_enabled { "on" } else { "off" },
    )
    .unwrap();
    let e = &r.environment;
    writeln!(
        out,
        "host={} {}/{} clock-resolution={}ns at {}",
        e.host, e.os, e.arch, e.clock_resolution_ns, e.generated_at
    )
    .unwrap();
    writeln!(out, "note: {}", e.note).unwrap();
    writeln!(
        out,
        "{:<14} {:>5} {:>7} {:>12} {:>12} {:>12} {:>12} {:>5}",
        "op", "n", "density", "mean_ms", "stddev_ms", "min_ms", "max_ms", "iters"
    )
    .unwrap();
    for cell in &r.cells {
        write!(out, "{:<14} {:>5} {:>7.1} ", cell.op.name(), cell.n, cell.density).unwrap();
        match cell.summary() {
            Some(s) => writeln!(
                out,
                "{:>12.3} {:>12.3} {:>12.3} {:>12.3} {:>5}",
                s.mean_ms,
                s.stddev_ms,
                s.min_ms,
                s.max_ms,
                cell.samples_ns.len()
            )
            .unwrap(),
            None => {
                let first = cell.checks.failures.first();
                writeln!(
                    out,
                    "FAIL {}: {}",
                    first.map_or("", |f| f.check.as_str()),
                    first.map_or("", |f| f.detail.as_str())
                )
                .unwrap()
            }
        }
    }
    let (passed, failed) = r.check_totals();
    let bad = r.cells.iter().filter(|c| c.failed()).count();
    writeln!(
        out,
        "checks: {passed} passed, {failed} failed; cells: {} ok, {bad} failed; wall {:.1} ms",
        r.cells.len() - bad,
        r.total_wall_ms
    )
    .unwrap();
    out
}
