//! Grid expansion, the warmup/measurement loop, and sample statistics.

use std::hint::black_box;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::checks::{CheckContext, CheckReport, Registry, Verdict};
use crate::constraint::Constraint;
use crate::domain::{AbstractDomain, DomainKind};
use crate::generator::{cell_seed, generate, generate_pair, sample_tightening_constraint, GeneratorParams};
use crate::octagon::Octagon;
use crate::op::{GridCell, OpId, OpInput};
use crate::report::{BenchReport, CellRecord, Environment};
use crate::rng::{mix, Rng};
use crate::zone::Zone;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("invalid value `{value}` for {key}: {reason}")]
    Invalid { key: String, value: String, reason: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("config line {line}: expected key=value, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("{0}")]
    Constraint(String),
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub n_set: Vec<usize>,
    pub density_set: Vec<f64>,
    pub base_seed: u64,
    pub warmup_iters: usize,
    pub measure_iters: usize,
    pub ops: Vec<OpId>,
    pub checks_enabled: bool,
    /// Also run the O(n^3) incremental-matches-full check.
    pub incremental_matches_full: bool,
    pub domain: DomainKind,
    /// Invocations per timing sample; each sample is the batch time divided
    /// by this.
    pub batch: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            n_set: vec![25, 50, 100],
            density_set: (1..=9).map(|k| k as f64 / 10.0).collect(),
            base_seed: 42,
            warmup_iters: 3,
            measure_iters: 5,
            ops: vec![OpId::CloseFull],
            checks_enabled: false,
            incremental_matches_full: false,
            domain: DomainKind::Octagon,
            batch: 1,
        }
    }
}

/// Rounds away binary noise so `0.1 + 2 * 0.1` prints and compares as 0.3.
fn clean(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// `start:end:step`, both ends inclusive.
pub fn parse_density_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = |why: &str| invalid("densities", s, why);
    let parts: Vec<&str> = s.split(':').collect();
    let [start, end, step] = parts.as_slice() else {
        return Err(bad("expected start:end:step"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let (start, end, step) = (num(start)?, num(end)?, num(step)?);
    if step.is_nan() || step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if end < start {
        return Err(bad("end below start"));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| clean(start + k as f64 * step)).collect())
}

fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> Result<Vec<T>, ConfigError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|e| invalid(key, s, e.to_string())))
        .collect()
}

fn parse_bool(key: &str, s: &str) -> Result<bool, ConfigError> {
    match s.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(invalid(key, s, "expected true or false")),
    }
}

/// `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line: i + 1,
            text: t.to_string(),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl HarnessConfig {
    /// Keys the config file shares with `run`'s flags (without the dashes).
    pub const KEYS: [&'static str; 10] = [
        "ns",
        "densities",
        "seed",
        "warmup",
        "iters",
        "ops",
        "check",
        "check-incremental",
        "domain",
        "batch",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let num = |v: &str| v.trim().parse::<usize>().map_err(|e| invalid(key, v, e.to_string()));
        match key {
            "ns" => self.n_set = parse_list(key, value)?,
            "densities" => self.density_set = parse_density_range(value)?,
            "seed" => self.base_seed = value.trim().parse().map_err(|e| invalid(key, value, format!("{e}")))?,
            "warmup" => self.warmup_iters = num(value)?,
            "iters" => self.measure_iters = num(value)?,
            "ops" => self.ops = parse_list(key, value)?,
            "check" => self.checks_enabled = parse_bool(key, value)?,
            "check-incremental" => self.incremental_matches_full = parse_bool(key, value)?,
            "domain" => self.domain = value.trim().parse().map_err(|e: String| invalid(key, value, e))?,
            "batch" => self.batch = num(value)?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = |m: &str| Err(ConfigError::Constraint(m.to_string()));
        if self.n_set.is_empty() {
            return c("the n set is empty");
        }
        if self.n_set.contains(&0) {
            return c("variable counts must be at least 1");
        }
        if self.density_set.is_empty() {
            return c("the density set is empty");
        }
        if let Some(d) = self.density_set.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(ConfigError::Constraint(format!("density {d} outside (0, 1]")));
        }
        if self.measure_iters == 0 {
            return c("at least one measurement iteration is required");
        }
        if self.ops.is_empty() {
            return c("no operations selected");
        }
        if self.batch == 0 {
            return c("batch size must be at least 1");
        }
        if self.domain == DomainKind::Zone {
            if let Some(op) = self.ops.iter().find(|o| o.incremental_variant().is_some()) {
                return Err(ConfigError::Constraint(format!("zone does not support {op}")));
            }
        }
        Ok(())
    }

    /// Operation invocations one cell performs.
    pub fn invocations_per_cell(&self) -> u64 {
        ((self.warmup_iters + self.measure_iters) * self.batch) as u64
    }
}

/// Cells ordered by op (in config order), then n ascending, then density
/// ascending. Cell seeds depend on `n` and the density's position only, so
/// every op sees the same states.
pub fn expand_grid(c: &HarnessConfig) -> Result<Vec<GridCell>, ConfigError> {
    c.validate()?;
    let mut ns = c.n_set.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut ds = c.density_set.clone();
    ds.sort_by(f64::total_cmp);
    ds.dedup();
    let mut cells = Vec::with_capacity(c.ops.len() * ns.len() * ds.len());
    for &op in &c.ops {
        for &n in &ns {
            for (di, &density) in ds.iter().enumerate() {
                cells.push(GridCell {
                    op,
                    domain: c.domain,
                    n,
                    density,
                    density_index: di,
                    seed: cell_seed(c.base_seed, n, di),
                });
            }
        }
    }
    Ok(cells)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean_ms: f64,
    pub stddev_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Mean and sample standard deviation (divisor `len - 1`; zero for a single
/// sample) of nanosecond samples, in milliseconds.
pub fn summarize(samples_ns: &[u64]) -> SummaryStats {
    assert!(!samples_ns.is_empty(), "summary of zero samples");
    let ms: Vec<f64> = samples_ns.iter().map(|&t| t as f64 / 1e6).collect();
    let len = ms.len() as f64;
    let mean = ms.iter().sum::<f64>() / len;
    let stddev = if ms.len() < 2 {
        0.0
    } else {
        (ms.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt()
    };
    SummaryStats {
        mean_ms: mean,
        stddev_ms: stddev,
        min_ms: ms.iter().copied().fold(f64::INFINITY, f64::min),
        max_ms: ms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Deterministic operands of one cell.
pub fn prepare_input<D: AbstractDomain>(cell: &GridCell) -> Result<OpInput<D>, crate::generator::GeneratorError> {
    let params = GeneratorParams {
        domain: cell.domain,
        ..GeneratorParams::new(cell.n, cell.density, cell.seed)
    };
    let mut input = match cell.op {
        OpId::CloseFull => OpInput::unary(generate::<D>(&params)?.state),
        OpId::IncMine | OpId::IncChawdhary => {
            let g = generate::<D>(&params)?;
            let closed = g.state.close_full();
            let mut rng = Rng::new(mix(cell.seed ^ 1));
            let k: Constraint = sample_tightening_constraint(&closed, &mut rng, &g.witness, params.median_slack());
            let mut input = OpInput::unary(closed);
            input.constraint = Some(k);
            input
        }
        OpId::Join | OpId::Widen => {
            let (a, b) = generate_pair::<D>(&params, mix(cell.seed))?;
            let mut input = OpInput::unary(a.state.close_full());
            input.second = Some(b.state.close_full());
            input
        }
        OpId::Forget => OpInput::unary(generate::<D>(&params)?.state.close_full()),
    };
    if cell.op == OpId::Forget {
        input.var = Some(Rng::new(mix(cell.seed ^ 2)).index(cell.n));
    }
    Ok(input)
}

/// Times one cell. On a failed check the samples are dropped and the
/// failure is recorded; the remaining iterations are skipped.
pub fn run_cell<D: AbstractDomain>(
    cell: &GridCell,
    c: &HarnessConfig,
    registry: &Registry<D>,
    invocations: &mut u64,
) -> Result<CellRecord, ConfigError> {
    let input = prepare_input::<D>(cell).map_err(|e| ConfigError::Constraint(format!("cell {cell}: {e}")))?;
    let mut record = CellRecord::empty(cell);
    let total = c.warmup_iters + c.measure_iters;
    let mut outputs = Vec::with_capacity(c.batch);
    for iter in 0..total {
        let mut operands: Vec<Option<D>> = (0..c.batch).map(|_| cell.op.fresh_operand(&input)).collect();
        let start = Instant::now();
        for operand in operands.drain(..) {
            outputs.push(black_box(cell.op.run_prepared(black_box(operand), &input)));
        }
        let elapsed = start.elapsed().as_nanos() as u64;
        *invocations += c.batch as u64;
        let sample = (elapsed / c.batch as u64).max(1);

        let mut failures = Vec::new();
        for out in outputs.drain(..) {
            match out {
                Ok(out) if c.checks_enabled => {
                    let ctx = CheckContext {
                        op: cell.op,
                        input: &input,
                        output: &out,
                        consistent_inputs: true,
                    };
                    for r in registry.run_checks(&ctx, Some(*cell)) {
                        match r.verdict {
                            Verdict::Pass => record.checks.passed += 1,
                            Verdict::Fail => failures.push(r),
                        }
                    }
                }
                Ok(_) => {}
                Err(e) => failures.push(CheckReport {
                    check: "operation-error".into(),
                    cell: Some(*cell),
                    verdict: Verdict::Fail,
                    detail: e.to_string(),
                }),
            }
        }
        if !failures.is_empty() {
            record.checks.record_failures(failures);
            record.samples_ns.clear();
            record.warmup_ns.clear();
            return Ok(record);
        }
        if iter < c.warmup_iters {
            record.warmup_ns.push(sample);
        } else {
            record.samples_ns.push(sample);
        }
    }
    record.finish();
    Ok(record)
}

fn run_grid<D: AbstractDomain>(
    c: &HarnessConfig,
    registry: &Registry<D>,
    invocations: &mut u64,
    generated_at: String,
) -> Result<BenchReport, ConfigError> {
    let cells = expand_grid(c)?;
    let started = Instant::now();
    let mut records = Vec::with_capacity(cells.len());
    for cell in &cells {
        records.push(run_cell(cell, c, registry, invocations)?);
    }
    Ok(BenchReport {
        config: c.clone(),
        environment: Environment::probe(generated_at),
        cells: records,
        total_wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Runs the grid with the built-in checks, stamping the report now.
pub fn run_all(c: &HarnessConfig) -> Result<BenchReport, ConfigError> {
    let stamp = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    run_all_counted(c, &mut 0, stamp)
}

/// As [`run_all`], adding every operation invocation to `invocations`.
pub fn run_all_counted(c: &HarnessConfig, invocations: &mut u64, generated_at: String) -> Result<BenchReport, ConfigError> {
    match c.domain {
        DomainKind::Octagon => {
            let r = Registry::<Octagon>::with_builtins(c.incremental_matches_full);
            run_grid(c, &r, invocations, generated_at)
        }
        DomainKind::Zone => {
            let r = Registry::<Zone>::with_builtins(c.incremental_matches_full);
            run_grid(c, &r, invocations, generated_at)
        }
    }
}

/// As [`run_all_counted`] with a caller-built registry.
pub fn run_all_with<D: AbstractDomain>(
    c: &HarnessConfig,
    registry: &Registry<D>,
    invocations: &mut u64,
    generated_at: String,
) -> Result<BenchReport, ConfigError> {
    if c.domain != D::KIND {
        return Err(ConfigError::Constraint(format!(
            "registry is for {} but the config selects {}",
            D::KIND,
            c.domain
        )));
    }
    run_grid(c, registry, invocations, generated_at)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke() -> HarnessConfig {
        HarnessConfig {
            n_set: vec![5],
            density_set: vec![0.5],
            warmup_iters: 1,
            measure_iters: 2,
            checks_enabled: true,
            ..HarnessConfig::default()
        }
    }

    #[test]
    fn grid_sizes() {
        let mut c = HarnessConfig::default();
        assert_eq!(expand_grid(&c).unwrap().len(), 27);
        c.ops = vec![OpId::CloseFull, OpId::Join];
        let g = expand_grid(&c).unwrap();
        assert_eq!(g.len(), 54);
        assert!(g[..27].iter().all(|x| x.op == OpId::CloseFull));
        assert_eq!((g[0].n, g[0].density), (25, 0.1));
        assert_eq!((g[26].n, g[26].density), (100, 0.9));
        assert_eq!(expand_grid(&smoke()).unwrap().len(), 1);
        c.ops.clear();
        assert!(expand_grid(&c).is_err());
    }

    #[test]
    fn textbook_statistics() {
        let ms = |v: &[u64]| v.iter().map(|x| x * 1_000_000).collect::<Vec<_>>();
        let s = summarize(&ms(&[1, 2, 3, 4, 5]));
        assert!((s.mean_ms - 3.0).abs() < 1e-12);
        assert!((s.stddev_ms - 2.5f64.sqrt()).abs() < 1e-12);
        assert_eq!((s.min_ms, s.max_ms), (1.0, 5.0));
        let s = summarize(&[46_800_000]);
        assert_eq!((s.mean_ms, s.stddev_ms), (46.8, 0.0));
    }

    #[test]
    fn density_ranges() {
        assert_eq!(parse_density_range("0.1:0.9:0.1").unwrap(), HarnessConfig::default().density_set);
        assert_eq!(parse_density_range("0.5:0.5:0.1").unwrap(), vec![0.5]);
        for bad in ["0.1:0.9", "a:b:c", "0.5:0.1:0.1", "0.1:0.9:0"] {
            assert!(parse_density_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn key_value_files() {
        let kv = parse_key_values("# comment\nns = 5,10\n\ndensities=0.2:0.4:0.2\nops=join,forget\ncheck=true\n").unwrap();
        let mut c = HarnessConfig::default();
        for (k, v) in &kv {
            c.set(k, v).unwrap();
        }
        assert_eq!(c.n_set, vec![5, 10]);
        assert_eq!(c.density_set, vec![0.2, 0.4]);
        assert_eq!(c.ops, vec![OpId::Join, OpId::Forget]);
        assert!(c.checks_enabled);
        assert!(matches!(parse_key_values("oops"), Err(ConfigError::Malformed { line: 1, .. })));
        assert!(matches!(c.set("speed", "1"), Err(ConfigError::UnknownKey(_))));
        assert!(c.set("ops", "nosuch").is_err());
    }

    #[test]
    fn zone_rejects_incremental_ops() {
        let c = HarnessConfig {
            domain: DomainKind::Zone,
            ops: vec![OpId::IncMine],
            ..smoke()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn every_op_runs_clean_on_both_domains() {
        for domain in [DomainKind::Octagon, DomainKind::Zone] {
            let ops = OpId::ALL
                .into_iter()
                .filter(|o| domain == DomainKind::Octagon || o.incremental_variant().is_none())
                .collect();
            let c = HarnessConfig {
                ops,
                domain,
                incremental_matches_full: true,
                ..smoke()
            };
            let mut count = 0;
            let r = run_all_counted(&c, &mut count, "t".into()).unwrap();
            assert_eq!(count, r.cells.len() as u64 * 3);
            for cell in &r.cells {
                assert_eq!(cell.checks.failed, 0, "{:?}", cell.checks.failures);
                assert_eq!(cell.samples_ns.len(), 2);
                assert_eq!(cell.warmup_ns.len(), 1);
                assert!(cell.samples_ns.iter().all(|&t| t > 0));
                assert!(cell.mean_ms.is_some());
            }
        }
    }

    #[test]
    fn batching_multiplies_invocations() {
        let c = HarnessConfig { batch: 4, ..smoke() };
        let mut count = 0;
        run_all_counted(&c, &mut count, "t".into()).unwrap();
        assert_eq!(count, 12);
    }

    #[test]
    fn inputs_are_deterministic() {
        for op in OpId::ALL {
            let cell = GridCell {
                op,
                ..expand_grid(&smoke()).unwrap()[0]
            };
            assert_eq!(prepare_input::<Octagon>(&cell).unwrap(), prepare_input::<Octagon>(&cell).unwrap());
        }
    }
}
