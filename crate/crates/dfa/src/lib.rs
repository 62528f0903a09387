//! A small octagon data-flow analyzer for programs built from assignments,
//! assumptions and while loops. Used to compare closure algorithms inside a
//! fixpoint computation.

pub mod analysis;
pub mod builtins;
pub mod cfg;
pub mod concrete;
pub mod report;
pub mod syntax;

use std::time::Instant;

pub use analysis::{analyze, Analysis, ClosureChoice, Counters};
pub use cfg::Cfg;
pub use report::DfaReport;
pub use syntax::{parse_program, Program, SyntaxError};

/// Widening delay used when none is given.
pub const DEFAULT_WIDEN_DELAY: u64 = 3;

/// Parses, analyzes and reports in one go.
pub fn run_source(name: &str, text: &str, choice: ClosureChoice, widen_delay: u64) -> Result<DfaReport, SyntaxError> {
    let p = parse_program(text)?;
    let cfg = Cfg::build(&p);
    let t = Instant::now();
    let a = analyze(&cfg, p.vars.len(), widen_delay, choice).expect("transfer functions stay within the program's variables");
    let total = t.elapsed().as_nanos() as u64;
    Ok(DfaReport::new(name, &p, &cfg, &a, choice, widen_delay, total))
}
