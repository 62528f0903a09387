//! Analysis results as JSON and console text.

use std::fmt::Write as _;

use octobench_core::{Constraint, Interval, Octagon};
use serde::Serialize;

use crate::analysis::{Analysis, ClosureChoice, Counters};
use crate::cfg::Cfg;
use crate::syntax::Program;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarInterval {
    pub var: String,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointInvariant {
    pub point: usize,
    pub loop_head: bool,
    pub reachable: bool,
    pub density: f64,
    pub constraints: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DfaReport {
    pub program: String,
    pub closure: ClosureChoice,
    pub widen_delay: u64,
    pub counters: Counters,
    pub closure_ms: f64,
    pub total_ms: f64,
    pub exit: Vec<VarInterval>,
    pub invariants: Vec<PointInvariant>,
}

/// Renders `k` with the program's variable names.
pub fn show_constraint(p: &Program, k: &Constraint) -> String {
    k.to_string()
        .split(' ')
        .map(|tok| {
            let (sign, rest) = tok.strip_prefix('-').map_or(("", tok), |r| ("-", r));
            match rest.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                Some(v) if v < p.vars.len() => format!("{sign}{}", p.vars[v]),
                _ => tok.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn intervals(p: &Program, o: &Octagon) -> Vec<VarInterval> {
    (0..p.vars.len())
        .map(|v| {
            let Interval { lo, hi } = o.interval_of(v).expect("invariants are closed");
            VarInterval {
                var: p.vars[v].clone(),
                lo,
                hi,
            }
        })
        .collect()
}

impl DfaReport {
    pub fn new(name: &str, p: &Program, cfg: &Cfg, a: &Analysis, choice: ClosureChoice, widen_delay: u64, total_ns: u64) -> DfaReport {
        let invariants = a
            .invariants
            .iter()
            .enumerate()
            .map(|(point, s)| PointInvariant {
                point,
                loop_head: cfg.loop_heads[point],
                reachable: s.is_some(),
                density: s.as_ref().map_or(0.0, |o| o.achieved_density()),
                constraints: s
                    .as_ref()
                    .map(|o| o.constraints().iter().map(|k| show_constraint(p, k)).collect())
                    .unwrap_or_default(),
            })
            .collect();
        let exit = match &a.invariants[cfg.exit] {
            Some(o) if !o.is_bottom() => intervals(p, o),
            _ => Vec::new(),
        };
        DfaReport {
            program: name.to_string(),
            closure: choice,
            widen_delay,
            counters: a.counters.clone(),
            closure_ms: a.counters.closure_ns as f64 / 1e6,
            total_ms: total_ns as f64 / 1e6,
            exit,
            invariants,
        }
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render(&self) -> String {
        let c = &self.counters;
        let mut s = String::new();
        let _ = writeln!(s, "program {} closure {} widen-delay {}", self.program, self.closure, self.widen_delay);
        let _ = writeln!(
            s,
            "closures {} ({} full, {} incremental)  joins {}  widenings {}  transfers {}  visits {}",
            c.closures, c.full_closures, c.incremental_closures, c.joins, c.widenings, c.transfers, c.point_visits
        );
        let _ = writeln!(s, "closure time {:.3} ms  total {:.3} ms", self.closure_ms, self.total_ms);
        for p in self.invariants.iter().filter(|p| p.loop_head) {
            let _ = writeln!(s, "loop head {} density {:.2}", p.point, p.density);
        }
        if self.exit.is_empty() {
            let _ = writeln!(s, "exit unreachable");
        }
        for v in &self.exit {
            let lo = v.lo.map_or("-inf".to_string(), |x| x.to_string());
            let hi = v.hi.map_or("+inf".to_string(), |x| x.to_string());
            let _ = writeln!(s, "exit {} in [{lo}, {hi}]", v.var);
        }
        s
    }
}
