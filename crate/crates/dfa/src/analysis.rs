//! Transfer functions and the worklist fixpoint over octagons.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use octobench_core::{Constraint, DomainError, Octagon};
use serde::Serialize;

use crate::cfg::{Cfg, Label};
use crate::syntax::Expr;

/// How a transfer function restores closure after adding constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosureChoice {
    #[serde(rename = "close-full")]
    Full,
    #[serde(rename = "inc-mine")]
    IncMine,
    #[serde(rename = "inc-chawdhary")]
    IncChawdhary,
}

impl ClosureChoice {
    pub const ALL: [ClosureChoice; 3] = [ClosureChoice::Full, ClosureChoice::IncMine, ClosureChoice::IncChawdhary];

    pub fn name(self) -> &'static str {
        match self {
            ClosureChoice::Full => "close-full",
            ClosureChoice::IncMine => "inc-mine",
            ClosureChoice::IncChawdhary => "inc-chawdhary",
        }
    }
}

impl fmt::Display for ClosureChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClosureChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClosureChoice::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown closure `{s}` (expected close-full, inc-mine or inc-chawdhary)"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Counters {
    pub closures: u64,
    pub incremental_closures: u64,
    pub full_closures: u64,
    pub joins: u64,
    pub widenings: u64,
    pub transfers: u64,
    pub point_visits: u64,
    pub closure_ns: u64,
}

/// Adds constraints to closed states and re-closes them, counting and
/// timing every closure.
pub struct Transfer {
    pub choice: ClosureChoice,
    pub counters: Counters,
}

impl Transfer {
    pub fn new(choice: ClosureChoice) -> Transfer {
        Transfer {
            choice,
            counters: Counters::default(),
        }
    }

    fn full(&mut self, o: Octagon) -> Octagon {
        let t = Instant::now();
        let out = o.into_closed();
        self.counters.closure_ns += t.elapsed().as_nanos() as u64;
        self.counters.closures += 1;
        self.counters.full_closures += 1;
        out
    }

    /// Conjoins `ks` with the closed state `o` and re-closes. A single
    /// constraint goes through the chosen incremental closure; several are
    /// added together and closed in full.
    pub fn add_all(&mut self, o: Octagon, ks: &[Constraint]) -> Result<Octagon, DomainError> {
        debug_assert!(o.is_bottom() || o.is_closed());
        if o.is_bottom() || ks.is_empty() {
            return Ok(o);
        }
        if let ([k], ClosureChoice::IncMine | ClosureChoice::IncChawdhary) = (ks, self.choice) {
            let t = Instant::now();
            let out = match self.choice {
                ClosureChoice::IncMine => o.into_incremental_mine(k)?,
                _ => o.into_incremental_chawdhary(k, &mut ())?,
            };
            self.counters.closure_ns += t.elapsed().as_nanos() as u64;
            self.counters.closures += 1;
            self.counters.incremental_closures += 1;
            return Ok(out);
        }
        let mut o = o;
        for k in ks {
            o = o.add_constraint(k)?;
        }
        Ok(self.full(o))
    }

    /// Post-state of one edge on a closed, non-bottom state.
    pub fn apply(&mut self, label: &Label, o: &Octagon) -> Result<Octagon, DomainError> {
        self.counters.transfers += 1;
        if o.is_bottom() {
            return Ok(o.clone());
        }
        match label {
            l if l.is_skip() => Ok(o.clone()),
            Label::Assume(c) => self.add_all(o.clone(), &[c.to_constraint()]),
            Label::Assign { target, expr } => self.assign(*target, expr, o),
        }
    }

    fn assign(&mut self, x: usize, expr: &Expr, o: &Octagon) -> Result<Octagon, DomainError> {
        match *expr {
            Expr::Const(k) => {
                let f = o.forget(x)?;
                self.add_all(f, &[Constraint::upper(x, k), Constraint::lower(x, k)])
            }
            Expr::Var(y) if y == x => Ok(o.clone()),
            Expr::Var(y) => {
                let f = o.forget(x)?;
                self.add_all(f, &[Constraint::diff(x, y, 0), Constraint::diff(y, x, 0)])
            }
            Expr::Offset(y, k) if y == x => o.translate(x, k),
            Expr::Offset(y, k) => {
                let f = o.forget(x)?;
                self.add_all(f, &[Constraint::diff(x, y, k), Constraint::diff(y, x, -k)])
            }
            Expr::Sum(y, z) => {
                let (iy, iz) = (o.interval_of(y)?, o.interval_of(z)?);
                let mut ks = Vec::new();
                if let (Some(a), Some(b)) = (iy.hi, iz.hi) {
                    ks.push(Constraint::upper(x, a + b));
                }
                if let (Some(a), Some(b)) = (iy.lo, iz.lo) {
                    ks.push(Constraint::lower(x, a + b));
                }
                let f = o.forget(x)?;
                self.add_all(f, &ks)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    /// Closed invariant per program point; `None` where unreachable.
    pub invariants: Vec<Option<Octagon>>,
    pub counters: Counters,
    pub visits: Vec<u64>,
}

/// Visits after which a loop head stops being recomputed; only reached if
/// widening were broken.
pub const VISIT_LIMIT: u64 = 10_000;

/// Worklist fixpoint. Merge points join; a loop head joins on its first
/// `widen_delay` updates and widens afterwards. Widened iterates are kept
/// unclosed (closing them could undo the extrapolation) and a closed copy
/// feeds the transfer functions.
pub fn analyze(cfg: &Cfg, num_vars: usize, widen_delay: u64, choice: ClosureChoice) -> Result<Analysis, DomainError> {
    let mut tr = Transfer::new(choice);
    let mut raw: Vec<Option<Octagon>> = vec![None; cfg.num_points];
    let mut updates = vec![0u64; cfg.num_points];
    let mut visits = vec![0u64; cfg.num_points];
    raw[cfg.entry] = Some(Octagon::top(num_vars)?);
    let mut work = BTreeSet::from([cfg.entry]);

    while let Some(u) = work.pop_first() {
        visits[u] += 1;
        tr.counters.point_visits += 1;
        assert!(visits[u] <= VISIT_LIMIT, "fixpoint did not stabilize at point {u}");
        let state = closed(&mut tr, raw[u].as_ref().expect("queued points are reachable"));
        for &ei in &cfg.succ[u] {
            let e = &cfg.edges[ei];
            let out = tr.apply(&e.label, &state)?;
            if out.is_bottom() {
                continue;
            }
            let v = e.to;
            let next = match &raw[v] {
                None => out,
                Some(old) => {
                    let old_closed = closed(&mut tr, old);
                    tr.counters.joins += 1;
                    let joined = old_closed.join(&out)?;
                    if cfg.loop_heads[v] && updates[v] >= widen_delay {
                        tr.counters.widenings += 1;
                        old.widen(&joined)?
                    } else {
                        joined
                    }
                }
            };
            if raw[v].as_ref().is_some_and(|old| old.dbm() == next.dbm()) {
                continue;
            }
            if raw[v].is_some() {
                updates[v] += 1;
            }
            raw[v] = Some(next);
            work.insert(v);
        }
    }
    let invariants = raw.iter().map(|s| s.as_ref().map(|o| closed(&mut tr, o))).collect();
    Ok(Analysis {
        invariants,
        counters: tr.counters,
        visits,
    })
}

fn closed(tr: &mut Transfer, o: &Octagon) -> Octagon {
    if o.is_closed() || o.is_bottom() {
        o.clone()
    } else {
        tr.full(o.clone())
    }
}
