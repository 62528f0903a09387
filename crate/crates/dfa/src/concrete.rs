//! Exact integer interpreter over the control-flow graph.

use crate::cfg::{Cfg, Label};
use crate::syntax::Expr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExecError {
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("no enabled edge out of point {0}")]
    Stuck(usize),
    #[error("arithmetic overflow at point {0}")]
    Overflow(usize),
}

/// One visit of a program point with the valuation on arrival.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Visit {
    pub point: usize,
    pub values: Vec<i64>,
}

/// Runs from the entry with every variable at 0 until the exit is reached.
/// An assume whose condition is false blocks execution, which is reported
/// as [`ExecError::Stuck`].
pub fn concrete_exec(cfg: &Cfg, num_vars: usize, max_steps: usize) -> Result<Vec<Visit>, ExecError> {
    let mut values = vec![0i64; num_vars];
    let mut at = cfg.entry;
    let mut trace = vec![Visit {
        point: at,
        values: values.clone(),
    }];
    for _ in 0..max_steps {
        if at == cfg.exit {
            return Ok(trace);
        }
        let mut moved = false;
        for &ei in &cfg.succ[at] {
            let e = &cfg.edges[ei];
            let enabled = match &e.label {
                Label::Assume(c) => c.holds(&values),
                Label::Assign { target, expr } => {
                    values[*target] = eval(expr, &values).ok_or(ExecError::Overflow(at))?;
                    true
                }
            };
            if enabled {
                at = e.to;
                moved = true;
                break;
            }
        }
        if !moved {
            return Err(ExecError::Stuck(at));
        }
        trace.push(Visit {
            point: at,
            values: values.clone(),
        });
    }
    if at == cfg.exit {
        Ok(trace)
    } else {
        Err(ExecError::BudgetExhausted(max_steps))
    }
}

fn eval(e: &Expr, v: &[i64]) -> Option<i64> {
    match *e {
        Expr::Const(k) => Some(k),
        Expr::Var(y) => Some(v[y]),
        Expr::Offset(y, k) => v[y].checked_add(k),
        Expr::Sum(y, z) => v[y].checked_add(v[z]),
    }
}
