//! Plain-text serialization of states.
//!
//! ```text
//! oct n=3
//! x0 <= 5
//! x0 - x2 <= -1
//! # witness: 4 0 6
//! ```
//!
//! The header is `oct n=<n>` or `zone n=<n>`, then one constraint per line.
//! The inconsistent element is the header followed by a single `bottom`
//! line. Lines starting with `#` are comments.

use std::fmt::Write as _;

use crate::constraint::{Constraint, ConstraintParseError};
use crate::domain::{AbstractDomain, DomainError};
use crate::generator::Generated;

const WITNESS_PREFIX: &str = "# witness:";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TextError {
    #[error("line {line}: expected header `{expected} n=<count>`")]
    BadHeader { line: usize, expected: &'static str },
    #[error("empty input")]
    Empty,
    #[error("line {line}: {source}")]
    Constraint {
        line: usize,
        #[source]
        source: ConstraintParseError,
    },
    #[error("line {line}: {source}")]
    Domain {
        line: usize,
        #[source]
        source: DomainError,
    },
    #[error("line {line}: `bottom` must be the only line after the header")]
    MixedBottom { line: usize },
}

pub fn write_state<D: AbstractDomain>(d: &D) -> String {
    let mut out = format!("{} n={}\n", D::KIND.header(), d.num_vars());
    if d.is_bottom() {
        out.push_str("bottom\n");
    } else {
        for k in d.constraints() {
            writeln!(out, "{k}").unwrap();
        }
    }
    out
}

/// The state followed by its `# witness:` comment.
pub fn write_generated<D: AbstractDomain>(g: &Generated<D>) -> String {
    let mut out = write_state(&g.state);
    out.push_str(WITNESS_PREFIX);
    for v in &g.witness {
        write!(out, " {v}").unwrap();
    }
    out.push('\n');
    out
}

/// Parses a state; the result is not closed.
pub fn read_state<D: AbstractDomain>(text: &str) -> Result<D, TextError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(TextError::Empty)?;
    let expected = D::KIND.header();
    let n: usize = header
        .strip_prefix(expected)
        .and_then(|r| r.trim_start().strip_prefix("n="))
        .and_then(|r| r.parse().ok())
        .ok_or(TextError::BadHeader { line: hline, expected })?;
    let dom = |line| move |source| TextError::Domain { line, source };
    let mut state = D::top(n).map_err(dom(hline))?;
    let mut saw_constraint = false;
    let mut bottom_line = None;
    for (line, body) in lines {
        if body == "bottom" {
            if saw_constraint || bottom_line.is_some() {
                return Err(TextError::MixedBottom { line });
            }
            bottom_line = Some(line);
            continue;
        }
        if bottom_line.is_some() {
            return Err(TextError::MixedBottom { line });
        }
        let k: Constraint = body
            .parse()
            .map_err(|source| TextError::Constraint { line, source })?;
        state = state.add_constraint(&k).map_err(dom(line))?;
        saw_constraint = true;
    }
    if let Some(line) = bottom_line {
        let contradiction = [Constraint::upper(0, 0), Constraint::lower(0, 1)];
        for k in &contradiction {
            state = state.add_constraint(k).map_err(dom(line))?;
        }
        state = state.close_full();
    }
    Ok(state)
}

/// The values of the first `# witness:` line, if any.
pub fn read_witness(text: &str) -> Option<Vec<i64>> {
    let rest = text.lines().find_map(|l| l.trim().strip_prefix(WITNESS_PREFIX))?;
    rest.split_whitespace().map(|t| t.parse().ok()).collect()
}
