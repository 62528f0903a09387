//! Octagonal constraints `±x ± y <= c` and their unary special cases.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bound::BAND;
use crate::domain::DomainError;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// `x_i - x_j <= c`
    DiffLe,
    /// `x_i + x_j <= c`
    SumLe,
    /// `-x_i - x_j <= c`
    NegSumLe,
    /// `x_j - x_i <= c`
    NegDiffLe,
    /// `x_i <= c`
    UpperLe,
    /// `x_i >= c`
    LowerGe,
}

impl ConstraintKind {
    pub const ALL: [ConstraintKind; 6] = [
        ConstraintKind::DiffLe,
        ConstraintKind::SumLe,
        ConstraintKind::NegSumLe,
        ConstraintKind::NegDiffLe,
        ConstraintKind::UpperLe,
        ConstraintKind::LowerGe,
    ];

    pub fn is_unary(self) -> bool {
        matches!(self, ConstraintKind::UpperLe | ConstraintKind::LowerGe)
    }

    /// Signs `(s_i, s_j)` of the "less-or-equal form" `s_i*x_i + s_j*x_j <= c`.
    /// `LowerGe` is read as `-x_i <= -c`; unary kinds have `s_j = 0`.
    pub fn signs(self) -> (i64, i64) {
        match self {
            ConstraintKind::DiffLe => (1, -1),
            ConstraintKind::SumLe => (1, 1),
            ConstraintKind::NegSumLe => (-1, -1),
            ConstraintKind::NegDiffLe => (-1, 1),
            ConstraintKind::UpperLe => (1, 0),
            ConstraintKind::LowerGe => (-1, 0),
        }
    }
}

/// A single constraint over variables `i` and `j` (`j` ignored for unary
/// kinds). The constant is always finite.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Constraint {
    pub kind: ConstraintKind,
    pub i: usize,
    pub j: usize,
    pub c: i64,
}

impl Constraint {
    pub fn new(kind: ConstraintKind, i: usize, j: usize, c: i64) -> Constraint {
        let j = if kind.is_unary() { i } else { j };
        Constraint { kind, i, j, c }
    }

    pub fn diff(i: usize, j: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::DiffLe, i, j, c)
    }

    pub fn sum(i: usize, j: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::SumLe, i, j, c)
    }

    pub fn neg_sum(i: usize, j: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::NegSumLe, i, j, c)
    }

    pub fn neg_diff(i: usize, j: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::NegDiffLe, i, j, c)
    }

    pub fn upper(i: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::UpperLe, i, i, c)
    }

    pub fn lower(i: usize, c: i64) -> Constraint {
        Constraint::new(ConstraintKind::LowerGe, i, i, c)
    }

    /// Rebuilds a constraint from its less-or-equal form bound (see
    /// [`ConstraintKind::signs`]).
    pub fn from_le_form(kind: ConstraintKind, i: usize, j: usize, le_bound: i64) -> Constraint {
        match kind {
            ConstraintKind::LowerGe => Constraint::lower(i, -le_bound),
            _ => Constraint::new(kind, i, j, le_bound),
        }
    }

    /// The right-hand side of the less-or-equal form.
    pub fn le_bound(&self) -> i64 {
        match self.kind {
            ConstraintKind::LowerGe => -self.c,
            _ => self.c,
        }
    }

    /// Value of the less-or-equal form's left-hand side at `point`.
    pub fn form_value(kind: ConstraintKind, i: usize, j: usize, point: &[i64]) -> i64 {
        let (si, sj) = kind.signs();
        si * point[i] + if sj == 0 { 0 } else { sj * point[j] }
    }

    pub fn is_satisfied_by(&self, point: &[i64]) -> bool {
        Constraint::form_value(self.kind, self.i, self.j, point) <= self.le_bound()
    }

    /// The complement over the integers (`e <= c` becomes `e >= c + 1`).
    pub fn negate(&self) -> Constraint {
        let c = self.c;
        match self.kind {
            ConstraintKind::DiffLe => Constraint::neg_diff(self.i, self.j, -c - 1),
            ConstraintKind::NegDiffLe => Constraint::diff(self.i, self.j, -c - 1),
            ConstraintKind::SumLe => Constraint::neg_sum(self.i, self.j, -c - 1),
            ConstraintKind::NegSumLe => Constraint::sum(self.i, self.j, -c - 1),
            ConstraintKind::UpperLe => Constraint::lower(self.i, c + 1),
            ConstraintKind::LowerGe => Constraint::upper(self.i, c - 1),
        }
    }

    /// Checks variable ranges, self-relations and the constant's band.
    pub fn validate(&self, n: usize) -> Result<(), DomainError> {
        for var in [self.i, self.j] {
            if var >= n {
                return Err(DomainError::VariableOutOfRange { var, n });
            }
        }
        if !self.kind.is_unary() && self.i == self.j {
            return Err(DomainError::SelfRelation(self.i));
        }
        // unary constants are stored doubled
        let limit = if self.kind.is_unary() { BAND / 2 } else { BAND };
        if !(-limit..=limit).contains(&self.c) {
            return Err(DomainError::OutOfBand(self.c));
        }
        Ok(())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, c) = (self.i, self.j, self.c);
        match self.kind {
            ConstraintKind::DiffLe => write!(f, "x{i} - x{j} <= {c}"),
            ConstraintKind::NegDiffLe => write!(f, "x{j} - x{i} <= {c}"),
            ConstraintKind::SumLe => write!(f, "x{i} + x{j} <= {c}"),
            ConstraintKind::NegSumLe => write!(f, "-x{i} - x{j} <= {c}"),
            ConstraintKind::UpperLe => write!(f, "x{i} <= {c}"),
            ConstraintKind::LowerGe => write!(f, "x{i} >= {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed constraint `{0}`")]
pub struct ConstraintParseError(pub String);

fn parse_var(tok: &str) -> Option<usize> {
    tok.strip_prefix('x')?.parse().ok()
}

impl FromStr for Constraint {
    type Err = ConstraintParseError;

    /// Accepts exactly the canonical forms produced by `Display`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ConstraintParseError(s.to_string());
        let toks: Vec<&str> = s.split_whitespace().collect();
        let c = |t: &str| t.parse::<i64>().map_err(|_| err());
        match toks.as_slice() {
            [x, "<=", k] => Ok(Constraint::upper(parse_var(x).ok_or_else(err)?, c(k)?)),
            [x, ">=", k] => Ok(Constraint::lower(parse_var(x).ok_or_else(err)?, c(k)?)),
            [x, op, y, "<=", k] => {
                let (neg, x) = match x.strip_prefix('-') {
                    Some(rest) => (true, rest),
                    None => (false, *x),
                };
                let i = parse_var(x).ok_or_else(err)?;
                let j = parse_var(y).ok_or_else(err)?;
                let k = c(k)?;
                let out = match (neg, *op) {
                    (false, "-") => Constraint::diff(i, j, k),
                    (false, "+") => Constraint::sum(i, j, k),
                    (true, "-") => Constraint::neg_sum(i, j, k),
                    _ => return Err(err()),
                };
                Ok(out)
            }
            _ => Err(err()),
        }
    }
}
