//! The contract every pluggable abstract domain implements.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bound::Bound;
use crate::constraint::{Constraint, ConstraintKind};
use crate::matrix::Dbm;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DomainError {
    #[error("invalid dimension: a state needs at least one variable, got {0}")]
    InvalidDimension(usize),
    #[error("variable x{var} out of range for {n} variables")]
    VariableOutOfRange { var: usize, n: usize },
    #[error("binary constraint relates x{0} to itself")]
    SelfRelation(usize),
    #[error("dimension mismatch: {left} vs {right} variables")]
    DimensionMismatch { left: usize, right: usize },
    #[error("{op} requires a strongly closed input")]
    NotClosed { op: &'static str },
    #[error("{op} is undefined on the inconsistent element")]
    BottomInput { op: &'static str },
    #[error("{domain} does not support {what}")]
    Unsupported { domain: DomainKind, what: String },
    #[error("constant {0} outside the headroom band")]
    OutOfBand(i64),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainKind {
    Octagon,
    Zone,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Octagon => "octagon",
            DomainKind::Zone => "zone",
        }
    }

    /// Header keyword of the text serialization.
    pub fn header(self) -> &'static str {
        match self {
            DomainKind::Octagon => "oct",
            DomainKind::Zone => "zone",
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DomainKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "octagon" => Ok(DomainKind::Octagon),
            "zone" => Ok(DomainKind::Zone),
            other => Err(format!("unknown domain `{other}` (expected octagon or zone)")),
        }
    }
}

/// Which incremental closure algorithm to run.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum IncrementalVariant {
    /// Floyd-Warshall restricted to the pivots touched by the new constraint.
    Mine,
    /// Single pass over all entries with per-row values hoisted.
    Chawdhary,
}

/// Operations a domain must provide to be generated, benchmarked and checked.
///
/// All operations are pure: they borrow their inputs and return new values.
pub trait AbstractDomain: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const KIND: DomainKind;
    /// Constraint kinds this domain can represent.
    const KINDS: &'static [ConstraintKind];
    /// Kinds the generator emits for every related variable pair.
    const RELATIONAL_KINDS: &'static [ConstraintKind];

    fn top(n: usize) -> Result<Self, DomainError>;
    fn num_vars(&self) -> usize;
    fn is_bottom(&self) -> bool;
    fn is_closed(&self) -> bool;

    fn add_constraint(&self, k: &Constraint) -> Result<Self, DomainError>;
    /// Top with every constraint in `ks` added, not closed.
    fn from_constraints(n: usize, ks: &[Constraint]) -> Result<Self, DomainError> {
        let mut state = Self::top(n)?;
        for k in ks {
            state = state.add_constraint(k)?;
        }
        Ok(state)
    }
    fn close_full(&self) -> Self;
    fn close_incremental(&self, k: &Constraint, variant: IncrementalVariant) -> Result<Self, DomainError>;
    /// Consuming forms of the closures and forget, so a benchmark can time
    /// the operation on a prepared copy without cloning inside the timer.
    fn into_closed(self) -> Self {
        self.close_full()
    }
    fn into_incremental(self, k: &Constraint, variant: IncrementalVariant) -> Result<Self, DomainError> {
        self.close_incremental(k, variant)
    }
    fn into_forgotten(self, var: usize) -> Result<Self, DomainError> {
        self.forget(var)
    }

    fn join(&self, other: &Self) -> Result<Self, DomainError>;
    fn meet(&self, other: &Self) -> Result<Self, DomainError>;
    fn widen(&self, other: &Self) -> Result<Self, DomainError>;
    fn forget(&self, var: usize) -> Result<Self, DomainError>;
    fn includes(&self, other: &Self) -> Result<bool, DomainError>;
    fn equals(&self, other: &Self) -> Result<bool, DomainError>;

    fn achieved_density(&self) -> f64;
    fn contains_point(&self, point: &[i64]) -> bool;
    /// Current bound on the less-or-equal form of `kind` over `(i, j)`;
    /// `None` if the domain cannot express that form.
    fn form_bound(&self, kind: ConstraintKind, i: usize, j: usize) -> Option<Bound>;
    /// Every finite constraint, in canonical serialization order.
    fn constraints(&self) -> Vec<Constraint>;

    /// The underlying matrix (unspecified contents when bottom).
    fn matrix(&self) -> &Dbm;
    /// First pair of entries breaking the domain's symmetry invariant.
    fn coherence_violation(&self) -> Option<String>;
    /// First entry violating the canonical-form inequalities.
    fn canonical_violation(&self) -> Option<String>;
}
