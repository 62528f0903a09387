//! Benchmarkable operations and the inputs they consume.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constraint::Constraint;
use crate::domain::{AbstractDomain, DomainError, DomainKind, IncrementalVariant};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpId {
    #[serde(rename = "close-full")]
    CloseFull,
    #[serde(rename = "inc-mine")]
    IncMine,
    #[serde(rename = "inc-chawdhary")]
    IncChawdhary,
    #[serde(rename = "join")]
    Join,
    #[serde(rename = "forget")]
    Forget,
    #[serde(rename = "widen")]
    Widen,
}

impl OpId {
    pub const ALL: [OpId; 6] = [
        OpId::CloseFull,
        OpId::IncMine,
        OpId::IncChawdhary,
        OpId::Join,
        OpId::Forget,
        OpId::Widen,
    ];
    pub const CLOSURES: [OpId; 3] = [OpId::CloseFull, OpId::IncMine, OpId::IncChawdhary];

    pub fn name(self) -> &'static str {
        match self {
            OpId::CloseFull => "close-full",
            OpId::IncMine => "inc-mine",
            OpId::IncChawdhary => "inc-chawdhary",
            OpId::Join => "join",
            OpId::Forget => "forget",
            OpId::Widen => "widen",
        }
    }

    pub fn is_closure(self) -> bool {
        OpId::CLOSURES.contains(&self)
    }

    pub fn incremental_variant(self) -> Option<IncrementalVariant> {
        match self {
            OpId::IncMine => Some(IncrementalVariant::Mine),
            OpId::IncChawdhary => Some(IncrementalVariant::Chawdhary),
            _ => None,
        }
    }

    /// Whether the op consumes a private copy of the first operand.
    pub fn consumes_operand(self) -> bool {
        !matches!(self, OpId::Join | OpId::Widen)
    }

    /// The copy [`OpId::run_prepared`] expects, made ahead of timing.
    pub fn fresh_operand<D: AbstractDomain>(self, input: &OpInput<D>) -> Option<D> {
        self.consumes_operand().then(|| input.first.clone())
    }

    /// Executes the operation on an operand from [`OpId::fresh_operand`],
    /// updating it in place where the domain supports that.
    pub fn run_prepared<D: AbstractDomain>(self, operand: Option<D>, input: &OpInput<D>) -> Result<D, DomainError> {
        let own = || operand.expect("consuming op without a prepared operand");
        match self {
            OpId::CloseFull => Ok(own().into_closed()),
            OpId::IncMine | OpId::IncChawdhary => {
                let k = input.constraint.as_ref().expect("incremental op without a constraint");
                own().into_incremental(k, self.incremental_variant().unwrap())
            }
            OpId::Forget => own().into_forgotten(input.var.expect("forget without a variable")),
            OpId::Join => input.first.join(input.second()),
            OpId::Widen => input.first.widen(input.second()),
        }
    }

    /// Executes the operation. Every input the op needs must be present.
    pub fn apply<D: AbstractDomain>(self, input: &OpInput<D>) -> Result<D, DomainError> {
        match self {
            OpId::CloseFull => Ok(input.first.close_full()),
            OpId::IncMine | OpId::IncChawdhary => {
                let k = input.constraint.as_ref().expect("incremental op without a constraint");
                input.first.close_incremental(k, self.incremental_variant().unwrap())
            }
            OpId::Join => input.first.join(input.second()),
            OpId::Widen => input.first.widen(input.second()),
            OpId::Forget => input.first.forget(input.var.expect("forget without a variable")),
        }
    }
}

impl fmt::Display for OpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OpId::ALL.into_iter().find(|o| o.name() == s).ok_or_else(|| {
            let known: Vec<_> = OpId::ALL.iter().map(|o| o.name()).collect();
            format!("unknown op `{s}` (expected one of {})", known.join(", "))
        })
    }
}

/// Operands of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct OpInput<D> {
    pub first: D,
    pub second: Option<D>,
    pub constraint: Option<Constraint>,
    pub var: Option<usize>,
}

impl<D> OpInput<D> {
    pub fn unary(first: D) -> OpInput<D> {
        OpInput {
            first,
            second: None,
            constraint: None,
            var: None,
        }
    }

    pub fn second(&self) -> &D {
        self.second.as_ref().expect("binary op without a second operand")
    }
}

/// One `(op, n, density)` point of the benchmark grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub op: OpId,
    pub domain: DomainKind,
    pub n: usize,
    pub density: f64,
    #[serde(skip)]
    pub density_index: usize,
    pub seed: u64,
}

impl fmt::Display for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} n={} density={:.1} seed={}",
            self.op, self.domain, self.n, self.density, self.seed
        )
    }
}
