//! Benchmarking toolkit for weakly-relational numerical abstract domains.
//!
//! The crate provides the Octagon and Zone domains behind one
//! [`AbstractDomain`] contract, a seeded generator of consistent synthetic
//! states, correctness checks run around every timed operation, the
//! warmup/measurement harness, and CSV/JSON/console reporting.

pub mod bound;
pub mod checks;
pub mod constraint;
pub mod domain;
pub mod generator;
pub mod harness;
pub mod matrix;
pub mod octagon;
pub mod op;
pub mod oracle_bridge;
pub mod report;
pub mod rng;
pub mod text;
pub mod verify;
pub mod zone;

pub use bound::{bar, bound_add, bound_min, halve_floor, Bound, DbmIndex};
pub use constraint::{Constraint, ConstraintKind};
pub use domain::{AbstractDomain, DomainError, DomainKind, IncrementalVariant};
pub use harness::HarnessConfig;
pub use matrix::Dbm;
pub use octagon::{Closure, Interval, Octagon};
pub use op::{GridCell, OpId, OpInput};
pub use report::BenchReport;
pub use zone::Zone;
