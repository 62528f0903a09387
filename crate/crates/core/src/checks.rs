//! Named correctness predicates evaluated on the output of every timed
//! operation, outside the timed region.

use std::fmt;

use serde::Serialize;

use crate::bound::Bound;
use crate::domain::AbstractDomain;
use crate::op::{GridCell, OpId, OpInput};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Severity {
    Fatal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Everything a predicate may look at. Predicates only get shared borrows.
pub struct CheckContext<'a, D> {
    pub op: OpId,
    pub input: &'a OpInput<D>,
    pub output: &'a D,
    /// Inputs are known to be consistent (generator output).
    pub consistent_inputs: bool,
}

pub type Predicate<D> = Box<dyn Fn(&CheckContext<'_, D>) -> Result<(), String> + Send + Sync>;

pub struct CheckSpec<D> {
    pub name: String,
    pub applies_to: Vec<OpId>,
    pub severity: Severity,
    pub predicate: Predicate<D>,
}

impl<D> CheckSpec<D> {
    pub fn new(
        name: impl Into<String>,
        applies_to: &[OpId],
        predicate: impl Fn(&CheckContext<'_, D>) -> Result<(), String> + Send + Sync + 'static,
    ) -> CheckSpec<D> {
        CheckSpec {
            name: name.into(),
            applies_to: applies_to.to_vec(),
            severity: Severity::Fatal,
            predicate: Box::new(predicate),
        }
    }

    pub fn applies(&self, op: OpId) -> bool {
        self.applies_to.contains(&op)
    }
}

impl<D> fmt::Debug for CheckSpec<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckSpec")
            .field("name", &self.name)
            .field("applies_to", &self.applies_to)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub cell: Option<GridCell>,
    pub verdict: Verdict,
    /// Empty on pass.
    pub detail: String,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {:?}", self.check, self.verdict)?;
        if let Some(c) = &self.cell {
            write!(f, " [{c}]")?;
        }
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("check `{0}` is already registered")]
pub struct DuplicateCheck(pub String);

pub struct Registry<D> {
    checks: Vec<CheckSpec<D>>,
}

impl<D> Default for Registry<D> {
    fn default() -> Self {
        Registry { checks: Vec::new() }
    }
}

impl<D> fmt::Debug for Registry<D> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.checks.iter().map(|c| &c.name)).finish()
    }
}

pub const INCREMENTAL_MATCHES_FULL: &str = "incremental-matches-full";

impl<D: AbstractDomain> Registry<D> {
    pub fn empty() -> Registry<D> {
        Registry::default()
    }

    /// All built-in checks; the O(n^3) `incremental-matches-full` only when
    /// asked for.
    pub fn with_builtins(incremental_matches_full: bool) -> Registry<D> {
        let mut r = Registry::empty();
        for spec in builtins::<D>(incremental_matches_full) {
            r.register(spec).expect("built-in names are unique");
        }
        r
    }

    pub fn register(&mut self, spec: CheckSpec<D>) -> Result<(), DuplicateCheck> {
        if self.checks.iter().any(|c| c.name == spec.name) {
            return Err(DuplicateCheck(spec.name));
        }
        self.checks.push(spec);
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.checks.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.checks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checks.is_empty()
    }

    pub fn run_checks(&self, ctx: &CheckContext<'_, D>, cell: Option<GridCell>) -> Vec<CheckReport> {
        self.checks
            .iter()
            .filter(|c| c.applies(ctx.op))
            .map(|c| {
                let (verdict, detail) = match (c.predicate)(ctx) {
                    Ok(()) => (Verdict::Pass, String::new()),
                    Err(mut d) => {
                        if let Some(k) = &ctx.input.constraint {
                            d.push_str(&format!(" (constraint `{k}`)"));
                        }
                        (Verdict::Fail, d)
                    }
                };
                CheckReport {
                    check: c.name.clone(),
                    cell,
                    verdict,
                    detail,
                }
            })
            .collect()
    }
}

fn fail_if(violation: Option<String>) -> Result<(), String> {
    violation.map_or(Ok(()), Err)
}

fn builtins<D: AbstractDomain>(incremental_matches_full: bool) -> Vec<CheckSpec<D>> {
    let all = &OpId::ALL;
    let closures = &OpId::CLOSURES;
    let mut v = vec![
        CheckSpec::new("coherent", all, |c: &CheckContext<'_, D>| {
            if c.output.is_bottom() {
                return Ok(());
            }
            fail_if(c.output.coherence_violation())
        }),
        CheckSpec::new("zero-diagonal", all, |c: &CheckContext<'_, D>| {
            if c.output.is_bottom() {
                return Ok(());
            }
            match c.output.matrix().first_nonzero_diagonal() {
                Some(i) => Err(format!("m[{i}][{i}] = {}", c.output.matrix().get(i, i))),
                None => Ok(()),
            }
        }),
        CheckSpec::new("not-bottom", all, |c: &CheckContext<'_, D>| {
            if c.consistent_inputs && c.output.is_bottom() {
                Err("consistent input produced bottom".into())
            } else {
                Ok(())
            }
        }),
        CheckSpec::new("closure-tightens", closures, |c: &CheckContext<'_, D>| {
            if c.output.is_bottom() || c.input.first.is_bottom() {
                return Ok(());
            }
            match c.output.matrix().first_above(c.input.first.matrix()) {
                Some((i, j)) => Err(format!(
                    "m[{i}][{j}] rose from {} to {}",
                    c.input.first.matrix().get(i, j),
                    c.output.matrix().get(i, j)
                )),
                None => Ok(()),
            }
        }),
        CheckSpec::new("closure-idempotent", closures, |c: &CheckContext<'_, D>| {
            let again = c.output.close_full();
            if again == *c.output {
                return Ok(());
            }
            if again.is_bottom() != c.output.is_bottom() {
                return Err("re-closing changed the bottom verdict".into());
            }
            let (i, j) = c.output.matrix().first_above(again.matrix()).unwrap_or((0, 0));
            Err(format!(
                "re-closing lowered m[{i}][{j}] from {} to {}",
                c.output.matrix().get(i, j),
                again.matrix().get(i, j)
            ))
        }),
        CheckSpec::new("closure-canonical", closures, |c: &CheckContext<'_, D>| {
            if c.output.is_bottom() {
                return Ok(());
            }
            fail_if(c.output.canonical_violation())
        }),
        CheckSpec::new("join-upper-bound", &[OpId::Join], |c: &CheckContext<'_, D>| {
            for (label, operand) in [("first", &c.input.first), ("second", c.input.second())] {
                match c.output.includes(operand) {
                    Ok(true) => {}
                    Ok(false) => return Err(format!("join does not include the {label} operand")),
                    Err(e) => return Err(e.to_string()),
                }
            }
            Ok(())
        }),
        CheckSpec::new("forget-clears-var", &[OpId::Forget], |c: &CheckContext<'_, D>| {
            let var = c.input.var.expect("forget input names a variable");
            forget_residue(c.output, var).map_or(Ok(()), Err)
        }),
    ];
    if incremental_matches_full {
        v.push(CheckSpec::new(
            INCREMENTAL_MATCHES_FULL,
            &[OpId::IncMine, OpId::IncChawdhary],
            |c: &CheckContext<'_, D>| {
                let k = c.input.constraint.as_ref().expect("incremental input carries a constraint");
                let full = c.input.first.add_constraint(k).map_err(|e| e.to_string())?.close_full();
                if full == *c.output {
                    return Ok(());
                }
                if full.is_bottom() != c.output.is_bottom() {
                    return Err(format!(
                        "bottom verdicts differ: full {}, incremental {}",
                        full.is_bottom(),
                        c.output.is_bottom()
                    ));
                }
                let (i, j) = full
                    .matrix()
                    .first_above(c.output.matrix())
                    .or_else(|| c.output.matrix().first_above(full.matrix()))
                    .unwrap_or((0, 0));
                Err(format!(
                    "m[{i}][{j}]: incremental {} vs full {}",
                    c.output.matrix().get(i, j),
                    full.matrix().get(i, j)
                ))
            },
        ));
    }
    v
}

/// First finite bound that still mentions `var`.
fn forget_residue<D: AbstractDomain>(d: &D, var: usize) -> Option<String> {
    if d.is_bottom() {
        return Some("forget produced bottom".into());
    }
    for kind in D::KINDS {
        let partners: Vec<usize> = if kind.is_unary() {
            vec![var]
        } else {
            (0..d.num_vars()).filter(|&j| j != var).collect()
        };
        for j in partners {
            if let Some(b @ Bound::Finite(_)) = d.form_bound(*kind, var, j) {
                return Some(format!("{kind:?} over (x{var}, x{j}) still bounded by {b}"));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraint::Constraint;
    use crate::generator::{generate, GeneratorParams};
    use crate::octagon::Octagon;

    fn fail_names(reports: &[CheckReport]) -> Vec<&str> {
        reports
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .map(|r| r.check.as_str())
            .collect()
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let mut r = Registry::<Octagon>::with_builtins(false);
        let dup = CheckSpec::new("coherent", &[OpId::Join], |_: &CheckContext<'_, Octagon>| Ok(()));
        assert_eq!(r.register(dup), Err(DuplicateCheck("coherent".into())));
        assert_eq!(r.len(), 8);
        assert_eq!(Registry::<Octagon>::with_builtins(true).len(), 9);
    }

    #[test]
    fn full_closure_of_generator_output_passes() {
        let g = generate::<Octagon>(&GeneratorParams::new(10, 0.5, 42)).unwrap();
        let input = OpInput::unary(g.state);
        let out = OpId::CloseFull.apply(&input).unwrap();
        let r = Registry::with_builtins(true);
        let reports = r.run_checks(
            &CheckContext {
                op: OpId::CloseFull,
                input: &input,
                output: &out,
                consistent_inputs: true,
            },
            None,
        );
        assert_eq!(reports.len(), 6);
        assert!(fail_names(&reports).is_empty(), "{reports:?}");
    }

    #[test]
    fn skipped_strengthening_is_caught() {
        let o = Octagon::from_constraints(2, &[Constraint::upper(0, 2), Constraint::upper(1, 3)]).unwrap();
        let input = OpInput::unary(o.clone());
        let bad = o.close_without_strengthening();
        let reports = Registry::with_builtins(false).run_checks(
            &CheckContext {
                op: OpId::CloseFull,
                input: &input,
                output: &bad,
                consistent_inputs: true,
            },
            None,
        );
        assert!(fail_names(&reports).contains(&"closure-canonical"), "{reports:?}");
    }

    #[test]
    fn bottom_from_consistent_input_fails() {
        let input = OpInput::unary(Octagon::top(2).unwrap());
        let out = Octagon::bottom(2).unwrap();
        let reports = Registry::with_builtins(false).run_checks(
            &CheckContext {
                op: OpId::CloseFull,
                input: &input,
                output: &out,
                consistent_inputs: true,
            },
            None,
        );
        assert_eq!(fail_names(&reports), ["not-bottom"]);
    }

    #[test]
    fn forget_residue_is_reported() {
        let o = Octagon::from_constraints(2, &[Constraint::diff(0, 1, 3)]).unwrap().close_full();
        let mut input = OpInput::unary(o.clone());
        input.var = Some(0);
        let reports = Registry::with_builtins(false).run_checks(
            &CheckContext {
                op: OpId::Forget,
                input: &input,
                output: &o,
                consistent_inputs: true,
            },
            None,
        );
        assert_eq!(fail_names(&reports), ["forget-clears-var"]);
        let good = o.forget(0).unwrap();
        let reports = Registry::with_builtins(false).run_checks(
            &CheckContext {
                op: OpId::Forget,
                input: &input,
                output: &good,
                consistent_inputs: true,
            },
            None,
        );
        assert!(fail_names(&reports).is_empty());
    }

    #[test]
    fn failure_detail_names_the_constraint() {
        let o = Octagon::top(2).unwrap();
        let k = Constraint::upper(0, 1);
        let mut input = OpInput::unary(o.clone());
        input.constraint = Some(k);
        // claim the incremental result is the unchanged top
        let reports = Registry::with_builtins(true).run_checks(
            &CheckContext {
                op: OpId::IncMine,
                input: &input,
                output: &o,
                consistent_inputs: true,
            },
            None,
        );
        let f: Vec<_> = reports.iter().filter(|r| r.verdict == Verdict::Fail).collect();
        assert_eq!(f.len(), 1);
        assert!(f[0].detail.contains("x0 <= 1"), "{}", f[0].detail);
    }
}
