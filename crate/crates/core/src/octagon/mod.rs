//! The Octagon domain over a coherent `2n x 2n` difference-bound matrix.
//!
//! Entry `m[i][j]` bounds `V_j - V_i`, where `V_{2k} = +x_k` and
//! `V_{2k+1} = -x_k`. Coherence ties `m[i][j]` to `m[bar j][bar i]`; every
//! constraint is written to both cells.

mod closure;

pub use closure::Tally;

use crate::bound::{bar, Bound};
use crate::constraint::{Constraint, ConstraintKind};
use crate::domain::{AbstractDomain, DomainError, DomainKind, IncrementalVariant};
use crate::matrix::Dbm;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Closure {
    Unknown,
    StronglyClosed,
}

#[derive(Clone, Debug)]
pub struct Octagon {
    n: usize,
    m: Dbm,
    closure: Closure,
    bottom: bool,
}

/// Integer range of one variable; `None` ends are unbounded.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Interval {
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

impl Interval {
    pub fn contains(&self, v: i64) -> bool {
        self.lo.is_none_or(|l| l <= v) && self.hi.is_none_or(|h| v <= h)
    }
}

/// Matrix cell `(row, col)` and encoded value for a constraint. The mirror
/// cell is `(bar col, bar row)`.
fn encode(k: &Constraint) -> (usize, usize, i64) {
    let (i, j, c) = (k.i, k.j, k.c);
    match k.kind {
        ConstraintKind::DiffLe => (2 * j, 2 * i, c),
        ConstraintKind::NegDiffLe => (2 * i, 2 * j, c),
        ConstraintKind::SumLe => (2 * j + 1, 2 * i, c),
        ConstraintKind::NegSumLe => (2 * j, 2 * i + 1, c),
        ConstraintKind::UpperLe => (2 * i + 1, 2 * i, 2 * c),
        ConstraintKind::LowerGe => (2 * i, 2 * i + 1, -2 * c),
    }
}

/// Cell holding the bound on the less-or-equal form of a constraint kind.
fn form_cell(kind: ConstraintKind, i: usize, j: usize) -> (usize, usize) {
    let (r, c, _) = encode(&Constraint::new(kind, i, j, 0));
    (r, c)
}

impl PartialEq for Octagon {
    /// Bottom elements compare equal whatever their residue; otherwise the
    /// matrices must match entry-wise. The closure flag is not compared.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.bottom == other.bottom
            && (self.bottom || self.m == other.m)
    }
}

impl Octagon {
    pub fn top(n: usize) -> Result<Octagon, DomainError> {
        if n == 0 {
            return Err(DomainError::InvalidDimension(n));
        }
        Ok(Octagon {
            n,
            m: Dbm::unconstrained(2 * n),
            closure: Closure::StronglyClosed,
            bottom: false,
        })
    }

    pub fn bottom(n: usize) -> Result<Octagon, DomainError> {
        let mut o = Octagon::top(n)?;
        o.bottom = true;
        Ok(o)
    }

    /// Builds a state from a conjunction of constraints (not closed).
    pub fn from_constraints(n: usize, ks: &[Constraint]) -> Result<Octagon, DomainError> {
        let mut o = Octagon::top(n)?;
        for k in ks {
            o.add_in_place(k)?;
        }
        Ok(o)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dbm(&self) -> &Dbm {
        &self.m
    }

    pub fn closure(&self) -> Closure {
        self.closure
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn is_closed(&self) -> bool {
        self.closure == Closure::StronglyClosed
    }

    /// `m[i][j]`.
    pub fn entry(&self, i: usize, j: usize) -> Bound {
        self.m.get(i, j)
    }

    fn check_var(&self, var: usize) -> Result<(), DomainError> {
        if var >= self.n {
            return Err(DomainError::VariableOutOfRange { var, n: self.n });
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Octagon) -> Result<(), DomainError> {
        if self.n != other.n {
            return Err(DomainError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn require_closed_or_bottom(&self, op: &'static str) -> Result<(), DomainError> {
        if self.bottom || self.is_closed() {
            Ok(())
        } else {
            Err(DomainError::NotClosed { op })
        }
    }

    fn require_closed(&self, op: &'static str) -> Result<(), DomainError> {
        if self.bottom {
            return Err(DomainError::BottomInput { op });
        }
        if !self.is_closed() {
            return Err(DomainError::NotClosed { op });
        }
        Ok(())
    }

    /// Lowers the cell pair for `k`; returns whether anything changed.
    fn add_in_place(&mut self, k: &Constraint) -> Result<bool, DomainError> {
        k.validate(self.n)?;
        if self.bottom {
            return Err(DomainError::BottomInput { op: "add_constraint" });
        }
        let (r, c, v) = encode(k);
        let v = Bound::finite(v);
        if v >= self.m.get(r, c) {
            return Ok(false);
        }
        self.m.set(r, c, v);
        self.m.set(bar(c), bar(r), v);
        self.closure = Closure::Unknown;
        Ok(true)
    }

    /// Lowers the entry for `k` (and its mirror) to `min(existing, c)`. The
    /// closed flag survives only if nothing changed.
    pub fn add_constraint(&self, k: &Constraint) -> Result<Octagon, DomainError> {
        let mut out = self.clone();
        out.add_in_place(k)?;
        Ok(out)
    }

    /// Strong closure; bottom if the constraints have no integer solution.
    pub fn close_full(&self) -> Octagon {
        self.clone().into_closed()
    }

    /// [`Octagon::close_full`] reusing `self`'s storage.
    pub fn into_closed(mut self) -> Octagon {
        if self.bottom {
            return self;
        }
        if closure::close_in_place(&mut self.m) {
            self.closure = Closure::StronglyClosed;
        } else {
            self.bottom = true;
        }
        self
    }

    /// Floyd-Warshall and tightening with the strengthening pass left out.
    /// Deliberately wrong; exists so fault-injection runs can show that the
    /// canonical-form check catches it.
    pub fn close_without_strengthening(&self) -> Octagon {
        let mut out = self.clone();
        if out.bottom {
            return out;
        }
        if closure::close_skipping_strengthening(&mut out.m) {
            out.closure = Closure::StronglyClosed;
        } else {
            out.bottom = true;
        }
        out
    }

    fn incremental_prelude(&self, k: &Constraint, op: &'static str) -> Result<Option<(usize, usize, Bound)>, DomainError> {
        self.require_closed(op)?;
        k.validate(self.n)?;
        let (r, c, v) = encode(k);
        let v = Bound::finite(v);
        if v >= self.m.get(r, c) {
            Ok(None)
        } else {
            Ok(Some((r, c, v)))
        }
    }

    /// Adds `k` to a strongly closed state and restores closure by relaxing
    /// through the (at most four) indices the constraint touches.
    pub fn close_incremental_mine(&self, k: &Constraint) -> Result<Octagon, DomainError> {
        self.clone().into_incremental_mine(k)
    }

    pub fn into_incremental_mine(mut self, k: &Constraint) -> Result<Octagon, DomainError> {
        let Some((r, c, v)) = self.incremental_prelude(k, "close_incremental_mine")? else {
            return Ok(self);
        };
        self.m.set(r, c, v);
        self.m.set(bar(c), bar(r), v);
        if !closure::incremental_pivots(&mut self.m, r, c) {
            self.bottom = true;
        }
        Ok(self)
    }

    /// Adds `k` to a strongly closed state and restores closure in one
    /// quadratic pass over the matrix.
    pub fn close_incremental_chawdhary(&self, k: &Constraint) -> Result<Octagon, DomainError> {
        self.clone().into_incremental_chawdhary(k, &mut ())
    }

    /// As [`Octagon::close_incremental_chawdhary`], reporting the number of
    /// bound comparisons performed to `tally`.
    pub fn close_incremental_chawdhary_tallied(
        &self,
        k: &Constraint,
        tally: &mut impl Tally,
    ) -> Result<Octagon, DomainError> {
        self.clone().into_incremental_chawdhary(k, tally)
    }

    pub fn into_incremental_chawdhary(mut self, k: &Constraint, tally: &mut impl Tally) -> Result<Octagon, DomainError> {
        let Some((r, c, v)) = self.incremental_prelude(k, "close_incremental_chawdhary")? else {
            return Ok(self);
        };
        if !closure::incremental_single_pass(&mut self.m, r, c, v, tally) {
            self.bottom = true;
        }
        Ok(self)
    }

    /// [`Octagon::forget`] reusing `self`'s storage.
    pub fn into_forgotten(mut self, var: usize) -> Result<Octagon, DomainError> {
        self.check_var(var)?;
        self.require_closed("forget")?;
        let d = 2 * self.n;
        for idx in [2 * var, 2 * var + 1] {
            for t in 0..d {
                if t != idx {
                    self.m.set(idx, t, Bound::Infinite);
                    self.m.set(t, idx, Bound::Infinite);
                }
            }
        }
        Ok(self)
    }

    /// Pointwise maximum of two closed states.
    pub fn join(&self, other: &Octagon) -> Result<Octagon, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("join")?;
        other.require_closed_or_bottom("join")?;
        if self.bottom {
            return Ok(other.clone());
        }
        if other.bottom {
            return Ok(self.clone());
        }
        Ok(Octagon {
            n: self.n,
            m: self.m.zip_with(&other.m, Bound::max),
            closure: Closure::StronglyClosed,
            bottom: false,
        })
    }

    /// Pointwise minimum; the result needs closing.
    pub fn meet(&self, other: &Octagon) -> Result<Octagon, DomainError> {
        self.check_same_dim(other)?;
        if self.bottom || other.bottom {
            return Octagon::bottom(self.n);
        }
        Ok(Octagon {
            n: self.n,
            m: self.m.zip_with(&other.m, Bound::min),
            closure: Closure::Unknown,
            bottom: false,
        })
    }

    /// Keeps the entries of `self` that `other` does not exceed and drops the
    /// rest to `+inf`. The result is not closed; iterates of a widening
    /// sequence should be kept as returned.
    pub fn widen(&self, other: &Octagon) -> Result<Octagon, DomainError> {
        self.check_same_dim(other)?;
        if self.bottom {
            return Ok(other.clone());
        }
        if other.bottom {
            return Ok(self.clone());
        }
        let m = self
            .m
            .zip_with(&other.m, |a, b| if b <= a { a } else { Bound::Infinite });
        let closure = if m == self.m { self.closure } else { Closure::Unknown };
        Ok(Octagon {
            n: self.n,
            m,
            closure,
            bottom: false,
        })
    }

    /// Drops every constraint on `var`. Requires a closed input so that
    /// relations implied through `var` are already explicit.
    pub fn forget(&self, var: usize) -> Result<Octagon, DomainError> {
        self.clone().into_forgotten(var)
    }

    /// `self ⊒ other` on closed states; bottom is below everything.
    pub fn includes(&self, other: &Octagon) -> Result<bool, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("includes")?;
        other.require_closed_or_bottom("includes")?;
        Ok(other.bottom || (!self.bottom && other.m.le(&self.m)))
    }

    pub fn equals(&self, other: &Octagon) -> Result<bool, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("equals")?;
        other.require_closed_or_bottom("equals")?;
        Ok(self == other)
    }

    /// Bounds of `var` read off a closed state.
    pub fn interval_of(&self, var: usize) -> Result<Interval, DomainError> {
        self.check_var(var)?;
        self.require_closed("interval_of")?;
        let hi = self.m.get(2 * var + 1, 2 * var).halve_floor().value();
        let lo = self.m.get(2 * var, 2 * var + 1).halve_floor().value().map(|v| -v);
        Ok(Interval { lo, hi })
    }

    /// `x_var := x_var + delta`, an exact translation that keeps closure.
    pub fn translate(&self, var: usize, delta: i64) -> Result<Octagon, DomainError> {
        self.check_var(var)?;
        let mut out = self.clone();
        if out.bottom {
            return Ok(out);
        }
        let d = 2 * self.n;
        let shift = |idx: usize| -> i64 {
            if idx == 2 * var {
                delta
            } else if idx == 2 * var + 1 {
                -delta
            } else {
                0
            }
        };
        for i in 0..d {
            for j in 0..d {
                let s = shift(j) - shift(i);
                if s != 0 {
                    out.m.set(i, j, self.m.get(i, j).shift(s));
                }
            }
        }
        Ok(out)
    }

    /// Fraction of unordered variable pairs related by at least one finite
    /// binary entry. Zero when there is only one variable.
    pub fn achieved_density(&self) -> f64 {
        let n = self.n;
        if n < 2 {
            return 0.0;
        }
        let mut related = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let cells = [
                    (2 * j, 2 * i),
                    (2 * i, 2 * j),
                    (2 * j + 1, 2 * i),
                    (2 * j, 2 * i + 1),
                ];
                if cells.iter().any(|&(r, c)| self.m.get(r, c).is_finite()) {
                    related += 1;
                }
            }
        }
        related as f64 / (n * (n - 1) / 2) as f64
    }

    pub fn contains_point(&self, point: &[i64]) -> bool {
        if self.bottom {
            return false;
        }
        let value = |idx: usize| if idx.is_multiple_of(2) { point[idx / 2] } else { -point[idx / 2] };
        let d = 2 * self.n;
        (0..d).all(|i| {
            (0..d).all(|j| match self.m.get(i, j) {
                Bound::Finite(c) => value(j) - value(i) <= c,
                Bound::Infinite => true,
            })
        })
    }

    pub fn form_bound(&self, kind: ConstraintKind, i: usize, j: usize) -> Bound {
        let (r, c) = form_cell(kind, i, j);
        let b = self.m.get(r, c);
        if kind.is_unary() {
            b.halve_floor()
        } else {
            b
        }
    }

    /// Every finite constraint: unary bounds per variable, then the four
    /// relational forms for each pair `i < j`.
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        let n = self.n;
        for i in 0..n {
            for kind in [ConstraintKind::UpperLe, ConstraintKind::LowerGe] {
                if let Bound::Finite(v) = self.form_bound(kind, i, i) {
                    out.push(Constraint::from_le_form(kind, i, i, v));
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let forms = [
                    (ConstraintKind::DiffLe, i, j),
                    (ConstraintKind::DiffLe, j, i),
                    (ConstraintKind::SumLe, i, j),
                    (ConstraintKind::NegSumLe, i, j),
                ];
                for (kind, a, b) in forms {
                    if let Bound::Finite(v) = self.form_bound(kind, a, b) {
                        out.push(Constraint::new(kind, a, b, v));
                    }
                }
            }
        }
        out
    }

    pub fn coherence_violation(&self) -> Option<String> {
        let d = 2 * self.n;
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (self.m.get(i, j), self.m.get(bar(j), bar(i)));
                if a != b {
                    return Some(format!("m[{i}][{j}] = {a} but m[{}][{}] = {b}", bar(j), bar(i)));
                }
            }
        }
        None
    }

    pub fn canonical_violation(&self) -> Option<String> {
        if self.bottom {
            return None;
        }
        if let Some(i) = self.m.first_nonzero_diagonal() {
            return Some(format!("m[{i}][{i}] = {}", self.m.get(i, i)));
        }
        if let Some((i, k, j)) = self.m.triangle_violation() {
            return Some(format!(
                "m[{i}][{j}] = {} exceeds m[{i}][{k}] + m[{k}][{j}] = {}",
                self.m.get(i, j),
                self.m.get(i, k) + self.m.get(k, j)
            ));
        }
        let d = 2 * self.n;
        for i in 0..d {
            if let Bound::Finite(v) = self.m.get(i, bar(i)) {
                if v % 2 != 0 {
                    return Some(format!("unary entry m[{i}][{}] = {v} is odd", bar(i)));
                }
            }
            let hi = self.m.get(i, bar(i)).halve_floor();
            for j in 0..d {
                let via = hi + self.m.get(bar(j), j).halve_floor();
                if self.m.get(i, j) > via {
                    return Some(format!(
                        "m[{i}][{j}] = {} exceeds strengthened bound {via}",
                        self.m.get(i, j)
                    ));
                }
            }
        }
        None
    }
}

impl AbstractDomain for Octagon {
    const KIND: DomainKind = DomainKind::Octagon;
    const KINDS: &'static [ConstraintKind] = &ConstraintKind::ALL;
    const RELATIONAL_KINDS: &'static [ConstraintKind] = &[
        ConstraintKind::SumLe,
        ConstraintKind::DiffLe,
        ConstraintKind::NegDiffLe,
        ConstraintKind::NegSumLe,
    ];

    fn top(n: usize) -> Result<Self, DomainError> {
        Octagon::top(n)
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn is_bottom(&self) -> bool {
        self.bottom
    }

    fn is_closed(&self) -> bool {
        Octagon::is_closed(self)
    }

    fn add_constraint(&self, k: &Constraint) -> Result<Self, DomainError> {
        Octagon::add_constraint(self, k)
    }

    fn from_constraints(n: usize, ks: &[Constraint]) -> Result<Self, DomainError> {
        Octagon::from_constraints(n, ks)
    }

    fn close_full(&self) -> Self {
        Octagon::close_full(self)
    }

    fn close_incremental(&self, k: &Constraint, variant: IncrementalVariant) -> Result<Self, DomainError> {
        self.clone().into_incremental(k, variant)
    }

    fn into_closed(self) -> Self {
        Octagon::into_closed(self)
    }

    fn into_incremental(self, k: &Constraint, variant: IncrementalVariant) -> Result<Self, DomainError> {
        match variant {
            IncrementalVariant::Mine => self.into_incremental_mine(k),
            IncrementalVariant::Chawdhary => self.into_incremental_chawdhary(k, &mut ()),
        }
    }

    fn into_forgotten(self, var: usize) -> Result<Self, DomainError> {
        Octagon::into_forgotten(self, var)
    }

    fn join(&self, other: &Self) -> Result<Self, DomainError> {
        Octagon::join(self, other)
    }

    fn meet(&self, other: &Self) -> Result<Self, DomainError> {
        Octagon::meet(self, other)
    }

    fn widen(&self, other: &Self) -> Result<Self, DomainError> {
        Octagon::widen(self, other)
    }

    fn forget(&self, var: usize) -> Result<Self, DomainError> {
        Octagon::forget(self, var)
    }

    fn includes(&self, other: &Self) -> Result<bool, DomainError> {
        Octagon::includes(self, other)
    }

    fn equals(&self, other: &Self) -> Result<bool, DomainError> {
        Octagon::equals(self, other)
    }

    fn achieved_density(&self) -> f64 {
        Octagon::achieved_density(self)
    }

    fn contains_point(&self, point: &[i64]) -> bool {
        Octagon::contains_point(self, point)
    }

    fn form_bound(&self, kind: ConstraintKind, i: usize, j: usize) -> Option<Bound> {
        Some(Octagon::form_bound(self, kind, i, j))
    }

    fn constraints(&self) -> Vec<Constraint> {
        Octagon::constraints(self)
    }

    fn matrix(&self) -> &Dbm {
        &self.m
    }

    fn coherence_violation(&self) -> Option<String> {
        Octagon::coherence_violation(self)
    }

    fn canonical_violation(&self) -> Option<String> {
        Octagon::canonical_violation(self)
    }
}
