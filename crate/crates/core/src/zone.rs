//! Zones: difference constraints `x_i - x_j <= c` over an `(n+1) x (n+1)`
//! DBM whose index 0 is a variable fixed at zero. Entry `m[i][j]` bounds
//! `y_j - y_i` with `y_0 = 0` and `y_{k+1} = x_k`.

use crate::bound::Bound;
use crate::constraint::{Constraint, ConstraintKind};
use crate::domain::{AbstractDomain, DomainError, DomainKind, IncrementalVariant};
use crate::matrix::Dbm;

#[derive(Clone, Debug)]
pub struct Zone {
    n: usize,
    m: Dbm,
    closed: bool,
    bottom: bool,
}

impl PartialEq for Zone {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.bottom == other.bottom && (self.bottom || self.m == other.m)
    }
}

fn unsupported(what: impl Into<String>) -> DomainError {
    DomainError::Unsupported {
        domain: DomainKind::Zone,
        what: what.into(),
    }
}

/// DBM cell `(row, col)` and value for a constraint over program variables.
fn encode(k: &Constraint) -> Result<(usize, usize, i64), DomainError> {
    let (i, j, c) = (k.i + 1, k.j + 1, k.c);
    Ok(match k.kind {
        ConstraintKind::DiffLe => (j, i, c),
        ConstraintKind::NegDiffLe => (i, j, c),
        ConstraintKind::UpperLe => (0, i, c),
        ConstraintKind::LowerGe => (i, 0, -c),
        ConstraintKind::SumLe | ConstraintKind::NegSumLe => {
            return Err(unsupported(format!("constraint `{k}`")))
        }
    })
}

impl Zone {
    pub fn top(n: usize) -> Result<Zone, DomainError> {
        if n == 0 {
            return Err(DomainError::InvalidDimension(n));
        }
        Ok(Zone {
            n,
            m: Dbm::unconstrained(n + 1),
            closed: true,
            bottom: false,
        })
    }

    pub fn bottom(n: usize) -> Result<Zone, DomainError> {
        let mut z = Zone::top(n)?;
        z.bottom = true;
        Ok(z)
    }

    pub fn from_constraints(n: usize, ks: &[Constraint]) -> Result<Zone, DomainError> {
        let mut z = Zone::top(n)?;
        for k in ks {
            k.validate(n)?;
            let (r, c, v) = encode(k)?;
            z.add_difference_in_place(c, r, v)?;
        }
        Ok(z)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dbm(&self) -> &Dbm {
        &self.m
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// `y_i - y_j <= c` on raw DBM indices, where index 0 is the zero
    /// variable and index `k + 1` is program variable `k`.
    pub fn add_difference(&self, i: usize, j: usize, c: i64) -> Result<Zone, DomainError> {
        let mut out = self.clone();
        out.add_difference_in_place(i, j, c)?;
        Ok(out)
    }

    fn add_difference_in_place(&mut self, i: usize, j: usize, c: i64) -> Result<(), DomainError> {
        for idx in [i, j] {
            if idx > self.n {
                return Err(DomainError::VariableOutOfRange { var: idx, n: self.n + 1 });
            }
        }
        if i == j {
            return Err(DomainError::SelfRelation(i));
        }
        if self.bottom {
            return Err(DomainError::BottomInput { op: "zone_add_constraint" });
        }
        let v = Bound::try_finite(c).ok_or(DomainError::OutOfBand(c))?;
        if v < self.m.get(j, i) {
            self.m.set(j, i, v);
            self.closed = false;
        }
        Ok(())
    }

    pub fn add_constraint(&self, k: &Constraint) -> Result<Zone, DomainError> {
        k.validate(self.n)?;
        let (r, c, v) = encode(k)?;
        self.add_difference(c, r, v)
    }

    /// Shortest-path closure; bottom iff a negative cycle exists.
    pub fn close(&self) -> Zone {
        let mut out = self.clone();
        if out.bottom {
            return out;
        }
        let d = self.n + 1;
        let mut row_k = vec![Bound::Infinite; d];
        for k in 0..d {
            row_k.copy_from_slice(out.m.row(k));
            for i in 0..d {
                let ik = out.m.get(i, k);
                if ik.is_infinite() {
                    continue;
                }
                for (dst, &kj) in out.m.row_mut(i).iter_mut().zip(&row_k) {
                    let cand = ik + kj;
                    if cand < *dst {
                        *dst = cand;
                    }
                }
            }
            if (0..d).any(|i| out.m.get(i, i) < Bound::ZERO) {
                out.bottom = true;
                return out;
            }
        }
        out.closed = true;
        out
    }

    fn check_same_dim(&self, other: &Zone) -> Result<(), DomainError> {
        if self.n != other.n {
            return Err(DomainError::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    fn require_closed_or_bottom(&self, op: &'static str) -> Result<(), DomainError> {
        if self.bottom || self.closed {
            Ok(())
        } else {
            Err(DomainError::NotClosed { op })
        }
    }

    pub fn join(&self, other: &Zone) -> Result<Zone, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("zone_join")?;
        other.require_closed_or_bottom("zone_join")?;
        if self.bottom {
            return Ok(other.clone());
        }
        if other.bottom {
            return Ok(self.clone());
        }
        Ok(Zone {
            n: self.n,
            m: self.m.zip_with(&other.m, Bound::max),
            closed: true,
            bottom: false,
        })
    }

    pub fn meet(&self, other: &Zone) -> Result<Zone, DomainError> {
        self.check_same_dim(other)?;
        if self.bottom || other.bottom {
            return Zone::bottom(self.n);
        }
        Ok(Zone {
            n: self.n,
            m: self.m.zip_with(&other.m, Bound::min),
            closed: false,
            bottom: false,
        })
    }

    pub fn widen(&self, other: &Zone) -> Result<Zone, DomainError> {
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
        let closed = self.closed && m == self.m;
        Ok(Zone {
            n: self.n,
            m,
            closed,
            bottom: false,
        })
    }

    pub fn forget(&self, var: usize) -> Result<Zone, DomainError> {
        if var >= self.n {
            return Err(DomainError::VariableOutOfRange { var, n: self.n });
        }
        if self.bottom {
            return Err(DomainError::BottomInput { op: "zone_forget" });
        }
        if !self.closed {
            return Err(DomainError::NotClosed { op: "zone_forget" });
        }
        let mut out = self.clone();
        let idx = var + 1;
        for t in 0..=self.n {
            if t != idx {
                out.m.set(idx, t, Bound::Infinite);
                out.m.set(t, idx, Bound::Infinite);
            }
        }
        Ok(out)
    }

    pub fn includes(&self, other: &Zone) -> Result<bool, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("zone_includes")?;
        other.require_closed_or_bottom("zone_includes")?;
        Ok(other.bottom || (!self.bottom && other.m.le(&self.m)))
    }

    pub fn equals(&self, other: &Zone) -> Result<bool, DomainError> {
        self.check_same_dim(other)?;
        self.require_closed_or_bottom("zone_equals")?;
        other.require_closed_or_bottom("zone_equals")?;
        Ok(self == other)
    }

    pub fn form_bound(&self, kind: ConstraintKind, i: usize, j: usize) -> Option<Bound> {
        let (r, c, _) = encode(&Constraint::new(kind, i, j, 0)).ok()?;
        Some(self.m.get(r, c))
    }

    pub fn achieved_density(&self) -> f64 {
        let n = self.n;
        if n < 2 {
            return 0.0;
        }
        let mut related = 0usize;
        for i in 1..=n {
            for j in (i + 1)..=n {
                if self.m.get(i, j).is_finite() || self.m.get(j, i).is_finite() {
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
        let y = |idx: usize| if idx == 0 { 0 } else { point[idx - 1] };
        let d = self.n + 1;
        (0..d).all(|i| {
            (0..d).all(|j| match self.m.get(i, j) {
                Bound::Finite(c) => y(j) - y(i) <= c,
                Bound::Infinite => true,
            })
        })
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        for i in 0..self.n {
            if let Bound::Finite(c) = self.m.get(0, i + 1) {
                out.push(Constraint::upper(i, c));
            }
            if let Bound::Finite(c) = self.m.get(i + 1, 0) {
                out.push(Constraint::lower(i, -c));
            }
        }
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if let Bound::Finite(c) = self.m.get(j + 1, i + 1) {
                    out.push(Constraint::diff(i, j, c));
                }
                if let Bound::Finite(c) = self.m.get(i + 1, j + 1) {
                    out.push(Constraint::diff(j, i, c));
                }
            }
        }
        out
    }
}

impl AbstractDomain for Zone {
    const KIND: DomainKind = DomainKind::Zone;
    const KINDS: &'static [ConstraintKind] = &[
        ConstraintKind::DiffLe,
        ConstraintKind::NegDiffLe,
        ConstraintKind::UpperLe,
        ConstraintKind::LowerGe,
    ];
    const RELATIONAL_KINDS: &'static [ConstraintKind] = &[ConstraintKind::DiffLe, ConstraintKind::NegDiffLe];

    fn top(n: usize) -> Result<Self, DomainError> {
        Zone::top(n)
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn is_bottom(&self) -> bool {
        self.bottom
    }

    fn is_closed(&self) -> bool {
        self.closed
    }

    fn add_constraint(&self, k: &Constraint) -> Result<Self, DomainError> {
        Zone::add_constraint(self, k)
    }

    fn from_constraints(n: usize, ks: &[Constraint]) -> Result<Self, DomainError> {
        Zone::from_constraints(n, ks)
    }

    fn close_full(&self) -> Self {
        self.close()
    }

    fn close_incremental(&self, _k: &Constraint, _variant: IncrementalVariant) -> Result<Self, DomainError> {
        Err(unsupported("incremental closure"))
    }

    fn join(&self, other: &Self) -> Result<Self, DomainError> {
        Zone::join(self, other)
    }

    fn meet(&self, other: &Self) -> Result<Self, DomainError> {
        Zone::meet(self, other)
    }

    fn widen(&self, other: &Self) -> Result<Self, DomainError> {
        Zone::widen(self, other)
    }

    fn forget(&self, var: usize) -> Result<Self, DomainError> {
        Zone::forget(self, var)
    }

    fn includes(&self, other: &Self) -> Result<bool, DomainError> {
        Zone::includes(self, other)
    }

    fn equals(&self, other: &Self) -> Result<bool, DomainError> {
        Zone::equals(self, other)
    }

    fn achieved_density(&self) -> f64 {
        Zone::achieved_density(self)
    }

    fn contains_point(&self, point: &[i64]) -> bool {
        Zone::contains_point(self, point)
    }

    fn form_bound(&self, kind: ConstraintKind, i: usize, j: usize) -> Option<Bound> {
        Zone::form_bound(self, kind, i, j)
    }

    fn constraints(&self) -> Vec<Constraint> {
        Zone::constraints(self)
    }

    fn matrix(&self) -> &Dbm {
        &self.m
    }

    fn coherence_violation(&self) -> Option<String> {
        None
    }

    fn canonical_violation(&self) -> Option<String> {
        if self.bottom {
            return None;
        }
        if let Some(i) = self.m.first_nonzero_diagonal() {
            return Some(format!("m[{i}][{i}] = {}", self.m.get(i, i)));
        }
        self.m.triangle_violation().map(|(i, k, j)| {
            format!(
                "m[{i}][{j}] = {} exceeds m[{i}][{k}] + m[{k}][{j}] = {}",
                self.m.get(i, j),
                self.m.get(i, k) + self.m.get(k, j)
            )
        })
    }
}
