//! Exhaustive integer-point oracle for small linear systems.
//!
//! Every question is answered by walking integer points, never by shortest
//! paths, so the answers stay independent of the closure code they check.
//! The first `dim - 1` coordinates are enumerated inside a box; the last
//! coordinate is solved exactly as an integer interval, which keeps three
//! variable systems cheap enough to run hundreds of times in a test.
//!
//! Boundedness is decided by comparing an inner and an outer box: a linear
//! form whose maximum keeps growing when the box doubles is unbounded over
//! the (box-free) point set. With constraint constants in `[-8, 8]` and at
//! most three variables every finite extremum is attained well inside the
//! inner radius.

use std::cmp::Ordering;

/// Default radius of the inner enumeration box.
pub const INNER_RADIUS: i64 = 96;
/// Default radius of the outer enumeration box (twice the inner one).
pub const OUTER_RADIUS: i64 = 2 * INNER_RADIUS;

/// Largest dimension the oracle accepts; beyond that enumeration is too slow.
pub const MAX_DIM: usize = 3;

/// `sum(coeffs[k] * x[k]) <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub bound: i64,
}

/// Outcome of maximizing a linear form over the integer points of a system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extent {
    Empty,
    Unbounded,
    Max(i64),
}

/// A conjunction of integer linear inequalities over `dim` variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntegerSystem {
    dim: usize,
    rows: Vec<Inequality>,
}

/// All points sharing a prefix: the last coordinate ranges over `[lo, hi]`,
/// where `None` means unbounded in that direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub prefix: Vec<i64>,
    pub lo: Option<i64>,
    pub hi: Option<i64>,
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

impl IntegerSystem {
    pub fn new(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "oracle supports 1..={MAX_DIM} variables, got {dim}"
        );
        Self {
            dim,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Inequality] {
        &self.rows
    }

    pub fn push(&mut self, coeffs: Vec<i64>, bound: i64) {
        assert_eq!(coeffs.len(), self.dim, "coefficient vector has wrong length");
        self.rows.push(Inequality { coeffs, bound });
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        self.rows.iter().all(|r| {
            let lhs: i64 = r.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
            lhs <= r.bound
        })
    }

    /// Integer range of variable `var` once every other coordinate is fixed
    /// by `point` (the entry at `var` is ignored). `None` if infeasible.
    pub fn feasible_range(&self, var: usize, point: &[i64]) -> Option<(Option<i64>, Option<i64>)> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for r in &self.rows {
            let rest: i64 = r
                .coeffs
                .iter()
                .zip(point)
                .enumerate()
                .filter(|(k, _)| *k != var)
                .map(|(_, (a, x))| a * x)
                .sum();
            let a = r.coeffs[var];
            let rhs = r.bound - rest;
            match a.cmp(&0) {
                Ordering::Equal => {
                    if rhs < 0 {
                        return None;
                    }
                }
                Ordering::Greater => {
                    let h = div_floor(rhs, a);
                    hi = Some(hi.map_or(h, |v| v.min(h)));
                }
                Ordering::Less => {
                    let l = div_ceil(rhs, a);
                    lo = Some(lo.map_or(l, |v| v.max(l)));
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l > h => None,
            _ => Some((lo, hi)),
        }
    }

    /// Enumerates every feasible prefix in `[-radius, radius]^(dim-1)`.
    pub fn slices(&self, radius: i64) -> Vec<Slice> {
        let last = self.dim - 1;
        let mut out = Vec::new();
        let mut point = vec![0i64; self.dim];
        self.walk(0, last, radius, &mut point, &mut out);
        out
    }

    fn walk(&self, depth: usize, last: usize, radius: i64, point: &mut Vec<i64>, out: &mut Vec<Slice>) {
        if depth == last {
            if let Some((lo, hi)) = self.feasible_range(last, point) {
                out.push(Slice {
                    prefix: point[..last].to_vec(),
                    lo,
                    hi,
                });
            }
            return;
        }
        for v in -radius..=radius {
            point[depth] = v;
            self.walk(depth + 1, last, radius, point, out);
        }
        point[depth] = 0;
    }

    /// Precomputes the inner and outer enumerations so that many forms can be
    /// maximized against the same system.
    pub fn enumerate(&self) -> Enumeration {
        Enumeration {
            inner: self.slices(INNER_RADIUS),
            outer: self.slices(OUTER_RADIUS),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.slices(OUTER_RADIUS).is_empty()
    }

    pub fn maximize(&self, form: &[i64]) -> Extent {
        self.enumerate().maximize(form)
    }

    /// True if both systems admit exactly the same integer points inside the
    /// inner box (last coordinate compared exactly).
    pub fn same_points(&self, other: &IntegerSystem) -> bool {
        self.dim == other.dim && self.slices(INNER_RADIUS) == other.slices(INNER_RADIUS)
    }

    /// True if projecting `var` out of `self` yields exactly the points of
    /// `other` (which must leave `var` unconstrained), checked on every
    /// assignment of the remaining variables in `[-radius, radius]`.
    pub fn projection_matches(&self, var: usize, other: &IntegerSystem, radius: i64) -> bool {
        assert_eq!(self.dim, other.dim);
        let others: Vec<usize> = (0..self.dim).filter(|&k| k != var).collect();
        let mut point = vec![0i64; self.dim];
        let total = (2 * radius + 1).pow(others.len() as u32);
        for code in 0..total {
            let mut c = code;
            for &k in &others {
                point[k] = c % (2 * radius + 1) - radius;
                c /= 2 * radius + 1;
            }
            let projected = self.feasible_range(var, &point).is_some();
            let kept = match other.feasible_range(var, &point) {
                Some((None, None)) => true,
                Some(_) => return false, // var must be unconstrained in the result
                None => false,
            };
            if projected != kept {
                return false;
            }
        }
        true
    }
}

/// Cached inner/outer enumerations of one system.
pub struct Enumeration {
    inner: Vec<Slice>,
    outer: Vec<Slice>,
}

impl Enumeration {
    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }

    pub fn inner(&self) -> &[Slice] {
        &self.inner
    }

    pub fn maximize(&self, form: &[i64]) -> Extent {
        if self.outer.is_empty() {
            return Extent::Empty;
        }
        let inner = match max_over(&self.inner, form) {
            None => return Extent::Unbounded,
            Some(v) => v,
        };
        let outer = match max_over(&self.outer, form) {
            None => return Extent::Unbounded,
            Some(v) => v,
        };
        match (inner, outer) {
            (Some(a), Some(b)) if a == b => Extent::Max(a),
            (Some(_), Some(_)) => Extent::Unbounded,
            (None, _) => panic!("system is feasible only outside the inner box; raise INNER_RADIUS"),
            (Some(_), None) => unreachable!("outer box contains the inner box"),
        }
    }
}

/// Maximum of `form` over the slices. Outer `None`: unbounded along the last
/// coordinate. Inner `None`: no slices at all.
fn max_over(slices: &[Slice], form: &[i64]) -> Option<Option<i64>> {
    let last = form.len() - 1;
    let a = form[last];
    let mut best: Option<i64> = None;
    for s in slices {
        let base: i64 = s.prefix.iter().zip(form).map(|(x, c)| x * c).sum();
        let tail = match a.cmp(&0) {
            Ordering::Equal => 0,
            Ordering::Greater => a * s.hi?,
            Ordering::Less => a * s.lo?,
        };
        let v = base + tail;
        best = Some(best.map_or(v, |b: i64| b.max(v)));
    }
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_ceil_division() {
        assert_eq!(div_floor(7, 2), 3);
        assert_eq!(div_floor(-7, 2), -4);
        assert_eq!(div_ceil(-7, 2), -3);
        assert_eq!(div_ceil(7, -2), -3);
        assert_eq!(div_floor(7, -2), -4);
    }

    #[test]
    fn box_bounds() {
        let mut s = IntegerSystem::new(2);
        s.push(vec![1, 0], 2);
        s.push(vec![0, 1], 3);
        assert_eq!(s.maximize(&[1, 1]), Extent::Max(5));
        assert_eq!(s.maximize(&[-1, 0]), Extent::Unbounded);
        assert_eq!(s.maximize(&[1, -1]), Extent::Unbounded);
    }

    #[test]
    fn half_integral_bound_rounds_down() {
        let mut s = IntegerSystem::new(2);
        s.push(vec![1, 1], 3);
        s.push(vec![1, -1], 0);
        // 2x <= 3 over the integers means x <= 1
        assert_eq!(s.maximize(&[1, 0]), Extent::Max(1));
        assert_eq!(s.maximize(&[2, 0]), Extent::Max(2));
    }

    #[test]
    fn empty_system() {
        let mut s = IntegerSystem::new(2);
        s.push(vec![1, -1], -1);
        s.push(vec![-1, 1], 0);
        assert!(s.is_empty());
        assert_eq!(s.maximize(&[1, 0]), Extent::Empty);
    }

    #[test]
    fn chain_far_from_origin_is_found() {
        // x - y >= 80 and x + y <= 80: the x + y maximum sits at x = 80.
        let mut s = IntegerSystem::new(2);
        s.push(vec![-1, 1], -80);
        s.push(vec![1, 1], 80);
        assert_eq!(s.maximize(&[1, 1]), Extent::Max(80));
        assert_eq!(s.maximize(&[1, 0]), Extent::Unbounded);
    }

    #[test]
    fn projection() {
        let mut s = IntegerSystem::new(2);
        s.push(vec![1, 0], 2);
        s.push(vec![0, 1], 3);
        s.push(vec![1, 1], 4);
        let mut p = IntegerSystem::new(2);
        p.push(vec![0, 1], 3);
        assert!(s.projection_matches(0, &p, 20));
        let mut wrong = IntegerSystem::new(2);
        wrong.push(vec![0, 1], 2);
        assert!(!s.projection_matches(0, &wrong, 20));
    }
}
