//! Translation of states and constraints into plain integer inequality
//! systems for the enumeration oracle. Only the encoding is shared with the
//! domains; no closure logic is involved.

use octobench_oracle::{Enumeration, Extent, IntegerSystem};

use crate::bound::Bound;
use crate::constraint::Constraint;
use crate::octagon::Octagon;

/// Coefficients of `V_j - V_i` over the original variables.
pub fn entry_form(n: usize, i: usize, j: usize) -> Vec<i64> {
    let mut coeffs = vec![0i64; n];
    let sign = |idx: usize| if idx.is_multiple_of(2) { 1 } else { -1 };
    coeffs[j / 2] += sign(j);
    coeffs[i / 2] -= sign(i);
    coeffs
}

pub fn system_of_constraints(n: usize, ks: &[Constraint]) -> IntegerSystem {
    let mut s = IntegerSystem::new(n);
    for k in ks {
        let (si, sj) = k.kind.signs();
        let mut coeffs = vec![0i64; n];
        coeffs[k.i] += si;
        if sj != 0 {
            coeffs[k.j] += sj;
        }
        s.push(coeffs, k.le_bound());
    }
    s
}

/// Every finite off-diagonal entry as an inequality. Bottom maps to `0 <= -1`.
pub fn system_of_octagon(o: &Octagon) -> IntegerSystem {
    let n = o.n();
    let mut s = IntegerSystem::new(n);
    if o.is_bottom() {
        s.push(vec![0; n], -1);
        return s;
    }
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i == j {
                continue;
            }
            if let Bound::Finite(c) = o.entry(i, j) {
                s.push(entry_form(n, i, j), c);
            }
        }
    }
    s
}

/// The tightest value of every entry form over the enumerated points, laid
/// out like a `2n x 2n` matrix. `None` if the point set is empty.
pub fn tightest_entries(n: usize, points: &Enumeration) -> Option<Vec<Bound>> {
    if points.is_empty() {
        return None;
    }
    let d = 2 * n;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                out.push(Bound::ZERO);
                continue;
            }
            out.push(match points.maximize(&entry_form(n, i, j)) {
                Extent::Max(v) => Bound::finite(v),
                Extent::Unbounded => Bound::Infinite,
                Extent::Empty => unreachable!(),
            });
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_forms_follow_the_encoding() {
        // m[1][0]: V0 - V1 = 2 x0
        assert_eq!(entry_form(2, 1, 0), vec![2, 0]);
        // m[2][0]: x0 - x1
        assert_eq!(entry_form(2, 2, 0), vec![1, -1]);
        // m[3][0]: x0 + x1
        assert_eq!(entry_form(2, 3, 0), vec![1, 1]);
        // m[2][1]: -x0 - x1
        assert_eq!(entry_form(2, 2, 1), vec![-1, -1]);
    }
}
