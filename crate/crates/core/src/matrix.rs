//! Dense square matrix of bounds shared by the DBM-based domains.

use crate::bound::Bound;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dbm {
    dim: usize,
    cells: Vec<Bound>,
}

impl Dbm {
    /// All entries `+inf` except a zero diagonal.
    pub fn unconstrained(dim: usize) -> Dbm {
        let mut cells = vec![Bound::Infinite; dim * dim];
        for i in 0..dim {
            cells[i * dim + i] = Bound::ZERO;
        }
        Dbm { dim, cells }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline(always)]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.cells[i * self.dim + j]
    }

    #[inline(always)]
    pub fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.cells[i * self.dim + j] = b;
    }

    #[inline(always)]
    pub fn row(&self, i: usize) -> &[Bound] {
        &self.cells[i * self.dim..(i + 1) * self.dim]
    }

    #[inline(always)]
    pub fn row_mut(&mut self, i: usize) -> &mut [Bound] {
        &mut self.cells[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cells(&self) -> &[Bound] {
        &self.cells
    }

    pub fn zip_with(&self, other: &Dbm, f: impl Fn(Bound, Bound) -> Bound) -> Dbm {
        debug_assert_eq!(self.dim, other.dim);
        let cells = self.cells.iter().zip(&other.cells).map(|(&a, &b)| f(a, b)).collect();
        Dbm { dim: self.dim, cells }
    }

    /// True if every entry of `self` is at most the matching entry of `other`.
    pub fn le(&self, other: &Dbm) -> bool {
        self.cells.iter().zip(&other.cells).all(|(a, b)| a <= b)
    }

    /// First `(i, j)` where `self[i][j] > other[i][j]`.
    pub fn first_above(&self, other: &Dbm) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .zip(&other.cells)
            .position(|(a, b)| a > b)
            .map(|p| (p / self.dim, p % self.dim))
    }

    pub fn first_nonzero_diagonal(&self) -> Option<usize> {
        (0..self.dim).find(|&i| self.get(i, i) != Bound::ZERO)
    }

    /// First `(i, k, j)` with `m[i][j] > m[i][k] + m[k][j]`. Cubic.
    pub fn triangle_violation(&self) -> Option<(usize, usize, usize)> {
        let d = self.dim;
        for k in 0..d {
            for i in 0..d {
                let ik = self.get(i, k);
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..d {
                    if self.get(i, j) > ik + self.get(k, j) {
                        return Some((i, k, j));
                    }
                }
            }
        }
        None
    }

    pub fn finite_entries(&self) -> usize {
        self.cells.iter().filter(|b| b.is_finite()).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_has_zero_diagonal() {
        let m = Dbm::unconstrained(3);
        assert_eq!(m.first_nonzero_diagonal(), None);
        assert_eq!(m.finite_entries(), 3);
        assert_eq!(m.triangle_violation(), None);
    }

    #[test]
    fn triangle_detection() {
        let mut m = Dbm::unconstrained(3);
        m.set(0, 1, Bound::finite(1));
        m.set(1, 2, Bound::finite(1));
        m.set(0, 2, Bound::finite(5));
        assert_eq!(m.triangle_violation(), Some((0, 1, 2)));
        m.set(0, 2, Bound::finite(2));
        assert_eq!(m.triangle_violation(), None);
    }
}
