//! Strong closure over the integers: Floyd-Warshall shortest paths, unary
//! tightening, then one strengthening pass. The incremental variants restore
//! the same canonical form after a single constraint is added to a closed
//! matrix.

use crate::bound::{bar, Bound};
use crate::matrix::Dbm;

/// Sink for comparison counts. `()` discards them at zero cost.
pub trait Tally {
    fn add(&mut self, n: u64);
}

impl Tally for () {
    #[inline(always)]
    fn add(&mut self, _: u64) {}
}

impl Tally for u64 {
    #[inline(always)]
    fn add(&mut self, n: u64) {
        *self += n;
    }
}

/// One Floyd-Warshall relaxation step through pivot `k`, in place.
/// `row_k` is scratch of length `dim`.
#[inline]
pub(crate) fn relax_through(m: &mut Dbm, k: usize, row_k: &mut [Bound], tally: &mut impl Tally) {
    let d = m.dim();
    row_k.copy_from_slice(m.row(k));
    for i in 0..d {
        let ik = m.get(i, k);
        if ik.is_infinite() {
            continue;
        }
        tally.add(d as u64);
        let row_i = m.row_mut(i);
        for (dst, &kj) in row_i.iter_mut().zip(row_k.iter()) {
            let cand = ik + kj;
            *dst = (*dst).min(cand);
        }
    }
}

fn negative_diagonal(m: &Dbm) -> bool {
    (0..m.dim()).any(|i| m.get(i, i) < Bound::ZERO)
}

/// All-pairs shortest paths. Returns `false` as soon as a negative cycle
/// shows up on the diagonal; entries are unspecified in that case.
pub(crate) fn shortest_paths(m: &mut Dbm) -> bool {
    let d = m.dim();
    let mut row_k = vec![Bound::Infinite; d];
    for k in 0..d {
        relax_through(m, k, &mut row_k, &mut ());
        // stop before a negative cycle can drive entries out of the band
        if negative_diagonal(m) {
            return false;
        }
    }
    true
}

/// Rounds every unary entry down to an even value and checks the pairs of
/// unary bounds for consistency.
pub(crate) fn tighten(m: &mut Dbm, tally: &mut impl Tally) -> bool {
    let d = m.dim();
    tally.add(d as u64);
    for i in 0..d {
        if let Bound::Finite(v) = m.get(i, bar(i)) {
            m.set(i, bar(i), Bound::Finite(2 * v.div_euclid(2)));
        }
    }
    (0..d).step_by(2).all(|i| m.get(i, i + 1) + m.get(i + 1, i) >= Bound::ZERO)
}

/// `m[i][j] <- min(m[i][j], floor(m[i][bar i]/2) + floor(m[bar j][j]/2))`.
pub(crate) fn strengthen(m: &mut Dbm, tally: &mut impl Tally) {
    let d = m.dim();
    let half: Vec<Bound> = (0..d).map(|i| m.get(i, bar(i)).halve_floor()).collect();
    for i in 0..d {
        let hi = half[i];
        if hi.is_infinite() {
            continue;
        }
        tally.add(d as u64);
        let row = m.row_mut(i);
        for (j, dst) in row.iter_mut().enumerate() {
            let cand = hi + half[bar(j)];
            *dst = (*dst).min(cand);
        }
    }
}

/// Full strong closure in place. `false` means the matrix is inconsistent.
pub(crate) fn close_in_place(m: &mut Dbm) -> bool {
    shortest_paths(m) && tighten(m, &mut ()) && {
        strengthen(m, &mut ());
        true
    }
}

/// Shortest paths and tightening without the strengthening pass. Only used to
/// demonstrate that the canonical-form check catches a broken closure.
pub(crate) fn close_skipping_strengthening(m: &mut Dbm) -> bool {
    shortest_paths(m) && tighten(m, &mut ())
}

/// Incremental closure by relaxing only through the endpoints of the new edge
/// `(a, b)` and of its coherent mirror. `m` must be strongly closed apart from
/// that edge pair.
///
/// This is Floyd-Warshall restricted to those pivots with the loops
/// interchanged: the pivot rows are brought up to date for each stage first,
/// then every other row takes all stages in one sweep, so the matrix is
/// streamed once instead of once per pivot. Values are identical to running
/// the pivots one after another.
pub(crate) fn incremental_pivots(m: &mut Dbm, a: usize, b: usize) -> bool {
    let mut pivots = [a, b, bar(a), bar(b)];
    pivots.sort_unstable();
    let mut ks = pivots.to_vec();
    ks.dedup();

    // stage_rows[s] is row ks[s] as stage s sees it
    let mut stage_rows: Vec<Vec<Bound>> = Vec::with_capacity(ks.len());
    for &k in &ks {
        let mut row = m.row(k).to_vec();
        apply_stages(&mut row, &ks, &stage_rows);
        stage_rows.push(row);
    }
    // a new negative cycle must pass through the new edge, hence through a
    // pivot, so it shows on a pivot row's diagonal once all stages ran
    for (s, &k) in ks.iter().enumerate() {
        let mut row = stage_rows[s].clone();
        apply_stages_from(&mut row, &ks, &stage_rows, s);
        if row[k] < Bound::ZERO {
            return false;
        }
    }
    for i in 0..m.dim() {
        apply_stages(m.row_mut(i), &ks, &stage_rows);
    }
    if negative_diagonal(m) || !tighten(m, &mut ()) {
        return false;
    }
    strengthen(m, &mut ());
    true
}

/// Relaxes `row` through the first `stage_rows.len()` pivots in order.
#[inline]
fn apply_stages(row: &mut [Bound], ks: &[usize], stage_rows: &[Vec<Bound>]) {
    apply_range(row, ks, stage_rows, 0..stage_rows.len());
}

/// Relaxes `row` through pivots `from..` of the completed stage list.
fn apply_stages_from(row: &mut [Bound], ks: &[usize], stage_rows: &[Vec<Bound>], from: usize) {
    apply_range(row, ks, stage_rows, from..stage_rows.len());
}

#[inline]
fn apply_range(row: &mut [Bound], ks: &[usize], stage_rows: &[Vec<Bound>], stages: std::ops::Range<usize>) {
    for s in stages {
        let ik = row[ks[s]];
        if ik.is_infinite() {
            continue;
        }
        for (dst, &kj) in row.iter_mut().zip(stage_rows[s].iter()) {
            *dst = (*dst).min(ik + kj);
        }
    }
}

/// Incremental closure in one in-place pass over the strongly closed `m`,
/// after setting `m[a][b] = w` (and its mirror). Every shortest path that
/// improves uses the edge `a -> b`, its mirror `bar b -> bar a`, or both, so
/// each new entry is the minimum over four path shapes. The costs of reaching
/// `b` and `bar a` from row `i` are hoisted out of the column loop, leaving
/// two additions and two comparisons per entry.
pub(crate) fn incremental_single_pass(m: &mut Dbm, a: usize, b: usize, w: Bound, tally: &mut impl Tally) -> bool {
    let d = m.dim();
    let (na, nb) = (bar(a), bar(b));
    // every update reads only pre-update values of these rows and columns
    let row_b: Vec<Bound> = m.row(b).to_vec();
    let row_na: Vec<Bound> = m.row(na).to_vec();
    let col_a: Vec<Bound> = (0..d).map(|i| m.get(i, a)).collect();
    let col_nb: Vec<Bound> = (0..d).map(|i| m.get(i, nb)).collect();
    let b_to_nb = m.get(b, nb);
    let na_to_a = m.get(na, a);

    for i in 0..d {
        let (ia, inb) = (col_a[i], col_nb[i]);
        let to_b = (ia + w).min(inb + w + na_to_a + w);
        let to_na = (inb + w).min(ia + w + b_to_nb + w);
        tally.add(4);
        if to_b.is_infinite() && to_na.is_infinite() {
            continue;
        }
        tally.add(2 * d as u64);
        let row_i = m.row_mut(i);
        for (j, dst) in row_i.iter_mut().enumerate() {
            let via = (to_b + row_b[j]).min(to_na + row_na[j]);
            *dst = (*dst).min(via);
        }
    }
    if negative_diagonal(m) || !tighten(m, tally) {
        return false;
    }
    strengthen(m, tally);
    true
}
