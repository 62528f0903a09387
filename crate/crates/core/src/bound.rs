//! Extended integers for DBM entries and the index algebra of the doubled
//! variable encoding.

use std::fmt;
use std::ops::Add;

/// Largest magnitude a finite bound may take. Two in-band values can be
/// summed in `i64` without wrapping.
pub const BAND: i64 = 1 << 62;

/// A constraint constant: a finite integer in `[-BAND, BAND]` or `+inf`.
///
/// The derived order places every finite value below `Infinite`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Bound {
    Finite(i64),
    #[default]
    Infinite,
}

impl Bound {
    pub const ZERO: Bound = Bound::Finite(0);

    /// Builds a finite bound, panicking if `v` leaves the headroom band.
    #[inline]
    pub fn finite(v: i64) -> Bound {
        match Bound::try_finite(v) {
            Some(b) => b,
            None => panic!("bound {v} outside headroom band [-2^62, 2^62]"),
        }
    }

    #[inline]
    pub fn try_finite(v: i64) -> Option<Bound> {
        (-BAND..=BAND).contains(&v).then_some(Bound::Finite(v))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    #[inline]
    pub fn is_infinite(self) -> bool {
        matches!(self, Bound::Infinite)
    }

    #[inline]
    pub fn value(self) -> Option<i64> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Infinite => None,
        }
    }

    /// Floor of half the bound; `+inf` stays `+inf`.
    #[inline]
    pub fn halve_floor(self) -> Bound {
        match self {
            Bound::Finite(v) => Bound::Finite(v.div_euclid(2)),
            Bound::Infinite => Bound::Infinite,
        }
    }

    /// Adds a finite offset (used by translations); `+inf` absorbs it.
    #[inline]
    pub fn shift(self, delta: i64) -> Bound {
        self + Bound::finite(delta)
    }
}

/// Sum with `+inf` absorbing. Leaving the headroom band is an arithmetic
/// fault and aborts.
#[inline]
pub fn bound_add(a: Bound, b: Bound) -> Bound {
    match (a, b) {
        (Bound::Finite(x), Bound::Finite(y)) => {
            let s = x + y;
            if !(-BAND..=BAND).contains(&s) {
                overflow(x, y);
            }
            Bound::Finite(s)
        }
        _ => Bound::Infinite,
    }
}

#[cold]
#[inline(never)]
fn overflow(x: i64, y: i64) -> ! {
    panic!("bound arithmetic fault: {x} + {y} leaves the headroom band")
}

#[inline]
pub fn bound_min(a: Bound, b: Bound) -> Bound {
    a.min(b)
}

#[inline]
pub fn halve_floor(b: Bound) -> Bound {
    b.halve_floor()
}

impl Add for Bound {
    type Output = Bound;

    #[inline]
    fn add(self, rhs: Bound) -> Bound {
        bound_add(self, rhs)
    }
}

impl From<i64> for Bound {
    fn from(v: i64) -> Self {
        Bound::finite(v)
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => write!(f, "{v}"),
            Bound::Infinite => f.write_str("+inf"),
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Row/column index into a doubled-variable DBM. Variable `k` owns index
/// `2k` (its positive form) and `2k + 1` (its negative form).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DbmIndex(pub usize);

impl DbmIndex {
    #[inline]
    pub fn pos(var: usize) -> DbmIndex {
        DbmIndex(2 * var)
    }

    #[inline]
    pub fn neg(var: usize) -> DbmIndex {
        DbmIndex(2 * var + 1)
    }

    #[inline]
    pub fn bar(self) -> DbmIndex {
        DbmIndex(bar(self.0))
    }

    #[inline]
    pub fn var(self) -> usize {
        self.0 / 2
    }
}

/// The coherent mirror of an index: flips the lowest bit.
#[inline(always)]
pub fn bar(i: usize) -> usize {
    i ^ 1
}
