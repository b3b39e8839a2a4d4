//! Rectangular linear sum assignment (Hungarian method with potentials).
//!
//! The solver is generic over the cost type so that the same routine serves
//! the plain `f64` problems of GOSPA and the lexicographic match scores of
//! HOTA.

use std::cmp::Ordering;
use std::ops::{Add, Sub};

/// Cost values usable by [`solve`]: an ordered additive group with a value
/// larger than any reachable reduced cost.
pub trait Cost: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    fn infinity() -> Self;
}

impl Cost for f64 {
    fn zero() -> Self {
        0.0
    }

    fn infinity() -> Self {
        f64::INFINITY
    }
}

/// Costs compared lexicographically, most significant component first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lexicographic<const N: usize>(pub [f64; N]);

/// Differences below this are treated as ties within a component.
const LEX_TOL: f64 = 1e-9;

impl<const N: usize> Add for Lexicographic<N> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o += r;
        }
        Self(out)
    }
}

impl<const N: usize> Sub for Lexicographic<N> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        let mut out = self.0;
        for (o, r) in out.iter_mut().zip(rhs.0) {
            *o -= r;
        }
        Self(out)
    }
}

impl<const N: usize> PartialOrd for Lexicographic<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a.is_infinite() || b.is_infinite() || (a - b).abs() > LEX_TOL {
                match a.partial_cmp(b)? {
                    Ordering::Equal => continue,
                    ord => return Some(ord),
                }
            }
        }
        Some(Ordering::Equal)
    }
}

impl<const N: usize> Cost for Lexicographic<N> {
    fn zero() -> Self {
        Self([0.0; N])
    }

    fn infinity() -> Self {
        let mut v = [0.0; N];
        if N > 0 {
            v[0] = f64::INFINITY;
        }
        Self(v)
    }
}

/// Minimum-cost assignment between `rows` and `cols`. Every element of the
/// smaller side is assigned. Returns, for each row, the assigned column.
pub fn solve<C: Cost>(rows: usize, cols: usize, cost: impl Fn(usize, usize) -> C) -> Vec<Option<usize>> {
    if rows == 0 || cols == 0 {
        return vec![None; rows];
    }
    if rows <= cols {
        let col_of_row = hungarian(rows, cols, &cost);
        col_of_row.into_iter().map(Some).collect()
    } else {
        let row_of_col = hungarian(cols, rows, &|c, r| cost(r, c));
        let mut out = vec![None; rows];
        for (c, r) in row_of_col.into_iter().enumerate() {
            out[r] = Some(c);
        }
        out
    }
}

/// Square-or-wide case (`n <= m`). Returns the column of every row.
fn hungarian<C: Cost>(n: usize, m: usize, cost: &dyn Fn(usize, usize) -> C) -> Vec<usize> {
    debug_assert!(n <= m);
    // 1-based arrays; index 0 is the virtual source column/row.
    let mut u = vec![C::zero(); n + 1];
    let mut v = vec![C::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![C::infinity(); m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = C::infinity();
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0usize; n];
    for j in 1..=m {
        if p[j] != 0 {
            col_of_row[p[j] - 1] = j - 1;
        }
    }
    col_of_row
}
