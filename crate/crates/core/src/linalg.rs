//! Sparse Gaussian elimination generic over [`Scalar`], for precisions faer does
//! not cover.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense copy of one row over the columns `start..start + vals.len()`.
#[derive(Debug, Clone)]
struct Row<T> {
    start: usize,
    vals: Vec<T>,
    rhs: T,
}

impl<T: Scalar> Row<T> {
    fn get(&self, col: usize) -> Option<&T> {
        col.checked_sub(self.start).and_then(|i| self.vals.get(i))
    }

    fn end(&self) -> usize {
        self.start + self.vals.len()
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting, storing each
/// row as a dense segment between its first and last nonzero.
///
/// Efficient when the rows are ordered so that nonzeros cluster around the
/// diagonal; fill stays inside the envelope spanned by the pivot rows.
pub fn solve_banded<T: Scalar>(rows: &[Vec<(usize, T)>], rhs: &[T]) -> Result<Vec<T>> {
    let n = rows.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { basis: rhs.len(), model: n });
    }
    let mut work: Vec<Row<T>> = Vec::with_capacity(n);
    let mut lower = 0usize;
    for (i, (row, b)) in rows.iter().zip(rhs).enumerate() {
        let start = row.iter().map(|e| e.0).min().unwrap_or(i).min(i);
        let end = row.iter().map(|e| e.0 + 1).max().unwrap_or(i + 1).max(i + 1);
        if end > n {
            return Err(Error::DimensionMismatch { basis: end, model: n });
        }
        let mut vals = vec![T::zero(); end - start];
        for (c, v) in row {
            vals[c - start] = vals[c - start].clone() + v.clone();
        }
        lower = lower.max(i - start);
        work.push(Row { start, vals, rhs: b.clone() });
    }

    for k in 0..n {
        let last = (k + lower).min(n - 1);
        let mut best: Option<(usize, T)> = None;
        for i in k..=last {
            if let Some(v) = work[i].get(k) {
                let a = v.abs();
                if !a.is_zero() && best.as_ref().is_none_or(|(_, b)| a > *b) {
                    best = Some((i, a));
                }
            }
        }
        let Some((p, _)) = best else {
            return Err(Error::Singular(format!("no pivot in column {k} of {n}")));
        };
        work.swap(k, p);
        let (head, tail) = work.split_at_mut(k + 1);
        let pivot = &head[k];
        let pk = pivot.get(k).expect("pivot entry").clone();
        for row in tail.iter_mut().take(last - k) {
            let m = match row.get(k) {
                Some(v) if !v.is_zero() => v.clone() / pk.clone(),
                _ => continue,
            };
            if pivot.end() > row.end() {
                row.vals.resize(pivot.end() - row.start, T::zero());
            }
            let off = row.start;
            for c in k + 1..pivot.end() {
                let pv = &pivot.vals[c - pivot.start];
                if !pv.is_zero() {
                    let slot = &mut row.vals[c - off];
                    *slot = slot.clone() - m.clone() * pv.clone();
                }
            }
            row.vals[k - off] = T::zero();
            row.rhs = row.rhs.clone() - m * pivot.rhs.clone();
        }
    }

    let mut x = vec![T::zero(); n];
    for k in (0..n).rev() {
        let row = &work[k];
        let mut s = row.rhs.clone();
        for c in k + 1..row.end() {
            let v = &row.vals[c - row.start];
            if !v.is_zero() {
                s = s - v.clone() * x[c].clone();
            }
        }
        x[k] = s / row.get(k).expect("diagonal entry").clone();
    }
    Ok(x)
}
