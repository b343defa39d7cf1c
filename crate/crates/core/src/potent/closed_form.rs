//! Weighted path-sum formula for a forced entry.
//!
//! For `d(i) = d(j) = r != 0`,
//!
//! ```text
//! a_ij = -(1/k) Σ_{s=2}^{k+1} Σ_{i < i_1 ≤ … ≤ i_{s-1} < j} (k+2-s) r^{k+1-s} a_{i,i_1} a_{i_1,i_2} … a_{i_{s-1},j}
//! ```
//!
//! Under the non-strict reading a repeated index contributes a diagonal
//! factor `a_{cc}`; this reading agrees with the fixed-point solve of
//! [`complete_potent`](super::complete_potent). The strict reading keeps only
//! strictly increasing index chains and differs from it once `k ≥ 2`.

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::incmat::UpperMatrix;

use super::DiagonalAssignment;

/// How the inner index chain of the path sum is read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathReading {
    /// `i < i_1 ≤ … ≤ i_{s-1} < j`, repeated indices pick up diagonal entries.
    NonStrict,
    /// `i < i_1 < … < i_{s-1} < j`.
    Strict,
}

/// Evaluates the path-sum formula for the forced pair `(i, j)` using the
/// entries of `partial` at pairs of smaller span.
pub fn forced_entry_closed_form(
    d: &DiagonalAssignment,
    partial: &UpperMatrix,
    (i, j): (usize, usize),
    reading: PathReading,
) -> Result<FieldElem> {
    let f = d.field();
    let poset = d.poset();
    if i >= j || !poset.leq(i, j) || d.values()[i] != d.values()[j] {
        return Err(Error::NotForced(i, j));
    }
    let r = d.values()[i];
    if r.is_zero() {
        return Err(Error::ZeroDiagonalCase);
    }
    let k = d.k();
    let inv_k = f
        .inv(f.from_int(k as i64))
        .ok_or_else(|| Error::CharGuardFailed(f.char_guard(k).to_string()))?;
    let entry = |a: usize, b: usize| -> FieldElem {
        if a == b {
            d.values()[a]
        } else {
            partial.get(a, b)
        }
    };

    // walk[c] = Σ over chains i < i_1 ≤ … ≤ i_{s-1} = c of a_{i,i_1} … a_{i_{s-2},c}.
    let inner: Vec<usize> = (i + 1..j).collect();
    let mut walk: Vec<FieldElem> = inner.iter().map(|&c| entry(i, c)).collect();
    let mut total = FieldElem::ZERO;
    for s in 2..=k as u64 + 1 {
        let closing = inner
            .iter()
            .zip(&walk)
            .fold(FieldElem::ZERO, |acc, (&c, &w)| {
                f.add(acc, f.mul(w, entry(c, j)))
            });
        let weight = f.mul(
            f.from_int((k as u64 + 2 - s) as i64),
            f.pow(r, k as u64 + 1 - s),
        );
        total = f.add(total, f.mul(weight, closing));

        let mut next = vec![FieldElem::ZERO; inner.len()];
        for (b, &cb) in inner.iter().enumerate() {
            let upto = match reading {
                PathReading::NonStrict => b + 1,
                PathReading::Strict => b,
            };
            next[b] = (0..upto).fold(FieldElem::ZERO, |acc, a| {
                f.add(acc, f.mul(walk[a], entry(inner[a], cb)))
            });
        }
        walk = next;
    }
    Ok(f.neg(f.mul(inv_k, total)))
}
