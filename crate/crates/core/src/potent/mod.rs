//! Completion of (k+1)-potent matrices from a diagonal pattern.
//!
//! Every potent element is determined by its diagonal (a list of potent
//! scalars) together with the entries `a_ij` whose diagonal values differ.
//! The remaining strict entries are forced; [`complete_potent`] solves for
//! them pair by pair in order of increasing span.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{DiagonalMode, Field, FieldElem};
use crate::incmat::UpperMatrix;
use crate::poset::Poset;

mod closed_form;
mod enumerate;
mod oracle;

pub use closed_form::{forced_entry_closed_form, PathReading};
pub use enumerate::{
    count_by_construction, structured_count, DiagonalAssignments, PotentEnumerator,
};
pub use oracle::{
    brute_force_collect, brute_force_count, default_cap, parse_cap, OracleOptions, CAP_ENV,
};

/// Values of the free slots, keyed by `(i, j)` in extension indices.
pub type FreeValues = BTreeMap<(usize, usize), FieldElem>;

/// A diagonal of potent scalars on a poset.
#[derive(Clone, Debug)]
pub struct DiagonalAssignment {
    poset: Arc<Poset>,
    field: Field,
    k: u32,
    values: Vec<FieldElem>,
}

impl DiagonalAssignment {
    /// Checks that every value satisfies `x^{k+1} = x`.
    pub fn new(poset: Arc<Poset>, field: Field, k: u32, values: Vec<FieldElem>) -> Result<Self> {
        Self::with_mode(poset, field, k, values, DiagonalMode::Potent)
    }

    /// As [`DiagonalAssignment::new`], additionally restricting values to the
    /// alphabet of `mode`.
    pub fn with_mode(
        poset: Arc<Poset>,
        field: Field,
        k: u32,
        values: Vec<FieldElem>,
        mode: DiagonalMode,
    ) -> Result<Self> {
        if values.len() != poset.len() {
            return Err(Error::DiagonalLength {
                expected: poset.len(),
                got: values.len(),
            });
        }
        let alphabet = field.diagonal_alphabet(k, mode)?;
        for (index, &v) in values.iter().enumerate() {
            if !alphabet.contains(&v) {
                return Err(Error::NotPotentScalar {
                    index,
                    code: v.code(),
                });
            }
        }
        Ok(DiagonalAssignment {
            poset,
            field,
            k,
            values,
        })
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn values(&self) -> &[FieldElem] {
        &self.values
    }

    /// Strict pairs whose diagonal values differ, in extension order.
    pub fn free_slots(&self) -> Vec<(usize, usize)> {
        self.poset
            .strict_pairs()
            .filter(|&(i, j)| self.values[i] != self.values[j])
            .collect()
    }

    /// Strict pairs whose diagonal values agree.
    pub fn forced_slots(&self) -> Vec<(usize, usize)> {
        self.poset
            .strict_pairs()
            .filter(|&(i, j)| self.values[i] == self.values[j])
            .collect()
    }
}

/// Strict pairs `(i, j)` with `d(i) != d(j)`.
pub fn free_slots(d: &DiagonalAssignment) -> Vec<(usize, usize)> {
    d.free_slots()
}

/// Builds the unique (k+1)-potent matrix with diagonal `d` and the given
/// free entries.
///
/// Pairs are visited by increasing span. For a pair `(i, j)` the entry of
/// `A^t` is affine in `a_ij`: `(A^t)_ij = base_t + g_t · a_ij` where
///
/// * `base_1 = 0`, `base_t = Σ_{i<c<j} (A^{t-1})_ic A_cj + base_{t-1} d_j`
/// * `g_1 = 1`, `g_t = d_i^{t-1} + g_{t-1} d_j`
///
/// and every term of `base_t` involves only pairs of smaller span. A forced
/// entry solves `base_{k+1} + g_{k+1} a = a`.
pub fn complete_potent(d: &DiagonalAssignment, free: &FreeValues) -> Result<UpperMatrix> {
    let f = &d.field;
    f.char_guard(d.k).check()?;
    let poset = &*d.poset;
    let n = poset.len();
    for &(i, j) in free.keys() {
        let is_free = i < j && i < n && j < n && poset.leq(i, j) && d.values[i] != d.values[j];
        if !is_free {
            return Err(Error::ExtraFreeValue(i, j));
        }
    }

    let steps = d.k as usize + 1;
    let slots = poset.pairs().len();
    // pow[t - 1][slot] holds (A^t) at that slot.
    let mut pow = vec![vec![FieldElem::ZERO; slots]; steps];
    let mut order: Vec<(usize, usize)> = poset.pairs().to_vec();
    order.sort_by_key(|&(i, j)| (j - i, i));

    for (i, j) in order {
        let sij = poset.slot(i, j).expect("pair in support");
        if i == j {
            let mut v = d.values[i];
            for row in pow.iter_mut() {
                row[sij] = v;
                v = f.mul(v, d.values[i]);
            }
            continue;
        }
        let (di, dj) = (d.values[i], d.values[j]);
        let mids: Vec<usize> = (i + 1..j)
            .filter(|&c| poset.leq(i, c) && poset.leq(c, j))
            .collect();
        let mut base = vec![FieldElem::ZERO; steps];
        let mut gain = vec![FieldElem::ONE; steps];
        for t in 1..steps {
            let mut b = f.mul(base[t - 1], dj);
            for &c in &mids {
                let ic = poset.slot(i, c).unwrap();
                let cj = poset.slot(c, j).unwrap();
                b = f.add(b, f.mul(pow[t - 1][ic], pow[0][cj]));
            }
            base[t] = b;
            gain[t] = f.add(
                pow[t - 1][poset.slot(i, i).unwrap()],
                f.mul(gain[t - 1], dj),
            );
        }
        let a = if di != dj {
            *free.get(&(i, j)).ok_or(Error::MissingFreeValue(i, j))?
        } else {
            let denom = f.sub(FieldElem::ONE, gain[steps - 1]);
            let inv = f.inv(denom).ok_or_else(|| {
                Error::CharGuardFailed(format!("1 - (k+1)r^k vanishes at ({i}, {j})"))
            })?;
            f.mul(base[steps - 1], inv)
        };
        for t in 0..steps {
            pow[t][sij] = f.add(base[t], f.mul(gain[t], a));
        }
    }

    Ok(UpperMatrix::from_entries(
        d.poset.clone(),
        d.field.clone(),
        pow.swap_remove(0),
    ))
}
