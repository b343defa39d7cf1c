//! Enumeration of potent matrices through their diagonal patterns.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};

use crate::error::Result;
use crate::field::{DiagonalMode, Field, FieldElem};
use crate::incmat::UpperMatrix;
use crate::poset::Poset;
use crate::qpoly::QPolynomial;

use super::{complete_potent, DiagonalAssignment, FreeValues};

/// All diagonals over an alphabet, lexicographic in element codes with the
/// first poset element most significant.
pub struct DiagonalAssignments {
    poset: Arc<Poset>,
    field: Field,
    k: u32,
    alphabet: Vec<FieldElem>,
    digits: Option<Vec<usize>>,
}

impl DiagonalAssignments {
    pub fn new(poset: Arc<Poset>, field: Field, k: u32, mode: DiagonalMode) -> Result<Self> {
        let alphabet = field.diagonal_alphabet(k, mode)?;
        let digits = Some(vec![0; poset.len()]);
        Ok(DiagonalAssignments {
            poset,
            field,
            k,
            alphabet,
            digits,
        })
    }
}

impl Iterator for DiagonalAssignments {
    type Item = DiagonalAssignment;

    fn next(&mut self) -> Option<DiagonalAssignment> {
        let digits = self.digits.as_mut()?;
        let values = digits.iter().map(|&x| self.alphabet[x]).collect();
        let base = self.alphabet.len();
        if !odometer(digits, base) {
            self.digits = None;
        }
        Some(DiagonalAssignment {
            poset: self.poset.clone(),
            field: self.field.clone(),
            k: self.k,
            values,
        })
    }
}

/// Advances a most-significant-first counter; false once it wraps.
fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// A diagonal, its free slots, and the odometer over their value codes.
type Cursor = (DiagonalAssignment, Vec<(usize, usize)>, Vec<usize>);

/// Every completion `complete_potent(d, v)`, diagonals in lexicographic
/// order and, within a diagonal, free values lexicographic in codes.
pub struct PotentEnumerator {
    diagonals: DiagonalAssignments,
    current: Option<Cursor>,
}

impl PotentEnumerator {
    pub fn new(poset: Arc<Poset>, field: Field, k: u32, mode: DiagonalMode) -> Result<Self> {
        field.char_guard(k).check()?;
        Ok(PotentEnumerator {
            diagonals: DiagonalAssignments::new(poset, field, k, mode)?,
            current: None,
        })
    }
}

impl Iterator for PotentEnumerator {
    type Item = UpperMatrix;

    fn next(&mut self) -> Option<UpperMatrix> {
        if self.current.is_none() {
            let d = self.diagonals.next()?;
            let slots = d.free_slots();
            let digits = vec![0; slots.len()];
            self.current = Some((d, slots, digits));
        }
        let (d, slots, digits) = self.current.as_mut().unwrap();
        let free: FreeValues = slots
            .iter()
            .zip(digits.iter())
            .map(|(&s, &c)| (s, FieldElem::from_code_unchecked(c as u32)))
            .collect();
        let m = complete_potent(d, &free).expect("diagonal and free slots are consistent");
        if !odometer(digits, d.field().order() as usize) {
            self.current = None;
        }
        Some(m)
    }
}

/// `Σ_d q^{|free(d)|}` over every diagonal drawn from the alphabet of `mode`.
pub fn count_by_construction(
    poset: &Poset,
    field: &Field,
    k: u32,
    mode: DiagonalMode,
) -> Result<BigUint> {
    field.char_guard(k).check()?;
    let s = field.diagonal_alphabet(k, mode)?.len();
    let strict: Vec<(usize, usize)> = poset.strict_pairs().collect();
    let mut hist = vec![0u64; strict.len() + 1];
    let mut digits = vec![0usize; poset.len()];
    loop {
        let free = strict
            .iter()
            .filter(|&&(i, j)| digits[i] != digits[j])
            .count();
        hist[free] += 1;
        if !odometer(&mut digits, s) {
            break;
        }
    }
    let q = BigUint::from(field.order());
    Ok(hist
        .iter()
        .enumerate()
        .map(|(e, &c)| BigUint::from(c) * q.pow(e as u32))
        .sum())
}

/// `Σ_labelings q^{#strict pairs with differing labels}` over all maps from
/// the poset to a set of `s` labels, as a polynomial in `q`.
///
/// Labelings are grouped by their kernel: each set partition into `b ≤ s`
/// blocks (enumerated as a restricted growth string) stands for
/// `s (s-1) … (s-b+1)` labelings.
pub fn structured_count(poset: &Poset, s: usize) -> QPolynomial {
    let n = poset.len();
    let below: Vec<Vec<usize>> = (0..n)
        .map(|c| (0..c).filter(|&a| poset.leq(a, c)).collect())
        .collect();
    let strict = below.iter().map(Vec::len).sum::<usize>();
    // hist[b][e]: partitions with b blocks and e differing pairs.
    let mut hist = vec![vec![0u64; strict + 1]; s + 1];
    if s == 0 {
        return QPolynomial::zero();
    }
    if n == 0 {
        return QPolynomial::one();
    }
    let mut labels = vec![0usize; n];
    rgs(&below, &mut labels, 1, 1, 0, s, &mut hist);

    let mut out = QPolynomial::zero();
    for (b, row) in hist.iter().enumerate() {
        let falling: BigInt = (0..b).map(|x| BigInt::from(s - x)).product();
        for (e, &c) in row.iter().enumerate() {
            if c > 0 {
                out.add_term(&falling * BigInt::from(c), e as u32);
            }
        }
    }
    out
}

fn rgs(
    below: &[Vec<usize>],
    labels: &mut [usize],
    pos: usize,
    blocks: usize,
    differing: usize,
    s: usize,
    hist: &mut [Vec<u64>],
) {
    if pos == labels.len() {
        hist[blocks][differing] += 1;
        return;
    }
    let limit = (blocks + 1).min(s);
    for l in 0..limit {
        labels[pos] = l;
        let extra = below[pos].iter().filter(|&&a| labels[a] != l).count();
        let nb = if l == blocks { blocks + 1 } else { blocks };
        rgs(below, labels, pos + 1, nb, differing + extra, s, hist);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonals_in_lexicographic_order() {
        let f = Field::new(5, 1).unwrap();
        let p = Arc::new(Poset::chain(2).unwrap());
        let seen: Vec<Vec<u32>> = DiagonalAssignments::new(p, f, 2, DiagonalMode::Potent)
            .unwrap()
            .map(|d| d.values().iter().map(|v| v.code()).collect())
            .collect();
        assert_eq!(
            seen,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 4],
                vec![1, 0],
                vec![1, 1],
                vec![1, 4],
                vec![4, 0],
                vec![4, 1],
                vec![4, 4],
            ]
        );
    }

    #[test]
    fn construction_counts() {
        let f3 = Field::new(3, 1).unwrap();
        let f5 = Field::new(5, 1).unwrap();
        let chain = |n| Poset::chain(n).unwrap();
        assert_eq!(
            count_by_construction(&chain(1), &f5, 2, DiagonalMode::Potent).unwrap(),
            3u32.into()
        );
        assert_eq!(
            count_by_construction(&chain(2), &f3, 1, DiagonalMode::Potent).unwrap(),
            8u32.into()
        );
    }

    #[test]
    fn enumerator_size_matches_count() {
        let f = Field::new(5, 1).unwrap();
        let p = Arc::new(Poset::chain(3).unwrap());
        let n = PotentEnumerator::new(p.clone(), f.clone(), 2, DiagonalMode::Potent)
            .unwrap()
            .count();
        let c = count_by_construction(&p, &f, 2, DiagonalMode::Potent).unwrap();
        assert_eq!(BigUint::from(n), c);
    }

    #[test]
    fn structured_count_small() {
        let p = Poset::chain(2).unwrap();
        assert_eq!(structured_count(&p, 2).to_string(), "2q+2");
        assert_eq!(structured_count(&p, 3).to_string(), "6q+3");
        assert_eq!(
            structured_count(&Poset::chain(1).unwrap(), 4).to_string(),
            "4"
        );
    }
}
