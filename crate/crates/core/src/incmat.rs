//! Incidence-algebra elements as upper triangular matrices.
//!
//! An [`UpperMatrix`] stores one field element per relation pair of its
//! poset; every other position is zero. For a chain this is the full
//! upper triangular algebra.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::poset::Poset;

#[derive(Clone, Debug)]
pub struct UpperMatrix {
    poset: Arc<Poset>,
    field: Field,
    /// Aligned with `poset.pairs()`.
    entries: Vec<FieldElem>,
}

impl PartialEq for UpperMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && (Arc::ptr_eq(&self.poset, &other.poset) || self.poset == other.poset)
            && self.entries == other.entries
    }
}

impl Eq for UpperMatrix {}

impl UpperMatrix {
    pub fn zero(poset: Arc<Poset>, field: Field) -> Self {
        let entries = vec![FieldElem::ZERO; poset.pairs().len()];
        UpperMatrix {
            poset,
            field,
            entries,
        }
    }

    pub fn identity(poset: Arc<Poset>, field: Field) -> Self {
        Self::from_fn(poset, field, |i, j| {
            if i == j {
                FieldElem::ONE
            } else {
                FieldElem::ZERO
            }
        })
    }

    pub fn from_fn(
        poset: Arc<Poset>,
        field: Field,
        mut f: impl FnMut(usize, usize) -> FieldElem,
    ) -> Self {
        let entries = poset.pairs().iter().map(|&(i, j)| f(i, j)).collect();
        UpperMatrix {
            poset,
            field,
            entries,
        }
    }

    /// Entries aligned with `poset.pairs()`.
    pub fn from_entries(poset: Arc<Poset>, field: Field, entries: Vec<FieldElem>) -> Self {
        assert_eq!(
            entries.len(),
            poset.pairs().len(),
            "one entry per relation pair"
        );
        UpperMatrix {
            poset,
            field,
            entries,
        }
    }

    /// Elementary matrix `E_ij`.
    pub fn unit(poset: Arc<Poset>, field: Field, i: usize, j: usize) -> Result<Self> {
        let mut m = Self::zero(poset, field);
        m.set(i, j, FieldElem::ONE)?;
        Ok(m)
    }

    pub fn poset(&self) -> &Arc<Poset> {
        &self.poset
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn entries(&self) -> &[FieldElem] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.poset.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        match self.poset.slot(i, j) {
            Some(s) => self.entries[s],
            None => FieldElem::ZERO,
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) -> Result<()> {
        let s = self.poset.slot(i, j).ok_or(Error::OutsideSupport(i, j))?;
        self.entries[s] = v;
        Ok(())
    }

    pub fn diagonal(&self) -> Vec<FieldElem> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !(Arc::ptr_eq(&self.poset, &other.poset) || self.poset == other.poset) {
            return Err(Error::MixedPoset);
        }
        if self.field != other.field {
            return Err(Error::MixedField);
        }
        Ok(())
    }

    /// Convolution product `(fg)(x, y) = Σ_{x ≤ t ≤ y} f(x, t) g(t, y)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let f = &self.field;
        let p = &*self.poset;
        let entries = p
            .pairs()
            .iter()
            .map(|&(x, y)| {
                (x..=y)
                    .filter(|&t| p.leq(x, t) && p.leq(t, y))
                    .fold(FieldElem::ZERO, |acc, t| {
                        f.add(acc, f.mul(self.get(x, t), other.get(t, y)))
                    })
            })
            .collect();
        UpperMatrix {
            poset: self.poset.clone(),
            field: self.field.clone(),
            entries,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = &self.field;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(UpperMatrix {
            poset: self.poset.clone(),
            field: self.field.clone(),
            entries,
        })
    }

    /// `A^t` by square-and-multiply; `A^0` is the identity.
    pub fn pow(&self, mut t: u64) -> Self {
        let mut acc = Self::identity(self.poset.clone(), self.field.clone());
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            t >>= 1;
            if t > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// `A^{k+1} = A`.
    pub fn is_potent(&self, k: u32) -> bool {
        self.pow(k as u64 + 1) == *self
    }

    /// Restriction to the subposet on the given positions.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        let sub = Arc::new(self.poset.induced(positions));
        Self::from_fn(sub, self.field.clone(), |a, b| {
            self.get(positions[a], positions[b])
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut d = DenseMatrix::zero(n, n);
        for (&(i, j), &v) in self.poset.pairs().iter().zip(&self.entries) {
            d.set(i, j, v);
        }
        d
    }

    /// Text format: `#` header lines, then one `i j code` line per
    /// relation pair with 1-based extension indices.
    pub fn to_text(&self, poset_name: &str) -> String {
        let mut s = String::new();
        writeln!(s, "# poset: {poset_name}").unwrap();
        writeln!(s, "# field: {}", self.field).unwrap();
        writeln!(s, "# elements: {}", self.poset.labels().join(" ")).unwrap();
        for (&(i, j), v) in self.poset.pairs().iter().zip(&self.entries) {
            writeln!(s, "{} {} {}", i + 1, j + 1, v.code()).unwrap();
        }
        s
    }

    /// Reads the body of [`UpperMatrix::to_text`]; pairs not listed are zero.
    pub fn parse_text(text: &str, poset: Arc<Poset>, field: Field) -> Result<Self> {
        let mut m = Self::zero(poset, field.clone());
        let mut given = BTreeMap::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: ln + 1, msg };
            let nums: Vec<u64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| err(format!("bad number `{t}`")))
                })
                .collect::<Result<_>>()?;
            let [i, j, code] = nums[..] else {
                return Err(err("expected `i j code`".into()));
            };
            if i == 0 || j == 0 {
                return Err(err("indices are 1-based".into()));
            }
            let (i, j) = (i as usize - 1, j as usize - 1);
            if given.insert((i, j), ()).is_some() {
                return Err(err(format!("duplicate entry ({}, {})", i + 1, j + 1)));
            }
            if i >= m.dim() || j >= m.dim() {
                return Err(Error::OutsideSupport(i + 1, j + 1));
            }
            m.set(i, j, field.elem(code)?)
                .map_err(|_| Error::OutsideSupport(i + 1, j + 1))?;
        }
        Ok(m)
    }
}

/// Small dense matrix over a field, row major. Shapes are checked with
/// assertions; callers build them from well-formed blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl DenseMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zero(rows.len(), cols.len());
        for (a, i) in rows.enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out.set(a, b, self.get(i, j));
            }
        }
        out
    }

    pub fn mul(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for t in 0..self.cols {
                let a = self.get(i, t);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(t, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self, f: &Field) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        }
    }

    pub fn scale(&self, c: FieldElem, f: &Field) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn pow(&self, t: u64, f: &Field) -> Self {
        (0..t).fold(Self::identity(self.rows), |acc, _| acc.mul(self, f))
    }
}

/// The blocks of `A^{k+1}` for `A = [[r, a, x], [0, u, b], [0, 0, t]]`,
/// with `a` the first row between the corners, `b` the last column between
/// the corners and `x` the top-right entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerBlocks {
    pub row: Vec<FieldElem>,
    pub column: Vec<FieldElem>,
    pub corner: FieldElem,
}

/// Evaluates the closed forms for the border blocks of `A^{k+1}`:
///
/// * `a' = a · Σ_{p=0}^{k} r^{k-p} u^p`
/// * `b' = (Σ_{p=0}^{k} t^p u^{k-p}) · b`
/// * `x' = x · Σ_{p=0}^{k} r^p t^{k-p} + a · [Σ_{β=0}^{k-1} h_{k-1-β}(r, t) u^β] · b`
///
/// where `h_d(r, t) = Σ_{α+γ=d} r^α t^γ`. No power of `A` itself is formed.
pub fn power_blocks_closed_form(m: &UpperMatrix, k: u32) -> Result<PowerBlocks> {
    let n = m.dim();
    if n < 3 {
        return Err(Error::TooSmall(n));
    }
    let f = m.field();
    let dense = m.to_dense();
    let r = dense.get(0, 0);
    let t = dense.get(n - 1, n - 1);
    let x = dense.get(0, n - 1);
    let a = dense.block(0..1, 1..n - 1);
    let b = dense.block(1..n - 1, n - 1..n);
    let u = dense.block(1..n - 1, 1..n - 1);
    let k = k as u64;

    // u^0 … u^k
    let mut upow = vec![DenseMatrix::identity(n - 2)];
    for p in 1..=k as usize {
        upow.push(upow[p - 1].mul(&u, f));
    }
    let h = |d: u64| {
        (0..=d).fold(FieldElem::ZERO, |acc, al| {
            f.add(acc, f.mul(f.pow(r, al), f.pow(t, d - al)))
        })
    };

    let mut left = DenseMatrix::zero(n - 2, n - 2);
    let mut right = DenseMatrix::zero(n - 2, n - 2);
    let mut middle = DenseMatrix::zero(n - 2, n - 2);
    for p in 0..=k {
        left = left.add(&upow[p as usize].scale(f.pow(r, k - p), f), f);
        right = right.add(&upow[(k - p) as usize].scale(f.pow(t, p), f), f);
        if p < k {
            middle = middle.add(&upow[p as usize].scale(h(k - 1 - p), f), f);
        }
    }
    let row = a.mul(&left, f);
    let column = right.mul(&b, f);
    let cross = a.mul(&middle, f).mul(&b, f).get(0, 0);
    let corner = f.add(f.mul(x, h(k)), cross);

    Ok(PowerBlocks {
        row: (0..n - 2).map(|j| row.get(0, j)).collect(),
        column: (0..n - 2).map(|i| column.get(i, 0)).collect(),
        corner,
    })
}

/// The same blocks read off an explicit power `A^{k+1}`.
pub fn power_blocks_of(m: &UpperMatrix, k: u32) -> Result<PowerBlocks> {
    let n = m.dim();
    if n < 3 {
        return Err(Error::TooSmall(n));
    }
    let pw = m.pow(k as u64 + 1);
    Ok(PowerBlocks {
        row: (1..n - 1).map(|j| pw.get(0, j)).collect(),
        column: (1..n - 1).map(|i| pw.get(i, n - 1)).collect(),
        corner: pw.get(0, n - 1),
    })
}
