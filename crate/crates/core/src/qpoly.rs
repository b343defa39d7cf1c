//! Exact univariate polynomials in `q` with big-integer coefficients.
//!
//! Text form: descending exponents, `q^d` for `d >= 2`, `q` for `d = 1`,
//! and a coefficient of 1 left implicit, e.g. `12q^5+6q^4+8q^3+1`.
//! The parser also takes `q^{10}`, an optional `*` after the coefficient,
//! interior whitespace and a trailing period.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse polynomial: exponent → nonzero coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct QPolynomial {
    terms: BTreeMap<u32, BigInt>,
}

/// One coefficient that differs between two polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermDiff {
    pub exponent: u32,
    pub left: BigInt,
    pub right: BigInt,
}

impl QPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: impl Into<BigInt>, d: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(c.into(), d);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn coeff(&self, d: u32) -> BigInt {
        self.terms.get(&d).cloned().unwrap_or_default()
    }

    /// `(coefficient, exponent)` of the highest term.
    pub fn leading_term(&self) -> Option<(BigInt, u32)> {
        self.terms.iter().next_back().map(|(d, c)| (c.clone(), *d))
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(0)
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, &BigInt)> {
        self.terms.iter().rev().map(|(d, c)| (*d, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: BigInt, d: u32) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(d).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&d);
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(d, x)| (*d, x * c)).collect(),
        }
    }

    /// Exact evaluation at an integer point.
    pub fn eval(&self, q: &BigInt) -> BigInt {
        // Horner over the sparse exponents, high to low.
        let mut acc = BigInt::zero();
        let mut prev: Option<u32> = None;
        for (d, c) in self.terms() {
            if let Some(p) = prev {
                acc *= Pow::pow(q, p - d);
            }
            acc += c;
            prev = Some(d);
        }
        if let Some(p) = prev {
            acc *= Pow::pow(q, p);
        }
        acc
    }

    pub fn eval_u64(&self, q: u64) -> BigInt {
        self.eval(&BigInt::from(q))
    }

    /// Exponents at which `self` and `other` disagree, descending.
    pub fn diff(&self, other: &Self) -> Vec<TermDiff> {
        let mut exps: Vec<u32> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        exps.dedup();
        exps.into_iter()
            .filter_map(|d| {
                let (l, r) = (self.coeff(d), other.coeff(d));
                (l != r).then_some(TermDiff {
                    exponent: d,
                    left: l,
                    right: r,
                })
            })
            .collect()
    }

    /// Divides every coefficient by `c`, if all are divisible.
    pub fn exact_div(&self, c: &BigInt) -> Option<Self> {
        if c.is_zero() {
            return None;
        }
        let mut out = Self::zero();
        for (d, x) in &self.terms {
            if !(x % c).is_zero() {
                return None;
            }
            out.terms.insert(*d, x / c);
        }
        Some(out)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms().enumerate() {
            if c.sign() == Sign::Minus {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let a = c.abs();
            if d == 0 || !a.is_one() {
                write!(f, "{a}")?;
            }
            match d {
                0 => {}
                1 => write!(f, "q")?,
                _ => write!(f, "q^{d}")?,
            }
        }
        Ok(())
    }
}

fn syntax(msg: impl Into<String>) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.into(),
    }
}

impl FromStr for QPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let cleaned = cleaned.strip_suffix('.').unwrap_or(&cleaned);
        if cleaned.is_empty() {
            return Err(syntax("empty polynomial"));
        }
        let b = cleaned.as_bytes();
        let mut pos = 0;
        let mut out = QPolynomial::zero();
        let mut first = true;
        while pos < b.len() {
            let rest = &cleaned[pos..];
            let mut negative = false;
            if rest.starts_with('+') {
                pos += 1;
            } else if rest.starts_with('-') {
                negative = true;
                pos += 1;
            } else if rest.starts_with('−') {
                negative = true;
                pos += '−'.len_utf8();
            } else if !first {
                return Err(syntax(format!("expected + or - before `{rest}`")));
            }
            first = false;
            let start = pos;
            while pos < b.len() && b[pos].is_ascii_digit() {
                pos += 1;
            }
            let coeff: Option<BigInt> = (pos > start).then(|| cleaned[start..pos].parse().unwrap());
            if pos < b.len() && b[pos] == b'*' {
                if coeff.is_none() {
                    return Err(syntax("`*` without a coefficient"));
                }
                pos += 1;
            }
            let exponent = if pos < b.len() && b[pos] == b'q' {
                pos += 1;
                if pos < b.len() && b[pos] == b'^' {
                    pos += 1;
                    let braced = pos < b.len() && b[pos] == b'{';
                    if braced {
                        pos += 1;
                    }
                    let es = pos;
                    while pos < b.len() && b[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    if es == pos {
                        return Err(syntax("missing exponent after q^"));
                    }
                    let e: u32 = cleaned[es..pos]
                        .parse()
                        .map_err(|_| syntax("exponent too large"))?;
                    if braced {
                        if pos >= b.len() || b[pos] != b'}' {
                            return Err(syntax("unclosed `{` in exponent"));
                        }
                        pos += 1;
                    }
                    e
                } else {
                    1
                }
            } else if coeff.is_some() {
                0
            } else {
                return Err(syntax(format!("expected a term at offset {start}")));
            };
            let mut c = coeff.unwrap_or_else(BigInt::one);
            if negative {
                c = -c;
            }
            out.add_term(c, exponent);
        }
        Ok(out)
    }
}

impl Add<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;

    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for QPolynomial {
    type Output = QPolynomial;

    fn add(mut self, rhs: QPolynomial) -> QPolynomial {
        self += &rhs;
        self
    }
}

impl AddAssign<&QPolynomial> for QPolynomial {
    fn add_assign(&mut self, rhs: &QPolynomial) {
        for (d, c) in &rhs.terms {
            self.add_term(c.clone(), *d);
        }
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;

    fn neg(self) -> QPolynomial {
        QPolynomial {
            terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }
}

impl Sub<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;

    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        self + &(-rhs)
    }
}

impl Mul<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;

    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        let mut out = QPolynomial::zero();
        for (da, ca) in &self.terms {
            for (db, cb) in &rhs.terms {
                out.add_term(ca * cb, da + db);
            }
        }
        out
    }
}

impl Mul for QPolynomial {
    type Output = QPolynomial;

    fn mul(self, rhs: QPolynomial) -> QPolynomial {
        &self * &rhs
    }
}

/// `n! / (parts_1! ⋯ parts_r!)`.
pub fn multinomial(n: u64, parts: &[u64]) -> Result<BigUint> {
    let got: u64 = parts.iter().sum();
    if got != n {
        return Err(Error::PartsMismatch { expected: n, got });
    }
    // Running product of binomials; each prefix is an integer.
    let mut acc = BigUint::one();
    let mut seen = 0u64;
    for &p in parts {
        for i in 1..=p {
            seen += 1;
            acc = acc * seen / i;
        }
    }
    Ok(acc)
}

/// Binomial coefficient `C(n, r)`.
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    multinomial(n, &[r, n - r]).expect("parts sum to n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(3, &[1, 1, 1]).unwrap(), BigUint::from(6u32));
        assert_eq!(multinomial(2, &[2, 0, 0]).unwrap(), BigUint::one());
        assert_eq!(multinomial(4, &[2, 1, 1]).unwrap(), BigUint::from(12u32));
        assert_eq!(
            multinomial(4, &[2, 1]).unwrap_err(),
            Error::PartsMismatch {
                expected: 4,
                got: 3
            }
        );
        assert_eq!(multinomial(0, &[]).unwrap(), BigUint::one());
    }

    #[test]
    fn multinomial_is_exact_for_large_inputs() {
        // 40! / (20! 20!) = C(40, 20)
        assert_eq!(
            multinomial(40, &[20, 20]).unwrap().to_string(),
            "137846528820"
        );
        assert_eq!(binomial(5, 7), BigUint::zero());
    }

    #[test]
    fn render_table_style() {
        let poly = &(&(&QPolynomial::monomial(12, 5) + &QPolynomial::monomial(6, 4))
            + &QPolynomial::monomial(8, 3))
            + &QPolynomial::monomial(1, 0);
        assert_eq!(poly.to_string(), "12q^5+6q^4+8q^3+1");
        assert_eq!(p("q^2+q").to_string(), "q^2+q");
        assert_eq!(QPolynomial::zero().to_string(), "0");
        assert_eq!(p("-q+3").to_string(), "-q+3");
    }

    #[test]
    fn parse_accepts_caret_spelling() {
        assert_eq!(p("12q^{10}+174 q^{9} + 3."), p("12q^10+174q^9+3"));
        assert_eq!(p("51120*q^26"), QPolynomial::monomial(51120, 26));
        assert_eq!(
            p("2q + 2"),
            &QPolynomial::monomial(2, 1) + &QPolynomial::constant(2)
        );
        assert_eq!(p("−q"), QPolynomial::monomial(-1, 1));
        assert_eq!(p("q^2+q^2"), QPolynomial::monomial(2, 2));
        assert!("".parse::<QPolynomial>().is_err());
        assert!("3x^2".parse::<QPolynomial>().is_err());
        assert!("q^".parse::<QPolynomial>().is_err());
        assert!("q^{3".parse::<QPolynomial>().is_err());
        assert!("2++q".parse::<QPolynomial>().is_err());
    }

    #[test]
    fn ring_identities() {
        let a = p("q+1");
        assert_eq!(&a * &a, p("q^2+2q+1"));
        assert_eq!(&a + &QPolynomial::zero(), a);
        assert!((&a - &a).is_zero());
        assert_eq!(a.degree(), Some(1));
        assert_eq!(QPolynomial::zero().degree(), None);
    }

    #[test]
    fn evaluation() {
        assert_eq!(QPolynomial::one().eval_u64(7), BigInt::from(1));
        assert_eq!(p("2q+2").eval_u64(3), BigInt::from(8));
        assert_eq!(p("q^2").eval_u64(5), BigInt::from(25));
        assert_eq!(p("q^3+1").eval_u64(0), BigInt::from(1));
    }

    #[test]
    fn diff_reports_each_exponent() {
        let d = p("340q^17+q").diff(&p("336q^17+q+1"));
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].exponent, 17);
        assert_eq!(d[0].left, BigInt::from(340));
        assert_eq!(d[1].exponent, 0);
    }

    #[test]
    fn exact_division() {
        assert_eq!(p("6q^2+3").exact_div(&BigInt::from(3)), Some(p("2q^2+1")));
        assert_eq!(p("6q^2+4").exact_div(&BigInt::from(3)), None);
    }
}
