//! Exact arithmetic in GF(p^e).
//!
//! Elements are residue polynomials over GF(p) modulo a fixed monic
//! irreducible of degree `e`. Each element has a canonical integer code
//! `sum c_i * p^i` in `0..q`, with `code(0) = 0` and `code(1) = 1`.
//! The modulus is the irreducible with the smallest code of its lower
//! coefficient vector, so every construction is reproducible.
//!
//! Multiplication goes through discrete log/antilog tables built once per
//! field from the smallest primitive element.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default cap on the field order.
pub const DEFAULT_MAX_ORDER: u64 = 1 << 20;

/// Fields up to this order get a dense addition table.
const ADD_TABLE_MAX: u32 = 256;

/// A field element, stored as its canonical code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Wraps a code without a range check; callers guarantee `code < q`.
    pub(crate) fn from_code_unchecked(code: u32) -> Self {
        FieldElem(code)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Outcome of the characteristic check `p ∤ k` and `p ∤ k+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharGuard {
    Pass,
    DividesK { p: u32, k: u32 },
    DividesKPlusOne { p: u32, k: u32 },
}

impl CharGuard {
    pub fn is_pass(self) -> bool {
        matches!(self, CharGuard::Pass)
    }

    /// Converts a failing verdict into [`Error::CharGuardFailed`].
    pub fn check(self) -> Result<()> {
        match self {
            CharGuard::Pass => Ok(()),
            other => Err(Error::CharGuardFailed(other.to_string())),
        }
    }
}

impl fmt::Display for CharGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CharGuard::Pass => write!(f, "pass"),
            CharGuard::DividesK { p, k } => write!(f, "characteristic {p} divides k = {k}"),
            CharGuard::DividesKPlusOne { p, k } => {
                write!(f, "characteristic {p} divides k+1 = {}", k + 1)
            }
        }
    }
}

/// Which diagonal alphabet to draw potent scalars from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalMode {
    /// Every solution of `x^{k+1} = x`; there are `gcd(k, q-1) + 1` of them.
    Potent,
    /// `{0, 1, ω, …, ω^{k-1}}` for the canonical primitive `k`-th root `ω`.
    /// Requires `k | q-1`.
    RootsOfUnity,
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, low to high, length `e + 1`. Empty for prime fields.
    modulus: Vec<u32>,
    /// `exp[i] = g^i` for the smallest primitive element `g`, `i < q-1`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
    add: Option<Vec<u32>>,
}

/// A finite field GF(p^e). Cheap to clone; the arithmetic tables are shared.
#[derive(Clone)]
pub struct Field {
    t: Arc<Tables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.t, &other.t) || (self.t.p == other.t.p && self.t.e == other.t.e)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.t.p)
            .field("e", &self.t.e)
            .field("modulus", &self.t.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.e == 1 {
            write!(f, "{}", self.t.p)
        } else {
            write!(f, "{}^{}", self.t.p, self.t.e)
        }
    }
}

/// Parses `"p^e"`, or an order `"q"` that is a prime power.
impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 1,
            msg: format!("field `{s}`: {msg}"),
        };
        let s = s.trim();
        let (p, e) = match s.split_once('^') {
            Some((p, e)) => (
                p.trim()
                    .parse::<u64>()
                    .map_err(|_| bad("bad characteristic"))?,
                e.trim().parse::<u32>().map_err(|_| bad("bad degree"))?,
            ),
            None => {
                let q = s
                    .parse::<u64>()
                    .map_err(|_| bad("expected p, p^e or a prime power"))?;
                prime_power(q).ok_or(Error::NotPrime(q))?
            }
        };
        Field::new(p, e)
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, e)` with `q = p^e`, if `q` is a prime power.
fn prime_power(q: u64) -> Option<(u64, u32)> {
    let p = *prime_factors(q).first()?;
    let (mut rest, mut e) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn digits(mut code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(code % p);
        code /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo monic `m` over GF(p); both low to high.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let p64 = p as u64;
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap() % p64;
        if lead != 0 {
            let off = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                r[off + i] = (r[off + i] + p64 - (lead * c as u64) % p64) % p64;
            }
        }
    }
    r.into_iter().map(|x| x as u32).collect()
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut f = digits(code as u32, p, d as u32);
            f.push(1);
            if poly_rem(poly, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Multiplication on digit vectors, used only while building tables.
fn slow_mul(a: u32, b: u32, p: u32, e: u32, modulus: &[u32]) -> u32 {
    if e == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let da = digits(a, p, e);
    let db = digits(b, p, e);
    let mut prod = vec![0u32; 2 * e as usize - 1];
    for (i, &x) in da.iter().enumerate() {
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    let r = poly_rem(&prod, modulus, p);
    undigits(&r, p)
}

fn slow_pow(mut base: u32, mut n: u64, p: u32, e: u32, modulus: &[u32]) -> u32 {
    let mut acc = 1;
    while n > 0 {
        if n & 1 == 1 {
            acc = slow_mul(acc, base, p, e, modulus);
        }
        base = slow_mul(base, base, p, e, modulus);
        n >>= 1;
    }
    acc
}

impl Field {
    /// Builds GF(p^e) with the default size cap.
    pub fn new(p: u64, e: u32) -> Result<Self> {
        Self::with_cap(p, e, DEFAULT_MAX_ORDER)
    }

    pub fn with_cap(p: u64, e: u32, cap: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 {
            return Err(Error::DegreeZero);
        }
        let q = (p as u128).checked_pow(e).unwrap_or(u128::MAX);
        if q > cap as u128 || q > u32::MAX as u128 {
            return Err(Error::FieldTooLarge { p, e, cap });
        }
        let (p, q) = (p as u32, q as u32);

        let modulus = if e == 1 {
            Vec::new()
        } else {
            (0..q)
                .map(|code| {
                    let mut m = digits(code, p, e);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .expect("an irreducible of every degree exists")
        };

        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| {
                slow_pow(g, order, p, e, &modulus) == 1
                    && factors
                        .iter()
                        .all(|&l| slow_pow(g, order / l, p, e, &modulus) != 1)
            })
            .expect("the multiplicative group is cyclic");

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = slow_mul(x, generator, p, e, &modulus);
        }

        let mut tables = Tables {
            p,
            e,
            q,
            modulus,
            exp,
            log,
            add: None,
        };
        if e > 1 && q <= ADD_TABLE_MAX {
            let mut add = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    add.push(digit_add(&tables, a, b));
                }
            }
            tables.add = Some(add);
        }
        Ok(Field {
            t: Arc::new(tables),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.e
    }

    pub fn order(&self) -> u32 {
        self.t.q
    }

    /// Monic modulus coefficients, low to high; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.t.modulus
    }

    /// Element with the given canonical code.
    pub fn elem(&self, code: u64) -> Result<FieldElem> {
        if code >= self.t.q as u64 {
            return Err(Error::CodeOutOfRange { code, q: self.t.q });
        }
        Ok(FieldElem(code as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.t.p as i64) as u32)
    }

    /// Coefficient vector over GF(p), low to high, length `e`.
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        digits(a.0, self.t.p, self.t.e)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.t.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let t = &*self.t;
        if t.e == 1 {
            let s = a.0 + b.0;
            FieldElem(if s >= t.p { s - t.p } else { s })
        } else if let Some(add) = &t.add {
            FieldElem(add[(a.0 * t.q + b.0) as usize])
        } else {
            FieldElem(digit_add(t, a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let t = &*self.t;
        if t.e == 1 {
            FieldElem(if a.0 == 0 { 0 } else { t.p - a.0 })
        } else {
            let ds: Vec<u32> = digits(a.0, t.p, t.e)
                .into_iter()
                .map(|d| if d == 0 { 0 } else { t.p - d })
                .collect();
            FieldElem(undigits(&ds, t.p))
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        let n = t.q - 1;
        let s = t.log[a.0 as usize] + t.log[b.0 as usize];
        FieldElem(t.exp[(if s >= n { s - n } else { s }) as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        let t = &*self.t;
        let n = t.q - 1;
        Some(FieldElem(t.exp[((n - t.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// `a^n`, with `0^0 = 1`.
    pub fn pow(&self, a: FieldElem, n: u64) -> FieldElem {
        if n == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let t = &*self.t;
        let ord = (t.q - 1) as u64;
        let l = (t.log[a.0 as usize] as u64 * (n % ord)) % ord;
        FieldElem(t.exp[l as usize])
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> Option<u32> {
        if a.0 == 0 {
            return None;
        }
        let n = self.t.q - 1;
        Some(n / self.t.log[a.0 as usize].gcd(&n))
    }

    /// All `x` with `x^{k+1} = x`, sorted by code.
    pub fn potent_scalars(&self, k: u32) -> Vec<FieldElem> {
        self.elements()
            .filter(|&x| self.pow(x, k as u64 + 1) == x)
            .collect()
    }

    /// Number of potent scalars, `gcd(k, q-1) + 1`.
    pub fn potent_count(&self, k: u32) -> u32 {
        k.gcd(&(self.t.q - 1)) + 1
    }

    /// The element of multiplicative order exactly `k` with the smallest code.
    pub fn primitive_kth_root(&self, k: u32) -> Result<FieldElem> {
        if k == 0 || !(self.t.q - 1).is_multiple_of(k) {
            return Err(Error::NoSuchRoot { k, q: self.t.q });
        }
        Ok(self
            .elements()
            .find(|&x| self.mult_order(x) == Some(k))
            .expect("cyclic group has elements of every dividing order"))
    }

    pub fn char_guard(&self, k: u32) -> CharGuard {
        let p = self.t.p;
        if k.is_multiple_of(p) {
            CharGuard::DividesK { p, k }
        } else if (k as u64 + 1).is_multiple_of(p as u64) {
            CharGuard::DividesKPlusOne { p, k }
        } else {
            CharGuard::Pass
        }
    }

    /// Diagonal alphabet for the given mode, sorted by code.
    pub fn diagonal_alphabet(&self, k: u32, mode: DiagonalMode) -> Result<Vec<FieldElem>> {
        match mode {
            DiagonalMode::Potent => Ok(self.potent_scalars(k)),
            DiagonalMode::RootsOfUnity => {
                let w = self.primitive_kth_root(k)?;
                let mut out = vec![FieldElem::ZERO];
                out.extend((0..k as u64).map(|i| self.pow(w, i)));
                out.sort();
                out.dedup();
                Ok(out)
            }
        }
    }
}

fn digit_add(t: &Tables, a: u32, b: u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut place = 1;
    for _ in 0..t.e {
        let d = (a % t.p + b % t.p) % t.p;
        out += d * place;
        place *= t.p;
        a /= t.p;
        b /= t.p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64, e: u32) -> Field {
        Field::new(p, e).unwrap()
    }

    #[test]
    fn prime_field_has_no_modulus() {
        let f = gf(5, 1);
        assert_eq!(f.order(), 5);
        assert!(f.modulus().is_empty());
        assert_eq!(f.to_string(), "5");
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        // Over GF(2) the monic quadratics are x^2, x^2+1, x^2+x, x^2+x+1;
        // only the last has no root.
        let f = gf(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn gf9_modulus_is_x2_plus_1() {
        assert_eq!(gf(3, 2).modulus(), &[1, 0, 1]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Field::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(Field::new(5, 0).unwrap_err(), Error::DegreeZero);
        assert!(matches!(
            Field::new(2, 21).unwrap_err(),
            Error::FieldTooLarge { .. }
        ));
        assert!(Field::with_cap(7, 2, 40).is_err());
    }

    #[test]
    fn parse_field_syntax() {
        assert_eq!("2^2".parse::<Field>().unwrap().order(), 4);
        assert_eq!(" 7 ".parse::<Field>().unwrap().order(), 7);
        assert_eq!("4".parse::<Field>().unwrap(), Field::new(2, 2).unwrap());
        assert_eq!("9".parse::<Field>().unwrap().degree(), 2);
        assert_eq!("12".parse::<Field>().unwrap_err(), Error::NotPrime(12));
        assert!("1".parse::<Field>().is_err());
        assert!("x".parse::<Field>().is_err());
    }

    #[test]
    fn code_of_one_is_one() {
        for (p, e) in [(2, 3), (3, 2), (5, 1), (2, 4)] {
            let f = gf(p, e);
            let one = FieldElem::ONE;
            for x in f.elements() {
                assert_eq!(f.mul(x, one), x);
                assert_eq!(f.add(x, FieldElem::ZERO), x);
            }
        }
    }

    #[test]
    fn potent_scalars_examples() {
        let codes = |f: &Field, k| {
            f.potent_scalars(k)
                .iter()
                .map(|x| x.code())
                .collect::<Vec<_>>()
        };
        assert_eq!(codes(&gf(5, 1), 2), vec![0, 1, 4]);
        assert_eq!(codes(&gf(11, 1), 1), vec![0, 1]);
        assert_eq!(gf(7, 1).potent_scalars(3).len(), 4);
    }

    #[test]
    fn potent_count_matches_exhaustive_search() {
        for (p, e) in [
            (2, 1),
            (3, 1),
            (5, 1),
            (7, 1),
            (2, 2),
            (3, 2),
            (2, 3),
            (13, 1),
        ] {
            let f = gf(p, e);
            for k in 1..=12 {
                assert_eq!(
                    f.potent_scalars(k).len() as u32,
                    f.potent_count(k),
                    "GF({p}^{e}) k={k}"
                );
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(gf(5, 1).primitive_kth_root(4).unwrap().code(), 2);
        assert_eq!(gf(13, 1).primitive_kth_root(1).unwrap(), FieldElem::ONE);
        assert_eq!(
            gf(7, 1).primitive_kth_root(4).unwrap_err(),
            Error::NoSuchRoot { k: 4, q: 7 }
        );
    }

    #[test]
    fn roots_of_unity_alphabet_equals_potent_scalars_when_k_divides() {
        for (p, e, k) in [(5, 1, 4), (7, 1, 3), (13, 1, 4), (3, 2, 4), (7, 1, 2)] {
            let f = gf(p, e);
            let d = f.diagonal_alphabet(k, DiagonalMode::RootsOfUnity).unwrap();
            assert_eq!(d.len() as u32, k + 1);
            assert_eq!(d, f.potent_scalars(k));
        }
    }

    #[test]
    fn char_guard_verdicts() {
        assert!(gf(3, 1).char_guard(1).is_pass());
        assert_eq!(
            gf(2, 1).char_guard(1),
            CharGuard::DividesKPlusOne { p: 2, k: 1 }
        );
        assert_eq!(gf(3, 1).char_guard(3), CharGuard::DividesK { p: 3, k: 3 });
        assert!(gf(5, 1).char_guard(4).check().is_err());
    }

    #[test]
    fn inverses_and_division() {
        let f = gf(3, 2);
        for x in f.elements().skip(1) {
            let xi = f.inv(x).unwrap();
            assert_eq!(f.mul(x, xi), FieldElem::ONE);
            assert_eq!(f.div(FieldElem::ONE, x), Some(xi));
        }
        assert_eq!(f.inv(FieldElem::ZERO), None);
    }

    #[test]
    fn neg_and_sub() {
        let f = gf(5, 2);
        for x in f.elements() {
            assert_eq!(f.add(x, f.neg(x)), FieldElem::ZERO);
            assert_eq!(f.sub(x, x), FieldElem::ZERO);
        }
    }
}
