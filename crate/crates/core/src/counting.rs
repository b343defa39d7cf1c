//! Closed-form counts of potent elements as polynomials in `q`.
//!
//! Every formula is a sum over compositions of the poset's chains into `s`
//! parts, one part per potent scalar. Each formula is written once against a
//! [`CountSink`], so the same code produces either a [`QPolynomial`] or an
//! exact integer at a given `q`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::Result;
use crate::field::Field;
use crate::poset::PosetShape;
use crate::qpoly::{multinomial, QPolynomial};

/// Ordered compositions of `n` into `s` non-negative parts, in
/// colexicographic order (last part most significant).
#[derive(Clone, Debug)]
pub struct Compositions {
    /// Reversed tuple, advanced in lexicographic order.
    rev: Option<Vec<u64>>,
}

impl Compositions {
    pub fn new(n: u64, s: usize) -> Self {
        let rev = match s {
            0 if n > 0 => None,
            0 => Some(Vec::new()),
            _ => {
                let mut c = vec![0; s];
                c[s - 1] = n;
                Some(c)
            }
        };
        Compositions { rev }
    }
}

impl Iterator for Compositions {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        let c = self.rev.as_mut()?;
        let out: Vec<u64> = c.iter().rev().copied().collect();
        match c.iter().rposition(|&x| x > 0) {
            Some(j) if j > 0 => {
                let s = c.len();
                c[j - 1] += 1;
                let v = c[j] - 1;
                c[j] = 0;
                c[s - 1] = v;
            }
            _ => self.rev = None,
        }
        Some(out)
    }
}

/// `Σ_{i<j} parts_i parts_j`.
pub fn delta(parts: &[u64]) -> u64 {
    let n: u64 = parts.iter().sum();
    let sq: u64 = parts.iter().map(|x| x * x).sum();
    (n * n - sq) / 2
}

fn multi(n: u64, parts: &[u64]) -> BigUint {
    multinomial(n, parts).expect("composition parts sum to n")
}

/// Receives `coeff · q^exponent` terms.
pub trait CountSink {
    fn add_term(&mut self, coeff: &BigUint, exponent: u64);
}

impl CountSink for QPolynomial {
    fn add_term(&mut self, coeff: &BigUint, exponent: u64) {
        let e = u32::try_from(exponent).expect("exponent fits in u32");
        QPolynomial::add_term(self, BigInt::from(coeff.clone()), e);
    }
}

/// Accumulates the value at a fixed `q`.
#[derive(Clone, Debug)]
pub struct NumericSink {
    q: BigUint,
    powers: Vec<BigUint>,
    total: BigUint,
}

impl NumericSink {
    pub fn new(q: u64) -> Self {
        NumericSink {
            q: BigUint::from(q),
            powers: vec![BigUint::one()],
            total: BigUint::zero(),
        }
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn into_total(self) -> BigUint {
        self.total
    }
}

impl CountSink for NumericSink {
    fn add_term(&mut self, coeff: &BigUint, exponent: u64) {
        let e = exponent as usize;
        while self.powers.len() <= e {
            let next = self.powers.last().unwrap() * &self.q;
            self.powers.push(next);
        }
        self.total += coeff * &self.powers[e];
    }
}

/// Symbolic polynomial or exact value at a given `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Symbolic,
    Numeric(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Symbolic(QPolynomial),
    Numeric(BigUint),
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Symbolic(p) => write!(f, "{p}"),
            Count::Numeric(v) => write!(f, "{v}"),
        }
    }
}

fn run(mode: Mode, body: impl Fn(&mut dyn CountSink)) -> Count {
    match mode {
        Mode::Symbolic => {
            let mut p = QPolynomial::zero();
            body(&mut p);
            Count::Symbolic(p)
        }
        Mode::Numeric(q) => {
            let mut sink = NumericSink::new(q);
            body(&mut sink);
            Count::Numeric(sink.into_total())
        }
    }
}

fn symbolic(body: impl Fn(&mut dyn CountSink)) -> QPolynomial {
    match run(Mode::Symbolic, body) {
        Count::Symbolic(p) => p,
        Count::Numeric(_) => unreachable!(),
    }
}

/// Potent elements of the upper triangular `n × n` matrices:
/// `Σ_{n_1+…+n_s=n} (n; n_1,…,n_s) q^{Δ}`.
pub fn count_triangular(n: u64, s: usize) -> QPolynomial {
    symbolic(|sink| triangular_into(n, s, sink))
}

pub fn triangular_into(n: u64, s: usize, sink: &mut dyn CountSink) {
    for c in Compositions::new(n, s) {
        sink.add_term(&multi(n, &c), delta(&c));
    }
}

/// Arm polynomial `P(m) = Σ (m; m_1,…,m_s) q^{Δ + m_2 + … + m_s}`.
pub fn star_p(m: u64, s: usize) -> QPolynomial {
    symbolic(|sink| star_p_into(m, s, sink))
}

pub fn star_p_into(m: u64, s: usize, sink: &mut dyn CountSink) {
    for c in Compositions::new(m, s) {
        let tail: u64 = c.iter().skip(1).sum();
        sink.add_term(&multi(m, &c), delta(&c) + tail);
    }
}

/// Star poset with main chain `x_0 < x_1 < … < x_n` and further arms of the
/// given lengths above `x_0`: `N(n+1) · Π_t P(m_t)`.
pub fn star_count(n: u64, arms: &[u64], s: usize) -> QPolynomial {
    arms.iter()
        .fold(count_triangular(n + 1, s), |acc, &m| acc * star_p(m, s))
}

/// Rhombus with chains `x_1..x_n` and `y_1..y_m` between `x_0` and
/// `x_{n+1}`.
///
/// `x_0` takes one of `s` values, named 1 below. With `T = Σ_{i≥2} (n_i + m_i)`
/// the top either repeats value 1 (`q^T` further free pairs) or takes value
/// `j ≥ 2` (`q · q^{Σ_{i≠j} (n_i + m_i)}`):
///
/// `s Σ (n; n_i)(m; m_i) q^{Δ(n_i) + Δ(m_i) + T} [q^T + q Σ_{j≥2} q^{Σ_{i≠j}(n_i+m_i)}]`
pub fn rhombus_count(n: u64, m: u64, s: usize) -> QPolynomial {
    symbolic(|sink| rhombus_into(n, m, s, sink, false))
}

/// The rhombus sum with prefix exponent `Σ_{i<j} (n_i m_j + m_i m_j)` in
/// place of `Δ(n_i) + Δ(m_i)`. It disagrees with exhaustive counts and is
/// kept for comparison only.
pub fn rhombus_count_statement_form(n: u64, m: u64, s: usize) -> QPolynomial {
    symbolic(|sink| rhombus_into(n, m, s, sink, true))
}

pub fn rhombus_count_into(n: u64, m: u64, s: usize, sink: &mut dyn CountSink) {
    rhombus_into(n, m, s, sink, false)
}

fn rhombus_into(n: u64, m: u64, s: usize, sink: &mut dyn CountSink, statement: bool) {
    if s == 0 {
        return;
    }
    let s_big = BigUint::from(s);
    let comps_m: Vec<Vec<u64>> = Compositions::new(m, s).collect();
    let mults_m: Vec<BigUint> = comps_m.iter().map(|c| multi(m, c)).collect();
    for a in Compositions::new(n, s) {
        let wa = &s_big * multi(n, &a);
        for (b, wb) in comps_m.iter().zip(&mults_m) {
            let w = &wa * wb;
            let prefix = if statement {
                (0..s)
                    .flat_map(|i| (i + 1..s).map(move |j| (i, j)))
                    .map(|(i, j)| a[i] * b[j] + b[i] * b[j])
                    .sum()
            } else {
                delta(&a) + delta(b)
            };
            let t: u64 = (1..s).map(|i| a[i] + b[i]).sum();
            sink.add_term(&w, prefix + 2 * t);
            for j in 1..s {
                let others = n + m - a[j] - b[j];
                sink.add_term(&w, prefix + t + 1 + others);
            }
        }
    }
}

/// Y poset: chain `r_1..r_n` below two chains `s_1..s_m` and `t_1..t_l`.
/// `Σ (n; n_i)(m; m_i)(l; l_i) q^{Δ(n_i)+Δ(m_i)+Δ(l_i) + Σ_{i≠j} n_i (m_j + l_j)}`.
pub fn y_count(n: u64, m: u64, l: u64, s: usize) -> QPolynomial {
    symbolic(|sink| y_count_into(n, m, l, s, sink))
}

pub fn y_count_into(n: u64, m: u64, l: u64, s: usize, sink: &mut dyn CountSink) {
    let comps_m: Vec<(Vec<u64>, BigUint)> = Compositions::new(m, s)
        .map(|c| {
            let w = multi(m, &c);
            (c, w)
        })
        .collect();
    let comps_l: Vec<(Vec<u64>, BigUint)> = Compositions::new(l, s)
        .map(|c| {
            let w = multi(l, &c);
            (c, w)
        })
        .collect();
    for a in Compositions::new(n, s) {
        let wa = multi(n, &a);
        for (b, wb) in &comps_m {
            let wab = &wa * wb;
            for (c, wc) in &comps_l {
                // Σ_{i≠j} n_i (m_j + l_j) = n(m+l) - Σ_i n_i (m_i + l_i)
                let same: u64 = (0..s).map(|i| a[i] * (b[i] + c[i])).sum();
                let cross = n * (m + l) - same;
                let e = delta(&a) + delta(b) + delta(c) + cross;
                sink.add_term(&(&wab * wc), e);
            }
        }
    }
}

/// Partitions of `n` into exactly `j` positive parts, non-decreasing.
fn sorted_partitions(n: u64, j: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, slots: usize, min: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if slots == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut x = min;
        while x * slots as u64 <= rest {
            cur.push(x);
            go(rest - x, slots - 1, x, cur, out);
            cur.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    if j > 0 {
        go(n, j, 1, &mut Vec::new(), &mut out);
    }
    out
}

/// Product of factorials of the run lengths of a sorted list.
fn repetition_factor(parts: &[u64]) -> BigUint {
    let mut g = BigUint::one();
    let mut run = 0u64;
    for (x, p) in parts.iter().enumerate() {
        run = if x > 0 && parts[x - 1] == *p {
            run + 1
        } else {
            1
        };
        g *= run;
    }
    g
}

/// Elements of order dividing `h` in the upper triangular `n × n` matrices
/// when the field holds `l` `h`-th roots of unity:
///
/// `Σ_{j ≤ min(l,n)} Σ_{m_1≤…≤m_j, Σm=n} l!/((l-j)! g(m)) (n; m) q^{(n² - Σ m_u²)/2}`
///
/// where `g(m)` is the product of the factorials of the multiplicities.
pub fn slowik_count(n: u64, l: usize) -> QPolynomial {
    symbolic(|sink| slowik_into(n, l, sink))
}

pub fn slowik_into(n: u64, l: usize, sink: &mut dyn CountSink) {
    for j in 1..=l.min(n as usize) {
        let falling: BigUint = (0..j).map(|x| BigUint::from(l - x)).product();
        for parts in sorted_partitions(n, j) {
            let g = repetition_factor(&parts);
            debug_assert!((&falling % &g).is_zero());
            let w = &falling / &g * multi(n, &parts);
            sink.add_term(&w, delta(&parts));
        }
    }
}

/// Outcome of comparing [`slowik_count`] with [`count_triangular`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlowikReport {
    pub checked: usize,
    /// `(n, l, slowik, composition form)` for the first disagreement.
    pub counterexample: Option<(u64, usize, QPolynomial, QPolynomial)>,
}

impl SlowikReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Checks `slowik_count(n, l) = count_triangular(n, l)` as polynomials for
/// all `1 ≤ n ≤ n_max`, `1 ≤ l ≤ l_max`.
pub fn slowik_equiv_check(n_max: u64, l_max: usize) -> SlowikReport {
    let mut checked = 0;
    for n in 1..=n_max {
        for l in 1..=l_max {
            let a = slowik_count(n, l);
            let b = count_triangular(n, l);
            checked += 1;
            if a != b {
                return SlowikReport {
                    checked,
                    counterexample: Some((n, l, a, b)),
                };
            }
        }
    }
    SlowikReport {
        checked,
        counterexample: None,
    }
}

/// Closed-form count for a named shape with `s` potent scalars.
pub fn count_shape(shape: &PosetShape, s: usize) -> QPolynomial {
    symbolic(|sink| count_shape_into(shape, s, sink))
}

pub fn count_shape_into(shape: &PosetShape, s: usize, sink: &mut dyn CountSink) {
    match shape {
        PosetShape::Chain(n) => triangular_into(*n as u64, s, sink),
        PosetShape::Star { n, arms } => {
            let arms: Vec<u64> = arms.iter().map(|&m| m as u64).collect();
            let p = star_count(*n as u64, &arms, s);
            for (e, c) in p.terms() {
                let c = c.to_biguint().expect("counts are non-negative");
                sink.add_term(&c, e as u64);
            }
        }
        PosetShape::Rhombus { n, m } => rhombus_count_into(*n as u64, *m as u64, s, sink),
        PosetShape::Y { n, m, l } => y_count_into(*n as u64, *m as u64, *l as u64, s, sink),
    }
}

/// Count for a shape in the given mode.
pub fn count(shape: &PosetShape, s: usize, mode: Mode) -> Count {
    run(mode, |sink| count_shape_into(shape, s, sink))
}

/// Number of potent scalars `s = gcd(k, q-1) + 1` after checking the
/// characteristic guard.
pub fn scalars_for(field: &Field, k: u32) -> Result<usize> {
    field.char_guard(k).check()?;
    Ok(field.potent_count(k) as usize)
}

/// Exact count of potent elements for a shape over a concrete field.
pub fn count_in_field(shape: &PosetShape, field: &Field, k: u32) -> Result<BigUint> {
    let s = scalars_for(field, k)?;
    let mut sink = NumericSink::new(field.order() as u64);
    count_shape_into(shape, s, &mut sink);
    Ok(sink.into_total())
}
