//! Finite posets with a fixed linear extension.
//!
//! Elements are stored in extension order, so every relation pair `(i, j)`
//! has `i <= j` and an incidence-algebra element is an upper triangular
//! matrix supported on those pairs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// Row-major `n × n` order relation, reflexive and transitive.
    leq: Vec<bool>,
    /// All `(i, j)` with `i ≤ j`, lexicographic.
    pairs: Vec<(usize, usize)>,
    /// Row-major `n × n` map from a pair to its index in `pairs`.
    slot: Vec<Option<u32>>,
    covers: Vec<(usize, usize)>,
}

impl Poset {
    /// Builds a poset from labels in declaration order and `(below, above)`
    /// relations between declaration indices. The relations need not be
    /// covers; the closure and the Hasse diagram are computed here. The
    /// linear extension is the topological order that always takes the
    /// earliest-declared available element.
    pub fn from_relations(labels: Vec<String>, relations: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.as_str(), i).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }

        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in relations {
            assert!(a < n && b < n, "relation index out of range");
            if a == b {
                return Err(Error::Cycle(labels[a].clone()));
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
        let mut ready: BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| indeg[i] > 0).unwrap();
            return Err(Error::Cycle(labels[stuck].clone()));
        }

        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in relations {
            leq[pos[a] * n + pos[b]] = true;
        }
        // Extension order makes every relation point forward, so one
        // backward sweep closes it.
        for i in (0..n).rev() {
            for j in i + 1..n {
                if leq[i * n + j] {
                    for t in j + 1..n {
                        if leq[j * n + t] {
                            leq[i * n + t] = true;
                        }
                    }
                }
            }
        }

        let labels = order.iter().map(|&v| labels[v].clone()).collect();
        Ok(Self::from_closed(labels, leq))
    }

    /// `leq` must already be a closed order relation compatible with
    /// the label order.
    fn from_closed(labels: Vec<String>, leq: Vec<bool>) -> Self {
        let n = labels.len();
        let mut pairs = Vec::new();
        let mut slot = vec![None; n * n];
        for i in 0..n {
            for j in i..n {
                if leq[i * n + j] {
                    slot[i * n + j] = Some(pairs.len() as u32);
                    pairs.push((i, j));
                }
            }
        }
        let covers = pairs
            .iter()
            .copied()
            .filter(|&(i, j)| i < j && !(i + 1..j).any(|t| leq[i * n + t] && leq[t * n + j]))
            .collect();
        Poset {
            labels,
            leq,
            pairs,
            slot,
            covers,
        }
    }

    /// Total order `x1 < x2 < … < xn`.
    pub fn chain(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidShape(
                "chain needs at least one element".into(),
            ));
        }
        let labels = (1..=n).map(|i| format!("x{i}")).collect();
        let rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_relations(labels, &rel)
    }

    /// Minimum `x0` under the chain `x1 < … < xn` and one extra chain per
    /// entry of `arms`, pairwise incomparable. Arm `t` (counting from 2)
    /// has elements `y{t}_1 < … < y{t}_m`.
    pub fn star(n: usize, arms: &[usize]) -> Result<Self> {
        if arms.contains(&0) {
            return Err(Error::EmptyArm);
        }
        let mut labels: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        let mut rel: Vec<_> = (1..=n).map(|i| (i - 1, i)).collect();
        for (t, &m) in arms.iter().enumerate() {
            let first = labels.len();
            for i in 1..=m {
                labels.push(format!("y{}_{}", t + 2, i));
            }
            rel.push((0, first));
            rel.extend((first + 1..first + m).map(|i| (i - 1, i)));
        }
        Self::from_relations(labels, &rel)
    }

    /// Chains `x0 < x1 < … < x{n+1}` and `y1 < … < ym` with `x0 < y1` and
    /// `ym < x{n+1}`.
    pub fn rhombus(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidShape("rhombus needs n, m >= 1".into()));
        }
        let mut labels: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
        labels.extend((1..=m).map(|i| format!("y{i}")));
        labels.push(format!("x{}", n + 1));
        let top = n + m + 1;
        let mut rel: Vec<_> = (1..=n).map(|i| (i - 1, i)).collect();
        rel.push((n, top));
        rel.push((0, n + 1));
        rel.extend((n + 2..=n + m).map(|i| (i - 1, i)));
        rel.push((n + m, top));
        Self::from_relations(labels, &rel)
    }

    /// Chain `r1 < … < rn` below both chains `s1 < … < sm` and
    /// `t1 < … < tl`.
    pub fn y(n: usize, m: usize, l: usize) -> Result<Self> {
        if n == 0 || m == 0 || l == 0 {
            return Err(Error::InvalidShape("Y poset needs n, m, l >= 1".into()));
        }
        let mut labels: Vec<String> = (1..=n).map(|i| format!("r{i}")).collect();
        labels.extend((1..=m).map(|i| format!("s{i}")));
        labels.extend((1..=l).map(|i| format!("t{i}")));
        let mut rel: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        rel.push((n - 1, n));
        rel.extend((n + 1..n + m).map(|i| (i - 1, i)));
        rel.push((n - 1, n + m));
        rel.extend((n + m + 1..n + m + l).map(|i| (i - 1, i)));
        Self::from_relations(labels, &rel)
    }

    /// Parses the text format:
    ///
    /// ```text
    /// # comment
    /// elements: a b c
    /// covers: a<b b<c
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut raw_covers: Vec<(usize, String, String)> = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: ln + 1, msg };
            if let Some(rest) = line.strip_prefix("elements:") {
                labels.extend(rest.split_whitespace().map(str::to_owned));
            } else if let Some(rest) = line.strip_prefix("covers:") {
                for tok in rest.split_whitespace() {
                    let (a, b) = tok
                        .split_once('<')
                        .filter(|(a, b)| !a.is_empty() && !b.is_empty() && !b.contains('<'))
                        .ok_or_else(|| err(format!("bad cover `{tok}`, expected a<b")))?;
                    raw_covers.push((ln + 1, a.to_owned(), b.to_owned()));
                }
            } else {
                return Err(err(format!("unexpected line `{line}`")));
            }
        }
        if labels.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "no elements declared".into(),
            });
        }
        let index: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut rel = Vec::with_capacity(raw_covers.len());
        for (line, a, b) in &raw_covers {
            let look = |x: &str| {
                index.get(x).copied().ok_or_else(|| Error::Parse {
                    line: *line,
                    msg: format!("unknown element `{x}`"),
                })
            };
            rel.push((look(a)?, look(b)?));
        }
        Self::from_relations(labels, &rel)
    }

    /// Renders the text format read by [`Poset::parse`].
    pub fn to_text(&self) -> String {
        let mut s = String::from("elements:");
        for l in &self.labels {
            s.push(' ');
            s.push_str(l);
        }
        s.push_str("\ncovers:");
        for &(i, j) in &self.covers {
            s.push_str(&format!(" {}<{}", self.labels[i], self.labels[j]));
        }
        s.push('\n');
        s
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    /// All relation pairs `(i, j)`, `i ≤ j`, in lexicographic order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Strict relation pairs in lexicographic order.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied().filter(|(i, j)| i < j)
    }

    #[inline]
    pub fn slot(&self, i: usize, j: usize) -> Option<usize> {
        self.slot[i * self.len() + j].map(|s| s as usize)
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// Subposet on the given positions, keeping their relative order.
    pub fn induced(&self, positions: &[usize]) -> Poset {
        let k = positions.len();
        let labels = positions.iter().map(|&p| self.labels[p].clone()).collect();
        let mut leq = vec![false; k * k];
        for (a, &pa) in positions.iter().enumerate() {
            for (b, &pb) in positions.iter().enumerate() {
                leq[a * k + b] = self.leq(pa, pb);
            }
        }
        Self::from_closed(labels, leq)
    }

    /// Same relation-pair set under the identity relabeling.
    pub fn same_order_as(&self, other: &Poset) -> bool {
        self.leq == other.leq
    }

    /// Checks reflexivity, antisymmetry, transitivity, extension
    /// compatibility and that the closure of the covers is `leq`.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.len();
        for i in 0..n {
            if !self.leq(i, i) {
                return Err(format!("not reflexive at {i}"));
            }
            for j in 0..n {
                if i != j && self.leq(i, j) && self.leq(j, i) {
                    return Err(format!("not antisymmetric at ({i},{j})"));
                }
                if self.leq(i, j) && j < i {
                    return Err(format!("({i},{j}) violates the extension order"));
                }
                for t in 0..n {
                    if self.leq(i, j) && self.leq(j, t) && !self.leq(i, t) {
                        return Err(format!("not transitive at ({i},{j},{t})"));
                    }
                }
            }
        }
        let mut closure = vec![false; n * n];
        for i in 0..n {
            closure[i * n + i] = true;
        }
        for &(a, b) in &self.covers {
            closure[a * n + b] = true;
        }
        for mid in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if closure[i * n + mid] && closure[mid * n + j] {
                        closure[i * n + j] = true;
                    }
                }
            }
        }
        if closure != self.leq {
            return Err("closure of covers differs from the order".into());
        }
        Ok(())
    }
}

/// The named shapes, also the CLI shorthand `chain:n`, `star:n:m2,...`,
/// `rhombus:n:m`, `y:n:m:l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PosetShape {
    Chain(usize),
    Star { n: usize, arms: Vec<usize> },
    Rhombus { n: usize, m: usize },
    Y { n: usize, m: usize, l: usize },
}

impl PosetShape {
    pub fn build(&self) -> Result<Poset> {
        match self {
            PosetShape::Chain(n) => Poset::chain(*n),
            PosetShape::Star { n, arms } => Poset::star(*n, arms),
            PosetShape::Rhombus { n, m } => Poset::rhombus(*n, *m),
            PosetShape::Y { n, m, l } => Poset::y(*n, *m, *l),
        }
    }
}

impl fmt::Display for PosetShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PosetShape::Chain(n) => write!(f, "chain:{n}"),
            PosetShape::Star { n, arms } => {
                write!(f, "star:{n}")?;
                if !arms.is_empty() {
                    let a: Vec<String> = arms.iter().map(|m| m.to_string()).collect();
                    write!(f, ":{}", a.join(","))?;
                }
                Ok(())
            }
            PosetShape::Rhombus { n, m } => write!(f, "rhombus:{n}:{m}"),
            PosetShape::Y { n, m, l } => write!(f, "y:{n}:{m}:{l}"),
        }
    }
}

impl FromStr for PosetShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidShape(format!("`{s}`"));
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = s.trim().split(':').collect();
        match parts.as_slice() {
            ["chain", n] => Ok(PosetShape::Chain(num(n)?)),
            ["star", n] => Ok(PosetShape::Star {
                n: num(n)?,
                arms: Vec::new(),
            }),
            ["star", n, arms] => Ok(PosetShape::Star {
                n: num(n)?,
                arms: if arms.trim().is_empty() {
                    Vec::new()
                } else {
                    arms.split(',').map(num).collect::<Result<_>>()?
                },
            }),
            ["rhombus", n, m] => Ok(PosetShape::Rhombus {
                n: num(n)?,
                m: num(m)?,
            }),
            ["y", n, m, l] => Ok(PosetShape::Y {
                n: num(n)?,
                m: num(m)?,
                l: num(l)?,
            }),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strict_count(p: &Poset) -> usize {
        p.strict_pairs().count()
    }

    #[test]
    fn chain_pairs() {
        assert_eq!(Poset::chain(1).unwrap().pairs().len(), 1);
        assert_eq!(Poset::chain(3).unwrap().pairs().len(), 6);
        assert_eq!(Poset::chain(4).unwrap().pairs().len(), 10);
        assert!(Poset::chain(0).is_err());
    }

    #[test]
    fn star_examples() {
        let s = Poset::star(1, &[1]).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.pairs().len(), 5);
        let fig = Poset::star(2, &[2]).unwrap();
        assert_eq!(fig.labels(), &["x0", "x1", "x2", "y2_1", "y2_2"]);
        assert_eq!(fig.covers(), &[(0, 1), (0, 3), (1, 2), (3, 4)]);
        let point = Poset::star(0, &[]).unwrap();
        assert_eq!(point.len(), 1);
        assert_eq!(Poset::star(2, &[1, 0]).unwrap_err(), Error::EmptyArm);
    }

    #[test]
    fn star_without_arms_is_a_chain() {
        for n in 0..6 {
            let s = Poset::star(n, &[]).unwrap();
            assert!(s.same_order_as(&Poset::chain(n + 1).unwrap()));
        }
    }

    #[test]
    fn rhombus_examples() {
        let d = Poset::rhombus(1, 1).unwrap();
        assert_eq!(d.pairs().len(), 9);
        assert_eq!(strict_count(&d), 5);
        let x1 = d.labels().iter().position(|l| l == "x1").unwrap();
        let y1 = d.labels().iter().position(|l| l == "y1").unwrap();
        assert!(!d.leq(x1, y1) && !d.leq(y1, x1));
        let r = Poset::rhombus(2, 2).unwrap();
        assert_eq!((r.len(), r.pairs().len()), (6, 17));
        assert_eq!(r.labels(), &["x0", "x1", "x2", "y1", "y2", "x3"]);
    }

    #[test]
    fn y_examples() {
        let y = Poset::y(3, 3, 3).unwrap();
        assert_eq!((y.len(), y.pairs().len()), (9, 36));
        assert_eq!(Poset::y(1, 1, 1).unwrap().pairs().len(), 5);
        let y = Poset::y(2, 3, 2).unwrap();
        for i in 2..5 {
            for j in 5..7 {
                assert!(!y.leq(i, j) && !y.leq(j, i));
            }
        }
    }

    #[test]
    fn relation_pair_formulas_match_closure() {
        for n in 1..=5usize {
            assert_eq!(Poset::chain(n).unwrap().pairs().len(), n * (n + 1) / 2);
            for m in 1..=5usize {
                let r = Poset::rhombus(n, m).unwrap();
                assert_eq!(
                    r.pairs().len(),
                    (n + 2) * (n + 3) / 2 + m * (m + 1) / 2 + 2 * m
                );
                r.check_invariants().unwrap();
                for l in 1..=5usize {
                    let y = Poset::y(n, m, l).unwrap();
                    let expect = n * (n + 1) / 2 + m * (m + 1) / 2 + l * (l + 1) / 2 + n * (m + l);
                    assert_eq!(y.pairs().len(), expect);
                    y.check_invariants().unwrap();
                }
            }
        }
    }

    #[test]
    fn parse_chain_and_cycle() {
        let p = Poset::parse("elements: a b c\ncovers: a<b b<c\n").unwrap();
        assert!(p.same_order_as(&Poset::chain(3).unwrap()));
        assert!(matches!(
            Poset::parse("elements: a b\ncovers: a<b b<a").unwrap_err(),
            Error::Cycle(_)
        ));
        assert_eq!(
            Poset::parse("elements: a a").unwrap_err(),
            Error::DuplicateLabel("a".into())
        );
        assert!(matches!(
            Poset::parse("elements: a\ncovers: a<z").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(
            Poset::parse("nodes: a").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn parse_orders_by_declaration_and_reduces_covers() {
        // c is declared first but sits above a.
        let p = Poset::parse("# tiny\nelements: c a b\ncovers: a<c a<b b<c\n").unwrap();
        assert_eq!(p.labels(), &["a", "b", "c"]);
        assert_eq!(p.covers(), &[(0, 1), (1, 2)]);
        p.check_invariants().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let r = Poset::rhombus(1, 1).unwrap();
        let back = Poset::parse(&r.to_text()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn shapes_parse_and_print() {
        for s in ["chain:4", "star:2:3,1", "star:1", "rhombus:2:3", "y:1:2:3"] {
            let shape: PosetShape = s.parse().unwrap();
            assert_eq!(shape.to_string(), s);
        }
        assert_eq!(
            "star:2:".parse::<PosetShape>().unwrap().to_string(),
            "star:2"
        );
        assert!("tree:3".parse::<PosetShape>().is_err());
        assert!("chain:x".parse::<PosetShape>().is_err());
    }

    #[test]
    fn induced_subposet() {
        let r = Poset::rhombus(1, 1).unwrap();
        let sub = r.induced(&[0, 1, 3]);
        assert!(sub.same_order_as(&Poset::chain(3).unwrap()));
    }
}
