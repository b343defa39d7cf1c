//! Closed-form counts checked against the exhaustive oracle.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::counting::count_in_field;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poset::PosetShape;
use crate::potent::{brute_force_count, OracleOptions};

/// One `(shape, field, k)` instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleCase {
    pub shape: PosetShape,
    pub field: Field,
    pub k: u32,
}

impl OracleCase {
    pub fn new(shape: PosetShape, q: u64, k: u32) -> Self {
        let field = q.to_string().parse().expect("prime power");
        OracleCase { shape, field, k }
    }
}

impl fmt::Display for OracleCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GF({}) k={}", self.shape, self.field, self.k)
    }
}

/// The core comparison set: small chains, the diamond, `Y(1,1,1)` and the
/// three-element star.
pub fn core_cases() -> Vec<OracleCase> {
    use PosetShape::*;
    vec![
        OracleCase::new(Chain(2), 3, 1),
        OracleCase::new(Chain(3), 3, 1),
        OracleCase::new(Chain(2), 5, 2),
        OracleCase::new(Chain(3), 5, 2),
        OracleCase::new(Chain(2), 7, 2),
        OracleCase::new(Chain(3), 7, 2),
        OracleCase::new(Rhombus { n: 1, m: 1 }, 5, 2),
        OracleCase::new(Y { n: 1, m: 1, l: 1 }, 5, 2),
        OracleCase::new(
            Star {
                n: 1,
                arms: vec![1],
            },
            5,
            2,
        ),
    ]
}

/// [`core_cases`] plus chains up to length 4 over GF(3) and GF(5) and
/// `k = 3` over GF(7).
pub fn all_cases() -> Vec<OracleCase> {
    use PosetShape::*;
    let mut v = core_cases();
    let mut extra = Vec::new();
    for n in 1..=4 {
        extra.push(OracleCase::new(Chain(n), 3, 1));
        extra.push(OracleCase::new(Chain(n), 5, 1));
        extra.push(OracleCase::new(Chain(n), 5, 2));
        extra.push(OracleCase::new(Chain(n), 5, 3));
    }
    extra.push(OracleCase::new(Chain(2), 7, 3));
    extra.push(OracleCase::new(Chain(3), 7, 3));
    for c in extra {
        if !v.contains(&c) {
            v.push(c);
        }
    }
    v
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Pass,
    Fail,
    /// The oracle was not run; the reason is attached.
    Skipped(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("PASS"),
            Verdict::Fail => f.write_str("FAIL"),
            Verdict::Skipped(_) => f.write_str("SKIP"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub case: OracleCase,
    pub formula: BigUint,
    pub oracle: Option<BigUint>,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

/// Evaluates the closed form and, if it fits under the cap, the oracle.
pub fn run_case(case: &OracleCase, opts: OracleOptions) -> Result<CaseReport> {
    let start = Instant::now();
    let formula = count_in_field(&case.shape, &case.field, case.k)?;
    let poset = case.shape.build()?;
    let (oracle, verdict) = match brute_force_count(&poset, &case.field, case.k, opts) {
        Ok(v) => {
            let verdict = if v == formula {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
            (Some(v), verdict)
        }
        Err(e @ Error::SearchSpaceTooLarge { .. }) => (None, Verdict::Skipped(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(CaseReport {
        case: case.clone(),
        formula,
        oracle,
        verdict,
        elapsed: start.elapsed(),
    })
}
