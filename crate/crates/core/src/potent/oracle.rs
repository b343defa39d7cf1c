//! Exhaustive search over every incidence-algebra element.
//!
//! This is deliberately independent of the completion machinery: it only
//! multiplies dense matrices and compares `A^{k+1}` with `A`.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElem};
use crate::incmat::UpperMatrix;
use crate::poset::Poset;

/// Environment variable overriding the default state cap.
pub const CAP_ENV: &str = "KPOTENT_CAP";

const DEFAULT_CAP: u64 = 100_000_000;

/// `KPOTENT_CAP` if set to a parseable number (`1e7` is accepted),
/// otherwise `10^8`.
pub fn default_cap() -> u64 {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|v| parse_cap(&v))
        .unwrap_or(DEFAULT_CAP)
}

/// Reads a cap written as an integer or in float notation such as `1e7`.
pub fn parse_cap(text: &str) -> Option<u64> {
    let t = text.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Some(v);
    }
    let v = t.parse::<f64>().ok()?;
    (v.is_finite() && v >= 0.0 && v <= u64::MAX as f64).then(|| v.round() as u64)
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Maximum number of states `q^{|leq|}` to scan.
    pub cap: u64,
    /// Worker threads; `0` means the available parallelism.
    pub threads: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: default_cap(),
            threads: 0,
        }
    }
}

impl OracleOptions {
    fn workers(&self) -> usize {
        match self.threads {
            0 => thread::available_parallelism().map_or(1, |n| n.get()),
            t => t,
        }
    }
}

/// Number of `A` in the incidence algebra with `A^{k+1} = A`.
pub fn brute_force_count(
    poset: &Poset,
    field: &Field,
    k: u32,
    opts: OracleOptions,
) -> Result<BigUint> {
    let total = scan(poset, field, k, opts, |_| {})?;
    Ok(BigUint::from(total))
}

/// Every potent element, sorted by entry codes.
pub fn brute_force_collect(
    poset: &Arc<Poset>,
    field: &Field,
    k: u32,
    opts: OracleOptions,
) -> Result<Vec<UpperMatrix>> {
    let found = Mutex::new(Vec::new());
    scan(poset, field, k, opts, |entries| {
        found.lock().unwrap().push(entries.to_vec());
    })?;
    let mut found = found.into_inner().unwrap();
    found.sort();
    Ok(found
        .into_iter()
        .map(|e| UpperMatrix::from_entries(poset.clone(), field.clone(), e))
        .collect())
}

struct Plan {
    n: usize,
    q: usize,
    pairs: Vec<(usize, usize)>,
    /// Leading entries fixed per chunk.
    lead: usize,
    steps: u32,
}

fn scan<F>(poset: &Poset, field: &Field, k: u32, opts: OracleOptions, on_hit: F) -> Result<u64>
where
    F: Fn(&[FieldElem]) + Sync,
{
    let q = field.order() as usize;
    let pairs = poset.pairs().to_vec();
    let states = BigUint::from(q).pow(pairs.len() as u32);
    if states > BigUint::from(opts.cap) {
        return Err(Error::SearchSpaceTooLarge {
            states: states.to_string(),
            cap: opts.cap,
        });
    }
    let states = states.to_u64().expect("bounded by cap");
    let workers = opts.workers().max(1);

    // Enough chunks to balance the workers.
    let mut lead = 0;
    let mut chunks = 1u64;
    while lead < pairs.len() && chunks < 16 * workers as u64 {
        lead += 1;
        chunks *= q as u64;
    }
    let plan = Plan {
        n: poset.len(),
        q,
        pairs,
        lead,
        steps: k + 1,
    };
    debug_assert_eq!(
        chunks * (q as u64).pow((plan.pairs.len() - lead) as u32),
        states
    );

    let next = AtomicUsize::new(0);
    let results = Mutex::new(vec![0u64; chunks as usize]);
    thread::scope(|scope| {
        for _ in 0..workers.min(chunks as usize) {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= chunks as usize {
                    break;
                }
                let hits = scan_chunk(&plan, field, c as u64, &on_hit);
                results.lock().unwrap()[c] = hits;
            });
        }
    });
    Ok(results.into_inner().unwrap().iter().sum())
}

fn scan_chunk<F>(plan: &Plan, f: &Field, chunk: u64, on_hit: &F) -> u64
where
    F: Fn(&[FieldElem]),
{
    let Plan {
        n,
        q,
        ref pairs,
        lead,
        steps,
    } = *plan;
    let mut codes = vec![0usize; pairs.len()];
    let mut rest = chunk;
    for d in codes[..lead].iter_mut().rev() {
        *d = (rest % q as u64) as usize;
        rest /= q as u64;
    }
    let elems: Vec<FieldElem> = f.elements().collect();
    let mut a = vec![FieldElem::ZERO; n * n];
    for (x, &(i, j)) in pairs.iter().enumerate() {
        a[i * n + j] = elems[codes[x]];
    }
    let diag_slots: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, &(i, j))| i == j)
        .map(|(x, _)| x)
        .collect();

    let mut acc = vec![FieldElem::ZERO; n * n];
    let mut tmp = vec![FieldElem::ZERO; n * n];
    let mut entries = vec![FieldElem::ZERO; pairs.len()];
    let mut hits = 0;
    loop {
        // The diagonal of A^{k+1} is the coordinatewise power; reject early.
        let diag_ok = diag_slots.iter().all(|&x| {
            let v = elems[codes[x]];
            f.pow(v, steps as u64) == v
        });
        if diag_ok && is_potent_dense(f, n, &a, steps, &mut acc, &mut tmp) {
            hits += 1;
            for (x, e) in entries.iter_mut().enumerate() {
                *e = elems[codes[x]];
            }
            on_hit(&entries);
        }
        // Advance the trailing entries.
        let mut x = pairs.len();
        loop {
            if x == lead {
                return hits;
            }
            x -= 1;
            let (i, j) = pairs[x];
            codes[x] += 1;
            if codes[x] < q {
                a[i * n + j] = elems[codes[x]];
                break;
            }
            codes[x] = 0;
            a[i * n + j] = FieldElem::ZERO;
        }
    }
}

fn is_potent_dense(
    f: &Field,
    n: usize,
    a: &[FieldElem],
    steps: u32,
    acc: &mut Vec<FieldElem>,
    tmp: &mut Vec<FieldElem>,
) -> bool {
    acc.copy_from_slice(a);
    for _ in 1..steps {
        for i in 0..n {
            for j in 0..n {
                let mut s = FieldElem::ZERO;
                for t in 0..n {
                    let x = acc[i * n + t];
                    if !x.is_zero() {
                        s = f.add(s, f.mul(x, a[t * n + j]));
                    }
                }
                tmp[i * n + j] = s;
            }
        }
        std::mem::swap(acc, tmp);
    }
    acc[..] == a[..]
}
