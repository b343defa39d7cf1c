use std::fmt;
use std::path::Path;
use std::sync::Arc;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use kpotent_core::counting::{count_in_field, count_shape, scalars_for, slowik_equiv_check};
use kpotent_core::potent::{
    brute_force_count, complete_potent, count_by_construction, default_cap, parse_cap,
    structured_count, DiagonalAssignment, FreeValues, OracleOptions, PotentEnumerator,
};
use kpotent_core::tables::{
    builtin_errata, check_table, check_worked, golden_file_name, golden_text, parse_errata,
    primitive_roots, worked_fields, GoldenTable, TermStatus, TABLE_IDS, WORKED, WORKED_IDS,
};
use kpotent_core::verify::{all_cases, core_cases, run_case, OracleCase, Verdict};
use kpotent_core::{DiagonalMode, Field, FieldElem, Poset, PosetShape, UpperMatrix};

use crate::report::Report;
use crate::{Cli, Command, Target};

/// Malformed arguments; the process exits with status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(UsageError(msg.into()).into())
}

/// A poset given by shorthand or read from a file.
struct PosetArg {
    name: String,
    shape: Option<PosetShape>,
    poset: Arc<Poset>,
}

fn parse_poset(text: &str) -> Result<PosetArg> {
    if let Some(path) = text.strip_prefix('@') {
        let body =
            std::fs::read_to_string(path).with_context(|| format!("reading poset file {path}"))?;
        let poset = Poset::parse(&body).map_err(|e| UsageError(format!("{path}: {e}")))?;
        return Ok(PosetArg {
            name: path.to_owned(),
            shape: None,
            poset: Arc::new(poset),
        });
    }
    let shape: PosetShape = text
        .parse()
        .map_err(|e| UsageError(format!("--poset: {e}")))?;
    let poset = shape
        .build()
        .map_err(|e| UsageError(format!("--poset: {e}")))?;
    Ok(PosetArg {
        name: shape.to_string(),
        shape: Some(shape),
        poset: Arc::new(poset),
    })
}

fn parse_field(text: &str) -> Result<Field> {
    text.parse()
        .map_err(|e| UsageError(format!("--field: {e}")).into())
}

fn mode_of(roots_of_unity: bool) -> DiagonalMode {
    if roots_of_unity {
        DiagonalMode::RootsOfUnity
    } else {
        DiagonalMode::Potent
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Roots {
            field,
            k,
            roots_of_unity,
        } => roots(field, *k, *roots_of_unity),
        Command::Count {
            poset,
            k,
            field,
            s,
            symbolic,
        } => count(poset, *k, field.as_deref(), *s, *symbolic),
        Command::Complete { target, diag, free } => complete(target, diag, free),
        Command::Enumerate {
            target,
            count_only,
            limit,
        } => enumerate(target, *count_only, *limit),
        Command::Verify {
            all,
            poset,
            field,
            k,
            cap,
        } => verify(
            cli.threads,
            *all,
            poset.as_deref(),
            field.as_deref(),
            *k,
            cap.as_deref(),
        ),
        Command::Tables { id, golden_dir } => tables(id, golden_dir.as_deref()),
        Command::SlowikEquiv { n_max, l_max } => slowik(*n_max, *l_max),
    }
}

fn roots(field: &str, k: u32, roots_of_unity: bool) -> Result<Report> {
    let f = parse_field(field)?;
    let alphabet = f.diagonal_alphabet(k, mode_of(roots_of_unity))?;
    let codes: Vec<u32> = alphabet.iter().map(|x| x.code()).collect();
    let mut r = Report::new("roots");
    r.input("field", f.to_string())
        .input("k", k)
        .input("roots_of_unity", roots_of_unity);
    let joined: Vec<String> = codes.iter().map(u32::to_string).collect();
    r.line(joined.join(" "));
    r.line(format!("s={}", codes.len()));
    r.result = json!({
        "scalars": codes,
        "s": codes.len(),
        "char_guard": f.char_guard(k).to_string(),
    });
    Ok(r)
}

fn count(
    poset: &str,
    k: Option<u32>,
    field: Option<&str>,
    s: Option<usize>,
    symbolic: bool,
) -> Result<Report> {
    let p = parse_poset(poset)?;
    let f = field.map(parse_field).transpose()?;
    let s = match (&f, k, s) {
        (Some(_), None, _) => return usage("--field needs --k"),
        (Some(f), Some(k), s_given) => {
            let s_field = scalars_for(f, k)?;
            if let Some(s) = s_given.filter(|&s| s != s_field) {
                return usage(format!(
                    "--s {s} disagrees with GF({f}), k={k}, which has s={s_field}"
                ));
            }
            s_field
        }
        (None, _, Some(s)) => s,
        (None, _, None) => return usage("give --field (with --k) or --s"),
    };
    let mut r = Report::new("count");
    r.input("poset", p.name.as_str()).input("s", s);
    if let Some(k) = k {
        r.input("k", k);
    }
    if let Some(f) = &f {
        r.input("field", f.to_string());
    }
    let poly = || match &p.shape {
        Some(shape) => count_shape(shape, s),
        None => structured_count(&p.poset, s),
    };
    match (&f, symbolic) {
        (Some(f), false) => {
            let value = match &p.shape {
                Some(shape) => count_in_field(shape, f, k.expect("checked above"))?.to_string(),
                None => poly().eval_u64(f.order() as u64).to_string(),
            };
            r.line(&value);
            r.result = json!({ "count": value });
        }
        _ => {
            let poly = poly();
            r.line(poly.to_string());
            r.result = json!({ "polynomial": poly.to_string() });
        }
    }
    Ok(r)
}

struct Resolved {
    p: PosetArg,
    f: Field,
    k: u32,
    mode: DiagonalMode,
}

fn resolve(t: &Target) -> Result<Resolved> {
    Ok(Resolved {
        p: parse_poset(&t.poset)?,
        f: parse_field(&t.field)?,
        k: t.k,
        mode: mode_of(t.roots_of_unity),
    })
}

fn target_inputs(r: &mut Report, t: &Resolved) {
    r.input("poset", t.p.name.as_str())
        .input("field", t.f.to_string())
        .input("k", t.k)
        .input("roots_of_unity", t.mode == DiagonalMode::RootsOfUnity);
}

fn parse_free(text: &str, f: &Field) -> Result<((usize, usize), FieldElem)> {
    let bad = || {
        UsageError(format!(
            "--free `{text}`: expected i,j=code with 1-based indices"
        ))
    };
    let (ij, code) = text.split_once('=').ok_or_else(bad)?;
    let (i, j) = ij.split_once(',').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let j: usize = j.trim().parse().map_err(|_| bad())?;
    let code: u64 = code.trim().parse().map_err(|_| bad())?;
    if i == 0 || j == 0 {
        return Err(bad().into());
    }
    Ok(((i - 1, j - 1), f.elem(code)?))
}

fn entry_triples(m: &UpperMatrix) -> Vec<[u64; 3]> {
    m.poset()
        .pairs()
        .iter()
        .zip(m.entries())
        .map(|(&(i, j), v)| [i as u64 + 1, j as u64 + 1, u64::from(v.code())])
        .collect()
}

/// Core errors name slots with 0-based indices; the CLI speaks 1-based.
fn one_based(e: kpotent_core::Error) -> anyhow::Error {
    use kpotent_core::Error::*;
    match e {
        MissingFreeValue(i, j) => {
            anyhow::anyhow!("no --free value for free slot ({}, {})", i + 1, j + 1)
        }
        ExtraFreeValue(i, j) => anyhow::anyhow!(
            "({}, {}) is not a free slot for this diagonal",
            i + 1,
            j + 1
        ),
        other => other.into(),
    }
}

fn complete(target: &Target, diag: &[u64], free: &[String]) -> Result<Report> {
    let t = resolve(target)?;
    let values = diag
        .iter()
        .map(|&c| t.f.elem(c))
        .collect::<Result<Vec<_>, _>>()?;
    let d = DiagonalAssignment::with_mode(t.p.poset.clone(), t.f.clone(), t.k, values, t.mode)?;
    let mut given = FreeValues::new();
    for text in free {
        let (slot, v) = parse_free(text, &t.f)?;
        if given.insert(slot, v).is_some() {
            return usage(format!(
                "--free lists ({}, {}) twice",
                slot.0 + 1,
                slot.1 + 1
            ));
        }
    }
    let m = complete_potent(&d, &given).map_err(one_based)?;
    let mut r = Report::new("complete");
    target_inputs(&mut r, &t);
    r.input("diag", diag.to_vec()).input("free", free.to_vec());
    r.text = m.to_text(&t.p.name);
    r.check("potent", status(m.is_potent(t.k)));
    r.result = json!({ "entries": entry_triples(&m) });
    Ok(r)
}

fn enumerate(target: &Target, count_only: bool, limit: Option<usize>) -> Result<Report> {
    let t = resolve(target)?;
    let mut r = Report::new("enumerate");
    target_inputs(&mut r, &t);
    if count_only {
        let n = count_by_construction(&t.p.poset, &t.f, t.k, t.mode)?;
        r.line(format!("count={n}"));
        r.result = json!({ "count": n.to_string() });
        return Ok(r);
    }
    if let Some(l) = limit {
        r.input("limit", l);
    }
    let limit = limit.unwrap_or(usize::MAX);
    r.line(format!("# poset: {}", t.p.name));
    r.line(format!("# field: {}", t.f));
    r.line(format!("# elements: {}", t.p.poset.labels().join(" ")));
    let mut listed = Vec::new();
    let mut all_potent = true;
    let mut n: u64 = 0;
    for m in PotentEnumerator::new(t.p.poset.clone(), t.f.clone(), t.k, t.mode)? {
        n += 1;
        if listed.len() < limit {
            all_potent &= m.is_potent(t.k);
            r.line(format!("# matrix {n}"));
            for [i, j, c] in entry_triples(&m) {
                r.line(format!("{i} {j} {c}"));
            }
            listed.push(m.entries().iter().map(|v| v.code()).collect::<Vec<_>>());
        }
    }
    r.line(format!("count={n}"));
    r.check("listed matrices are potent", status(all_potent));
    let pairs: Vec<[usize; 2]> =
        t.p.poset
            .pairs()
            .iter()
            .map(|&(i, j)| [i + 1, j + 1])
            .collect();
    r.result = json!({ "count": n.to_string(), "pairs": pairs, "matrices": listed });
    Ok(r)
}

fn verify(
    threads: usize,
    all: bool,
    poset: Option<&str>,
    field: Option<&str>,
    k: Option<u32>,
    cap: Option<&str>,
) -> Result<Report> {
    let cap = match cap {
        Some(c) => {
            parse_cap(c).ok_or_else(|| UsageError(format!("--cap `{c}` is not a number")))?
        }
        None => default_cap(),
    };
    let opts = OracleOptions { cap, threads };
    let mut r = Report::new("verify");
    r.input("cap", cap).input("threads", threads);
    let mut rows = Vec::new();
    let mut push = |r: &mut Report,
                    name: String,
                    formula: String,
                    oracle: Option<String>,
                    verdict: Verdict| {
        let line = match (&verdict, &oracle) {
            (Verdict::Skipped(why), _) => format!("SKIP {name} formula={formula} ({why})"),
            (_, Some(o)) => format!("{verdict} {name} formula={formula} oracle={o}"),
            (_, None) => unreachable!("oracle value present unless skipped"),
        };
        r.line(line);
        r.check(name.clone(), verdict.to_string());
        rows.push(json!({ "case": name, "formula": formula, "oracle": oracle, "status": verdict.to_string() }));
    };
    match poset {
        Some(poset) => {
            let p = parse_poset(poset)?;
            let f = parse_field(field.expect("clap requires --field"))?;
            let k = k.expect("clap requires --k");
            r.input("poset", p.name.as_str())
                .input("field", f.to_string())
                .input("k", k);
            match p.shape {
                Some(shape) => {
                    let rep = run_case(&OracleCase { shape, field: f, k }, opts)?;
                    push(
                        &mut r,
                        rep.case.to_string(),
                        rep.formula.to_string(),
                        rep.oracle.map(|o| o.to_string()),
                        rep.verdict,
                    );
                }
                None => {
                    let s = scalars_for(&f, k)?;
                    let formula = structured_count(&p.poset, s).eval_u64(f.order() as u64);
                    let name = format!("{} GF({f}) k={k}", p.name);
                    let (oracle, verdict) = match brute_force_count(&p.poset, &f, k, opts) {
                        Ok(o) => {
                            // Signed evaluation against the unsigned oracle total.
                            let v = if formula.to_string() == o.to_string() {
                                Verdict::Pass
                            } else {
                                Verdict::Fail
                            };
                            (Some(o.to_string()), v)
                        }
                        Err(e @ kpotent_core::Error::SearchSpaceTooLarge { .. }) => {
                            (None, Verdict::Skipped(e.to_string()))
                        }
                        Err(e) => return Err(e.into()),
                    };
                    push(&mut r, name, formula.to_string(), oracle, verdict);
                }
            }
        }
        None => {
            if field.is_some() || k.is_some() {
                return usage("--field and --k need --poset");
            }
            r.input("all", all);
            let cases = if all { all_cases() } else { core_cases() };
            for case in &cases {
                let rep = run_case(case, opts)?;
                push(
                    &mut r,
                    rep.case.to_string(),
                    rep.formula.to_string(),
                    rep.oracle.map(|o| o.to_string()),
                    rep.verdict,
                );
            }
        }
    }
    let tally = |s: &str| r.checks.iter().filter(|c| c.status == s).count();
    let (pass, fail, skip) = (tally("PASS"), tally("FAIL"), tally("SKIP"));
    r.line(format!(
        "summary: {pass} passed, {fail} failed, {skip} skipped"
    ));
    r.result = json!({ "cases": rows, "passed": pass, "failed": fail, "skipped": skip });
    Ok(r)
}

fn golden_source(dir: Option<&Path>, id: u32) -> Result<String> {
    match dir {
        Some(d) => {
            let path = d.join(golden_file_name(id));
            std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))
        }
        None => Ok(golden_text(id).expect("bundled table").to_owned()),
    }
}

fn tables(ids: &[u32], dir: Option<&Path>) -> Result<Report> {
    let ids: Vec<u32> = if ids.is_empty() {
        WORKED_IDS.iter().chain(TABLE_IDS.iter()).copied().collect()
    } else {
        ids.to_vec()
    };
    for &id in &ids {
        if !WORKED_IDS.contains(&id) && !TABLE_IDS.contains(&id) {
            return usage(format!("there is no table {id}; ids are 1-7 and 9-12"));
        }
    }
    let errata = match dir.map(|d| d.join("errata.txt")).filter(|p| p.exists()) {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            parse_errata(&text)?
        }
        None => builtin_errata(),
    };
    let mut r = Report::new("tables");
    r.input("ids", ids.clone());
    if let Some(d) = dir {
        r.input("golden_dir", d.display().to_string());
    }
    let mut results = Vec::new();
    for id in ids {
        let v = if WORKED_IDS.contains(&id) {
            worked_table(&mut r, id)?
        } else {
            counting_table(&mut r, id, &golden_source(dir, id)?, &errata)?
        };
        results.push(v);
    }
    r.result = Value::Array(results);
    Ok(r)
}

fn counting_table(
    r: &mut Report,
    id: u32,
    text: &str,
    errata: &[kpotent_core::tables::Erratum],
) -> Result<Value> {
    let table = GoldenTable::parse(id, text)?;
    let check = check_table(&table, errata);
    r.line(format!("table {id}: {}, s={}", table.kind, table.s));
    let mut rows = Vec::new();
    for row in &check.rows {
        let params: Vec<String> = row.params.iter().map(u64::to_string).collect();
        let label = format!("{}={}", table.kind.param_names(), params.join(","));
        r.line(format!("  {label}: {}", row.computed));
        if !row.formula_agrees() {
            r.line(format!(
                "    closed form differs from the labeling count {}",
                row.independent
            ));
        }
        let mut diffs = Vec::new();
        for t in &row.terms {
            let tag = match t.status {
                TermStatus::Erratum => "documented erratum",
                TermStatus::Unexplained => "UNEXPLAINED",
            };
            r.line(format!(
                "    q^{}: printed {}, computed {} [{tag}]",
                t.exponent, t.printed, t.computed
            ));
            diffs.push(json!({
                "exponent": t.exponent,
                "printed": t.printed.to_string(),
                "computed": t.computed.to_string(),
                "erratum": t.status == TermStatus::Erratum,
            }));
        }
        rows.push(
            json!({ "params": row.params, "computed": row.computed.to_string(), "diffs": diffs }),
        );
    }
    for e in &check.stale_errata {
        r.line(format!(
            "  stale erratum: {:?} q^{} printed {}",
            e.params, e.exponent, e.printed
        ));
    }
    let documented = check.diff_count();
    let verdict = status(check.passed());
    r.line(format!(
        "table {id}: {verdict}, documented errata: {documented}"
    ));
    r.check(format!("table {id}"), verdict);
    Ok(json!({ "id": id, "kind": table.kind.to_string(), "s": table.s, "rows": rows }))
}

fn worked_table(r: &mut Report, id: u32) -> Result<Value> {
    r.line(format!("table {id}: worked completions"));
    let mut cells = Vec::new();
    let mut table_ok = true;
    for (x, entry) in WORKED.iter().enumerate().filter(|(_, e)| e.table == id) {
        let mut fields = Vec::new();
        let mut ok = true;
        for f in worked_fields(entry.k) {
            for w in primitive_roots(&f, entry.k) {
                let c = check_worked(entry, &f, w, 6, 1000 + x as u64)?;
                ok &= match entry.erratum {
                    Some(_) => {
                        c.completions_potent
                            && c.pattern_ok
                            && !c.probes_ok
                            && c.printed_value_breaks_potency == Some(true)
                    }
                    None => c.reproduces_printed(),
                };
            }
            fields.push(format!("GF({f})"));
        }
        table_ok &= ok;
        let verdict = status(ok);
        let over = fields.join(", ");
        match entry.erratum {
            Some(note) => {
                r.line(format!(
                    "  {} (k={}): printed {}: {verdict}, misprint confirmed over {over}",
                    entry.cell,
                    entry.k,
                    entry.expression()
                ));
                r.line(format!("    {note}"));
            }
            None => r.line(format!(
                "  {} (k={}): {}: {verdict} over {over}",
                entry.cell,
                entry.k,
                entry.expression()
            )),
        }
        cells.push(json!({
            "cell": entry.cell,
            "k": entry.k,
            "expression": entry.expression(),
            "erratum": entry.erratum,
            "status": verdict,
        }));
    }
    r.line(format!("table {id}: {}", status(table_ok)));
    r.check(format!("table {id}"), status(table_ok));
    Ok(json!({ "id": id, "cells": cells }))
}

fn slowik(n_max: u64, l_max: usize) -> Result<Report> {
    if n_max == 0 || l_max == 0 {
        return usage("--n-max and --l-max must be at least 1");
    }
    let rep = slowik_equiv_check(n_max, l_max);
    let mut r = Report::new("slowik-equiv");
    r.input("n_max", n_max).input("l_max", l_max);
    match &rep.counterexample {
        None => r.line(format!(
            "PASS: {} identities for n <= {n_max}, l <= {l_max}",
            rep.checked
        )),
        Some((n, l, a, b)) => {
            r.line(format!("FAIL at n={n}, l={l}"));
            r.line(format!("  sorted partitions: {a}"));
            r.line(format!("  compositions:      {b}"));
        }
    }
    r.check("slowik-equiv", status(rep.passed()));
    r.result = json!({
        "checked": rep.checked,
        "counterexample": rep.counterexample.as_ref().map(|(n, l, a, b)| json!({
            "n": n, "l": l, "sorted_partitions": a.to_string(), "compositions": b.to_string(),
        })),
    });
    Ok(r)
}
