use kpotent_core::tables::{
    builtin_errata, check_table, check_worked, primitive_roots, worked_fields, GoldenTable,
    TermStatus, TABLE_IDS, WORKED,
};

#[test]
fn every_counting_table_is_reproduced_up_to_documented_errata() {
    let errata = builtin_errata();
    for id in TABLE_IDS {
        let table = GoldenTable::builtin(id).unwrap();
        let check = check_table(&table, &errata);
        for row in &check.rows {
            assert!(
                row.formula_agrees(),
                "table {id} row {:?}: closed form vs labeling count",
                row.params
            );
            for t in &row.terms {
                assert_eq!(
                    t.status,
                    TermStatus::Erratum,
                    "table {id} row {:?}: q^{} printed {} computed {}",
                    row.params,
                    t.exponent,
                    t.printed,
                    t.computed
                );
            }
        }
        assert!(
            check.stale_errata.is_empty(),
            "table {id}: {:?}",
            check.stale_errata
        );
    }
}

#[test]
fn errata_are_confined_to_the_star_tables() {
    let errata = builtin_errata();
    let mut seen = Vec::new();
    for id in TABLE_IDS {
        let check = check_table(&GoldenTable::builtin(id).unwrap(), &errata);
        if check.diff_count() > 0 {
            seen.push(id);
        }
    }
    assert_eq!(seen, vec![4, 6, 7]);
}

#[test]
fn worked_cells_match_completions() {
    for (x, entry) in WORKED.iter().enumerate() {
        for f in worked_fields(entry.k) {
            for w in primitive_roots(&f, entry.k) {
                let c = check_worked(entry, &f, w, 6, 1000 + x as u64).unwrap();
                let label = format!(
                    "table {} {} over GF({f}) with w={}",
                    entry.table,
                    entry.cell,
                    w.code()
                );
                assert!(c.completions_potent, "{label}");
                assert!(c.pattern_ok, "{label}");
                if entry.erratum.is_some() {
                    assert!(
                        !c.coefficients_ok && !c.probes_ok,
                        "{label}: misprint reproduced"
                    );
                    assert_eq!(c.printed_value_breaks_potency, Some(true), "{label}");
                } else {
                    assert!(c.reproduces_printed(), "{label}: {c:?}");
                }
            }
        }
    }
}

#[test]
fn worked_expressions_render_like_the_printed_cells() {
    let by_cell = |t: u32, c: &str| {
        WORKED
            .iter()
            .find(|e| e.table == t && e.cell == c)
            .unwrap()
            .expression()
    };
    assert_eq!(by_cell(1, "row 1 middle"), "X = -(1/4)[(2+2w)ab]");
    assert_eq!(
        by_cell(2, "row 1 right"),
        "X = -(1/3)[(2+w)ae + (2+w^2)dc + abc]"
    );
    assert_eq!(by_cell(3, "row 3 left"), "X = wae + w^3bg + w^2adg");
    assert_eq!(by_cell(1, "row 1 left"), "no forced entry");
}
