//! Self-test battery over small dimensions, used by the `selftest` command.

use std::time::Instant;

use crate::db::Database;
use crate::error::Result;
use crate::facelattice::{codim_complement_check, labeled_isomorphic, restrict_to_rank, strata_poset};
use crate::forms::{rank1, SymForm, VectorZ};
use crate::verify::{
    check_closure, check_codim_one, check_interior, check_product, check_rank1_rays, recheck,
    random_psd_corpus, Certificate,
};
use crate::voronoi::{enumerate_perfect, EnumerateOptions, Enumeration};

/// Known numbers of perfect-form classes for g = 1..=6.
pub const KNOWN_CLASS_COUNTS: [usize; 6] = [1, 1, 1, 2, 3, 7];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn row(name: impl Into<String>, start: Instant, outcome: Result<(bool, String)>) -> CheckRow {
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CheckRow {
        name: name.into(),
        passed,
        detail,
        millis: start.elapsed().as_millis(),
    }
}

fn certs_ok(certs: &[Certificate]) -> (bool, String) {
    let pass = certs.iter().filter(|c| c.passed() && recheck(c)).count();
    (pass == certs.len(), format!("{pass}/{} PASS and rechecked", certs.len()))
}

/// Runs the battery for dimensions up to `max_g` (at most 4 is sensible for a quick run).
pub fn selftest(max_g: usize) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let mut enums: Vec<Enumeration> = Vec::new();
    for g in 1..=max_g {
        let t = Instant::now();
        let out = enumerate_perfect(g, EnumerateOptions::default());
        let r = out.as_ref().map_err(Clone::clone).map(|e| {
            let want = KNOWN_CLASS_COUNTS.get(g - 1).copied();
            (
                Some(e.classes.len()) == want,
                format!("{} classes (expected {})", e.classes.len(), want.unwrap_or(0)),
            )
        });
        rows.push(row(format!("enumerate g={g}"), t, r));
        if let Ok(e) = out {
            enums.push(e);
        }
    }
    for e in &enums {
        let t = Instant::now();
        let r = check_rank1_rays(e).map(|c| certs_ok(&[c]));
        rows.push(row(format!("BC-RAYS g={}", e.g), t, r));
    }
    for e in &enums {
        let t = Instant::now();
        let r = Database::from_enumeration(e.clone(), 0)
            .to_json()
            .and_then(|s| {
                let back = Database::from_json(&s)?;
                back.reverify()?;
                Ok((back.to_json()? == s, "reloaded and witnesses re-verified".into()))
            });
        rows.push(row(format!("database g={}", e.g), t, r));
    }
    if max_g >= 2 {
        let t = Instant::now();
        let r = (|| -> Result<(bool, String)> {
            let mut ok = true;
            let mut n = 0;
            for g in 2..=max_g {
                for f in random_psd_corpus(g, 16, 0xc0ffee + g as u64) {
                    let c = check_interior(&f)?;
                    let expect_pass = crate::forms::psd_rank_int(&f).rank >= 2;
                    ok &= c.passed() == expect_pass && recheck(&c);
                    n += 1;
                }
                for x in [VectorZ::unit(g, 0), VectorZ((0..g as i64).map(|i| i + 1).collect())] {
                    let c = check_interior(&rank1(&x)?)?;
                    ok &= !c.passed() && recheck(&c);
                    n += 1;
                }
            }
            Ok((ok, format!("{n} forms")))
        })();
        rows.push(row("BC-INTERIOR", t, r));
    }
    let two = SymForm::new(vec![vec![2]]).expect("1x1");
    let pairs = [
        (two.clone(), two.clone()),
        (two.clone(), SymForm::root_a(2)),
        (SymForm::root_a(2), SymForm::root_a(2)),
        (SymForm::root_a(3), two.clone()),
    ];
    for (p, q) in pairs.iter().filter(|(p, q)| p.dim() + q.dim() <= max_g) {
        let t = Instant::now();
        let r = check_product(p, q).map(|c| certs_ok(&[c]));
        rows.push(row(format!("PRODUCT {}+{}", p.dim(), q.dim()), t, r));
    }
    for e in enums.iter().filter(|e| (2..=3).contains(&e.g)) {
        let t = Instant::now();
        let r = strata_poset(e).and_then(|p| {
            let certs: Vec<Certificate> = p
                .nodes
                .iter()
                .filter(|n| n.rank == e.g && n.minimal)
                .map(|n| check_closure(&n.representative))
                .collect::<Result<_>>()?;
            Ok(certs_ok(&certs))
        });
        rows.push(row(format!("CLOSURE r={}", e.g), t, r));
    }
    for (r, q) in [(1, two.clone()), (2, SymForm::root_a(2))] {
        if r + 1 > max_g {
            continue;
        }
        let t = Instant::now();
        let out = check_codim_one(&q, None).map(|c| certs_ok(&[c]));
        rows.push(row(format!("CODIM1 r={r}"), t, out));
        let t = Instant::now();
        let out = codim_complement_check(r + 1, r).map(|b| (b, String::new()));
        rows.push(row(format!("codim complement ({}, {r})", r + 1), t, out));
    }
    if enums.len() >= 3 {
        let t = Instant::now();
        let r = strata_poset(&enums[2]).and_then(|p3| {
            let p2 = strata_poset(&enums[1])?;
            let iso = labeled_isomorphic(&restrict_to_rank(&p3, 2), &p2);
            Ok((iso, format!("{} nodes vs {}", p3.nodes.len(), p2.nodes.len())))
        });
        rows.push(row("strata g=3 | rank<=2 ~ g=2", t, r));
    }
    rows
}

/// Fixed-width table of the rows.
pub fn format_table(rows: &[CheckRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(5);
    let mut s = format!("{:<w$}  {:<6}  {:>8}  {}\n", "check", "result", "ms", "detail");
    for r in rows {
        s.push_str(&format!(
            "{:<w$}  {:<6}  {:>8}  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.millis,
            r.detail
        ));
    }
    s
}
