//! Shared readers for the printed tables under `tests/data`.

#![allow(dead_code)]

use std::collections::BTreeSet;

use fano_core::cohomology::{build_presentation, same_ideal_q, CohomologyPresentation};
use fano_core::fixtures;
use fano_core::invariants::{
    kve_mod_p, linear_coeffs, mbn_for, normalize, quotient_refine, reduce_mod, span_mod_p,
    sve_integer_bounded, CoeffRing, KveReport,
};
use fano_core::poly::{buchberger, Poly, VarOrder, F2};
use fano_core::SmoothFanoPolytope;
use num_bigint::BigInt;

pub const BOUND: u32 = 5;

#[derive(Debug, Clone)]
pub struct Row {
    pub dim: usize,
    pub id: u32,
    pub partners: Vec<u32>,
    pub column: String,
    pub quotient: Vec<(String, u32)>,
    pub cell: String,
    pub line: usize,
    /// Table entry whose ring the row actually shows.
    pub on: Option<u32>,
    pub names: Option<Vec<String>>,
    /// Misprinted form of `cell`.
    pub printed: Option<String>,
}

impl Row {
    pub fn label(&self) -> String {
        let q = if self.quotient.is_empty() {
            String::new()
        } else {
            let parts: Vec<String> = self
                .quotient
                .iter()
                .map(|(e, k)| {
                    if *k == 1 {
                        e.clone()
                    } else {
                        format!("{e}^{k}")
                    }
                })
                .collect();
            format!(" / {}", parts.join(", "))
        };
        format!("d={} id {} {}{}", self.dim, self.id, self.column, q)
    }
}

/// Split on commas outside parentheses.
pub fn split_top(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

pub fn read_rows(text: &str) -> Vec<Row> {
    let mut dim = 0;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(d) = line.strip_prefix("dim ") {
            dim = d.trim().parse().expect("dimension header");
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        assert!(
            parts.len() == 3 || parts.len() == 4,
            "line {}: three or four fields",
            i + 1
        );
        let (mut on, mut names, mut printed) = (None, None, None);
        for opt in parts
            .get(3)
            .map_or("", |s| s)
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (key, value) = opt.split_once(' ').unwrap_or((opt, ""));
            match key {
                "on" => on = Some(value.trim().parse().expect("id after `on`")),
                "names" => names = Some(value.split_whitespace().map(str::to_string).collect()),
                "printed" => printed = Some(value.trim().to_string()),
                other => panic!("line {}: unknown option `{other}`", i + 1),
            }
        }
        let (id, partners) = match parts[0].split_once('(') {
            Some((a, b)) => (
                a.trim().parse().expect("id"),
                b.trim_end_matches(')')
                    .split(',')
                    .map(|s| s.trim().parse().expect("partner id"))
                    .collect(),
            ),
            None => (parts[0].parse().expect("id"), Vec::new()),
        };
        let (column, quotient) = match parts[1].split_once('/') {
            Some((c, q)) => (
                c.trim().to_string(),
                split_top(q)
                    .into_iter()
                    .map(|e| match e.split_once('^') {
                        Some((b, k)) => (b.trim().to_string(), k.trim().parse().expect("power")),
                        None => (e, 1),
                    })
                    .collect(),
            ),
            None => (parts[1].to_string(), Vec::new()),
        };
        rows.push(Row {
            dim,
            id,
            partners,
            column,
            quotient,
            cell: parts[2].to_string(),
            line: i + 1,
            on,
            names,
            printed,
        });
    }
    rows
}

pub fn kve_rows() -> Vec<Row> {
    read_rows(include_str!("../data/kve_tables.txt"))
}

fn polytope(dim: usize, id: u32) -> &'static SmoothFanoPolytope {
    fixtures::get(dim, id).unwrap_or_else(|| panic!("no fixture d={dim} id {id}"))
}

fn column_ring(column: &str) -> Option<(u32, CoeffRing)> {
    Some(match column {
        "sve" => (2, CoeffRing::Integer),
        "sve2" => (2, CoeffRing::ModP(2)),
        "4ve2" => (4, CoeffRing::ModP(2)),
        "cve" => (3, CoeffRing::Integer),
        "cve2" => (3, CoeffRing::ModP(2)),
        "cve3" => (3, CoeffRing::ModP(3)),
        _ => return None,
    })
}

/// Presentation the row is evaluated on.
fn target(row: &Row, id: u32) -> CohomologyPresentation {
    let mut pres = build_presentation(polytope(row.dim, id));
    if let Some(names) = &row.names {
        pres = pres.with_names(names.clone());
    }
    if row.column == "ideal2" {
        pres = reduce_mod(&pres, 2);
    } else if let Some((_, CoeffRing::ModP(p))) = column_ring(&row.column) {
        if !row.quotient.is_empty() {
            pres = reduce_mod(&pres, p);
        }
    }
    if row.quotient.is_empty() {
        return pres;
    }
    let elems: Vec<Poly<BigInt>> = row
        .quotient
        .iter()
        .map(|(e, _)| pres.parse_element(e).expect("quotient element"))
        .collect();
    let powers: Vec<u32> = row.quotient.iter().map(|(_, k)| *k).collect();
    quotient_refine(&pres, &elems, &powers)
}

#[derive(Debug, PartialEq, Eq)]
pub enum Expected {
    Infinite,
    Set(BTreeSet<Vec<i64>>),
}

/// Parse a kve cell into normalized vectors.
pub fn expected_set(cell: &str, pres: &CohomologyPresentation, ring: CoeffRing) -> Expected {
    let n = pres.nvars();
    let vec_of = |s: &str| {
        normalize(
            &linear_coeffs(&pres.parse_element(s).expect("cell element"), n),
            ring,
        )
    };
    match cell {
        "∞" => return Expected::Infinite,
        "∅" => return Expected::Set(BTreeSet::new()),
        _ => {}
    }
    let mut set = BTreeSet::new();
    for item in split_top(cell) {
        let span = |basis: Vec<Vec<i64>>| match ring {
            CoeffRing::ModP(p) => span_mod_p(&basis, p),
            CoeffRing::Integer => panic!("spans only make sense mod p"),
        };
        if item == "all" {
            set.extend(span(
                (0..n)
                    .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                    .collect(),
            ));
        } else if let Some(inner) = item.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
            set.extend(span(split_top(inner).iter().map(|s| vec_of(s)).collect()));
        } else {
            set.insert(vec_of(&item));
        }
    }
    Expected::Set(set)
}

fn report(pres: &CohomologyPresentation, k: u32, ring: CoeffRing) -> KveReport {
    match ring {
        CoeffRing::Integer => sve_integer_bounded(pres, k, BOUND),
        CoeffRing::ModP(p) => kve_mod_p(pres, k, p),
    }
}

fn actual(r: &KveReport) -> Expected {
    if r.is_infinite() {
        Expected::Infinite
    } else {
        Expected::Set(r.solutions.iter().cloned().collect())
    }
}

fn count(e: &Expected) -> Option<usize> {
    match e {
        Expected::Infinite => None,
        Expected::Set(s) => Some(s.len()),
    }
}

fn same_ideal_f2(n: usize, a: &[Poly<BigInt>], b: &[Poly<BigInt>]) -> bool {
    let gb = |g: &[Poly<BigInt>]| {
        let f: Vec<Poly<F2>> = g.iter().map(Poly::to_field::<F2>).collect();
        buchberger(&f, &VarOrder::natural(n)).generators()
    };
    gb(a) == gb(b)
}

/// Evaluate one row. Partners are compared on counts only.
pub fn check_row(row: &Row) -> Result<(), String> {
    let pres = target(row, row.on.unwrap_or(row.id));
    match row.column.as_str() {
        "ideal" | "ideal2" => {
            let parse = |cell: &str| -> Result<Vec<Poly<BigInt>>, String> {
                split_top(cell)
                    .iter()
                    .map(|s| {
                        pres.parse_element(s)
                            .map_err(|e| format!("cannot parse `{s}`: {e}"))
                    })
                    .collect()
            };
            let same = |gens: &[Poly<BigInt>]| {
                if row.column == "ideal" {
                    same_ideal_q(pres.nvars(), pres.ideal(), gens)
                } else {
                    same_ideal_f2(pres.nvars(), pres.ideal(), gens)
                }
            };
            let gens = parse(&row.cell)?;
            if let Some(printed) = &row.printed {
                if same(&parse(printed)?) {
                    return Err("the printed form is not a misprint".into());
                }
            }
            if !same(&gens) {
                return Err(format!("computed ({})", pres.display_ideal().join(", ")));
            }
            for &pid in &row.partners {
                let other = target(row, pid);
                let printed =
                    CohomologyPresentation::from_ideal(pres.names().to_vec(), gens.clone());
                if other.hilbert_function() != printed.hilbert_function() {
                    return Err(format!("partner {pid} has another Hilbert function"));
                }
            }
            Ok(())
        }
        "mbn" => {
            let want: usize = row.cell.parse().map_err(|_| "bad mbn cell".to_string())?;
            for id in std::iter::once(row.id).chain(row.partners.iter().copied()) {
                let b = mbn_for(&target(row, id), BOUND);
                if (b.lower, b.upper) != (want, want) {
                    return Err(format!("id {id}: bounds {}..{}", b.lower, b.upper));
                }
            }
            Ok(())
        }
        col => {
            let (k, ring) = column_ring(col).ok_or_else(|| format!("unknown column {col}"))?;
            let want = expected_set(&row.cell, &pres, ring);
            let got = actual(&report(&pres, k, ring));
            if got != want {
                let r = report(&pres, k, ring);
                return Err(format!("computed {}", r.table_cell(pres.names())));
            }
            for &pid in &row.partners {
                let other = actual(&report(&target(row, pid), k, ring));
                if count(&other) != count(&want) {
                    return Err(format!("partner {pid} has {:?} solutions", count(&other)));
                }
            }
            Ok(())
        }
    }
}
