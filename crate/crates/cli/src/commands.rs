use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Result;
use fano_core::cohomology::{
    build_presentation, chern_c1, degree_anticanonical, degree_via_ring, CohomologyPresentation,
};
use fano_core::equivalence::{anomalies, classify_with, fingerprints, Partition, Relation};
use fano_core::invariants::{
    kve_mod_p, mbn_for, sve_integer_bounded, InvariantFingerprint, KveReport,
};
use fano_core::polytope::{validate_smooth_fano, RawRecord, SmoothFanoPolytope};
use fano_core::ring_iso::{degree_gate, find_ring_isos_bounded};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::table::Table;
use crate::{Config, Report};

fn id(p: &SmoothFanoPolytope) -> u32 {
    p.id().unwrap_or(0)
}

fn braces(ids: &[u32]) -> String {
    format!(
        "{{{}}}",
        ids.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    )
}

fn by_dim(polys: &[SmoothFanoPolytope]) -> BTreeMap<usize, Vec<&SmoothFanoPolytope>> {
    let mut out: BTreeMap<usize, Vec<&SmoothFanoPolytope>> = BTreeMap::new();
    for p in polys {
        out.entry(p.dim()).or_default().push(p);
    }
    out
}

pub fn validate(records: &[(String, RawRecord)]) -> Report {
    let results: Vec<_> = records
        .par_iter()
        .map(|(src, r)| {
            let report = validate_smooth_fano(r.dim, &r.vertices);
            let facets = report
                .is_valid()
                .then(|| {
                    SmoothFanoPolytope::new(Some(r.id), r.dim, r.vertices.clone())
                        .ok()
                        .map(|p| p.num_facets())
                })
                .flatten();
            (src, r, report.failures(), facets)
        })
        .collect();
    let mut table = Table::new(["id", "dim", "V", "F", "status"]);
    let mut rows = Vec::new();
    let mut problems = String::new();
    for (src, r, failures, facets) in &results {
        let ok = failures.is_empty();
        table.row([
            r.id.to_string(),
            r.dim.to_string(),
            r.vertices.len().to_string(),
            facets.map_or("-".into(), |f| f.to_string()),
            if ok {
                "ok".into()
            } else {
                "INVALID".to_string()
            },
        ]);
        if !ok {
            let _ = writeln!(
                problems,
                "{src}:{}: id {}: {}",
                r.line,
                r.id,
                failures.join("; ")
            );
        }
        rows.push(json!({
            "id": r.id, "dim": r.dim, "source": src, "line": r.line,
            "vertices": r.vertices.len(), "facets": facets, "valid": ok, "failures": failures,
        }));
    }
    let invalid = results.iter().filter(|r| !r.2.is_empty()).count();
    let mut text = table.render();
    text.push_str(&problems);
    let _ = writeln!(text, "{} records, {} invalid", results.len(), invalid);
    Report {
        json: json!({"schema": 1, "command": "validate", "records": rows, "invalid": invalid}),
        text,
        failed: invalid > 0,
    }
}

fn kve_json(r: &KveReport, names: &[String]) -> Value {
    json!({
        "k": r.k,
        "ring": r.ring.to_string(),
        "cell": r.table_cell(names),
        "count": r.count(),
        "solutions": r.display(names),
        "span": r.display_basis(names),
        "completeness": r.completeness,
    })
}

fn invariant_entry(p: &SmoothFanoPolytope, cfg: &Config) -> Result<(Value, String)> {
    let pres = build_presentation(p);
    let names = pres.names().to_vec();
    let mut kves: Vec<KveReport> = [2, 3]
        .iter()
        .map(|&k| sve_integer_bounded(&pres, k, cfg.bound))
        .collect();
    for &q in &cfg.primes {
        kves.extend([2, 3, 4].iter().map(|&k| kve_mod_p(&pres, k, q)));
    }
    let mbn = mbn_for(&pres, cfg.bound);
    let degree = degree_anticanonical(p)?;
    let c1 = chern_c1(&pres).display(&names);
    let gb = pres.reduced_basis_display();
    let degrees = pres.ideal_degrees();
    let mbn_text = match mbn.exact() {
        Some(m) => m.to_string(),
        None => format!("{}..{}", mbn.lower, mbn.upper),
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "ID {}  (dim {}, {} vertices, {} facets)",
        id(p),
        p.dim(),
        p.num_vertices(),
        p.num_facets()
    );
    let mut t = Table::new(["", ""]);
    t.row(["generators".to_string(), names.join(" ")]);
    t.row(["ideal".to_string(), pres.display_ideal().join(", ")]);
    t.row(["Groebner basis".to_string(), gb.join(", ")]);
    t.row([
        "ideal degrees".to_string(),
        degrees
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    ]);
    t.row(["c1".to_string(), c1.clone()]);
    t.row(["degree".to_string(), degree.to_string()]);
    t.row(["mbn".to_string(), mbn_text]);
    // Drop the header and rule of the two-column layout.
    text.extend(t.render().lines().skip(2).map(|l| format!("  {l}\n")));
    let mut k = Table::new(["k", "ring", "elements"]);
    for r in &kves {
        k.row([r.k.to_string(), r.ring.to_string(), r.table_cell(&names)]);
    }
    text.extend(k.render().lines().map(|l| format!("  {l}\n")));

    let json = json!({
        "id": id(p),
        "dim": p.dim(),
        "vertices": p.num_vertices(),
        "facets": p.num_facets(),
        "f_vector": p.f_vector(),
        "presentation": fano_core::cohomology::PresentationReport::from(&pres),
        "groebner_basis": gb,
        "ideal_degrees": degrees,
        "c1": c1,
        "degree": degree.to_string(),
        "kve": kves.iter().map(|r| kve_json(r, &names)).collect::<Vec<_>>(),
        "mbn": {"lower": mbn.lower, "upper": mbn.upper},
    });
    Ok((json, text))
}

pub fn invariants(polys: &[SmoothFanoPolytope], cfg: &Config) -> Result<Report> {
    let entries: Vec<(Value, String)> = polys
        .par_iter()
        .map(|p| invariant_entry(p, cfg))
        .collect::<Result<_>>()?;
    let text = entries
        .iter()
        .map(|(_, t)| t.as_str())
        .collect::<Vec<_>>()
        .join("\n");
    let json = json!({
        "schema": 1,
        "command": "invariants",
        "bound": cfg.bound,
        "primes": cfg.primes,
        "polytopes": entries.into_iter().map(|(j, _)| j).collect::<Vec<_>>(),
    });
    Ok(Report {
        json,
        text,
        failed: false,
    })
}

fn partition_json(part: &Partition, ids: &[u32]) -> Value {
    let links: Vec<Value> = part
        .classes
        .iter()
        .flat_map(|c| &c.links)
        .map(|l| json!({"from": ids[l.from], "to": ids[l.to], "witness": l.witness}))
        .collect();
    json!({
        "relation": part.relation.to_string(),
        "classes": part.num_classes(),
        "merges": part.merges().iter().map(|m| m.iter().map(|&i| ids[i]).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "links": links,
    })
}

fn fingerprint_groups(ps: &[&SmoothFanoPolytope], fps: &[InvariantFingerprint]) -> Vec<Vec<usize>> {
    classify_with(ps, Relation::FingerprintEqual, fps).merges()
}

pub fn classify(polys: &[SmoothFanoPolytope], cfg: &Config) -> Report {
    let mut sections = Vec::new();
    let mut text = String::new();
    for (dim, ps) in by_dim(polys) {
        let ids: Vec<u32> = ps.iter().map(|p| id(p)).collect();
        let fps = fingerprints(&ps);
        let parts: Vec<Partition> = cfg
            .relations
            .iter()
            .map(|&r| classify_with(&ps, r, &fps))
            .collect();
        let find = |r: Relation| parts.iter().find(|p| p.relation == r);
        let anomaly_ids: Option<Vec<u32>> =
            match (find(Relation::FingerprintEqual), find(Relation::SignEquiv)) {
                (Some(f), Some(s)) => Some(anomalies(f, s).iter().map(|&i| ids[i]).collect()),
                _ => None,
            };
        let missing: &[u32] = if dim == 4 { &cfg.missing } else { &[] };

        let _ = write!(text, "dim {dim}: {} polytopes", ps.len());
        if !missing.is_empty() {
            let _ = write!(
                text,
                " (not bundled: {})",
                missing
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            );
        }
        text.push('\n');
        let mut t = Table::new(["relation", "classes", "merged"]);
        for part in &parts {
            let merged: Vec<String> = part
                .merges()
                .iter()
                .map(|m| braces(&m.iter().map(|&i| ids[i]).collect::<Vec<_>>()))
                .collect();
            t.row([
                part.relation.to_string(),
                part.num_classes().to_string(),
                merged.join(" "),
            ]);
        }
        text.push_str(&t.render());
        if let Some(a) = &anomaly_ids {
            let _ = writeln!(
                text,
                "fingerprint-equal but not sign-equivalent: {}",
                braces(a)
            );
        }
        text.push('\n');

        sections.push(json!({
            "dim": dim,
            "polytopes": ps.len(),
            "missing": missing,
            "partitions": parts.iter().map(|p| partition_json(p, &ids)).collect::<Vec<_>>(),
            "anomalies": anomaly_ids,
        }));
    }
    Report {
        json: json!({"schema": 1, "command": "classify", "dimensions": sections}),
        text,
        failed: false,
    }
}

pub fn degrees(polys: &[SmoothFanoPolytope]) -> Result<Report> {
    let rows: Vec<(u32, String, String)> = polys
        .par_iter()
        .map(|p| {
            Ok((
                id(p),
                degree_anticanonical(p)?.to_string(),
                degree_via_ring(&build_presentation(p))?.to_string(),
            ))
        })
        .collect::<Result<_>>()?;
    let degree_of: BTreeMap<u32, &String> = rows.iter().map(|(i, d, _)| (*i, d)).collect();
    let mut groups = Vec::new();
    for ps in by_dim(polys).values() {
        for g in fingerprint_groups(ps, &fingerprints(ps)) {
            let ids: Vec<u32> = g.iter().map(|&i| id(ps[i])).collect();
            let degs: Vec<&String> = ids.iter().map(|i| degree_of[i]).collect();
            groups.push((ids, degs));
        }
    }
    let disagree = rows.iter().filter(|(_, a, b)| a != b).count();

    let mut t = Table::new(["id", "degree", "via ring"]);
    for (i, a, b) in &rows {
        t.row([i.to_string(), a.clone(), b.clone()]);
    }
    let mut text = t.render();
    if !groups.is_empty() {
        text.push_str("\nfingerprint-equal groups\n");
        let mut g = Table::new(["ids", "degrees"]);
        for (ids, degs) in &groups {
            g.row([
                braces(ids),
                degs.iter()
                    .map(|d| d.as_str())
                    .collect::<Vec<_>>()
                    .join(", "),
            ]);
        }
        text.push_str(&g.render());
    }
    if disagree > 0 {
        let _ = writeln!(text, "{disagree} polytopes where the two routes disagree");
    }
    let json = json!({
        "schema": 1,
        "command": "degrees",
        "degrees": rows.iter().map(|(i, a, b)| json!({"id": i, "degree": a, "via_ring": b})).collect::<Vec<_>>(),
        "groups": groups.iter().map(|(ids, degs)| json!({"ids": ids, "degrees": degs})).collect::<Vec<_>>(),
    });
    Ok(Report {
        json,
        text,
        failed: disagree > 0,
    })
}

fn iso_pair(p: &SmoothFanoPolytope, q: &SmoothFanoPolytope, bound: u32) -> Result<(Value, String)> {
    let (a, b): (CohomologyPresentation, CohomologyPresentation) =
        (build_presentation(p), build_presentation(q));
    let (dp, dq) = (degree_anticanonical(p)?, degree_anticanonical(q)?);
    let gate = degree_gate(p, q)?;
    let mut isos = Vec::new();
    let conclusion = if a.nvars() != b.nvars() {
        "Picard numbers differ: rings are not isomorphic".to_string()
    } else if !gate {
        format!("degrees differ ({dp} vs {dq}): no c1-preserving isomorphism")
    } else {
        isos = find_ring_isos_bounded(&a, &b, bound)?;
        let preserving = isos.iter().filter(|w| w.c1_preserving).count();
        if isos.is_empty() {
            format!("no isomorphism with entries in [-{bound}, {bound}]")
        } else if preserving > 0 {
            format!("{} isomorphisms, {preserving} c1-preserving", isos.len())
        } else {
            format!("{} isomorphisms, none c1-preserving", isos.len())
        }
    };
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} -> {}: degrees {dp}, {dq}; gate {gate}",
        id(p),
        id(q)
    );
    if !isos.is_empty() {
        let mut t = Table::new(["map", "c1", "pontryagin"]);
        for w in &isos {
            let img = format!(
                "({}) -> ({})",
                a.names().join(", "),
                w.display(b.names()).join(", ")
            );
            t.row([
                img,
                w.c1_preserving.to_string(),
                w.pontryagin_preserving.to_string(),
            ]);
        }
        text.extend(t.render().lines().map(|l| format!("  {l}\n")));
    }
    let _ = writeln!(text, "  {conclusion}");
    let json = json!({
        "ids": [id(p), id(q)],
        "degrees": [dp.to_string(), dq.to_string()],
        "gate": gate,
        "isomorphisms": isos.iter().map(|w| json!({
            "images": w.display(b.names()),
            "matrix": w.l,
            "c1_preserving": w.c1_preserving,
            "pontryagin_preserving": w.pontryagin_preserving,
        })).collect::<Vec<_>>(),
        "conclusion": conclusion,
    });
    Ok((json, text))
}

pub fn iso(polys: &[SmoothFanoPolytope], cfg: &Config) -> Result<Report> {
    let pairs: Vec<(&SmoothFanoPolytope, &SmoothFanoPolytope)> = if polys.len() == 2 {
        vec![(&polys[0], &polys[1])]
    } else {
        let mut out = Vec::new();
        for ps in by_dim(polys).values() {
            for g in fingerprint_groups(ps, &fingerprints(ps)) {
                for (k, &i) in g.iter().enumerate() {
                    out.extend(g[k + 1..].iter().map(|&j| (ps[i], ps[j])));
                }
            }
        }
        out
    };
    let results: Vec<(Value, String)> = pairs
        .par_iter()
        .map(|(p, q)| iso_pair(p, q, cfg.bound))
        .collect::<Result<_>>()?;
    let text = results.iter().map(|(_, t)| t.as_str()).collect::<String>();
    let json = json!({
        "schema": 1,
        "command": "iso",
        "bound": cfg.bound,
        "pairs": results.into_iter().map(|(j, _)| j).collect::<Vec<_>>(),
    });
    Ok(Report {
        json,
        text,
        failed: false,
    })
}
