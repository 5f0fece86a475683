//! Plain-text vertex lists.
//!
//! ```text
//! # comment
//! id 12 dim 3 vertices 6
//! 1 0 0
//! 0 1 0
//! ...
//! ```
//!
//! Records are separated by blank lines. The vertex order in the file is kept.

use std::fmt::Write as _;

use num_bigint::BigInt;

use super::{PolytopeError, SmoothFanoPolytope};
use crate::lattice::LatticeVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("record starting at line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: PolytopeError,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line_no: usize, text: &str) -> Result<(u32, usize, usize), ParseError> {
    let toks: Vec<&str> = text.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "id" || toks[2] != "dim" || toks[4] != "vertices" {
        return Err(syntax(
            line_no,
            format!("expected `id <int> dim <int> vertices <int>`, found `{text}`"),
        ));
    }
    let num = |s: &str, what: &str| {
        s.parse::<usize>()
            .map_err(|_| syntax(line_no, format!("bad {what} `{s}`")))
    };
    let id = toks[1]
        .parse::<u32>()
        .map_err(|_| syntax(line_no, format!("bad id `{}`", toks[1])))?;
    Ok((
        id,
        num(toks[3], "dimension")?,
        num(toks[5], "vertex count")?,
    ))
}

/// An unvalidated record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub id: u32,
    pub dim: usize,
    pub vertices: Vec<LatticeVector>,
    /// Line of the header, 1-based.
    pub line: usize,
}

/// Split `text` into records, checking syntax only.
pub fn parse_records(text: &str) -> Result<Vec<RawRecord>, ParseError> {
    let mut out = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'))
        .peekable();
    loop {
        while lines.peek().is_some_and(|(_, l)| l.is_empty()) {
            lines.next();
        }
        let Some((start, header)) = lines.next() else {
            return Ok(out);
        };
        let (id, dim, m) = parse_header(start, header)?;
        let mut verts: Vec<LatticeVector> = Vec::with_capacity(m);
        for k in 0..m {
            let Some((ln, row)) = lines.next().filter(|(_, l)| !l.is_empty()) else {
                return Err(syntax(
                    start,
                    format!("record {id} ends after {k} of {m} vertices"),
                ));
            };
            let coords = row
                .split_whitespace()
                .map(|t| {
                    t.parse::<BigInt>()
                        .map_err(|_| syntax(ln, format!("bad coordinate `{t}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if coords.len() != dim {
                return Err(syntax(
                    ln,
                    format!("expected {dim} coordinates, found {}", coords.len()),
                ));
            }
            verts.push(coords);
        }
        if let Some((ln, l)) = lines.peek() {
            if !l.is_empty() {
                return Err(syntax(
                    *ln,
                    format!("record {id} has more than {m} vertices"),
                ));
            }
        }
        out.push(RawRecord {
            id,
            dim,
            vertices: verts,
            line: start,
        });
    }
}

/// Parse every record in `text`. Each record is validated.
pub fn parse_polytopes(text: &str) -> Result<Vec<SmoothFanoPolytope>, ParseError> {
    parse_records(text)?
        .into_iter()
        .map(|r| {
            SmoothFanoPolytope::new(Some(r.id), r.dim, r.vertices).map_err(|source| {
                ParseError::Invalid {
                    line: r.line,
                    source,
                }
            })
        })
        .collect()
}

/// Inverse of [`parse_polytopes`]. Polytopes without an id are written as id 0.
pub fn write_polytopes(ps: &[SmoothFanoPolytope]) -> String {
    let mut s = String::new();
    for (k, p) in ps.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "id {} dim {} vertices {}",
            p.id().unwrap_or(0),
            p.dim(),
            p.num_vertices()
        );
        for v in p.vertices() {
            let row: Vec<String> = v.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    s
}
