//! Bundled polytope tables for dimensions 3 and 4.

use std::sync::OnceLock;

use crate::polytope::{parse_polytopes, SmoothFanoPolytope};

pub const DIM3_TEXT: &str = include_str!("../data/dim3.txt");
pub const DIM4_TEXT: &str = include_str!("../data/dim4.txt");
const DIM3_NONFACES: &str = include_str!("../data/dim3_nonfaces.txt");
const DIM4_NONFACES: &str = include_str!("../data/dim4_nonfaces.txt");

/// Dimension-4 IDs with no printed vertex list and no construction.
pub const DIM4_MISSING: [u32; 2] = [54, 62];

/// `(V, F, ids)` rows of the dimension-4 classification by vertex and facet
/// count.
pub const DIM4_COUNTS: &[(usize, usize, &[u32])] = &[
    (5, 5, &[147]),
    (6, 8, &[25, 138, 139, 144, 145]),
    (6, 9, &[44, 70, 141, 146]),
    (7, 11, &[24, 127, 128]),
    (
        7,
        12,
        &[
            30, 43, 31, 35, 42, 49, 66, 68, 134, 109, 117, 129, 136, 132, 133, 135, 140, 143, 97,
        ],
    ),
    (7, 13, &[40, 41, 60, 64, 69, 137]),
    (8, 15, &[26, 28, 32, 45, 48, 67, 118, 123, 125, 124]),
    (
        8,
        16,
        &[
            74, 96, 75, 83, 108, 95, 131, 105, 106, 112, 114, 130, 142, 29, 39, 33, 34, 37, 38, 47,
            59, 93, 94, 104, 111, 116, 115, 126,
        ],
    ),
    (8, 17, &[36, 50, 57, 58, 61, 65, 110]),
    (8, 18, &[53, 55]),
    (9, 18, &[27, 46, 119, 122]),
    (
        9,
        20,
        &[
            71, 73, 76, 92, 77, 88, 79, 81, 103, 82, 91, 107, 84, 90, 113, 102, 120,
        ],
    ),
    (9, 21, &[51, 52, 56, 89]),
    (9, 23, &[62]),
    (9, 24, &[54]),
    (10, 24, &[72, 87, 78, 86, 80, 85, 101, 121]),
    (10, 25, &[98]),
    (10, 30, &[63]),
    (11, 30, &[99]),
    (12, 36, &[100]),
];

/// `(V, ids)` rows for dimension 3.
pub const DIM3_COUNTS: &[(usize, &[u32])] = &[
    (4, &[23]),
    (5, &[7, 19, 20, 22]),
    (6, &[11, 18, 12, 17, 21, 6, 16]),
    (7, &[8, 10, 13, 14]),
    (8, &[9, 15]),
];

fn load(
    cell: &'static OnceLock<Vec<SmoothFanoPolytope>>,
    text: &str,
) -> &'static [SmoothFanoPolytope] {
    cell.get_or_init(|| parse_polytopes(text).expect("bundled table parses"))
}

pub fn dim3() -> &'static [SmoothFanoPolytope] {
    static CELL: OnceLock<Vec<SmoothFanoPolytope>> = OnceLock::new();
    load(&CELL, DIM3_TEXT)
}

pub fn dim4() -> &'static [SmoothFanoPolytope] {
    static CELL: OnceLock<Vec<SmoothFanoPolytope>> = OnceLock::new();
    load(&CELL, DIM4_TEXT)
}

/// Both tables.
pub fn all() -> impl Iterator<Item = &'static SmoothFanoPolytope> {
    dim3().iter().chain(dim4())
}

pub fn get(dim: usize, id: u32) -> Option<&'static SmoothFanoPolytope> {
    let table = match dim {
        3 => dim3(),
        4 => dim4(),
        _ => return None,
    };
    table.iter().find(|p| p.id() == Some(id))
}

/// Dimension-4 polytope by ID. Panics if the ID is not bundled.
pub fn d4(id: u32) -> &'static SmoothFanoPolytope {
    get(4, id).unwrap_or_else(|| panic!("no bundled 4-polytope with id {id}"))
}

/// Dimension-3 polytope by ID. Panics if the ID is not bundled.
pub fn d3(id: u32) -> &'static SmoothFanoPolytope {
    get(3, id).unwrap_or_else(|| panic!("no bundled 3-polytope with id {id}"))
}

/// Printed minimal nonfaces as sorted digit strings, for the IDs whose
/// vertex lists come from a table.
pub fn printed_nonfaces(dim: usize) -> Vec<(u32, Vec<String>)> {
    let text = match dim {
        3 => DIM3_NONFACES,
        4 => DIM4_NONFACES,
        _ => return Vec::new(),
    };
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace();
            let id = it.next().and_then(|s| s.parse().ok()).expect("id column");
            let mut sets: Vec<String> = it.map(str::to_string).collect();
            sets.sort();
            (id, sets)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_load() {
        assert_eq!(dim3().len(), 18);
        assert_eq!(dim4().len(), 122);
        let listed: usize = DIM4_COUNTS.iter().map(|r| r.2.len()).sum();
        assert_eq!(listed, 124);
    }

    #[test]
    fn nonfaces_match_print() {
        for dim in [3, 4] {
            for (id, sets) in printed_nonfaces(dim) {
                let p = get(dim, id).unwrap();
                assert_eq!(p.minimal_nonfaces_display(), sets, "id {id}");
            }
        }
    }

    #[test]
    fn vertex_and_facet_counts() {
        for &(v, f, ids) in DIM4_COUNTS {
            for &id in ids {
                if DIM4_MISSING.contains(&id) {
                    continue;
                }
                let p = d4(id);
                assert_eq!((p.num_vertices(), p.num_facets()), (v, f), "id {id}");
            }
        }
        for &(v, ids) in DIM3_COUNTS {
            for &id in ids {
                assert_eq!(d3(id).num_vertices(), v, "id {id}");
            }
        }
    }

    #[test]
    fn first_facet_is_leading_block() {
        for (id, _) in printed_nonfaces(4) {
            assert_eq!(d4(id).facets()[0], vec![0, 1, 2, 3], "id {id}");
        }
        for (id, _) in printed_nonfaces(3) {
            assert_eq!(d3(id).facets()[0], vec![0, 1, 2], "id {id}");
        }
    }
}
