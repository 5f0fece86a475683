//! Standard polytopes and the bipyramid families with many vertices.
//!
//! Vertex orders are chosen so that eliminating the first facet leaves the
//! free generators in the order the printed presentations use.

use super::SmoothFanoPolytope;
use crate::lattice::LatticeVector;

fn unit(d: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    v[i] = 1;
    v
}

fn build(rows: Vec<Vec<i64>>) -> SmoothFanoPolytope {
    let dim = rows[0].len();
    let verts: Vec<LatticeVector> = rows.iter().map(|r| crate::lattice::lv(r)).collect();
    SmoothFanoPolytope::new(None, dim, verts).expect("standard family member is smooth Fano")
}

fn combo(d: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; d];
    for &(i, c) in terms {
        v[i] += c;
    }
    v
}

/// The segment `[-1, 1]`.
pub fn segment() -> SmoothFanoPolytope {
    build(vec![vec![1], vec![-1]])
}

/// `conv(e_1, ..., e_d, -e_1 - ... - e_d)`.
pub fn simplex(d: usize) -> SmoothFanoPolytope {
    let mut rows: Vec<Vec<i64>> = (0..d).map(|i| unit(d, i)).collect();
    rows.push(vec![-1; d]);
    build(rows)
}

/// Hexagon `e1, e2, -e1+e2, -e1, -e2, e1-e2`.
pub fn p6() -> SmoothFanoPolytope {
    build(vec![
        vec![1, 0],
        vec![0, 1],
        vec![-1, 1],
        vec![-1, 0],
        vec![0, -1],
        vec![1, -1],
    ])
}

/// Pentagon `e1, e2, -e1+e2, -e2, e1-e2`.
pub fn p5() -> SmoothFanoPolytope {
    build(vec![
        vec![1, 0],
        vec![0, 1],
        vec![-1, 1],
        vec![0, -1],
        vec![1, -1],
    ])
}

/// Square `e1, e2, -e1, -e2` (the fan of `P^1 x P^1`).
pub fn f0() -> SmoothFanoPolytope {
    build(vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]])
}

/// Quadrilateral `e1, e2, -e1+e2, -e2` (the first Hirzebruch surface).
pub fn f1() -> SmoothFanoPolytope {
    build(vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]])
}

/// `conv(±e_1, ..., ±e_4, ±(e_1+e_2+e_3+e_4))`.
pub fn dp4() -> SmoothFanoPolytope {
    let mut rows: Vec<Vec<i64>> = (0..4).map(|i| unit(4, i)).collect();
    rows.extend((0..4).map(|i| combo(4, &[(i, -1)])));
    rows.push(vec![1, 1, 1, 1]);
    rows.push(vec![-1, -1, -1, -1]);
    build(rows)
}

/// `Y_1` (`k = 1`) or `Y_2` (`k = 2`) in dimension 3: a bipyramid over the
/// hexagon in the `e2, e3` plane with apices `e1` and `-e1` or `-e1+e2`.
pub fn y3(k: u8) -> SmoothFanoPolytope {
    let apex = match k {
        1 => combo(3, &[(0, -1)]),
        2 => combo(3, &[(0, -1), (1, 1)]),
        _ => panic!("Y_{k} is not defined"),
    };
    let mut rows = hexagon_in(3, 1, 2);
    rows.push(unit(3, 0));
    rows.push(apex);
    build(rows)
}

/// `Z_k` for `k = 1..=4`: a bipyramid over the pentagon
/// `e2, ±e3, ±(e2-e3)` with apices `e1` and `-e1 + *`.
pub fn z3(k: u8) -> SmoothFanoPolytope {
    let apex = match k {
        1 => combo(3, &[(0, -1)]),
        2 => combo(3, &[(0, -1), (1, 1)]),
        3 => combo(3, &[(0, -1), (2, 1)]),
        4 => combo(3, &[(0, -1), (2, -1)]),
        _ => panic!("Z_{k} is not defined"),
    };
    let rows = vec![
        unit(3, 1),
        unit(3, 2),
        combo(3, &[(1, -1), (2, 1)]),
        combo(3, &[(2, -1)]),
        combo(3, &[(1, 1), (2, -1)]),
        unit(3, 0),
        apex,
    ];
    build(rows)
}

/// `W_k` for `k = 1..=8`: a double bipyramid over the hexagon in the
/// `e3, e4` plane, with apex pairs `e1, -e1 + *` and `e2, -e2 + ⋆`.
pub fn w4(k: u8) -> SmoothFanoPolytope {
    let (star1, star2): (&[(usize, i64)], &[(usize, i64)]) = match k {
        1 => (&[], &[]),
        2 => (&[(1, 1)], &[]),
        3 => (&[(1, 1)], &[(2, 1)]),
        4 => (&[(2, 1)], &[]),
        5 => (&[(2, 1)], &[(2, 1)]),
        6 => (&[(2, 1)], &[(3, 1)]),
        7 => (&[(2, 1)], &[(2, -1)]),
        8 => (&[(2, 1)], &[(3, -1)]),
        _ => panic!("W_{k} is not defined"),
    };
    let mut rows = hexagon_in(4, 2, 3);
    rows.push(unit(4, 0));
    let mut a = vec![(0, -1)];
    a.extend_from_slice(star1);
    rows.push(combo(4, &a));
    rows.push(unit(4, 1));
    let mut b = vec![(1, -1)];
    b.extend_from_slice(star2);
    rows.push(combo(4, &b));
    build(rows)
}

fn hexagon_in(d: usize, i: usize, j: usize) -> Vec<Vec<i64>> {
    vec![
        unit(d, i),
        unit(d, j),
        combo(d, &[(i, -1), (j, 1)]),
        combo(d, &[(i, -1)]),
        combo(d, &[(j, -1)]),
        combo(d, &[(i, 1), (j, -1)]),
    ]
}

fn sum_all(parts: Vec<SmoothFanoPolytope>) -> SmoothFanoPolytope {
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one summand");
    it.fold(first, |acc, p| {
        acc.direct_sum(&p)
            .expect("direct sum of smooth Fano polytopes")
    })
}

fn with_hexagons(base: Vec<SmoothFanoPolytope>, count: usize) -> SmoothFanoPolytope {
    let mut parts = base;
    parts.extend(std::iter::repeat_with(p6).take(count));
    sum_all(parts)
}

/// `Y_k^d` for odd `d >= 3`.
pub fn y_family(k: u8, d: usize) -> SmoothFanoPolytope {
    assert!(d >= 3 && d % 2 == 1, "Y_k^d needs odd d >= 3");
    match k {
        1 => with_hexagons(vec![segment()], (d - 1) / 2),
        _ => with_hexagons(vec![y3(k)], (d - 3) / 2),
    }
}

/// `Z_k^d` for odd `d >= 3` (`k = 5` needs `d >= 5`).
pub fn z_family(k: u8, d: usize) -> SmoothFanoPolytope {
    assert!(d >= 3 && d % 2 == 1, "Z_k^d needs odd d >= 3");
    match k {
        5 => {
            assert!(d >= 5, "Z_5^d needs d >= 5");
            with_hexagons(vec![y3(2), p5()], (d - 5) / 2)
        }
        _ => with_hexagons(vec![z3(k)], (d - 3) / 2),
    }
}

/// `W_k^d` for even `d >= 4` (`k = 9` needs `d >= 6`).
pub fn w_family(k: u8, d: usize) -> SmoothFanoPolytope {
    assert!(d >= 4 && d % 2 == 0, "W_k^d needs even d >= 4");
    match k {
        9 => {
            assert!(d >= 6, "W_9^d needs d >= 6");
            with_hexagons(vec![y3(2), y3(2)], (d - 6) / 2)
        }
        _ => with_hexagons(vec![w4(k)], (d - 4) / 2),
    }
}

/// `P6^{⊕k}`.
pub fn hexagon_power(k: usize) -> SmoothFanoPolytope {
    assert!(k >= 1);
    with_hexagons(Vec::new(), k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_counts() {
        assert_eq!(dp4().num_facets(), 30);
        assert_eq!(p5().direct_sum(&p5()).unwrap().num_facets(), 25);
        assert_eq!(w4(1).num_facets(), 24);
        for k in 1..=8 {
            assert_eq!(w4(k).num_vertices(), 10);
            assert_eq!(w4(k).num_facets(), 24);
        }
        for k in 1..=4 {
            assert_eq!(z3(k).num_vertices(), 7);
        }
        assert_eq!(y3(2).num_vertices(), 8);
        assert_eq!(z_family(5, 5).num_vertices(), 13);
        assert_eq!(w_family(9, 6).num_vertices(), 16);
        assert_eq!(y_family(1, 5).num_vertices(), 14);
    }
}
