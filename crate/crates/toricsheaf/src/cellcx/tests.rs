use std::collections::BTreeSet;

use proptest::prelude::*;

use super::*;
use crate::linalg::{rank, SparseRow};
use crate::rational::qfrac;

fn poly(points: &[[i64; 2]]) -> LatticePolyhedron {
    let pts: Vec<Vec<Q>> = points.iter().map(|p| vec![q(p[0]), q(p[1])]).collect();
    LatticePolyhedron::from_points(2, &pts)
}

fn triangle(k: i64, at: [i64; 2]) -> LatticePolyhedron {
    poly(&[at, [at[0] + k, at[1]], [at[0], at[1] + k]])
}

fn counts(cx: &CellComplex) -> [usize; 3] {
    let mut c = [0; 3];
    for cell in cx.cells() {
        c[cell.dim()] += 1;
    }
    c
}

#[test]
fn bare_polytope() {
    let d = triangle(4, [0, 0]);
    let cx = subdivide(&d, &[]).unwrap();
    assert_eq!(counts(&cx), [3, 3, 1]);
    let same = subdivide(&d, std::slice::from_ref(&d)).unwrap();
    assert_eq!(counts(&same), [3, 3, 1]);
    assert!(matches!(subdivide_capped(&d, &[], 1), Err(Error::DimensionTooHigh(2, 1))));
}

#[test]
fn corner_cutter_is_subcomplex() {
    let d = triangle(4, [0, 0]);
    let c = triangle(1, [1, 1]);
    let cx = subdivide(&d, std::slice::from_ref(&c)).unwrap();
    // three lines through the big triangle make 7 regions
    assert_eq!(counts(&cx)[2], 7);
    let inside = cx.inside(&c);
    assert!(cx.is_face_closed(&inside));
    assert_eq!(cx.euler(&inside), 1);
    assert_eq!(inside.iter().filter(|&i| cx.cell(i).dim() == 2).count(), 1);
    assert_eq!(cx.euler(&CellSet::full(cx.len())), 1);
}

#[test]
fn empty_and_contractible() {
    let d = triangle(4, [0, 0]);
    let cx = subdivide(&d, &[triangle(1, [1, 1])]).unwrap();
    assert_eq!(cx.reduced_cohomology(&CellSet::empty(cx.len())), vec![1, 0, 0, 0]);
    assert_eq!(cx.reduced_cohomology(&CellSet::full(cx.len())), vec![0, 0, 0, 0]);
    assert_eq!(cx.relative_cochain_complex(&CellSet::empty(cx.len())).cohomology(), vec![1, 0, 0]);
    assert_eq!(cx.relative_cochain_complex(&CellSet::full(cx.len())).cohomology(), vec![0, 0, 0]);
}

#[test]
fn circle_around_inner_triangle() {
    // the degree (−1,−1) picture for O(−3) on the plane: Δ = 5·triangle moved
    // by (−1,−1) around the 2·triangle at the origin
    let d = triangle(5, [-1, -1]);
    let inner = triangle(2, [0, 0]);
    let cx = subdivide(&d, std::slice::from_ref(&inner)).unwrap();
    let p = cx.outside_relative_interior(&inner);
    assert!(cx.is_face_closed(&p));
    assert_eq!(cx.reduced_cohomology(&p), vec![0, 0, 1, 0]);
    let rel = cx.relative_cochain_complex(&p);
    assert!(rel.is_complex());
    assert_eq!(rel.cohomology(), vec![0, 0, 1]);
    assert_eq!(rel.euler(), 1 - cx.euler(&p));
}

#[test]
fn boundary_contact_is_relative() {
    // a cutter sharing an edge with Δ: the edge counts as interior relative to Δ
    let d = triangle(4, [0, 0]);
    let c = triangle(2, [0, 0]);
    let cx = subdivide(&d, std::slice::from_ref(&c)).unwrap();
    let rel = cx.relative_interior(&c);
    let strict = cx.strict_interior(&c);
    assert!(strict.is_subset(&rel));
    assert!(cx.is_open(&rel));
    let origin = cx.cells().iter().position(|cell| cell.dim() == 0 && cell.sample() == [q(0), q(0)]).unwrap();
    assert!(rel.contains(origin));
    assert!(!strict.contains(origin));
    let p = rel.complement();
    assert_eq!(cx.reduced_cohomology(&p), vec![0, 0, 0, 0]);
}

#[test]
fn components_of_difference() {
    // a vertical strip through the middle of a square leaves two pieces
    let d = poly(&[[0, 0], [4, 0], [4, 2], [0, 2]]);
    let strip = poly(&[[1, -1], [2, -1], [2, 3], [1, 3]]);
    let cx = subdivide(&d, std::slice::from_ref(&strip)).unwrap();
    let rest = cx.inside(&strip).complement();
    let comps = cx.connected_components(&rest);
    assert_eq!(comps.len(), 2);
    assert_eq!(cx.reduced_cohomology(&rest), vec![0, 1, 0, 0]);
    let none = cx.inside(&d).complement();
    assert!(cx.connected_components(&none).is_empty());
}

#[test]
fn homotopy_of_closed_and_open_differences() {
    let d = triangle(6, [-1, -1]);
    for inner in
        [triangle(2, [0, 0]), triangle(3, [-1, -1]), triangle(5, [0, 0]), poly(&[[0, 0], [2, 0], [2, 1], [0, 1]])]
    {
        let cx = subdivide(&d, std::slice::from_ref(&inner)).unwrap();
        let p = cx.outside_relative_interior(&inner);
        let open = cx.inside(&inner).complement();
        assert_eq!(cx.reduced_cohomology(&p), cx.reduced_cohomology(&open));
    }
}

/// Independent oracle: reduced cohomology of the barycentric subdivision
/// of the order complex, from its own chain enumeration.
fn subdivided_reduced(cx: &CellComplex, set: &CellSet) -> Vec<usize> {
    let oc = cx.order_complex(set);
    let simp: Vec<BTreeSet<usize>> = oc.simplices().iter().map(|s| s.iter().copied().collect()).collect();
    let lt = |a: usize, b: usize| a != b && simp[a].is_subset(&simp[b]);
    let mut chains: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..simp.len()).map(|i| vec![i]).collect();
    while let Some(c) = stack.pop() {
        let last = *c.last().unwrap();
        for j in 0..simp.len() {
            if lt(last, j) {
                let mut n = c.clone();
                n.push(j);
                stack.push(n);
            }
        }
        chains.push(c);
    }
    let top = chains.iter().map(Vec::len).max().unwrap_or(0);
    let mut by_len: Vec<Vec<Vec<usize>>> = vec![Vec::new(); top + 2];
    by_len[0].push(Vec::new());
    for c in chains {
        let l = c.len();
        by_len[l].push(c);
    }
    let mut ranks = Vec::new();
    for l in 0..=top {
        let idx: std::collections::HashMap<&Vec<usize>, usize> =
            by_len[l].iter().enumerate().map(|(i, c)| (c, i)).collect();
        let rows: Vec<SparseRow> = by_len[l + 1]
            .iter()
            .map(|c| {
                let mut r: SparseRow = (0..c.len())
                    .map(|i| {
                        let mut f = c.clone();
                        f.remove(i);
                        (idx[&f], if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                r.sort();
                r
            })
            .collect();
        ranks.push(rank(&rows));
    }
    let mut out: Vec<usize> =
        (0..=top).map(|l| by_len[l].len() - ranks[l] - if l == 0 { 0 } else { ranks[l - 1] }).collect();
    out.resize(cx.dim() + 2, 0);
    out
}

#[test]
fn refinement_invariance() {
    let d = triangle(5, [-1, -1]);
    let inner = triangle(2, [0, 0]);
    let cx = subdivide(&d, std::slice::from_ref(&inner)).unwrap();
    for set in [cx.outside_relative_interior(&inner), CellSet::empty(cx.len()), cx.inside(&inner)] {
        assert_eq!(cx.reduced_cohomology(&set), subdivided_reduced(&cx, &set));
    }
}

#[test]
fn three_dimensional_cube() {
    let mut pts = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                pts.push(vec![q(2 * x), q(2 * y), q(2 * z)]);
            }
        }
    }
    let cube = LatticePolyhedron::from_points(3, &pts);
    let small: Vec<Vec<Q>> = pts.iter().map(|p| p.iter().map(|c| c / q(2) + qfrac(1, 2)).collect()).collect();
    let cutter = LatticePolyhedron::from_points(3, &small);
    let cx = subdivide(&cube, std::slice::from_ref(&cutter)).unwrap();
    assert_eq!(cx.cells().iter().filter(|c| c.dim() == 3).count(), 27);
    let p = cx.outside_relative_interior(&cutter);
    assert_eq!(cx.reduced_cohomology(&p), vec![0, 0, 0, 1, 0]);
}

#[test]
fn json_export_lists_every_cell() {
    let cx = subdivide(&triangle(2, [0, 0]), &[]).unwrap();
    let v = cx.to_json();
    assert_eq!(v["cells"].as_array().unwrap().len(), 7);
    assert_eq!(v["cells"][6]["dim"], 2);
}

fn same_side(h: &Inequality, a: &[Q], b: &[Q]) -> bool {
    sign(&h.value(a)) == sign(&h.value(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arrangement_invariants(
        boxes in prop::collection::vec((-1i64..4, -1i64..4, 1i64..4, 1i64..4), 1..4),
        probes in prop::collection::vec((0i64..37, 0i64..37), 6),
    ) {
        let d = poly(&[[0, 0], [4, 0], [4, 3], [0, 3]]);
        let cutters: Vec<LatticePolyhedron> = boxes
            .iter()
            .map(|&(x, y, w, h)| poly(&[[x, y], [x + w, y], [x + w, y + h], [x, y + h]]))
            .chain(std::iter::once(triangle(3, [0, 0])))
            .collect();
        let cx = subdivide(&d, &cutters).unwrap();
        prop_assert_eq!(cx.euler(&CellSet::full(cx.len())), 1);
        for (i, cell) in cx.cells().iter().enumerate() {
            let x = cell.sample();
            prop_assert!(cx.h_rep(i).iter().all(|h| !h.value(x).is_negative()));
            // no hyperplane crosses a cell: midpoints to the vertices stay on the sample's side
            for v in cx.v_rep(i) {
                let mid: Vec<Q> = x.iter().zip(v).map(|(a, b)| (a + b) / q(2)).collect();
                prop_assert!(cx.hyperplanes().iter().all(|h| same_side(h, x, &mid)));
            }
            for c in &cutters {
                let all_in = cx.v_rep(i).iter().all(|v| c.contains(v));
                prop_assert_eq!(all_in, c.contains(x));
            }
        }
        for c in &cutters {
            prop_assert!(cx.is_face_closed(&cx.inside(c)));
            prop_assert!(cx.is_open(&cx.relative_interior(c)));
        }
        // each probe lies in exactly one open cell
        for &(a, b) in &probes {
            let u = vec![qfrac(a, 9), qfrac(b, 12)];
            let hits = (0..cx.len())
                .filter(|&i| cx.hyperplanes().iter().all(|h| same_side(h, &u, cx.cell(i).sample())))
                .count();
            prop_assert_eq!(hits, 1);
        }
    }
}
