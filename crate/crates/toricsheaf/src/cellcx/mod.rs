//! Subdivisions of a polytope by the facet hyperplanes of other polytopes,
//! and cochain complexes on their order complexes.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fan::combinations;
use crate::linalg::{rref, CochainComplex, Matrix};
use crate::polyhedra::{solve_tight, Inequality, LatticePolyhedron};
use crate::rational::{format_q, gcd_i64, q, Q};

mod order;

pub use order::OrderComplex;

/// Default bound on the ambient dimension.
pub const DEFAULT_MAX_DIM: usize = 4;

#[derive(Clone, Debug)]
pub struct Cell {
    dim: usize,
    vertices: Vec<usize>,
    facets: Vec<usize>,
    sample: Vec<Q>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Indices into [`CellComplex::points`].
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Codimension-one faces, as cell indices.
    pub fn facets(&self) -> &[usize] {
        &self.facets
    }

    /// Vertex centroid, a point of the relative interior.
    pub fn sample(&self) -> &[Q] {
        &self.sample
    }
}

/// The cells of an arrangement restricted to a full-dimensional polytope,
/// sorted by dimension and then by vertex set.
#[derive(Clone, Debug)]
pub struct CellComplex {
    ambient: LatticePolyhedron,
    hyperplanes: Vec<Inequality>,
    points: Vec<Vec<Q>>,
    cells: Vec<Cell>,
    faces: Vec<Vec<usize>>,
    cofaces: Vec<Vec<usize>>,
}

/// A set of cells, as a mask over the cells of one complex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSet(Vec<bool>);

/// A face-closed cell set.
pub type Subcomplex = CellSet;

impl CellSet {
    pub fn empty(n: usize) -> Self {
        CellSet(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        CellSet(vec![true; n])
    }

    pub fn from_indices(n: usize, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut m = vec![false; n];
        for c in cells {
            m[c] = true;
        }
        CellSet(m)
    }

    pub fn contains(&self, c: usize) -> bool {
        self.0[c]
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.0.contains(&true)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|e| *e.1).map(|e| e.0)
    }

    pub fn complement(&self) -> Self {
        CellSet(self.0.iter().map(|b| !b).collect())
    }

    pub fn intersection(&self, other: &CellSet) -> Self {
        CellSet(self.0.iter().zip(&other.0).map(|(a, b)| *a && *b).collect())
    }

    pub fn minus(&self, other: &CellSet) -> Self {
        CellSet(self.0.iter().zip(&other.0).map(|(a, b)| *a && !*b).collect())
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| !*a || *b)
    }
}

/// Primitive integer normal with its first nonzero entry positive.
fn normalized(h: &Inequality) -> Option<Inequality> {
    let g = h.normal.iter().fold(0, |g, &x| gcd_i64(g, x));
    if g == 0 {
        return None;
    }
    let lead = h.normal.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let g = if lead < 0 { -g } else { g };
    Some(Inequality { normal: h.normal.iter().map(|x| x / g).collect(), offset: &h.offset / q(g) })
}

fn sign(x: &Q) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn affine_rank(points: &[&Vec<Q>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    if points.len() == 1 {
        return 0;
    }
    let rows: Vec<Vec<Q>> =
        points[1..].iter().map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect()).collect();
    Matrix::from_rows(base.len(), rows).rank()
}

/// Does `v` lie in the cone spanned by `gens`? Decided over the linearly
/// independent subsets, which suffice by Carathéodory.
pub(crate) fn in_cone(v: &[i64], gens: &[&[i64]]) -> bool {
    let n = v.len();
    if v.iter().all(|&x| x == 0) {
        return true;
    }
    for k in 1..=gens.len().min(n) {
        for subset in combinations(gens.len(), k) {
            // columns g_i, augmented by v
            let rows: Vec<Vec<Q>> = (0..n)
                .map(|r| subset.iter().map(|&i| q(gens[i][r])).chain(std::iter::once(q(v[r]))).collect())
                .collect();
            let (red, pivots) = rref(rows, k + 1);
            if pivots.len() != k || pivots.contains(&k) {
                continue;
            }
            if red.iter().take(k).all(|row| !row[k].is_negative()) {
                return true;
            }
        }
    }
    false
}

/// Subdivide `ambient` by the facet hyperplanes of every cutter.
pub fn subdivide(ambient: &LatticePolyhedron, cutters: &[LatticePolyhedron]) -> Result<CellComplex> {
    subdivide_capped(ambient, cutters, DEFAULT_MAX_DIM)
}

pub fn subdivide_capped(
    ambient: &LatticePolyhedron,
    cutters: &[LatticePolyhedron],
    max_dim: usize,
) -> Result<CellComplex> {
    let n = ambient.dim();
    if n > max_dim {
        return Err(Error::DimensionTooHigh(n, max_dim));
    }
    if ambient.is_empty() || affine_rank(&ambient.vertices().iter().collect::<Vec<_>>()) != n {
        return Err(Error::Precondition("ambient polytope must be full-dimensional".into()));
    }
    let mut planes = BTreeSet::new();
    for h in ambient.inequalities().iter().chain(cutters.iter().flat_map(|c| c.inequalities())) {
        let Some(h) = normalized(h) else { continue };
        let vals: Vec<i8> = ambient.vertices().iter().map(|v| sign(&h.value(v))).collect();
        if vals.iter().any(|&s| s <= 0) && vals.iter().any(|&s| s >= 0) {
            planes.insert(h);
        }
    }
    let planes: Vec<Inequality> = planes.into_iter().collect();

    let mut pts = BTreeSet::new();
    for subset in combinations(planes.len(), n) {
        if let Some(u) = solve_tight(n, subset.iter().map(|&i| &planes[i])) {
            if ambient.contains(&u) {
                pts.insert(u);
            }
        }
    }
    let points: Vec<Vec<Q>> = pts.into_iter().collect();
    let signs: Vec<Vec<i8>> = points.iter().map(|p| planes.iter().map(|h| sign(&h.value(p))).collect()).collect();
    let rank_of = |vs: &[usize]| affine_rank(&vs.iter().map(|&i| &points[i]).collect::<Vec<_>>());

    // top cells: every region has a vertex, so fill the zero signs at each vertex
    let mut tried = BTreeSet::new();
    let mut tops = BTreeSet::new();
    for sv in &signs {
        let zeros: Vec<usize> = (0..planes.len()).filter(|&h| sv[h] == 0).collect();
        if zeros.len() > 24 {
            return Err(Error::Precondition("too many hyperplanes through one vertex".into()));
        }
        for mask in 0u32..(1 << zeros.len()) {
            let mut s = sv.clone();
            for (b, &h) in zeros.iter().enumerate() {
                s[h] = if mask >> b & 1 == 1 { 1 } else { -1 };
            }
            if !tried.insert(s.clone()) {
                continue;
            }
            let compat: Vec<usize> =
                (0..points.len()).filter(|&w| signs[w].iter().zip(&s).all(|(&a, &b)| a == 0 || a == b)).collect();
            if rank_of(&compat) == n {
                tops.insert(compat);
            }
        }
    }

    // faces, recursively through supporting hyperplanes
    let mut found: BTreeMap<Vec<usize>, (usize, BTreeSet<Vec<usize>>)> = BTreeMap::new();
    let mut stack: Vec<(Vec<usize>, usize)> = tops.into_iter().map(|t| (t, n)).collect();
    while let Some((w, d)) = stack.pop() {
        if found.contains_key(&w) {
            continue;
        }
        let mut facets = BTreeSet::new();
        if d > 0 {
            for (h, _) in planes.iter().enumerate() {
                let on: Vec<usize> = w.iter().copied().filter(|&v| signs[v][h] == 0).collect();
                if on.len() == w.len() || on.len() < d {
                    continue;
                }
                debug_assert!(w.iter().all(|&v| signs[v][h] >= 0) || w.iter().all(|&v| signs[v][h] <= 0));
                if rank_of(&on) == d - 1 {
                    facets.insert(on);
                }
            }
        }
        for f in &facets {
            stack.push((f.clone(), d - 1));
        }
        found.insert(w, (d, facets));
    }
    let mut order: Vec<(usize, Vec<usize>)> = found.iter().map(|(w, (d, _))| (*d, w.clone())).collect();
    order.sort();
    let index: BTreeMap<&Vec<usize>, usize> = order.iter().enumerate().map(|(i, (_, w))| (w, i)).collect();
    let cells: Vec<Cell> = order
        .iter()
        .map(|(d, w)| {
            let mut facets: Vec<usize> = found[w].1.iter().map(|f| index[f]).collect();
            facets.sort();
            let k = q(w.len() as i64);
            let sample = (0..n).map(|c| w.iter().map(|&v| points[v][c].clone()).sum::<Q>() / &k).collect();
            Cell { dim: *d, vertices: w.clone(), facets, sample }
        })
        .collect();
    let mut faces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for c in 0..cells.len() {
        let mut all = BTreeSet::new();
        for &f in &cells[c].facets {
            all.insert(f);
            all.extend(faces[f].iter().copied());
        }
        faces[c] = all.into_iter().collect();
    }
    let mut cofaces: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (c, fs) in faces.iter().enumerate() {
        for &f in fs {
            cofaces[f].push(c);
        }
    }
    let cx = CellComplex { ambient: ambient.clone(), hyperplanes: planes, points, cells, faces, cofaces };
    debug_assert_eq!(cx.euler(&CellSet::full(cx.len())), 1);
    Ok(cx)
}

impl CellComplex {
    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn ambient(&self) -> &LatticePolyhedron {
        &self.ambient
    }

    pub fn hyperplanes(&self) -> &[Inequality] {
        &self.hyperplanes
    }

    pub fn points(&self) -> &[Vec<Q>] {
        &self.points
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// All proper faces of a cell.
    pub fn faces(&self, c: usize) -> &[usize] {
        &self.faces[c]
    }

    /// All cells having `c` as a proper face.
    pub fn cofaces(&self, c: usize) -> &[usize] {
        &self.cofaces[c]
    }

    /// An H-representation of a cell, read off its sample point.
    pub fn h_rep(&self, c: usize) -> Vec<Inequality> {
        let x = &self.cells[c].sample;
        let mut out = Vec::new();
        for h in &self.hyperplanes {
            let flip = || Inequality { normal: h.normal.iter().map(|a| -a).collect(), offset: -h.offset.clone() };
            match sign(&h.value(x)) {
                0 => {
                    out.push(h.clone());
                    out.push(flip());
                }
                1 => out.push(h.clone()),
                _ => out.push(flip()),
            }
        }
        out
    }

    pub fn v_rep(&self, c: usize) -> Vec<&Vec<Q>> {
        self.cells[c].vertices.iter().map(|&v| &self.points[v]).collect()
    }

    pub fn carrier(&self, pred: impl Fn(&Cell) -> bool) -> CellSet {
        CellSet(self.cells.iter().map(pred).collect())
    }

    /// Cells contained in the closed polytope.
    pub fn inside(&self, p: &LatticePolyhedron) -> CellSet {
        self.carrier(|c| p.contains(&c.sample))
    }

    /// Cells whose relative interior lies in the interior of `p` relative
    /// to the ambient polytope: at the sample point, each tight inequality
    /// of `p` must follow from the tight ambient inequalities.
    pub fn relative_interior(&self, p: &LatticePolyhedron) -> CellSet {
        self.carrier(|c| {
            let x = &c.sample;
            if !p.contains(x) {
                return false;
            }
            let tight: Vec<&[i64]> = self
                .ambient
                .inequalities()
                .iter()
                .filter(|h| h.value(x).is_zero())
                .map(|h| h.normal.as_slice())
                .collect();
            p.inequalities().iter().filter(|h| h.value(x).is_zero()).all(|h| in_cone(&h.normal, &tight))
        })
    }

    /// Cells inside the interior of `p` in the ambient space.
    pub fn strict_interior(&self, p: &LatticePolyhedron) -> CellSet {
        self.carrier(|c| !p.is_empty() && p.inequalities().iter().all(|h| h.value(&c.sample).is_positive()))
    }

    /// Cells meeting the interior of the ambient polytope.
    pub fn interior_cells(&self) -> CellSet {
        self.strict_interior(&self.ambient)
    }

    /// The closed set ambient ∖ int_ambient(p).
    pub fn outside_relative_interior(&self, p: &LatticePolyhedron) -> Subcomplex {
        self.relative_interior(p).complement()
    }

    pub fn is_face_closed(&self, set: &CellSet) -> bool {
        set.iter().all(|c| self.faces[c].iter().all(|&f| set.contains(f)))
    }

    pub fn is_open(&self, set: &CellSet) -> bool {
        set.iter().all(|c| self.cofaces[c].iter().all(|&f| set.contains(f)))
    }

    /// Σ (−1)^dim over the cells of the set.
    pub fn euler(&self, set: &CellSet) -> i64 {
        set.iter().map(|c| if self.cells[c].dim.is_multiple_of(2) { 1 } else { -1 }).sum()
    }

    /// Reduced cohomology over ℚ of the union of the open cells in `set`,
    /// listed from degree −1. The set must be face-closed or open.
    pub fn reduced_cohomology(&self, set: &CellSet) -> Vec<usize> {
        debug_assert!(self.is_face_closed(set) || self.is_open(set));
        let oc = self.order_complex(set);
        oc.cochains(set, true).cohomology()
    }

    /// Cochains on the cells outside `sub`, computing H^•(ambient, sub).
    pub fn relative_cochain_complex(&self, sub: &Subcomplex) -> CochainComplex {
        debug_assert!(self.is_face_closed(sub));
        let oc = self.order_complex(&CellSet::full(self.len()));
        oc.cochains(&sub.complement(), false)
    }

    /// Components of the union of the relative interiors of `set`.
    pub fn connected_components(&self, set: &CellSet) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in set.iter() {
            for &f in &self.faces[c] {
                if set.contains(f) {
                    let (a, b) = (find(&mut parent, c), find(&mut parent, f));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for c in set.iter() {
            let r = find(&mut parent, c);
            comps.entry(r).or_default().push(c);
        }
        comps.into_values().collect()
    }

    pub fn to_json(&self) -> Value {
        let pt = |p: &Vec<Q>| Value::from(p.iter().map(format_q).collect::<Vec<_>>());
        json!({
            "dim": self.dim(),
            "points": self.points.iter().map(pt).collect::<Vec<_>>(),
            "cells": self.cells.iter().map(|c| json!({
                "dim": c.dim,
                "vertices": c.vertices,
                "facets": c.facets,
                "sample": pt(&c.sample),
            })).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests;
