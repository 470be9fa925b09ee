//! Smooth complete fans in N ≅ ℤⁿ.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::polyhedra::Divisor;
use crate::rational::{gcd_i64, to_i64, Q};

/// A cone of a simplicial fan, identified by its sorted ray indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cone {
    rays: Vec<usize>,
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cone{:?}", self.rays)
    }
}

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone { rays }
    }

    pub fn rays(&self) -> &[usize] {
        &self.rays
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }

    /// Faces obtained by dropping one ray, each with its position.
    pub fn facets(&self) -> impl Iterator<Item = (usize, Cone)> + '_ {
        (0..self.rays.len()).map(move |i| {
            let mut r = self.rays.clone();
            r.remove(i);
            (i, Cone { rays: r })
        })
    }
}

/// A smooth complete fan. Rays keep their input order.
#[derive(Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Cone>,
    /// All cones grouped by dimension, each group sorted.
    cones: Vec<Vec<Cone>>,
    /// Dual bases of the maximal cones: `dual[i][j]` pairs to 1 with the j-th ray of cone i.
    dual: Vec<Vec<Vec<i64>>>,
    ample: Option<Divisor>,
}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan").field("rays", &self.rays).field("max_cones", &self.max_cones).finish()
    }
}

pub(crate) fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn int_matrix(rows: &[Vec<i64>]) -> Matrix {
    Matrix::from_i64(rows.first().map_or(0, Vec::len), rows)
}

/// Integer inverse of a unimodular matrix, transposed, as rows: the dual basis.
fn dual_basis(gens: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let inv = int_matrix(gens).inverse()?;
    let t = inv.transpose();
    let rows: Option<Vec<Vec<i64>>> = t.rows().iter().map(|r| r.iter().map(to_i64).collect()).collect();
    rows
}

impl Fan {
    /// Build a fan from rays and maximal cones; checks primitivity,
    /// smoothness and completeness.
    pub fn new(rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let dim = rays.first().map(Vec::len).ok_or_else(|| Error::Schema("fan has no rays".into()))?;
        if dim == 0 {
            return Err(Error::Schema("rank 0 lattice".into()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::RankMismatch { expected: dim, found: r.len() });
            }
            if r.iter().fold(0, |g, &x| gcd_i64(g, x)) != 1 {
                return Err(Error::NotPrimitive(i));
            }
        }
        let mut seen = BTreeSet::new();
        let mut cones = Vec::new();
        let mut dual = Vec::new();
        for c in max_cones {
            if c.iter().any(|&i| i >= rays.len()) {
                return Err(Error::Schema(format!("cone {c:?} references a missing ray")));
            }
            let cone = Cone::new(c.clone());
            if cone.dim() != dim || c.len() != dim {
                return Err(Error::NonSmooth(c));
            }
            if !seen.insert(cone.clone()) {
                return Err(Error::Schema(format!("duplicate cone {c:?}")));
            }
            let gens: Vec<Vec<i64>> = cone.rays.iter().map(|&i| rays[i].clone()).collect();
            let d = int_matrix(&gens).inverse().map(|_| det(&gens));
            if d.map(|x| x.abs()) != Some(1) {
                return Err(Error::NonSmooth(cone.rays.clone()));
            }
            dual.push(dual_basis(&gens).ok_or_else(|| Error::NonSmooth(cone.rays.clone()))?);
            cones.push(cone);
        }
        let mut fan = Fan { dim, rays, max_cones: cones, cones: Vec::new(), dual, ample: None };
        fan.check_complete()?;
        fan.cones = fan.enumerate_faces();
        Ok(fan)
    }

    /// Attach an ample divisor, checked.
    pub fn with_ample(mut self, ample: Divisor) -> Result<Fan> {
        if ample.len() != self.rays.len() {
            return Err(Error::RankMismatch { expected: self.rays.len(), found: ample.len() });
        }
        if !self.is_ample(&ample) {
            return Err(Error::Precondition("supplied divisor is not ample".into()));
        }
        self.ample = Some(ample);
        Ok(self)
    }

    fn check_complete(&self) -> Result<()> {
        let used: BTreeSet<usize> = self.max_cones.iter().flat_map(|c| c.rays.iter().copied()).collect();
        if used.len() != self.rays.len() {
            return Err(Error::NotComplete("some ray lies in no maximal cone".into()));
        }
        let mut facet_owners: BTreeMap<Cone, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, c) in self.max_cones.iter().enumerate() {
            for (pos, f) in c.facets() {
                facet_owners.entry(f).or_default().push((ci, pos));
            }
        }
        let mut adj = vec![Vec::new(); self.max_cones.len()];
        for (f, owners) in &facet_owners {
            if owners.len() != 2 {
                return Err(Error::NotComplete(format!("facet {f:?} lies in {} maximal cones", owners.len())));
            }
            let (a, pa) = owners[0];
            let (b, pb) = owners[1];
            // the two cones must lie on opposite sides of the common facet
            let other = &self.rays[self.max_cones[b].rays[pb]];
            if dot(&self.dual[a][pa], other) >= 0 {
                return Err(Error::NotComplete(format!("cones overlap across facet {f:?}")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut reached = vec![false; self.max_cones.len()];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(c) = stack.pop() {
            for &d in &adj[c] {
                if !reached[d] {
                    reached[d] = true;
                    stack.push(d);
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(Error::NotComplete("maximal cones are not connected through facets".into()));
        }
        // An interior point of the first cone must lie in no other cone,
        // which rules out a fan wrapping around more than once.
        let mut p = vec![0i64; self.dim];
        for (w, &r) in self.max_cones[0].rays.iter().enumerate() {
            for (x, y) in p.iter_mut().zip(&self.rays[r]) {
                *x += (w as i64 + 1) * y;
            }
        }
        let hits = self.dual.iter().filter(|d| d.iter().all(|m| dot(m, &p) >= 0)).count();
        if hits != 1 {
            return Err(Error::NotComplete("maximal cones overlap".into()));
        }
        Ok(())
    }

    fn enumerate_faces(&self) -> Vec<Vec<Cone>> {
        let mut by_dim: Vec<BTreeSet<Cone>> = vec![BTreeSet::new(); self.dim + 1];
        for c in &self.max_cones {
            for mask in 0u32..(1 << self.dim) {
                let rays = (0..self.dim).filter(|i| mask >> i & 1 == 1).map(|i| c.rays[i]).collect();
                let face = Cone { rays };
                by_dim[face.dim()].insert(face);
            }
        }
        by_dim.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Cone] {
        &self.max_cones
    }

    /// Cones of dimension `d`, sorted.
    pub fn cones(&self, d: usize) -> &[Cone] {
        &self.cones[d]
    }

    pub fn ample(&self) -> Option<&Divisor> {
        self.ample.as_ref()
    }

    /// Dual basis of the i-th maximal cone.
    pub fn dual_basis(&self, i: usize) -> &[Vec<i64>] {
        &self.dual[i]
    }

    /// Dual ℤ-basis {m_i} with ⟨m_i, ρ_j⟩ = δ_ij for a maximal cone.
    pub fn dual_cone_generators(&self, cone: &Cone) -> Result<Vec<Vec<i64>>> {
        match self.max_cones.iter().position(|c| c == cone) {
            Some(i) => Ok(self.dual[i].clone()),
            None => Err(Error::NonSmooth(cone.rays.clone())),
        }
    }

    /// Inequalities ⟨u, ρ⟩ ≥ 0 cutting out the dual cone, for any cone.
    pub fn cone_inequalities(&self, cone: &Cone) -> Vec<Vec<i64>> {
        cone.rays.iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Orientation sign (−1)^i for τ = σ with its i-th ray removed.
    pub fn facet_sign(tau: &Cone, sigma: &Cone) -> Result<i64> {
        if tau.dim() + 1 != sigma.dim() {
            return Err(Error::NotAFacet(tau.rays.clone(), sigma.rays.clone()));
        }
        for (i, f) in sigma.facets() {
            if &f == tau {
                return Ok(if i % 2 == 0 { 1 } else { -1 });
            }
        }
        Err(Error::NotAFacet(tau.rays.clone(), sigma.rays.clone()))
    }

    /// Normal fan of a full-dimensional lattice polytope given by its vertices
    /// (extra non-extreme points are tolerated). Rays are sorted in decreasing
    /// lexicographic order; the polytope's divisor is recorded as ample.
    pub fn from_ample_polytope(points: &[Vec<i64>]) -> Result<Fan> {
        let n = points.first().map(Vec::len).ok_or(Error::NotFullDim)?;
        if n == 0 || points.iter().any(|p| p.len() != n) {
            return Err(Error::NotFullDim);
        }
        let diffs: Vec<Vec<i64>> =
            points.iter().map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect()).collect();
        if int_matrix(&diffs).rank() != n {
            return Err(Error::NotFullDim);
        }
        let mut normals = BTreeSet::new();
        for subset in combinations(points.len(), n) {
            let base = &points[subset[0]];
            let rows: Vec<Vec<i64>> =
                subset[1..].iter().map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect()).collect();
            let ker = if rows.is_empty() { crate::linalg::Subspace::full(n) } else { int_matrix(&rows).kernel() };
            if ker.dim() != 1 {
                continue;
            }
            let normal: Vec<i64> = crate::rational::primitive_integer(&ker.basis()[0])
                .iter()
                .map(|x| i64::try_from(x).expect("normal fits in i64"))
                .collect();
            let h0 = dot(&normal, base);
            let vals: Vec<i64> = points.iter().map(|p| dot(&normal, p) - h0).collect();
            if vals.iter().all(|&v| v >= 0) {
                normals.insert(normal);
            } else if vals.iter().all(|&v| v <= 0) {
                normals.insert(normal.iter().map(|x| -x).collect());
            }
        }
        let rays: Vec<Vec<i64>> = normals.into_iter().rev().collect();
        let offsets: Vec<i64> =
            rays.iter().map(|r| points.iter().map(|p| dot(r, p)).min().expect("nonempty")).collect();
        let mut cones = BTreeSet::new();
        for p in points {
            let tight: Vec<usize> = (0..rays.len()).filter(|&i| dot(&rays[i], p) == offsets[i]).collect();
            let tight_rows: Vec<Vec<i64>> = tight.iter().map(|&i| rays[i].clone()).collect();
            if tight_rows.is_empty() || int_matrix(&tight_rows).rank() < n {
                continue;
            }
            if tight.len() != n {
                return Err(Error::NonSmooth(tight));
            }
            cones.insert(tight);
        }
        let fan = Fan::new(rays, cones.into_iter().collect())?;
        let ample = Divisor::new(offsets.iter().map(|o| -o).collect());
        fan.with_ample(ample)
    }

    /// Stable hex digest of rays and maximal cones.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{:?}|{:?}", self.rays, self.max_cones.iter().map(|c| &c.rays).collect::<Vec<_>>()));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Determinant of a small integer matrix.
pub(crate) fn det(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    let mut m: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| Q::from_integer(x.into())).collect()).collect();
    let mut d = Q::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return 0;
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let pivot = m[c].clone();
        for row in m.iter_mut().skip(c + 1) {
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
    }
    to_i64(&d).expect("integer determinant")
}

/// All k-subsets of 0..n in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::from_ample_polytope(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap()
    }

    #[test]
    fn projective_plane_from_simplex() {
        let f = p2();
        assert_eq!(f.rays(), &[vec![1, 0], vec![0, 1], vec![-1, -1]]);
        assert_eq!(f.max_cones().len(), 3);
        assert_eq!(f.ample().unwrap().coeffs(), &[0, 0, 1]);
        assert_eq!(f.cones(1).len(), 3);
        assert_eq!(f.cones(0).len(), 1);
    }

    #[test]
    fn square_gives_product_of_lines() {
        let f = Fan::from_ample_polytope(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let rays: BTreeSet<Vec<i64>> = f.rays().iter().cloned().collect();
        let expect: BTreeSet<Vec<i64>> = [vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]].into_iter().collect();
        assert_eq!(rays, expect);
        assert_eq!(f.max_cones().len(), 4);
    }

    #[test]
    fn degenerate_polytopes_rejected() {
        assert_eq!(Fan::from_ample_polytope(&[vec![0, 0]]), Err(Error::NotFullDim));
        assert_eq!(Fan::from_ample_polytope(&[vec![0, 0], vec![1, 1], vec![2, 2]]), Err(Error::NotFullDim));
    }

    #[test]
    fn singular_polytope_rejected() {
        // weighted projective plane P(1,1,2)
        let r = Fan::from_ample_polytope(&[vec![0, 0], vec![2, 0], vec![0, 1]]);
        assert!(matches!(r, Err(Error::NonSmooth(_))));
    }

    #[test]
    fn dual_generators() {
        let f = p2();
        let c = Cone::new(vec![0, 1]);
        assert_eq!(f.dual_cone_generators(&c).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        let c = Cone::new(vec![0, 2]);
        let d = f.dual_cone_generators(&c).unwrap();
        for (i, m) in d.iter().enumerate() {
            for (j, &r) in c.rays().iter().enumerate() {
                assert_eq!(dot(m, f.ray(r)), (i == j) as i64);
            }
        }
        assert!(f.dual_cone_generators(&Cone::new(vec![0])).is_err());
        assert_eq!(f.cone_inequalities(&Cone::new(vec![2])), vec![vec![-1, -1]]);
    }

    #[test]
    fn facet_signs() {
        let s = Cone::new(vec![0, 1]);
        assert_eq!(Fan::facet_sign(&Cone::new(vec![1]), &s), Ok(1));
        assert_eq!(Fan::facet_sign(&Cone::new(vec![0]), &s), Ok(-1));
        assert!(Fan::facet_sign(&Cone::new(vec![2]), &s).is_err());
    }

    #[test]
    fn sign_rule_squares_to_zero() {
        for f in
            [p2(), Fan::from_ample_polytope(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap()]
        {
            for d in 2..=f.dim() {
                for sigma in f.cones(d) {
                    let mut acc: BTreeMap<Cone, i64> = BTreeMap::new();
                    for (_, tau) in sigma.facets() {
                        let s1 = Fan::facet_sign(&tau, sigma).unwrap();
                        for (_, chi) in tau.facets() {
                            *acc.entry(chi.clone()).or_default() += s1 * Fan::facet_sign(&chi, &tau).unwrap();
                        }
                    }
                    assert!(acc.values().all(|&v| v == 0));
                }
            }
        }
    }

    #[test]
    fn incomplete_and_overlapping_fans_rejected() {
        let r = Fan::new(vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]);
        assert!(matches!(r, Err(Error::NotComplete(_))));
        assert!(matches!(Fan::new(vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1]]), Err(Error::NotPrimitive(0))));
    }

    #[test]
    fn polytope_roundtrip() {
        let verts = vec![vec![0, 0], vec![3, 0], vec![3, 1], vec![2, 3], vec![1, 4], vec![0, 4]];
        let f = Fan::from_ample_polytope(&verts).unwrap();
        let poly = f.section_polyhedron(f.ample().unwrap());
        let got: BTreeSet<Vec<i64>> =
            poly.vertices().iter().map(|v| v.iter().map(|x| to_i64(x).unwrap()).collect()).collect();
        assert_eq!(got, verts.into_iter().collect());
    }
}
