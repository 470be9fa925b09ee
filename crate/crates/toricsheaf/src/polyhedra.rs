//! Toric divisors as the canonical encoding of Σ-compatible polytopes,
//! plus explicit rational polyhedra where geometry is needed.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fan::{combinations, dot, Fan};
use crate::linalg::{rref, Matrix, Subspace};
use crate::rational::{dot_iq, primitive_integer, to_i64, Q};

/// Integer coefficients over the rays of a fan.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Divisor(Vec<i64>);

impl fmt::Debug for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{:?}", self.0)
    }
}

impl Divisor {
    pub fn new(coeffs: Vec<i64>) -> Self {
        Divisor(coeffs)
    }

    pub fn zero(n: usize) -> Self {
        Divisor(vec![0; n])
    }

    /// The prime divisor of ray `i` among `n` rays.
    pub fn prime(n: usize, i: usize) -> Self {
        let mut c = vec![0; n];
        c[i] = 1;
        Divisor(c)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn meet(&self, other: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Coefficientwise order.
    pub fn leq(&self, other: &Divisor) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, k: i64) -> Divisor {
        Divisor(self.0.iter().map(|a| a * k).collect())
    }

    /// Human form such as `D2+4D3`, indexing rays from 1.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if a < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            if a.abs() != 1 {
                s.push_str(&a.abs().to_string());
            }
            s.push_str(&format!("D{}", i + 1));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl Add for &Divisor {
    type Output = Divisor;
    fn add(self, o: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Divisor {
    type Output = Divisor;
    fn sub(self, o: &Divisor) -> Divisor {
        Divisor(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Divisor {
    type Output = Divisor;
    fn neg(self) -> Divisor {
        Divisor(self.0.iter().map(|a| -a).collect())
    }
}

/// A divisor or the formal top element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtDivisor {
    Finite(Divisor),
    Infinity,
}

impl fmt::Debug for ExtDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDivisor::Finite(d) => d.fmt(f),
            ExtDivisor::Infinity => write!(f, "∞"),
        }
    }
}

impl From<Divisor> for ExtDivisor {
    fn from(d: Divisor) -> Self {
        ExtDivisor::Finite(d)
    }
}

impl ExtDivisor {
    pub fn finite(&self) -> Option<&Divisor> {
        match self {
            ExtDivisor::Finite(d) => Some(d),
            ExtDivisor::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtDivisor::Infinity)
    }

    pub fn meet(&self, other: &ExtDivisor) -> ExtDivisor {
        match (self, other) {
            (ExtDivisor::Infinity, x) | (x, ExtDivisor::Infinity) => x.clone(),
            (ExtDivisor::Finite(a), ExtDivisor::Finite(b)) => ExtDivisor::Finite(a.meet(b)),
        }
    }

    pub fn leq(&self, other: &ExtDivisor) -> bool {
        match (self, other) {
            (_, ExtDivisor::Infinity) => true,
            (ExtDivisor::Infinity, _) => false,
            (ExtDivisor::Finite(a), ExtDivisor::Finite(b)) => a.leq(b),
        }
    }

    /// Add a finite divisor; ∞ stays ∞.
    pub fn shift(&self, d: &Divisor) -> ExtDivisor {
        match self {
            ExtDivisor::Finite(a) => ExtDivisor::Finite(a + d),
            ExtDivisor::Infinity => ExtDivisor::Infinity,
        }
    }
}

/// Inequality ⟨u, normal⟩ ≥ offset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub normal: Vec<i64>,
    pub offset: Q,
}

impl Inequality {
    pub fn value(&self, u: &[Q]) -> Q {
        dot_iq(&self.normal, u) - &self.offset
    }
}

/// A bounded rational polyhedron with both representations.
/// `tail` is always empty for the complete fans used here but is kept
/// so that inputs with a recession cone can be rejected explicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolyhedron {
    dim: usize,
    vertices: Vec<Vec<Q>>,
    tail: Vec<Vec<i64>>,
    inequalities: Vec<Inequality>,
}

impl LatticePolyhedron {
    pub fn empty(dim: usize) -> Self {
        LatticePolyhedron { dim, vertices: Vec::new(), tail: Vec::new(), inequalities: Vec::new() }
    }

    /// Vertices of a bounded H-polyhedron, by enumerating intersections of
    /// n independent hyperplanes. The inequalities are kept as given.
    pub fn from_inequalities(dim: usize, inequalities: Vec<Inequality>) -> Self {
        let mut verts = BTreeSet::new();
        for subset in combinations(inequalities.len(), dim) {
            let Some(u) = solve_tight(dim, subset.iter().map(|&i| &inequalities[i])) else {
                continue;
            };
            if inequalities.iter().all(|h| !h.value(&u).is_negative()) {
                verts.insert(u);
            }
        }
        LatticePolyhedron { dim, vertices: verts.into_iter().collect(), tail: Vec::new(), inequalities }
    }

    /// Convex hull of finitely many points, with redundant points removed.
    pub fn from_points(dim: usize, points: &[Vec<Q>]) -> Self {
        let pts: Vec<Vec<Q>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if pts.is_empty() {
            return Self::empty(dim);
        }
        let (vertices, inequalities) = hull(dim, &pts);
        LatticePolyhedron { dim, vertices, tail: Vec::new(), inequalities }
    }

    pub fn with_tail(mut self, tail: Vec<Vec<i64>>) -> Self {
        self.tail = tail;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn tail(&self) -> &[Vec<i64>] {
        &self.tail
    }

    pub fn inequalities(&self) -> &[Inequality] {
        &self.inequalities
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_lattice(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|x| x.is_integer()))
    }

    pub fn contains(&self, u: &[Q]) -> bool {
        !self.is_empty() && self.inequalities.iter().all(|h| !h.value(u).is_negative())
    }

    /// Translate by an integer vector.
    pub fn translate(&self, m: &[i64]) -> Self {
        let mq: Vec<Q> = m.iter().map(|&x| Q::from_integer(x.into())).collect();
        LatticePolyhedron {
            dim: self.dim,
            vertices: self.vertices.iter().map(|v| v.iter().zip(&mq).map(|(a, b)| a + b).collect()).collect(),
            tail: self.tail.clone(),
            inequalities: self
                .inequalities
                .iter()
                .map(|h| Inequality { normal: h.normal.clone(), offset: &h.offset + dot_iq(&h.normal, &mq) })
                .collect(),
        }
    }
}

/// Unique point where the given n inequalities are tight, if the normals
/// are independent.
pub(crate) fn solve_tight<'a>(dim: usize, hs: impl Iterator<Item = &'a Inequality>) -> Option<Vec<Q>> {
    let rows: Vec<Vec<Q>> = hs
        .map(|h| {
            let mut r: Vec<Q> = h.normal.iter().map(|&x| Q::from_integer(x.into())).collect();
            r.push(h.offset.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(rows, dim + 1);
    if pivots.len() != dim || pivots.iter().any(|&p| p >= dim) {
        return None;
    }
    Some(r.iter().map(|row| row[dim].clone()).collect())
}

fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| Q::from_integer(x.into())).collect()
}

fn to_i64_vec(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| i64::try_from(x).expect("coefficient fits in i64")).collect()
}

/// Extreme points and an H-representation of conv(points).
fn hull(dim: usize, pts: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Inequality>) {
    let base = &pts[0];
    let diffs: Vec<Vec<Q>> = pts.iter().map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect()).collect();
    let dir = Subspace::span(dim, diffs.clone());
    let d = dir.dim();
    let mut ineqs = Vec::new();
    // affine hull equations as pairs of inequalities
    for eq in dir.annihilator().basis() {
        let normal = to_i64_vec(&primitive_integer(eq));
        let off = dot_iq(&normal, base);
        ineqs.push(Inequality { normal: normal.iter().map(|x| -x).collect(), offset: -off.clone() });
        ineqs.push(Inequality { normal, offset: off });
    }
    if d == 0 {
        return (vec![base.clone()], ineqs);
    }
    // coordinates in which the affine hull projects injectively
    let (_, pivots) = rref(dir.basis().to_vec(), dim);
    let proj = |p: &Vec<Q>| -> Vec<Q> { pivots.iter().map(|&c| p[c].clone()).collect() };
    let local: Vec<Vec<Q>> = pts.iter().map(proj).collect();
    let mut facets: BTreeSet<Inequality> = BTreeSet::new();
    if d == 1 {
        facets.insert(Inequality { normal: vec![1], offset: local.iter().map(|p| p[0].clone()).min().unwrap() });
        facets.insert(Inequality { normal: vec![-1], offset: -local.iter().map(|p| p[0].clone()).max().unwrap() });
    } else {
        for subset in combinations(local.len(), d) {
            let b = &local[subset[0]];
            let rows: Vec<Vec<Q>> =
                subset[1..].iter().map(|&i| local[i].iter().zip(b).map(|(x, y)| x - y).collect()).collect();
            let ker = Matrix::from_rows(d, rows).kernel();
            if ker.dim() != 1 {
                continue;
            }
            let normal = to_i64_vec(&primitive_integer(&ker.basis()[0]));
            let h0 = dot_iq(&normal, b);
            let vals: Vec<Q> = local.iter().map(|p| dot_iq(&normal, p) - &h0).collect();
            if vals.iter().all(|v| !v.is_negative()) {
                facets.insert(Inequality { normal, offset: h0 });
            } else if vals.iter().all(|v| !v.is_positive()) {
                facets.insert(Inequality { normal: normal.iter().map(|x| -x).collect(), offset: -h0 });
            }
        }
    }
    let facets: Vec<Inequality> = facets.into_iter().collect();
    let mut verts = Vec::new();
    for (p, lp) in pts.iter().zip(&local) {
        let tight: Vec<Vec<i64>> = facets.iter().filter(|h| h.value(lp).is_zero()).map(|h| h.normal.clone()).collect();
        if !tight.is_empty() && Matrix::from_i64(d, &tight).rank() == d {
            verts.push(p.clone());
        }
    }
    for h in facets {
        let mut normal = vec![0; dim];
        for (k, &c) in pivots.iter().enumerate() {
            normal[c] = h.normal[k];
        }
        // the lifted functional reads only the projected coordinates
        ineqs.push(Inequality { normal, offset: h.offset });
    }
    (verts, ineqs)
}

impl Fan {
    /// div(m) = Σ ⟨m, ρ⟩ D_ρ.
    pub fn principal_divisor(&self, m: &[i64]) -> Divisor {
        Divisor(self.rays().iter().map(|r| dot(m, r)).collect())
    }

    /// The vertex of D on the i-th maximal cone: ⟨r, ρ⟩ = −a_ρ for ρ in the cone.
    pub fn cone_vertex(&self, d: &Divisor, cone: usize) -> Vec<i64> {
        let c = &self.max_cones()[cone];
        let mut r = vec![0; self.dim()];
        for (j, &ray) in c.rays().iter().enumerate() {
            let a = d.coeffs()[ray];
            for (x, m) in r.iter_mut().zip(&self.dual_basis(cone)[j]) {
                *x -= a * m;
            }
        }
        r
    }

    fn vertex_slacks(&self, d: &Divisor) -> Vec<(Vec<i64>, Vec<i64>)> {
        (0..self.max_cones().len())
            .map(|i| {
                let v = self.cone_vertex(d, i);
                let slack = self.rays().iter().zip(d.coeffs()).map(|(r, a)| dot(&v, r) + a).collect();
                (v, slack)
            })
            .collect()
    }

    pub fn is_nef(&self, d: &Divisor) -> bool {
        self.vertex_slacks(d).iter().all(|(_, s)| s.iter().all(|&x| x >= 0))
    }

    pub fn is_ample(&self, d: &Divisor) -> bool {
        let vs = self.vertex_slacks(d);
        let strict = vs.iter().enumerate().all(|(i, (_, s))| {
            let cone = self.max_cones()[i].rays();
            s.iter().enumerate().all(|(j, &x)| if cone.contains(&j) { x == 0 } else { x > 0 })
        });
        let distinct: BTreeSet<&Vec<i64>> = vs.iter().map(|(v, _)| v).collect();
        strict && distinct.len() == vs.len()
    }

    /// The inequalities ⟨u, ρ⟩ ≥ −a_ρ.
    pub fn divisor_inequalities(&self, d: &Divisor) -> Vec<Inequality> {
        self.rays()
            .iter()
            .zip(d.coeffs())
            .map(|(r, &a)| Inequality { normal: r.clone(), offset: Q::from_integer((-a).into()) })
            .collect()
    }

    /// {u : ⟨u, ρ⟩ ≥ −a_ρ ∀ρ}. For nef D the vertices are the cone vertices;
    /// otherwise all n-fold intersections are enumerated.
    pub fn section_polyhedron(&self, d: &Divisor) -> LatticePolyhedron {
        let ineqs = self.divisor_inequalities(d);
        if self.is_nef(d) {
            let verts: BTreeSet<Vec<Q>> = (0..self.max_cones().len()).map(|i| qvec(&self.cone_vertex(d, i))).collect();
            LatticePolyhedron {
                dim: self.dim(),
                vertices: verts.into_iter().collect(),
                tail: Vec::new(),
                inequalities: ineqs,
            }
        } else {
            LatticePolyhedron::from_inequalities(self.dim(), ineqs)
        }
    }

    /// D_∇ = −Σ min⟨∇, ρ⟩ D_ρ.
    pub fn divisor_of_polyhedron(&self, p: &LatticePolyhedron) -> Result<Divisor> {
        if !p.tail().is_empty() {
            return Err(Error::TailMismatch);
        }
        if p.dim() != self.dim() {
            return Err(Error::RankMismatch { expected: self.dim(), found: p.dim() });
        }
        if p.is_empty() {
            return Err(Error::Precondition("empty polyhedron has no divisor".into()));
        }
        let mut coeffs = Vec::with_capacity(self.num_rays());
        for r in self.rays() {
            let min = p.vertices().iter().map(|v| dot_iq(r, v)).min().expect("nonempty");
            coeffs.push(-to_i64(&min).ok_or(Error::NonIntegral)?);
        }
        Ok(Divisor(coeffs))
    }

    /// Whether the polyhedron is the section polytope of its own divisor.
    pub fn is_compatible(&self, p: &LatticePolyhedron) -> bool {
        match self.divisor_of_polyhedron(p) {
            Ok(d) => self.is_nef(&d) && self.section_polyhedron(&d).vertices() == p.vertices(),
            Err(_) => false,
        }
    }

    pub fn minkowski_sum(&self, a: &LatticePolyhedron, b: &LatticePolyhedron) -> Result<LatticePolyhedron> {
        if !a.tail().is_empty() || !b.tail().is_empty() {
            return Err(Error::TailMismatch);
        }
        if !self.is_compatible(a) || !self.is_compatible(b) {
            return Err(Error::Precondition("summands must be Σ-compatible lattice polytopes".into()));
        }
        let d = &self.divisor_of_polyhedron(a)? + &self.divisor_of_polyhedron(b)?;
        let out = self.section_polyhedron(&d);
        debug_assert_eq!(out.vertices(), minkowski_hull(a, b).vertices());
        Ok(out)
    }

    /// Intersection of virtual polytopes, given by the divisor meet.
    pub fn virtual_intersection(&self, a: &Divisor, b: &Divisor) -> Divisor {
        a.meet(b)
    }
}

/// Minkowski sum by pairwise vertex sums and a hull.
pub fn minkowski_hull(a: &LatticePolyhedron, b: &LatticePolyhedron) -> LatticePolyhedron {
    let mut pts = Vec::new();
    for u in a.vertices() {
        for v in b.vertices() {
            pts.push(u.iter().zip(v).map(|(x, y)| x + y).collect());
        }
    }
    LatticePolyhedron::from_points(a.dim(), &pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn p2() -> Fan {
        Fan::from_ample_polytope(&[vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap()
    }

    fn pts(v: &[[i64; 2]]) -> Vec<Vec<Q>> {
        v.iter().map(|p| vec![q(p[0]), q(p[1])]).collect()
    }

    #[test]
    fn principal() {
        let f = p2();
        assert_eq!(f.principal_divisor(&[1, 0]).coeffs(), &[1, 0, -1]);
        assert_eq!(f.principal_divisor(&[0, 0]), Divisor::zero(3));
    }

    #[test]
    fn meets() {
        let a = Divisor::new(vec![3, 7, 5]);
        let b = Divisor::new(vec![4, 2, 5]);
        assert_eq!(a.meet(&b).coeffs(), &[3, 2, 5]);
        assert_eq!(ExtDivisor::Infinity.meet(&a.clone().into()), a.clone().into());
        assert!(ExtDivisor::from(a).leq(&ExtDivisor::Infinity));
    }

    #[test]
    fn section_polytopes() {
        let f = p2();
        let simplex = f.section_polyhedron(&Divisor::prime(3, 2));
        assert_eq!(simplex.vertices(), &pts(&[[0, 0], [0, 1], [1, 0]])[..]);
        assert!(f.section_polyhedron(&-&Divisor::prime(3, 2)).is_empty());
        assert_eq!(f.section_polyhedron(&Divisor::zero(3)).vertices(), &pts(&[[0, 0]])[..]);
        assert_eq!(f.divisor_of_polyhedron(&simplex).unwrap(), Divisor::prime(3, 2));
    }

    #[test]
    fn positivity() {
        let f = p2();
        let h = Divisor::prime(3, 2);
        assert!(f.is_nef(&h) && f.is_ample(&h));
        assert!(f.is_nef(&Divisor::zero(3)) && !f.is_ample(&Divisor::zero(3)));
        assert!(!f.is_nef(&-&h) && !f.is_ample(&-&h));
    }

    #[test]
    fn hull_removes_interior_points() {
        let p = LatticePolyhedron::from_points(2, &pts(&[[0, 0], [2, 0], [0, 2], [1, 0], [0, 1], [1, 1]]));
        assert_eq!(p.vertices(), &pts(&[[0, 0], [0, 2], [2, 0]])[..]);
        assert!(p.contains(&[q(1), q(1)]));
        assert!(!p.contains(&[q(2), q(1)]));
        let seg = LatticePolyhedron::from_points(2, &pts(&[[0, 0], [1, 1], [2, 2]]));
        assert_eq!(seg.vertices(), &pts(&[[0, 0], [2, 2]])[..]);
        assert!(seg.contains(&[q(1), q(1)]) && !seg.contains(&[q(1), q(0)]));
    }

    #[test]
    fn minkowski() {
        let f = p2();
        let s = f.section_polyhedron(&Divisor::prime(3, 2));
        let twice = f.minkowski_sum(&s, &s).unwrap();
        assert_eq!(twice, f.section_polyhedron(&Divisor::prime(3, 2).scale(2)));
        let shifted = s.translate(&[1, 0]);
        let sum = f.minkowski_sum(&s, &shifted).unwrap();
        assert_eq!(sum.vertices(), twice.translate(&[1, 0]).vertices());
        let origin = f.section_polyhedron(&Divisor::zero(3));
        assert_eq!(f.minkowski_sum(&s, &origin).unwrap().vertices(), s.vertices());
    }

    #[test]
    fn non_nef_section_polytope_uses_all_intersections() {
        // On the Hirzebruch surface F1 with the ρ4 inequality pushed far out,
        // the polytope is a triangle with a vertex on non-adjacent rays.
        let f = Fan::new(
            vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .unwrap();
        let d = Divisor::new(vec![0, 0, 2, 10]);
        assert!(!f.is_nef(&d));
        let p = f.section_polyhedron(&d);
        assert_eq!(p.vertices(), &pts(&[[0, 0], [0, 2], [2, 0]])[..]);
    }
}
