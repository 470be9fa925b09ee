//! Morphisms of decorated sheaves and the criteria that reduce sheaf
//! statements to linear algebra on evaluation spaces.
//!
//! Compatibility is only checked at generic points: a point e of a stratum S
//! maps into φ(closure(S)), whose points lie in strata at or below the
//! stratum T of its generic point, so D'(φ(e)) ≥ D'(T) ≥ D(S) as soon as
//! D(S) ≤ D'(T).

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{int_basis, DegreeBox};
use crate::decoration::{StratumSpec, WeilDecoration};
use crate::error::{Error, Result};
use crate::fan::dot;
use crate::linalg::{sparse_row, CochainComplex, Matrix, SparseRow, Subspace};
use crate::polyhedra::Divisor;
use crate::rational::Q;

/// A linear map E → E' between the spaces of two decorations on one fan.
#[derive(Clone, Debug, PartialEq)]
pub struct DecorationMorphism {
    source: WeilDecoration,
    target: WeilDecoration,
    matrix: Matrix,
}

impl DecorationMorphism {
    /// `matrix` has one row per coordinate of the target.
    pub fn new(source: WeilDecoration, target: WeilDecoration, matrix: Matrix) -> Result<Self> {
        source.check_fan(&target)?;
        if matrix.nrows() != target.rank() || matrix.ncols() != source.rank() {
            return Err(Error::Precondition(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.rank(),
                source.rank()
            )));
        }
        Ok(DecorationMorphism { source, target, matrix })
    }

    pub fn from_i64(source: WeilDecoration, target: WeilDecoration, rows: &[Vec<i64>]) -> Result<Self> {
        let ncols = source.rank();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Precondition(format!("matrix rows must have length {ncols}")));
        }
        Self::new(source, target, Matrix::from_i64(ncols, rows))
    }

    pub fn identity(dec: &WeilDecoration) -> Self {
        DecorationMorphism { source: dec.clone(), target: dec.clone(), matrix: Matrix::identity(dec.rank()) }
    }

    pub fn source(&self) -> &WeilDecoration {
        &self.source
    }

    pub fn target(&self) -> &WeilDecoration {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// ψ ∘ φ.
    pub fn then(&self, psi: &DecorationMorphism) -> Result<Self> {
        if psi.source != self.target {
            return Err(Error::NotComposable("target and source differ".into()));
        }
        Self::new(self.source.clone(), psi.target.clone(), psi.matrix.mul(&self.matrix))
    }
}

/// A nonzero source stratum whose divisor exceeds the divisor at the generic
/// point of its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub stratum: usize,
    pub image_stratum: usize,
    pub source_divisor: Vec<i64>,
    pub target_divisor: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismReport {
    pub violations: Vec<Violation>,
}

impl MorphismReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_morphism(phi: &DecorationMorphism) -> MorphismReport {
    let mut violations = Vec::new();
    for s in phi.source.nonzero() {
        let image = phi.source.stratum(s).closure().image(&phi.matrix);
        if image.is_zero() {
            continue;
        }
        let t = phi.target.generic_stratum(&image);
        let (ds, dt) = (phi.source.divisor(s), phi.target.divisor(t));
        if !ds.leq(dt) {
            violations.push(Violation {
                stratum: s,
                image_stratum: t,
                source_divisor: ds.coeffs().to_vec(),
                target_divisor: dt.coeffs().to_vec(),
            });
        }
    }
    MorphismReport { violations }
}

/// Where a sequence fails to be exact: the object position (0 is the
/// leftmost object) and the chart and degree, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessWitness {
    pub position: usize,
    pub cone: Option<usize>,
    pub degree: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactnessReport {
    pub exact: bool,
    pub witness: Option<ExactnessWitness>,
    /// Number of (chart, degree) pairs examined.
    pub checked: usize,
}

/// Representative degrees for every maximal cone: evaluation spaces on U_σ
/// depend only on how each ⟨m, ρ⟩, ρ ∈ σ(1), compares with the thresholds
/// −a_ρ(S), so one value per threshold interval covers all of M.
pub fn chart_grid(decs: &[&WeilDecoration]) -> Vec<(usize, Vec<i64>)> {
    let fan = decs[0].fan();
    let n = fan.dim();
    let mut out = Vec::new();
    for (c, cone) in fan.max_cones().iter().enumerate() {
        let levels: Vec<Vec<i64>> = cone
            .rays()
            .iter()
            .map(|&r| {
                let mut t: BTreeSet<i64> =
                    decs.iter().flat_map(|d| d.nonzero().map(move |s| -d.divisor(s).coeffs()[r])).collect();
                let low = t.iter().next().map_or(0, |x| x - 1);
                t.insert(low);
                t.into_iter().collect()
            })
            .collect();
        let dual = fan.dual_basis(c);
        let mut coords = vec![Vec::new()];
        for l in &levels {
            coords = coords.into_iter().flat_map(|p| l.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
        }
        for cs in coords {
            let mut m = vec![0i64; n];
            for (j, cj) in cs.iter().enumerate() {
                for (mi, uj) in m.iter_mut().zip(&dual[j]) {
                    *mi += cj * uj;
                }
            }
            out.push((c, m));
        }
    }
    out
}

fn region_points(decs: &[&WeilDecoration], region: Option<&DegreeBox>) -> Vec<(usize, Vec<i64>)> {
    match region {
        None => chart_grid(decs),
        Some(b) => {
            let pts = b.points();
            (0..decs[0].fan().max_cones().len()).flat_map(|c| pts.iter().map(move |m| (c, m.clone()))).collect()
        }
    }
}

/// Exactness of U₀ → U₁ → … at every inner and both outer positions:
/// ker(f_{i+1}) ∩ Uᵢ = fᵢ(U_{i−1}), with zero maps at the ends.
fn first_inexact(spaces: &[Subspace], maps: &[Matrix], kernels: &[Subspace]) -> Option<usize> {
    (0..spaces.len()).find(|&i| {
        let incoming = if i == 0 { Subspace::zero(spaces[0].ambient()) } else { spaces[i - 1].image(&maps[i - 1]) };
        let outgoing = spaces[i].intersect(&kernels[i]);
        incoming != outgoing
    })
}

/// Exactness of 0 → A₀ → A₁ → … → A_k → 0 as sheaves, tested on evaluation
/// spaces of every maximal chart. Nonzero composites show up as failures. Without a region the per-chart grid is used,
/// which decides exactness over all of M; the underlying vector spaces are
/// always tested too.
pub fn is_exact(seq: &[DecorationMorphism], region: Option<&DegreeBox>) -> Result<ExactnessReport> {
    if seq.is_empty() {
        return Ok(ExactnessReport { exact: true, witness: None, checked: 0 });
    }
    for (i, w) in seq.windows(2).enumerate() {
        if w[0].target != w[1].source {
            return Err(Error::NotComposable(format!("map {} does not end where map {} starts", i, i + 1)));
        }
    }
    let objects: Vec<&WeilDecoration> = std::iter::once(&seq[0].source).chain(seq.iter().map(|f| &f.target)).collect();
    let maps: Vec<Matrix> = seq.iter().map(|f| f.matrix.clone()).collect();
    let mut kernels: Vec<Subspace> = maps.iter().map(Matrix::kernel).collect();
    kernels.push(Subspace::full(objects[objects.len() - 1].rank()));

    let points = region_points(&objects, region);
    let fan = objects[0].fan().clone();
    let failure = points.par_iter().find_map_first(|(c, m)| {
        let cone = &fan.max_cones()[*c];
        let spaces: Vec<Subspace> = objects.iter().map(|d| d.eval_cone(cone, m).clone()).collect();
        first_inexact(&spaces, &maps, &kernels).map(|p| ExactnessWitness {
            position: p,
            cone: Some(*c),
            degree: Some(m.clone()),
        })
    });
    if failure.is_some() {
        return Ok(ExactnessReport { exact: false, witness: failure, checked: points.len() });
    }
    let full: Vec<Subspace> = objects.iter().map(|d| Subspace::full(d.rank())).collect();
    let witness =
        first_inexact(&full, &maps, &kernels).map(|p| ExactnessWitness { position: p, cone: None, degree: None });
    Ok(ExactnessReport { exact: witness.is_none(), witness, checked: points.len() + 1 })
}

/// Surjectivity as a sheaf map: φ maps every local evaluation space of the
/// source onto that of the target.
pub fn is_surjective(phi: &DecorationMorphism, region: Option<&DegreeBox>) -> Result<bool> {
    phi.source.check_fan(&phi.target)?;
    let fan = phi.source.fan().clone();
    let points = region_points(&[&phi.source, &phi.target], region);
    Ok(points.par_iter().all(|(c, m)| {
        let cone = &fan.max_cones()[*c];
        phi.source.eval_cone(cone, m).image(&phi.matrix) == *phi.target.eval_cone(cone, m)
    }))
}

impl WeilDecoration {
    /// The decoration induced on the subspace spanned by independent vectors
    /// `basis`, written in the coordinates of that basis: a vector keeps the
    /// divisor it has in E.
    pub fn restrict(&self, basis: &[Vec<Q>]) -> Result<WeilDecoration> {
        let k = basis.len();
        let sub = Subspace::span(self.rank(), basis.to_vec());
        if sub.dim() != k {
            return Err(Error::Precondition("restriction basis is not independent".into()));
        }
        if k == 0 {
            return Ok(WeilDecoration::zero_sheaf(self.fan().clone()));
        }
        let values: BTreeSet<&Divisor> = self.nonzero().map(|s| self.divisor(s)).collect();
        let mut found: BTreeMap<Subspace, Divisor> = BTreeMap::new();
        for d in values {
            let level = self.join_where(|e| d.leq(e));
            let w = self.stratum(level).closure().intersect(&sub);
            if w.is_zero() || found.contains_key(&w) {
                continue;
            }
            let value = self.divisor(self.generic_stratum(&w)).clone();
            found.insert(w, value);
        }
        let mut specs = vec![StratumSpec::zero()];
        for (w, d) in found {
            let coords: Vec<Vec<Q>> =
                w.basis().iter().map(|v| Subspace::coordinates(basis, v).expect("vector lies in the span")).collect();
            specs.push(StratumSpec::new(coords, d));
        }
        WeilDecoration::new(self.fan().clone(), k, specs)
    }
}

/// The kernel of φ with its induced decoration, and the inclusion into the source.
pub fn kernel_decoration(phi: &DecorationMorphism) -> Result<(WeilDecoration, DecorationMorphism)> {
    let ker = phi.matrix.kernel();
    let basis = ker.basis().to_vec();
    let dec = phi.source.restrict(&basis)?;
    let inclusion = Matrix::from_columns(phi.source.rank(), &basis);
    let inclusion = if basis.is_empty() { Matrix::zeros(phi.source.rank(), 0) } else { inclusion };
    let incl = DecorationMorphism::new(dec.clone(), phi.source.clone(), inclusion)?;
    Ok((dec, incl))
}

/// The resolution of a decorated sheaf by the sheaves closure(S₀) ⊗ O(D(S_ℓ))
/// over strict chains S₀ < … < S_ℓ of nonzero strata, with the chain of
/// length ℓ in degree −ℓ and the augmentation onto E in degree 1.
#[derive(Clone, Debug)]
pub struct ChainComplexOverStrata {
    dec: WeilDecoration,
    terms: Vec<Vec<Vec<usize>>>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl ChainComplexOverStrata {
    pub fn decoration(&self) -> &WeilDecoration {
        &self.dec
    }

    /// Number of resolution terms, excluding E.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Chains with ℓ steps.
    pub fn term(&self, l: usize) -> &[Vec<usize>] {
        &self.terms[l]
    }

    /// (closure(S₀), divisor(S_ℓ)) of a chain.
    pub fn summand(&self, chain: &[usize]) -> (&Subspace, &Divisor) {
        (self.dec.stratum(chain[0]).closure(), self.dec.divisor(*chain.last().unwrap()))
    }

    /// Faces of a chain with their signs: omitting Sᵢ carries (−1)^i.
    pub fn faces(&self, chain: &[usize]) -> Vec<(usize, i64)> {
        if chain.len() < 2 {
            return Vec::new();
        }
        (0..chain.len())
            .map(|i| {
                let mut f = chain.to_vec();
                f.remove(i);
                (self.index[&f], if i % 2 == 0 { 1 } else { -1 })
            })
            .collect()
    }

    /// Each summand tensored up to E: terms ⊕ E, so composites can be checked
    /// entrywise.
    pub fn ambient_complex(&self) -> CochainComplex {
        self.assemble(|_| true, |chain| identity_basis(self.dec.rank(), chain), Subspace::full(self.dec.rank()))
    }

    /// The complex of degree-m sections over the chart of a maximal cone.
    pub fn evaluate(&self, cone: usize, m: &[i64]) -> CochainComplex {
        let fan = self.dec.fan();
        let sigma = &fan.max_cones()[cone];
        let pairing: Vec<i64> = sigma.rays().iter().map(|&r| dot(m, fan.ray(r))).collect();
        let active = |chain: &[usize]| {
            let d = self.dec.divisor(*chain.last().unwrap());
            sigma.rays().iter().zip(&pairing).all(|(&r, &p)| p >= -d.coeffs()[r])
        };
        let basis = |chain: &[usize]| int_basis(self.dec.stratum(chain[0]).closure());
        self.assemble(active, basis, self.dec.eval_cone(sigma, m).clone())
    }

    pub fn is_exact_at(&self, cone: usize, m: &[i64]) -> bool {
        self.evaluate(cone, m).cohomology().iter().all(|&h| h == 0)
    }

    /// First chart and degree of the per-chart grid where exactness fails.
    pub fn first_inexact(&self) -> Option<(usize, Vec<i64>)> {
        chart_grid(&[&self.dec]).into_par_iter().find_first(|(c, m)| !self.is_exact_at(*c, m))
    }

    fn assemble(
        &self,
        active: impl Fn(&[usize]) -> bool,
        basis: impl Fn(&[usize]) -> Vec<Vec<i64>>,
        top: Subspace,
    ) -> CochainComplex {
        let r = self.dec.rank();
        let h = self.terms.len();
        // degree −ℓ is stored at position h − 1 − ℓ, E at position h
        let mut dims = vec![0usize; h + 1];
        let mut maps: Vec<Vec<SparseRow>> = vec![Vec::new(); h];
        for l in (0..h).rev() {
            let pos = h - 1 - l;
            for chain in &self.terms[l] {
                if !active(chain) {
                    continue;
                }
                for v in basis(chain) {
                    dims[pos] += 1;
                    let row = if l == 0 {
                        sparse_row(v.iter().enumerate().map(|(c, &x)| (c, x)))
                    } else {
                        sparse_row(
                            self.faces(chain)
                                .into_iter()
                                .flat_map(|(f, sg)| v.iter().enumerate().map(move |(c, &x)| (f * r + c, sg * x))),
                        )
                    };
                    maps[pos].push(row);
                }
            }
        }
        dims[h] = top.dim();
        CochainComplex::new(-(h as i64) + 1, dims, maps)
    }
}

fn identity_basis(r: usize, _chain: &[usize]) -> Vec<Vec<i64>> {
    (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect()
}

/// The canonical resolution; `max_len` must bound the height of the stratification.
pub fn canonical_resolution(dec: &WeilDecoration, max_len: usize) -> Result<ChainComplexOverStrata> {
    let height = dec.height();
    if max_len < height {
        return Err(Error::Precondition(format!("stratification has height {height} > {max_len}")));
    }
    let chains = dec.chains();
    let steps = chains.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut terms: Vec<Vec<Vec<usize>>> = vec![Vec::new(); steps];
    for c in &chains {
        terms[c.len() - 1].push(c.clone());
    }
    let mut index = BTreeMap::new();
    for t in &terms {
        for (i, c) in t.iter().enumerate() {
            index.insert(c.clone(), i);
        }
    }
    let cx = ChainComplexOverStrata { dec: dec.clone(), terms, index };
    if !cx.ambient_complex().is_complex() {
        return Err(Error::Precondition("resolution differentials do not square to zero".into()));
    }
    Ok(cx)
}
