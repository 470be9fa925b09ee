//! Cohomology as hypercohomology of a complex of constructible sheaves on
//! the ample polytope Δ + m, subdivided by the twisted decoration polytopes.

use std::collections::HashMap;

use serde::Serialize;

use crate::cellcx::{subdivide, CellComplex, CellSet, OrderComplex, Subcomplex};
use crate::decoration::{MaterialisedDecoration, Twist, WeilDecoration};
use crate::error::{Error, Result};
use crate::linalg::{sparse_row, CochainComplex, Matrix, SparseRow, Subspace};
use crate::polyhedra::LatticePolyhedron;

use super::{euler::mobius_integers, int_basis};

/// Closed: sheaves on Δ with interiors relative to Δ. Interior: the same
/// sheaves restricted to the honest interior of Δ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Closed,
    Interior,
}

/// A decoration made amply decorated, with its polytopes.
#[derive(Clone, Debug)]
pub struct PolyhedralEngine {
    dec: WeilDecoration,
    mat: MaterialisedDecoration,
    delta: LatticePolyhedron,
    plus: Vec<Option<LatticePolyhedron>>,
    chains: Vec<Vec<usize>>,
    chain_index: HashMap<Vec<usize>, usize>,
    bases: Vec<Vec<Vec<i64>>>,
}

/// The total complex in one degree. `complex` has one row per basis vector
/// and columns in ambient coordinates of the next term.
#[derive(Clone, Debug)]
pub struct TotalComplex {
    pub complex: CochainComplex,
    pub top: usize,
}

impl TotalComplex {
    /// h⁰, …, hⁿ; cohomology in negative degrees would be a bug.
    pub fn dims(&self) -> Result<Vec<usize>> {
        let h = self.complex.cohomology();
        let neg = (-self.complex.lowest) as usize;
        if h[..neg].iter().any(|&x| x > 0) {
            return Err(Error::Mismatch(format!("negative-degree cohomology {:?}", &h[..neg])));
        }
        let mut out = h[neg..].to_vec();
        out.resize(self.top + 1, 0);
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct E1Entry {
    pub ell: usize,
    pub q: usize,
    pub dim: usize,
    pub chains: Vec<Vec<usize>>,
}

/// Dimensions of E₁^{−ℓ,q} = ⊕ S̄₀ ⊗ H̃^{q−1}(P(S_ℓ)) over chains S₀ < … < S_ℓ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectralE1Report {
    pub degree: Vec<i64>,
    pub entries: Vec<E1Entry>,
}

impl SpectralE1Report {
    pub fn dim(&self, ell: usize, q: usize) -> usize {
        self.entries.iter().find(|e| e.ell == ell && e.q == q).map_or(0, |e| e.dim)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightOneReport {
    pub dims: Vec<usize>,
    /// Minimal nonzero strata, in order.
    pub strata: Vec<usize>,
    /// Basis of ker(⊕ S̄_k → E) in the presentation bases of the strata.
    pub ker_a: Vec<Vec<i64>>,
}

impl PolyhedralEngine {
    pub fn new(dec: &WeilDecoration) -> Result<Self> {
        // Δ must be full-dimensional, so at least one copy of Δ₀
        let mat = dec.materialise(Twist::AutoAmple { min: 1 })?;
        let fan = dec.fan();
        let delta = fan.section_polyhedron(mat.delta());
        let plus =
            (0..dec.len()).map(|s| if s == 0 { None } else { Some(fan.section_polyhedron(mat.plus(s))) }).collect();
        let chains = dec.chains();
        let chain_index = chains.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let bases = dec.strata().iter().map(|s| int_basis(s.closure())).collect();
        Ok(PolyhedralEngine { dec: dec.clone(), mat, delta, plus, chains, chain_index, bases })
    }

    pub fn decoration(&self) -> &WeilDecoration {
        &self.dec
    }

    pub fn materialised(&self) -> &MaterialisedDecoration {
        &self.mat
    }

    /// The multiple of Δ₀ used.
    pub fn k(&self) -> u64 {
        self.mat.k()
    }

    pub fn delta(&self) -> &LatticePolyhedron {
        &self.delta
    }

    /// D⁺(S) as a polytope, for a nonzero stratum.
    pub fn plus_polytope(&self, s: usize) -> &LatticePolyhedron {
        self.plus[s].as_ref().expect("nonzero stratum")
    }

    pub fn subdivision(&self, m: &[i64]) -> Result<CellComplex> {
        let cutters: Vec<LatticePolyhedron> = self.plus.iter().flatten().cloned().collect();
        subdivide(&self.delta.translate(m), &cutters)
    }

    /// Ground set and, per stratum, the open set where its sheaf lives.
    pub fn carriers(&self, cx: &CellComplex, variant: Variant) -> (CellSet, Vec<CellSet>) {
        let ground = match variant {
            Variant::Closed => CellSet::full(cx.len()),
            Variant::Interior => cx.interior_cells(),
        };
        let open = self
            .plus
            .iter()
            .map(|p| match (p, variant) {
                (None, _) => CellSet::empty(cx.len()),
                (Some(p), Variant::Closed) => cx.relative_interior(p),
                (Some(p), Variant::Interior) => cx.strict_interior(p).intersection(&ground),
            })
            .collect();
        (ground, open)
    }

    /// P(S) = Δ' ∖ int_Δ' D⁺(S) for every nonzero stratum (empty set at 0).
    pub fn p_sets(&self, cx: &CellComplex) -> Vec<Subcomplex> {
        let (_, open) = self.carriers(cx, Variant::Closed);
        open.iter().enumerate().map(|(s, o)| if s == 0 { CellSet::empty(cx.len()) } else { o.complement() }).collect()
    }

    pub fn total_complex(&self, m: &[i64], variant: Variant) -> Result<TotalComplex> {
        let cx = self.subdivision(m)?;
        Ok(self.assemble(&cx, variant, false))
    }

    /// The same differential on E ⊗ cochains for every chain, ignoring the
    /// closures; a complex containing the total complex, used to check d∘d.
    pub fn ambient_total_complex(&self, m: &[i64], variant: Variant) -> Result<CochainComplex> {
        let cx = self.subdivision(m)?;
        Ok(self.assemble(&cx, variant, true).complex)
    }

    pub fn dims(&self, m: &[i64], variant: Variant) -> Result<Vec<usize>> {
        self.total_complex(m, variant)?.dims()
    }

    fn assemble(&self, cx: &CellComplex, variant: Variant, ambient: bool) -> TotalComplex {
        let n = cx.dim();
        let r = self.dec.rank();
        let (ground, open) = self.carriers(cx, variant);
        let oc = cx.order_complex(&ground);
        let cofaces = cofaces(&oc);
        let height = self.chains.iter().map(|c| c.len() - 1).max().unwrap_or(0);
        let lowest = -(height as i64);
        let nterms = n + height + 1;
        let deg = |gi: usize, s: usize| (oc.simplices()[s].len() - 1 + height) - (self.chains[gi].len() - 1);
        // slots: (chain, simplex) pairs per total degree
        let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nterms];
        let mut slot_of: HashMap<(usize, usize), usize> = HashMap::new();
        for (gi, chain) in self.chains.iter().enumerate() {
            let top = *chain.last().unwrap();
            for (s, simplex) in oc.simplices().iter().enumerate() {
                if open[top].contains(*simplex.last().unwrap()) {
                    let d = deg(gi, s);
                    slot_of.insert((gi, s), slots[d].len());
                    slots[d].push((gi, s));
                }
            }
        }
        let unit: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect();
        let mut dims = vec![0; nterms];
        let mut maps: Vec<Vec<SparseRow>> = vec![Vec::new(); nterms - 1];
        for (d, row_slots) in slots.iter().enumerate() {
            for &(gi, s) in row_slots {
                let chain = &self.chains[gi];
                let ell = chain.len() - 1;
                let basis = if ambient { &unit } else { &self.bases[chain[0]] };
                dims[d] += basis.len();
                if d + 1 == nterms {
                    continue;
                }
                // target slots with signs, shared by every basis vector
                let mut targets: Vec<(usize, i64)> = Vec::new();
                if ell > 0 {
                    for i in 0..=ell {
                        let mut shorter = chain.clone();
                        shorter.remove(i);
                        let gj = self.chain_index[&shorter];
                        targets.push((slot_of[&(gj, s)], if i % 2 == 0 { 1 } else { -1 }));
                    }
                }
                let vsign = if ell.is_multiple_of(2) { 1 } else { -1 };
                for &(t, sg) in &cofaces[s] {
                    if let Some(&slot) = slot_of.get(&(gi, t)) {
                        targets.push((slot, vsign * sg));
                    }
                }
                for b in basis {
                    let entries = targets
                        .iter()
                        .flat_map(|&(slot, sg)| b.iter().enumerate().map(move |(c, &x)| (slot * r + c, sg * x)));
                    maps[d].push(sparse_row(entries));
                }
            }
        }
        TotalComplex { complex: CochainComplex::new(lowest, dims, maps), top: n }
    }

    pub fn e1(&self, m: &[i64]) -> Result<SpectralE1Report> {
        let cx = self.subdivision(m)?;
        let p = self.p_sets(&cx);
        let red: Vec<Vec<usize>> =
            p.iter().enumerate().map(|(s, ps)| if s == 0 { Vec::new() } else { cx.reduced_cohomology(ps) }).collect();
        let mut acc: std::collections::BTreeMap<(usize, usize), E1Entry> = Default::default();
        for chain in &self.chains {
            let ell = chain.len() - 1;
            let d0 = self.bases[chain[0]].len();
            for (qd, &h) in red[*chain.last().unwrap()].iter().enumerate() {
                if h * d0 == 0 {
                    continue;
                }
                let e = acc.entry((ell, qd)).or_insert(E1Entry { ell, q: qd, dim: 0, chains: Vec::new() });
                e.dim += h * d0;
                e.chains.push(chain.clone());
            }
        }
        Ok(SpectralE1Report { degree: m.to_vec(), entries: acc.into_values().collect() })
    }

    /// χ_m = −Σ dim S · μ(S,T) · χ̃(P(T)).
    pub fn euler_mobius(&self, m: &[i64]) -> Result<i64> {
        let cx = self.subdivision(m)?;
        let p = self.p_sets(&cx);
        let mu = mobius_integers(&self.dec);
        let mut chi = 0;
        for t in self.dec.nonzero() {
            let reduced = cx.euler(&p[t]) - 1;
            let w: i64 = self.dec.nonzero().map(|s| self.bases[s].len() as i64 * mu[s][t]).sum();
            chi -= w * reduced;
        }
        Ok(chi)
    }

    /// The mapping cone of ker A ⊗ C̃(P(η)) → ⊕ S̄_k ⊗ C̃(P(S_k)) for
    /// stratifications of height one.
    pub fn height_one(&self, m: &[i64]) -> Result<HeightOneReport> {
        let dec = &self.dec;
        if dec.height() != 1 {
            return Err(Error::NotHeightOne);
        }
        let eta = dec.generic();
        let strata: Vec<usize> = dec.nonzero().filter(|&s| s != eta).collect();
        let r = dec.rank();
        let pres: Vec<&[Vec<crate::rational::Q>]> = strata.iter().map(|&s| dec.stratum(s).basis()).collect();
        let offsets: Vec<usize> = pres
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.len();
                Some(o)
            })
            .collect();
        let cols: Vec<Vec<crate::rational::Q>> = pres.iter().flat_map(|b| b.iter().cloned()).collect();
        let a = Matrix::from_columns(r, &cols);
        if a.rank() != r {
            return Err(Error::ANotSurjective);
        }
        let ker = a.kernel();
        let ker_a = int_basis(&ker);

        let cx = self.subdivision(m)?;
        let p = self.p_sets(&cx);
        let oc = cx.order_complex(&CellSet::full(cx.len()));
        let cof = cofaces(&oc);
        let n = cx.dim();
        let in_p = |set: &CellSet, s: usize| set.contains(*oc.simplices()[s].last().unwrap());
        // reduced cochains: index 0 is the empty simplex, then simplices of P
        let simplices_in = |set: &CellSet| -> Vec<usize> { (0..oc.len()).filter(|&s| in_p(set, s)).collect() };
        let p_eta = &p[eta];
        let eta_simp = simplices_in(p_eta);
        let k_simp: Vec<Vec<usize>> = strata.iter().map(|&s| simplices_in(&p[s])).collect();
        let sdim = |s: usize| oc.simplices()[s].len() as i64 - 1;
        // total degree t runs from −1 to n+1; term index t+1
        let nterms = n + 3;
        let mut part1: Vec<Vec<Option<usize>>> = vec![Vec::new(); nterms]; // slots: None = empty simplex
        let mut slot1: HashMap<Option<usize>, usize> = HashMap::new();
        slot1.insert(None, 0);
        part1[0].push(None);
        for &s in &eta_simp {
            let t = (sdim(s) + 1) as usize;
            slot1.insert(Some(s), part1[t].len());
            part1[t].push(Some(s));
        }
        // part 2 slots: (stratum position, coordinate, simplex) in degree dim+1
        let mut part2: Vec<Vec<(usize, usize, Option<usize>)>> = vec![Vec::new(); nterms];
        let mut slot2: HashMap<(usize, usize, Option<usize>), usize> = HashMap::new();
        for (k, simp) in k_simp.iter().enumerate() {
            for i in 0..pres[k].len() {
                for s in std::iter::once(None).chain(simp.iter().map(|&s| Some(s))) {
                    let t = match s {
                        None => 1,
                        Some(s) => (sdim(s) + 2) as usize,
                    };
                    if t < nterms {
                        slot2.insert((k, i, s), part2[t].len());
                        part2[t].push((k, i, s));
                    }
                }
            }
        }
        let cob = |s: Option<usize>, set: &CellSet| -> Vec<(usize, i64)> {
            match s {
                None => {
                    (0..oc.len()).filter(|&v| oc.simplices()[v].len() == 1 && in_p(set, v)).map(|v| (v, 1)).collect()
                }
                Some(s) => cof[s].iter().copied().filter(|&(t, _)| in_p(set, t)).collect(),
            }
        };
        let mut dims = vec![0; nterms];
        let mut maps: Vec<Vec<SparseRow>> = vec![Vec::new(); nterms - 1];
        for t in 0..nterms {
            // columns of the next term: part 1 in the basis of ker A, then part 2
            let kdim = ker_a.len();
            let p1_cols = part1.get(t + 1).map_or(0, |v| v.len()) * kdim;
            for &s in &part1[t] {
                dims[t] += kdim;
                if t + 1 == nterms {
                    continue;
                }
                for (j, w) in ker_a.iter().enumerate() {
                    let mut e: Vec<(usize, i64)> = Vec::new();
                    for (u, sg) in cob(s, p_eta) {
                        e.push((slot1[&Some(u)] * kdim + j, -sg));
                    }
                    for (k, &off) in offsets.iter().enumerate() {
                        let keep = match s {
                            None => true,
                            Some(s) => in_p(&p[strata[k]], s),
                        };
                        if !keep {
                            continue;
                        }
                        for i in 0..pres[k].len() {
                            if let Some(&slot) = slot2.get(&(k, i, s)) {
                                e.push((p1_cols + slot, w[off + i]));
                            }
                        }
                    }
                    maps[t].push(sparse_row(e));
                }
            }
            for &(k, i, s) in &part2[t] {
                dims[t] += 1;
                if t + 1 == nterms {
                    continue;
                }
                let e = cob(s, &p[strata[k]])
                    .into_iter()
                    .filter_map(|(u, sg)| slot2.get(&(k, i, Some(u))).map(|&slot| (p1_cols + slot, sg)));
                maps[t].push(sparse_row(e));
            }
        }
        let cone = CochainComplex::new(-1, dims, maps);
        debug_assert!(cone.is_complex());
        let h = cone.cohomology();
        if h[0] > 0 || h[nterms - 1] > 0 {
            return Err(Error::Mismatch(format!("cone cohomology outside 0..{n}: {h:?}")));
        }
        Ok(HeightOneReport { dims: h[1..=n + 1].to_vec(), strata, ker_a })
    }
}

/// Signed cofaces of every simplex.
fn cofaces(oc: &OrderComplex) -> Vec<Vec<(usize, i64)>> {
    let mut out = vec![Vec::new(); oc.len()];
    for t in 0..oc.len() {
        for (f, sg) in oc.boundary(t) {
            out[f].push((t, sg));
        }
    }
    out
}

pub fn cohomology_polyhedral(dec: &WeilDecoration, m: &[i64], variant: Variant) -> Result<Vec<usize>> {
    PolyhedralEngine::new(dec)?.dims(m, variant)
}

pub fn spectral_e1(dec: &WeilDecoration, m: &[i64]) -> Result<SpectralE1Report> {
    PolyhedralEngine::new(dec)?.e1(m)
}

pub fn height_one_cone(dec: &WeilDecoration, m: &[i64]) -> Result<HeightOneReport> {
    PolyhedralEngine::new(dec)?.height_one(m)
}

/// Closure of the largest stratum whose positive twist contains all of Δ + m.
pub fn global_sections(dec: &WeilDecoration, m: &[i64]) -> Result<Subspace> {
    let mat = dec.materialise(Twist::AutoPositive { min: 0 })?;
    let fan = dec.fan();
    let delta = fan.section_polyhedron(mat.delta()).translate(m);
    let mut j = 0;
    for s in dec.nonzero() {
        let p = fan.section_polyhedron(mat.plus(s));
        if delta.vertices().iter().all(|v| p.contains(v)) {
            j = dec.join(j, s);
        }
    }
    Ok(dec.stratum(j).closure().clone())
}
