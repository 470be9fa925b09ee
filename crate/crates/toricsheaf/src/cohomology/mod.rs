//! Graded cohomology of decorated sheaves: the Čech oracle over the fan,
//! the polyhedral route over a subdivided polytope, and Euler
//! characteristics through the Möbius function of the stratification.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoration::WeilDecoration;
use crate::error::{Error, Result};
use crate::linalg::Subspace;

mod cech;
mod euler;
mod polyhedral;

pub use cech::{cech_ambient_complex, cech_complex, cech_squares_to_zero, klyachko_cech};
pub use euler::{
    euler_equivariant, euler_mobius, euler_total_mobius, incidence, mobius, mobius_by_chains, stratum_weights,
};
pub use polyhedral::{
    cohomology_polyhedral, global_sections, height_one_cone, spectral_e1, E1Entry, HeightOneReport, PolyhedralEngine,
    SpectralE1Report, TotalComplex, Variant,
};

pub(crate) fn int_basis(s: &Subspace) -> Vec<Vec<i64>> {
    s.integer_basis().iter().map(|v| v.iter().map(|x| x.to_i64().expect("basis entry fits in i64")).collect()).collect()
}

/// A product of integer intervals in M.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl DegreeBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        DegreeBox { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, m: &[i64]) -> bool {
        m.iter().zip(&self.lo).zip(&self.hi).all(|((x, l), h)| l <= x && x <= h)
    }

    pub fn inflate(&self, by: i64) -> Self {
        DegreeBox { lo: self.lo.iter().map(|x| x - by).collect(), hi: self.hi.iter().map(|x| x + by).collect() }
    }

    /// Lattice points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            out = out.into_iter().flat_map(|p| (*l..=*h).map(move |x| [p.clone(), vec![x]].concat())).collect();
        }
        out
    }

    /// Lattice points at distance one outside the box.
    pub fn shell(&self) -> Vec<Vec<i64>> {
        self.inflate(1).points().into_iter().filter(|m| !self.contains(m)).collect()
    }

    pub fn hull(&self, other: &DegreeBox) -> Self {
        DegreeBox {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| *a.max(b)).collect(),
        }
    }
}

/// Bounding box of the local vertices r_σ(S) of all nonzero strata, inflated by 1.
pub fn degree_support_box(dec: &WeilDecoration) -> DegreeBox {
    let fan = dec.fan();
    let n = fan.dim();
    let mut lo = vec![0; n];
    let mut hi = vec![0; n];
    let mut first = true;
    for s in dec.nonzero() {
        for c in 0..fan.max_cones().len() {
            let v = fan.cone_vertex(dec.divisor(s), c);
            for i in 0..n {
                if first {
                    lo[i] = v[i];
                    hi[i] = v[i];
                } else {
                    lo[i] = lo[i].min(v[i]);
                    hi[i] = hi[i].max(v[i]);
                }
            }
            first = false;
        }
    }
    DegreeBox { lo, hi }.inflate(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cech,
    Polyhedral,
    Interior,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cech => "cech",
            Method::Polyhedral => "polyhedral",
            Method::Interior => "interior",
        }
    }
}

/// Cohomology dimensions for every degree of a box; degrees outside it
/// are zero, as verified on the surrounding shell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedCohomologyTable {
    pub method: Method,
    pub degree_box: DegreeBox,
    pub twist: u64,
    pub entries: BTreeMap<Vec<i64>, Vec<usize>>,
}

impl GradedCohomologyTable {
    pub fn dims(&self, m: &[i64]) -> Vec<usize> {
        self.entries.get(m).cloned().unwrap_or_else(|| vec![0; self.degree_box.dim() + 1])
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (&Vec<i64>, &Vec<usize>)> {
        self.entries.iter().filter(|(_, d)| d.iter().any(|&x| x > 0))
    }

    /// Σ_m h^ℓ_m for each ℓ.
    pub fn totals(&self) -> Vec<usize> {
        let mut t = vec![0; self.degree_box.dim() + 1];
        for d in self.entries.values() {
            for (a, b) in t.iter_mut().zip(d) {
                *a += b;
            }
        }
        t
    }

    pub fn euler(&self) -> i64 {
        self.totals().iter().enumerate().map(|(l, &h)| if l % 2 == 0 { h as i64 } else { -(h as i64) }).sum()
    }

    /// Same dimensions in every degree, regardless of method or twist.
    pub fn same_dims(&self, other: &GradedCohomologyTable) -> bool {
        let keys: std::collections::BTreeSet<&Vec<i64>> = self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter().all(|m| self.dims(m) == other.dims(m))
    }
}

/// Zero-check of the shell just outside the box, by the Čech oracle.
pub fn check_shell(dec: &WeilDecoration, b: &DegreeBox) -> Result<()> {
    let bad: Option<Vec<i64>> =
        b.shell().into_par_iter().filter(|m| klyachko_cech(dec, m).iter().any(|&h| h > 0)).min();
    match bad {
        Some(m) => Err(Error::ShellNonZero(m)),
        None => Ok(()),
    }
}

/// The full graded table over a box (the auto box when `None`).
pub fn cohomology_table(
    dec: &WeilDecoration,
    method: Method,
    degree_box: Option<DegreeBox>,
) -> Result<GradedCohomologyTable> {
    let b = degree_box.unwrap_or_else(|| degree_support_box(dec));
    check_shell(dec, &b)?;
    let pts = b.points();
    let (twist, results): (u64, Vec<Result<Vec<usize>>>) = match method {
        Method::Cech => (0, pts.par_iter().map(|m| Ok(klyachko_cech(dec, m))).collect()),
        Method::Polyhedral | Method::Interior => {
            let engine = PolyhedralEngine::new(dec)?;
            let v = if method == Method::Interior { Variant::Interior } else { Variant::Closed };
            (engine.k(), pts.par_iter().map(|m| engine.dims(m, v)).collect())
        }
    };
    let mut entries = BTreeMap::new();
    for (m, r) in pts.into_iter().zip(results) {
        entries.insert(m, r?);
    }
    Ok(GradedCohomologyTable { method, degree_box: b, twist, entries })
}

#[cfg(test)]
mod tests;
