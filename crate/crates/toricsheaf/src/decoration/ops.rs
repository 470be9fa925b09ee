//! Constructions of decorations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{StratumSpec, WeilDecoration};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{Matrix, Subspace};
use crate::polyhedra::{Divisor, ExtDivisor};
use crate::rational::Q;

/// Default bound on the number of strata while building hom stratifications.
pub const DEFAULT_STRATA_CAP: usize = 4096;

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Merge an intersection-closed family of closures with values into the
/// canonical stratification: one stratum per value D, with closure the span
/// of everything valued ≥ D. Bases of closures already present are kept.
fn canonical_from(
    fan: Arc<Fan>,
    rank: usize,
    family: &[(Subspace, Vec<Vec<Q>>, ExtDivisor)],
) -> Result<WeilDecoration> {
    let values: BTreeSet<&Divisor> = family.iter().filter_map(|(_, _, d)| d.finite()).collect();
    let mut specs = vec![StratumSpec::zero()];
    for d in values {
        let target = ExtDivisor::Finite(d.clone());
        let closure =
            family.iter().filter(|(_, _, v)| target.leq(v)).fold(Subspace::zero(rank), |acc, (c, _, _)| acc.sum(c));
        let basis = family
            .iter()
            .find(|(c, _, _)| *c == closure)
            .map(|(_, b, _)| b.clone())
            .unwrap_or_else(|| closure.basis().to_vec());
        specs.push(StratumSpec { closure: basis, divisor: target });
    }
    WeilDecoration::new(fan, rank, specs).map_err(|_| Error::NotCoarsenable)
}

impl WeilDecoration {
    /// O(D): strata {0, E} on E = ℚ.
    pub fn line_bundle(fan: Arc<Fan>, d: Divisor) -> Result<Self> {
        WeilDecoration::new(fan, 1, vec![StratumSpec::zero(), StratumSpec::new(vec![vec![Q::one()]], d)])
    }

    /// The zero sheaf.
    pub fn zero_sheaf(fan: Arc<Fan>) -> Self {
        WeilDecoration::new(fan, 0, vec![StratumSpec::zero()]).expect("zero decoration is valid")
    }

    /// E' ⊕ E'' with product strata and meets of divisors.
    pub fn direct_sum(&self, other: &WeilDecoration) -> Result<Self> {
        self.check_fan(other)?;
        let (r1, r2) = (self.rank, other.rank);
        let lift = |v: &Vec<Q>, offset: usize| {
            let mut w = vec![Q::zero(); r1 + r2];
            for (i, x) in v.iter().enumerate() {
                w[offset + i] = x.clone();
            }
            w
        };
        let mut specs = Vec::new();
        for a in &self.strata {
            for b in &other.strata {
                let mut basis: Vec<Vec<Q>> = a.basis.iter().map(|v| lift(v, 0)).collect();
                basis.extend(b.basis.iter().map(|v| lift(v, r1)));
                specs.push(StratumSpec { closure: basis, divisor: a.divisor.meet(&b.divisor) });
            }
        }
        WeilDecoration::new(self.fan.clone(), r1 + r2, specs)
    }

    /// E ⊗ O(D): add D to every finite divisor.
    pub fn twist(&self, d: &Divisor) -> Self {
        let mut out = self.clone();
        for s in out.strata.iter_mut() {
            s.divisor = s.divisor.shift(d);
        }
        out
    }

    pub fn is_canonical(&self) -> bool {
        let ds: BTreeSet<&ExtDivisor> = self.strata.iter().map(|s| &s.divisor).collect();
        ds.len() == self.strata.len()
    }

    /// Strata merged by equal divisor.
    pub fn canonical_stratification(&self) -> Result<Self> {
        let family: Vec<(Subspace, Vec<Vec<Q>>, ExtDivisor)> =
            self.strata.iter().map(|s| (s.closure.clone(), s.basis.clone(), s.divisor.clone())).collect();
        canonical_from(self.fan.clone(), self.rank, &family)
    }

    /// Hom(E, F) on r_F × r_E matrices, flattened row by row.
    pub fn hom_decoration(&self, target: &WeilDecoration) -> Result<Self> {
        self.hom_decoration_capped(target, DEFAULT_STRATA_CAP)
    }

    pub fn hom_decoration_capped(&self, target: &WeilDecoration, cap: usize) -> Result<Self> {
        self.check_fan(target)?;
        let (re, rf) = (self.rank, target.rank);
        let h = re * rf;
        if h == 0 {
            return Ok(WeilDecoration::zero_sheaf(self.fan.clone()));
        }
        // C[(s, t)] = {φ : φ(closure s) ⊆ closure t}
        let mut conds: BTreeMap<(usize, usize), Subspace> = BTreeMap::new();
        for s in self.nonzero() {
            for t in 0..target.len() {
                let ann = target.strata[t].closure.annihilator();
                let mut rows = Vec::new();
                for w in ann.basis() {
                    for b in self.strata[s].closure.basis() {
                        let mut row = vec![Q::zero(); h];
                        for i in 0..rf {
                            for j in 0..re {
                                if !w[i].is_zero() && !b[j].is_zero() {
                                    row[i * re + j] = &w[i] * &b[j];
                                }
                            }
                        }
                        rows.push(row);
                    }
                }
                let c = if rows.is_empty() { Subspace::full(h) } else { Matrix::from_rows(h, rows).kernel() };
                conds.insert((s, t), c);
            }
        }
        let mut flats: BTreeSet<Subspace> = BTreeSet::new();
        flats.insert(Subspace::full(h));
        let distinct: BTreeSet<&Subspace> = conds.values().collect();
        for c in distinct {
            let new: Vec<Subspace> = flats.iter().map(|l| l.intersect(c)).collect();
            flats.extend(new);
            if flats.len() > cap {
                return Err(Error::BlowUp(cap));
            }
        }
        let mut family = Vec::new();
        for l in flats {
            let mut value = ExtDivisor::Infinity;
            for s in self.nonzero() {
                // smallest target stratum receiving the generic image of closure(s)
                let t = (0..target.len()).find(|&t| l.is_subspace_of(&conds[&(s, t)])).expect("generic target");
                if t == 0 {
                    continue;
                }
                let d = target.divisor(t) - self.divisor(s);
                value = value.meet(&ExtDivisor::Finite(d));
            }
            let basis = l.basis().to_vec();
            family.push((l, basis, value));
        }
        canonical_from(self.fan.clone(), h, &family)
    }

    /// Hom(E, O).
    pub fn dual_decoration(&self) -> Result<Self> {
        let trivial = WeilDecoration::line_bundle(self.fan.clone(), Divisor::zero(self.fan.num_rays()))?;
        self.hom_decoration(&trivial)
    }

    /// Direct sum of line bundles O(D_i), canonically stratified.
    pub fn split(fan: Arc<Fan>, divisors: &[Divisor]) -> Result<Self> {
        let mut acc = WeilDecoration::zero_sheaf(fan.clone());
        for d in divisors {
            acc = acc.direct_sum(&WeilDecoration::line_bundle(fan.clone(), d.clone())?)?;
        }
        Ok(acc)
    }

    /// The coordinate vector eᵢ of E.
    pub fn unit(&self, i: usize) -> Vec<Q> {
        unit(self.rank, i)
    }
}
