//! Universal torus-invariant extensions of one nef line bundle by another,
//! built from the connected components of ∇₋ ∖ ∇₊ after an ample twist.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::cellcx::{subdivide, CellComplex};
use crate::decoration::{least_k, StratumSpec, WeilDecoration};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::Matrix;
use crate::morphism::{is_exact, DecorationMorphism};
use crate::polyhedra::{Divisor, LatticePolyhedron};
use crate::rational::{dot_iq, Q};

/// Everything computed on the twisted side: the ambient polytope ∇₋⁺,
/// the intersection Q⁺ and the components of their difference.
#[derive(Clone, Debug)]
pub struct ComponentData {
    pub k: u64,
    pub delta: Divisor,
    pub ambient: LatticePolyhedron,
    pub meet: Divisor,
    pub meet_polytope: LatticePolyhedron,
    pub complex: CellComplex,
    pub components: Vec<Vec<usize>>,
}

fn check_nef(fan: &Fan, d: &Divisor) -> Result<()> {
    if d.len() != fan.num_rays() {
        return Err(Error::RankMismatch { expected: fan.num_rays(), found: d.len() });
    }
    if fan.is_nef(d) {
        Ok(())
    } else {
        Err(Error::NotNef)
    }
}

/// Smallest k ≥ 0 with D₋ + kΔ₀ ample and (D₋ ∧ D₊) + kΔ₀ nef.
pub fn extension_twist(fan: &Fan, dminus: &Divisor, dplus: &Divisor) -> Result<u64> {
    let delta0 = fan.ample().ok_or(Error::NoAmpleAvailable)?;
    let meet = dminus.meet(dplus);
    least_k(0, |k| {
        let dk = delta0.scale(k as i64);
        fan.is_ample(&(dminus + &dk)) && fan.is_nef(&(&meet + &dk))
    })
}

pub fn component_data(fan: &Fan, dminus: &Divisor, dplus: &Divisor) -> Result<ComponentData> {
    check_nef(fan, dminus)?;
    check_nef(fan, dplus)?;
    let k = extension_twist(fan, dminus, dplus)?;
    let delta = fan.ample().expect("checked").scale(k as i64);
    let ambient = fan.section_polyhedron(&(dminus + &delta));
    let meet = &dminus.meet(dplus) + &delta;
    let meet_polytope = fan.section_polyhedron(&meet);
    let complex = subdivide(&ambient, std::slice::from_ref(&meet_polytope))?;
    let outside = complex.inside(&meet_polytope).complement();
    let mut components = complex.connected_components(&outside);
    // deterministic order: by the divisor of the resulting polytope
    let mut keyed: Vec<(Divisor, Vec<usize>)> =
        components.drain(..).map(|c| (per_ray_divisor(fan, &complex, &ambient, &meet, &c), c)).collect();
    keyed.sort();
    let components = keyed.into_iter().map(|(_, c)| c).collect();
    Ok(ComponentData { k, delta, ambient, meet, meet_polytope, complex, components })
}

/// dim Ext¹(O(D₋), O(D₊))₀: one less than the number of components of
/// ∇₋ ∖ ∇₊, and 0 when the difference is empty.
pub fn ext_dimension(fan: &Fan, dminus: &Divisor, dplus: &Divisor) -> Result<usize> {
    Ok(component_data(fan, dminus, dplus)?.components.len().saturating_sub(1))
}

fn per_ray_divisor(fan: &Fan, cx: &CellComplex, ambient: &LatticePolyhedron, q: &Divisor, comp: &[usize]) -> Divisor {
    let amb = fan.divisor_of_polyhedron(ambient).expect("ambient polytope is bounded");
    let coeffs = fan
        .rays()
        .iter()
        .enumerate()
        .map(|(i, ray)| {
            let bound = Q::from_integer((-q.coeffs()[i]).into());
            // some point of the component lies strictly below Q in direction ρ
            let below = comp.iter().any(|&c| cx.v_rep(c).iter().any(|v| dot_iq(ray, v) < bound));
            if below {
                amb.coeffs()[i]
            } else {
                q.coeffs()[i]
            }
        })
        .collect();
    Divisor::new(coeffs)
}

/// The divisor of Q ∪ C for a component C of ambient ∖ Q, given as cells
/// of `cx`. The result must be a nef divisor whose vertices are vertices of
/// Q or of the ambient polytope.
pub fn component_polytope(
    fan: &Fan,
    cx: &CellComplex,
    ambient: &LatticePolyhedron,
    q: &Divisor,
    comp: &[usize],
) -> Result<Divisor> {
    let d = per_ray_divisor(fan, cx, ambient, q, comp);
    if !fan.is_nef(&d) {
        return Err(Error::VertexLeak);
    }
    let qp = fan.section_polyhedron(q);
    let allowed: BTreeSet<&Vec<Q>> = ambient.vertices().iter().chain(qp.vertices()).collect();
    let p = fan.section_polyhedron(&d);
    if p.vertices().iter().all(|v| allowed.contains(v)) {
        Ok(d)
    } else {
        Err(Error::VertexLeak)
    }
}

/// The universal extension 0 → Ext^∨ ⊗ O(D₊) → E → O(D₋) → 0.
#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub ext_dim: usize,
    /// D_{∇_ν}, twisted by k·Δ₀.
    pub component_divisors: Vec<Divisor>,
    /// The decoration of E, untwisted.
    pub decoration: WeilDecoration,
    /// ι and (1 … 1), untwisted.
    pub sequence: [DecorationMorphism; 2],
    pub k: u64,
    pub delta: Divisor,
    /// Set when there are no nontrivial extensions.
    pub trivial: bool,
}

impl ExtensionResult {
    /// The decoration of E twisted back by k·Δ₀.
    pub fn twisted_decoration(&self) -> WeilDecoration {
        self.decoration.twist(&self.delta)
    }

    pub fn untwisted_components(&self) -> Vec<Divisor> {
        self.component_divisors.iter().map(|d| d - &self.delta).collect()
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()
}

/// A sheaf V ⊗ O(D) with the single generic stratum.
fn trivial_of_rank(fan: &Arc<Fan>, rank: usize, d: &Divisor) -> Result<WeilDecoration> {
    if rank == 0 {
        return Ok(WeilDecoration::zero_sheaf(fan.clone()));
    }
    let full = (0..rank).map(|i| unit(rank, i)).collect();
    WeilDecoration::new(fan.clone(), rank, vec![StratumSpec::zero(), StratumSpec::new(full, d.clone())])
}

pub fn universal_extension(fan: &Arc<Fan>, dminus: &Divisor, dplus: &Divisor) -> Result<ExtensionResult> {
    let data = component_data(fan, dminus, dplus)?;
    let delta = data.delta.clone();
    let comps: Vec<Divisor> = data
        .components
        .iter()
        .map(|c| component_polytope(fan, &data.complex, &data.ambient, &data.meet, c))
        .collect::<Result<_>>()?;
    let trivial = comps.len() <= 1;
    let s = comps.len().saturating_sub(1);
    let untwist = |d: &Divisor| d - &delta;

    let rank = s + 1;
    let decoration = if trivial {
        WeilDecoration::line_bundle(fan.clone(), dminus.clone())?
    } else {
        let mut specs = vec![StratumSpec::zero()];
        for (nu, d) in comps.iter().enumerate() {
            specs.push(StratumSpec::new(vec![unit(rank, nu)], untwist(d)));
        }
        let q = untwist(&data.meet);
        if &q != dplus {
            let ker = (1..rank).map(|nu| iota_column(rank, nu)).collect();
            specs.push(StratumSpec::new(ker, dplus.clone()));
        }
        specs.push(StratumSpec::new((0..rank).map(|i| unit(rank, i)).collect(), q));
        WeilDecoration::new(fan.clone(), rank, specs)?
    };

    let sub = trivial_of_rank(fan, s, dplus)?;
    let quotient = WeilDecoration::line_bundle(fan.clone(), dminus.clone())?;
    let iota = if s == 0 {
        Matrix::zeros(rank, 0)
    } else {
        Matrix::from_columns(rank, &(1..rank).map(|nu| iota_column(rank, nu)).collect::<Vec<_>>())
    };
    let ones = Matrix::from_rows(rank, vec![vec![Q::one(); rank]]);
    let sequence = [
        DecorationMorphism::new(sub, decoration.clone(), iota)?,
        DecorationMorphism::new(decoration.clone(), quotient, ones)?,
    ];
    let report = is_exact(&sequence, None)?;
    if !report.exact {
        return Err(Error::Mismatch(format!("extension sequence is not exact: {:?}", report.witness)));
    }
    Ok(ExtensionResult { ext_dim: s, component_divisors: comps, decoration, sequence, k: data.k, delta, trivial })
}

/// e_ν − e_0.
fn iota_column(rank: usize, nu: usize) -> Vec<Q> {
    let mut v = unit(rank, nu);
    v[0] = -Q::one();
    v
}

#[cfg(test)]
mod tests;
