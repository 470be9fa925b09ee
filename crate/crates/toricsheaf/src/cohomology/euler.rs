use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::decoration::WeilDecoration;
use crate::error::Result;
use crate::linalg::Matrix;
use crate::rational::q;

use super::{degree_support_box, DegreeBox, PolyhedralEngine};

/// Inc[S][T] = 1 iff S ≤ T, over all strata including zero.
pub fn incidence(dec: &WeilDecoration) -> Matrix {
    let k = dec.len();
    Matrix::from_rows(k, (0..k).map(|s| (0..k).map(|t| q(dec.leq(s, t) as i64)).collect()).collect())
}

/// The Möbius function as the inverse of the incidence matrix.
pub fn mobius(dec: &WeilDecoration) -> Matrix {
    incidence(dec).inverse().expect("incidence matrices are unitriangular")
}

/// μ(S,T) as the signed count Σ (−1)^ℓ of chains S = S₀ < … < S_ℓ = T.
pub fn mobius_by_chains(dec: &WeilDecoration) -> Matrix {
    let k = dec.len();
    let mut mu = vec![vec![0i64; k]; k];
    for (s, row) in mu.iter_mut().enumerate() {
        let mut stack = vec![(s, 0usize)];
        while let Some((last, ell)) = stack.pop() {
            row[last] += if ell % 2 == 0 { 1 } else { -1 };
            for t in 0..k {
                if t != last && dec.leq(last, t) {
                    stack.push((t, ell + 1));
                }
            }
        }
    }
    Matrix::from_rows(k, mu.into_iter().map(|r| r.into_iter().map(q).collect()).collect())
}

pub(crate) fn mobius_integers(dec: &WeilDecoration) -> Vec<Vec<i64>> {
    let mu = mobius(dec);
    (0..dec.len()).map(|s| (0..dec.len()).map(|t| mu.get(s, t).to_integer().to_i64().unwrap()).collect()).collect()
}

/// Degree-m Euler characteristic through the Möbius formula.
pub fn euler_mobius(dec: &WeilDecoration, m: &[i64]) -> Result<i64> {
    PolyhedralEngine::new(dec)?.euler_mobius(m)
}

/// The Möbius formula summed over the auto box.
pub fn euler_total_mobius(dec: &WeilDecoration) -> Result<i64> {
    let engine = PolyhedralEngine::new(dec)?;
    degree_support_box(dec).points().iter().map(|m| engine.euler_mobius(m)).sum()
}

/// χ^T(E) = Σ_T (Σ_S dim S · μ(S,T)) χ^T(O(D(T))), each line bundle being
/// materialised on its own. Returned as degree ↦ coefficient, zeros dropped.
pub fn euler_equivariant(dec: &WeilDecoration, degree_box: &DegreeBox) -> Result<BTreeMap<Vec<i64>, i64>> {
    let mu = mobius_integers(dec);
    let mut out: BTreeMap<Vec<i64>, i64> = BTreeMap::new();
    for t in dec.nonzero() {
        let w: i64 = dec.nonzero().map(|s| dec.stratum(s).dim() as i64 * mu[s][t]).sum();
        if w == 0 {
            continue;
        }
        let line = WeilDecoration::line_bundle(dec.fan().clone(), dec.divisor(t).clone())?;
        let engine = PolyhedralEngine::new(&line)?;
        for m in degree_box.points() {
            let chi = engine.euler_mobius(&m)?;
            *out.entry(m).or_default() += w * chi;
        }
    }
    out.retain(|_, c| *c != 0);
    Ok(out)
}

/// dim^⊤ · Inc^{−1}, indexed by stratum.
pub fn stratum_weights(dec: &WeilDecoration) -> Vec<i64> {
    let mu = mobius_integers(dec);
    (0..dec.len()).map(|t| (0..dec.len()).map(|s| dec.stratum(s).dim() as i64 * mu[s][t]).sum()).collect()
}
