//! The complex over the cones of the fan whose terms are evaluation spaces.

use std::collections::HashMap;

use crate::decoration::WeilDecoration;
use crate::fan::{Cone, Fan};
use crate::linalg::{composite_is_zero, sparse_row, CochainComplex, SparseRow};

use super::int_basis;

/// Degree-m complex: C^p = ⊕_{τ ∈ Σ(n−p)} E_τ(m), with the differential
/// sending E_τ to its facets τ' by the sign of τ' in τ. Rows use ambient
/// coordinates of E on each target cone, so they are integer vectors.
pub fn cech_complex(dec: &WeilDecoration, m: &[i64]) -> CochainComplex {
    assemble(dec, |c| int_basis(dec.eval_cone(c, m)))
}

/// The same complex with E itself on every cone, in unit bases. The rows of
/// `cech_complex` live in its coordinates.
pub fn cech_ambient_complex(dec: &WeilDecoration) -> CochainComplex {
    let r = dec.rank();
    assemble(dec, |_| (0..r).map(|i| (0..r).map(|j| (i == j) as i64).collect()).collect())
}

/// d∘d = 0 in degree m, each differential composed with the next one of
/// the ambient complex.
pub fn cech_squares_to_zero(dec: &WeilDecoration, m: &[i64]) -> bool {
    let sub = cech_complex(dec, m);
    let amb = cech_ambient_complex(dec);
    amb.is_complex() && sub.maps.iter().zip(amb.maps.iter().skip(1)).all(|(a, b)| composite_is_zero(a, b))
}

fn assemble(dec: &WeilDecoration, basis: impl Fn(&Cone) -> Vec<Vec<i64>>) -> CochainComplex {
    let fan = dec.fan();
    let n = fan.dim();
    let r = dec.rank();
    let index: Vec<HashMap<&Cone, usize>> =
        (0..=n).map(|d| fan.cones(d).iter().enumerate().map(|(i, c)| (c, i)).collect()).collect();
    let bases: Vec<Vec<Vec<Vec<i64>>>> = (0..=n).map(|d| fan.cones(d).iter().map(&basis).collect()).collect();
    let mut dims = Vec::new();
    let mut maps = Vec::new();
    for p in 0..=n {
        let d = n - p;
        dims.push(bases[d].iter().map(Vec::len).sum());
        if p == n {
            break;
        }
        let mut rows: Vec<SparseRow> = Vec::new();
        for (ci, tau) in fan.cones(d).iter().enumerate() {
            for b in &bases[d][ci] {
                let entries = tau.facets().flat_map(|(_, f)| {
                    let sign = Fan::facet_sign(&f, tau).expect("facet");
                    let col = index[d - 1][&f] * r;
                    b.iter().enumerate().map(move |(c, &x)| (col + c, sign * x))
                });
                rows.push(sparse_row(entries));
            }
        }
        maps.push(rows);
    }
    CochainComplex::new(0, dims, maps)
}

/// Dimensions h⁰, …, hⁿ in degree m.
pub fn klyachko_cech(dec: &WeilDecoration, m: &[i64]) -> Vec<usize> {
    cech_complex(dec, m).cohomology()
}
