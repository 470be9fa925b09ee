use super::*;
use crate::cohomology::klyachko_cech;
use crate::fixtures::{f1, hexagon_surface, p2};
use crate::morphism::{check_morphism, is_surjective, kernel_decoration};

fn d(c: &[i64]) -> Divisor {
    Divisor::new(c.to_vec())
}

fn ext34() -> (Arc<Fan>, Divisor, Divisor) {
    (hexagon_surface(), d(&[0, 1, 1, 1, 1, 1]), d(&[0, 0, 1, 2, 1, 0]))
}

#[test]
fn f1_components() {
    let fan = f1();
    let (dm, dp) = (d(&[0, 1, 1, 1]), d(&[0, 0, 1, 0]));
    assert_eq!(ext_dimension(&fan, &dm, &dp).unwrap(), 1);
    let res = universal_extension(&fan, &dm, &dp).unwrap();
    assert_eq!(res.k, 1);
    assert!(!res.trivial);
    assert_eq!(res.untwisted_components(), vec![d(&[0, 0, 1, 1]), d(&[0, 1, 1, 0])]);
    // ∇₊ ⊆ ∇₋, so E splits
    let split = WeilDecoration::split(fan.clone(), &res.untwisted_components()).unwrap();
    assert_eq!(res.decoration, split);
    assert_eq!(res.decoration.len(), 4);
    for f in &res.sequence {
        assert!(check_morphism(f).is_valid());
    }
    assert!(is_surjective(&res.sequence[1], None).unwrap());
    let (ker, _) = kernel_decoration(&res.sequence[1]).unwrap();
    assert_eq!(ker.rank(), 1);
    assert_eq!(ker.divisor(ker.generic()), &d(&[0, 0, 1, 0]));
    assert_eq!(ker.divisor(ker.generic()), &res.untwisted_components()[0].meet(&res.untwisted_components()[1]));
}

#[test]
fn example_pair_on_hexagon_surface() {
    let (fan, dm, dp) = ext34();
    let data = component_data(&fan, &dm, &dp).unwrap();
    assert_eq!(data.k, 1);
    assert_eq!(data.meet, d(&[0, 0, 4, 8, 6, 4]));
    let res = universal_extension(&fan, &dm, &dp).unwrap();
    assert_eq!(res.ext_dim, 1);
    // Q⁺ has the vertex (2, 4) on x + y = 6, so both components keep the D₅ coefficient 6
    assert_eq!(res.component_divisors, vec![d(&[0, 0, 4, 8, 6, 5]), d(&[0, 1, 4, 8, 6, 4])]);
    let dec = &res.decoration;
    assert_eq!(dec.len(), 5);
    let e0 = dec.stratum_of(&dec.unit(0));
    let e1 = dec.stratum_of(&dec.unit(1));
    let diff: Vec<Q> = vec![-Q::one(), Q::one()];
    let k = dec.stratum_of(&diff);
    assert_eq!(dec.divisor(e0), &d(&[0, 0, 1, 1, 1, 1]));
    assert_eq!(dec.divisor(e1), &d(&[0, 1, 1, 1, 1, 0]));
    assert_eq!(dec.divisor(k), &d(&[0, 0, 1, 2, 1, 0]));
    assert_eq!(dec.divisor(dec.generic()), &d(&[0, 0, 1, 1, 1, 0]));
    assert_eq!(dec.hasse_dot().matches("[label=").count(), 5);
    // re-twisting gives the materialised divisors
    let mat = dec.materialise(crate::Twist::Fixed(res.k)).unwrap();
    assert_eq!(mat.plus(e0), &res.component_divisors[0]);
    assert_eq!(res.twisted_decoration().divisor(e1), &res.component_divisors[1]);
}

#[test]
fn ext_dimension_is_h1() {
    let (fan, dm, dp) = ext34();
    let o = WeilDecoration::line_bundle(fan.clone(), &dp - &dm).unwrap();
    assert_eq!(klyachko_cech(&o, &[0, 0])[1], ext_dimension(&fan, &dm, &dp).unwrap());
    let fan = f1();
    for (dm, dp) in [
        ([0, 1, 1, 1], [0, 0, 1, 0]),
        ([0, 0, 2, 1], [0, 0, 1, 0]),
        ([0, 0, 1, 0], [0, 0, 2, 1]),
        ([0, 0, 2, 1], [0, 0, 1, 1]),
    ] {
        let (dm, dp) = (d(&dm), d(&dp));
        let o = WeilDecoration::line_bundle(fan.clone(), &dp - &dm).unwrap();
        assert_eq!(klyachko_cech(&o, &[0, 0])[1], ext_dimension(&fan, &dm, &dp).unwrap(), "{dm:?} {dp:?}");
    }
}

#[test]
fn degenerate_pairs() {
    let fan = p2();
    let h = d(&[0, 0, 1]);
    let res = universal_extension(&fan, &h, &h).unwrap();
    assert!(res.trivial);
    assert_eq!(res.ext_dim, 0);
    assert_eq!(res.decoration.rank(), 1);
    assert!(res.component_divisors.is_empty());
    let res = universal_extension(&fan, &h.scale(2), &h).unwrap();
    assert!(res.trivial);
    assert_eq!(res.component_divisors.len(), 1);
    assert!(matches!(universal_extension(&fan, &d(&[0, 0, -1]), &h), Err(Error::NotNef)));
}

#[test]
fn component_without_cut_is_meet() {
    let (fan, dm, dp) = ext34();
    let data = component_data(&fan, &dm, &dp).unwrap();
    let q = component_polytope(&fan, &data.complex, &data.ambient, &data.meet, &[]).unwrap();
    assert_eq!(q, data.meet);
}

#[test]
fn components_are_unions() {
    let (fan, dm, dp) = ext34();
    let data = component_data(&fan, &dm, &dp).unwrap();
    let inside_q = data.complex.inside(&data.meet_polytope);
    for c in &data.components {
        let dnu = component_polytope(&fan, &data.complex, &data.ambient, &data.meet, c).unwrap();
        let p = fan.section_polyhedron(&dnu);
        let expect = CellSetExt::union(&inside_q, c);
        assert_eq!(data.complex.inside(&p), expect);
        // every coefficient lies between those of Q and the ambient polytope
        let amb = fan.divisor_of_polyhedron(&data.ambient).unwrap();
        assert!(data.meet.leq(&dnu) && dnu.leq(&amb));
    }
}

struct CellSetExt;

impl CellSetExt {
    fn union(a: &crate::cellcx::CellSet, extra: &[usize]) -> crate::cellcx::CellSet {
        crate::cellcx::CellSet::from_indices(a.universe(), a.iter().chain(extra.iter().copied()))
    }
}
