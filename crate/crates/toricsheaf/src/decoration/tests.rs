use std::sync::Arc;

use super::*;
use crate::fixtures::{self, p2, tangent_p2, P2_RHO0};
use crate::rational::q;

fn qv(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

fn d3(a: i64, b: i64, c: i64) -> Divisor {
    Divisor::new(vec![a, b, c])
}

#[test]
fn tangent_is_valid_and_sorted() {
    let t = tangent_p2(0);
    assert!(t.validate().is_empty());
    assert_eq!(t.len(), 5);
    assert!(t.stratum(0).closure().is_zero());
    assert!(t.stratum(t.generic()).closure().is_full());
    assert_eq!(t.height(), 1);
    assert!(t.is_canonical());
}

#[test]
fn violations_reported() {
    let fan = p2();
    let line = |v: &[i64], d: Divisor| StratumSpec::new(vec![qv(v)], d);
    let full = || vec![qv(&[1, 0]), qv(&[0, 1])];
    // generic divisor is not the meet of the two lines
    let specs = vec![
        StratumSpec::zero(),
        line(&[1, 0], d3(1, 0, 0)),
        line(&[0, 1], d3(0, 1, 0)),
        StratumSpec::new(full(), d3(-1, 0, 0)),
    ];
    let bad = validate_parts(&fan, 2, &specs);
    assert!(bad.iter().any(|b| b.contains("not the meet")), "{bad:?}");
    let specs = vec![line(&[1, 0], d3(1, 0, 0)), StratumSpec::new(full(), d3(0, 0, 0))];
    let bad = validate_parts(&fan, 2, &specs);
    assert!(bad.iter().any(|b| b.contains("zero stratum missing")));
    assert!(WeilDecoration::with_zero(fan.clone(), 2, specs).is_ok());
}

#[test]
fn intersections_must_be_strata() {
    // two planes in ℚ³ meeting in a line that is not a stratum
    let fan = fixtures::p3();
    let z = Divisor::zero(4);
    let specs = vec![
        StratumSpec::zero(),
        StratumSpec::new(vec![qv(&[1, 0, 0]), qv(&[0, 1, 0])], Divisor::prime(4, 0)),
        StratumSpec::new(vec![qv(&[1, 0, 0]), qv(&[0, 0, 1])], Divisor::prime(4, 1)),
        StratumSpec::new(vec![qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])], z),
    ];
    let bad = validate_parts(&fan, 3, &specs);
    assert!(bad.iter().any(|b| b.contains("meet outside")), "{bad:?}");
}

#[test]
fn canonical_merges_equal_divisors() {
    let fan = p2();
    let d = d3(1, 2, 0);
    let o = WeilDecoration::line_bundle(fan.clone(), d.clone()).unwrap();
    let sum = o.direct_sum(&o).unwrap();
    assert_eq!(sum.len(), 4);
    let c = sum.canonical_stratification().unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(c.divisor(c.generic()), &d);
    assert_eq!(c.canonical_stratification().unwrap(), c);

    let o2 = WeilDecoration::line_bundle(fan, d3(0, 1, 0)).unwrap();
    let mixed = o.direct_sum(&o2).unwrap();
    // the second axis carries the generic value and is absorbed
    assert_eq!(mixed.len(), 4);
    let c = mixed.canonical_stratification().unwrap();
    assert_eq!(c.len(), 3);
    assert!(!mixed.is_canonical());
    assert_eq!(mixed.divisor(mixed.generic()), &d.meet(&d3(0, 1, 0)));
}

#[test]
fn generic_strata() {
    let t = tangent_p2(0);
    let rho0 = Subspace::span(2, vec![qv(&[-1, -1])]);
    let s = t.generic_stratum(&rho0);
    assert_eq!(t.divisor(s), &Divisor::prime(3, P2_RHO0));
    let off = Subspace::span(
        2,
        vec![qv(&[0, -1])].into_iter().map(|v| v.iter().zip(&qv(&[1, 0])).map(|(a, b)| a + b).collect()).collect(),
    );
    assert_eq!(t.generic_stratum(&off), t.generic());
    assert_eq!(t.generic_stratum(&Subspace::full(2)), t.generic());
    assert_eq!(t.generic_stratum(&Subspace::zero(2)), 0);
}

#[test]
fn generic_stratum_is_smallest_closure_containing() {
    let t = tangent_p2(0).direct_sum(&WeilDecoration::line_bundle(p2(), d3(1, 0, 0)).unwrap()).unwrap();
    for a in -2..=2 {
        for b in -2..=2 {
            for c in 0..=1 {
                let v = Subspace::span(3, vec![qv(&[a, b, c]), qv(&[1, 0, 0])]);
                let by_search = t.generic_stratum(&v);
                let by_meet = (0..t.len()).find(|&s| v.is_subspace_of(t.stratum(s).closure())).unwrap();
                assert_eq!(by_search, by_meet);
            }
        }
    }
}

#[test]
fn klyachko_of_tangent_and_cotangent() {
    let t = tangent_p2(0);
    let fan = t.fan().clone();
    for r in 0..3 {
        let line = Subspace::span(2, vec![fan.ray(r).iter().map(|&x| q(x)).collect()]);
        assert!(t.klyachko_filtration(r, 0).is_full());
        assert_eq!(t.klyachko_filtration(r, 1), line);
        assert!(t.klyachko_filtration(r, 2).is_zero());
        assert!(t.klyachko_filtration(r, -1_000_000).is_full());
    }
    let omega = t.dual_decoration().unwrap();
    for r in 0..3 {
        let perp = Subspace::span(2, vec![fan.ray(r).iter().map(|&x| q(x)).collect()]).annihilator();
        assert!(omega.klyachko_filtration(r, -1).is_full());
        assert_eq!(omega.klyachko_filtration(r, 0), perp);
        assert!(omega.klyachko_filtration(r, 1).is_zero());
    }
}

#[test]
fn cotangent_formula() {
    // D(u) = −Σ_{⟨u,ρ⟩≠0} D_ρ
    let omega = tangent_p2(0).dual_decoration().unwrap();
    let fan = omega.fan().clone();
    for u in [[1i64, 0], [0, 1], [1, -1], [2, 3], [1, 1]] {
        let s = omega.stratum_of(&qv(&u));
        let expect: Vec<i64> = fan.rays().iter().map(|r| if dot(&u, r) != 0 { -1 } else { 0 }).collect();
        assert_eq!(omega.divisor(s).coeffs(), &expect[..], "u = {u:?}");
    }
}

#[test]
fn duals() {
    let fan = p2();
    let d = d3(2, -1, 3);
    let o = WeilDecoration::line_bundle(fan.clone(), d.clone()).unwrap();
    let dual = o.dual_decoration().unwrap();
    assert_eq!(dual.divisor(dual.generic()), &-&d);
    // dual of ⊕ O(D_ρ): coordinate hyperplane complements get −D_ρ
    let s = WeilDecoration::split(fan.clone(), &[Divisor::prime(3, 0), Divisor::prime(3, 1)]).unwrap();
    let sd = s.dual_decoration().unwrap();
    assert_eq!(sd.divisor(sd.stratum_of(&qv(&[1, 0]))), &d3(-1, 0, 0));
    assert_eq!(sd.divisor(sd.stratum_of(&qv(&[0, 1]))), &d3(0, -1, 0));
    assert_eq!(sd.divisor(sd.stratum_of(&qv(&[1, 1]))), &d3(-1, -1, 0));
    for dec in [tangent_p2(0), tangent_p2(-2), s, fixtures::kaneyama_e2()] {
        let c = dec.canonical_stratification().unwrap();
        assert_eq!(dec.dual_decoration().unwrap().dual_decoration().unwrap(), c);
    }
}

#[test]
fn hom_with_trivial() {
    let fan = p2();
    let o = WeilDecoration::line_bundle(fan.clone(), Divisor::zero(3)).unwrap();
    let t = tangent_p2(1);
    assert_eq!(o.hom_decoration(&t).unwrap(), t);
    assert_eq!(t.hom_decoration(&o).unwrap(), t.dual_decoration().unwrap());
    let end = t.hom_decoration(&t).unwrap();
    assert!(end.validate().is_empty());
    assert_eq!(end.rank(), 4);
    assert!(matches!(t.hom_decoration_capped(&t, 3), Err(Error::BlowUp(3))));
}

#[test]
fn twist_and_materialise() {
    let t = tangent_p2(0);
    let m = t.materialise(Twist::AutoAmple { min: 0 }).unwrap();
    assert_eq!(m.k(), 1);
    assert_eq!(m.plus(t.generic()), &Divisor::prime(3, P2_RHO0));
    let s0 = t.stratum_of(&qv(&[-1, -1]));
    assert_eq!(m.plus(s0), &Divisor::prime(3, P2_RHO0).scale(2));
    for l in 1..4 {
        assert_eq!(tangent_p2(l).materialise(Twist::AutoAmple { min: 0 }).unwrap().k(), 0);
        assert_eq!(tangent_p2(-l).materialise(Twist::AutoAmple { min: 0 }).unwrap().k(), l as u64 + 1);
    }
    let bare = Arc::new(
        Fan::new(vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap(),
    );
    let o = WeilDecoration::line_bundle(bare, Divisor::zero(3)).unwrap();
    assert!(matches!(o.materialise(Twist::AutoAmple { min: 0 }), Err(Error::NoAmpleAvailable)));
}

#[test]
fn eval_spaces() {
    let fan = p2();
    let t = tangent_p2(0);
    let sigma0 = crate::fan::Cone::new(vec![0, 1]);
    let e = t.eval_cone(&sigma0, &[1, 0]);
    assert!(e.contains(&qv(&[-1, -1])));
    assert!(t.eval_cone(&sigma0, &[-5, -5]).is_zero());
    let o = WeilDecoration::line_bundle(fan.clone(), Divisor::prime(3, P2_RHO0)).unwrap();
    for (i, c) in fan.max_cones().iter().enumerate() {
        let v = fan.cone_vertex(&Divisor::prime(3, P2_RHO0), i);
        assert!(o.eval_cone(c, &v).is_full());
    }
    // global evaluation is the intersection of the local ones
    let m = t.materialise(Twist::AutoAmple { min: 0 }).unwrap();
    let tw = t.twist(m.delta());
    for a in -3..=3 {
        for b in -3..=3 {
            let g = m.eval_global(&[a, b]).unwrap();
            let inter =
                fan.max_cones().iter().fold(Subspace::full(2), |acc, c| acc.intersect(tw.eval_cone(c, &[a, b])));
            assert_eq!(g, &inter);
        }
    }
}

#[test]
fn local_freeness() {
    assert!(tangent_p2(0).is_locally_free());
    let fan = p2();
    let s = WeilDecoration::split(fan, &[d3(1, 0, 0), d3(0, 2, -1), d3(0, 0, 1)]).unwrap();
    assert!(s.is_locally_free());
    // three lines in a plane, each jumping along one ray of a single cone of P³
    let fan = fixtures::p3();
    let mut specs = vec![StratumSpec::zero()];
    for (i, v) in [[1i64, 0], [0, 1], [1, 1]].iter().enumerate() {
        specs.push(StratumSpec::new(vec![qv(v)], Divisor::prime(4, i)));
    }
    specs.push(StratumSpec::new(vec![qv(&[1, 0]), qv(&[0, 1])], Divisor::zero(4)));
    let bad = WeilDecoration::new(fan.clone(), 2, specs).unwrap();
    assert!(!bad.is_locally_free());
    assert!(fixtures::tangent(&fan).is_locally_free());
}

#[test]
fn hasse() {
    let fan = p2();
    let o1 = WeilDecoration::line_bundle(fan.clone(), d3(1, 0, 0)).unwrap();
    let o2 = WeilDecoration::line_bundle(fan.clone(), d3(0, 1, 0)).unwrap();
    let dot = o1.direct_sum(&o2).unwrap().hasse_dot();
    // a diamond: zero, two lines, generic
    assert_eq!(dot.matches("[label=").count(), 4);
    assert_eq!(dot.matches("->").count(), 4);
    assert_eq!(o1.hasse_dot().matches("[label=").count(), 2);
}

#[test]
fn chains_of_tangent() {
    let t = tangent_p2(0);
    let c = t.chains();
    assert_eq!(c.len(), 4 + 3);
    assert!(c.iter().all(|ch| ch.windows(2).all(|w| t.leq(w[0], w[1]))));
}

#[test]
fn kaneyama_kernel_route() {
    // E₂^∨ is the kernel of ⊕ O(−A−4D_i) → O(−A); check its dual matches the fixture
    let e2 = fixtures::kaneyama_e2();
    assert!(e2.validate().is_empty());
    assert!(e2.is_locally_free());
}
