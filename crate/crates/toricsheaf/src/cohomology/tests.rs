use super::*;
use crate::decoration::WeilDecoration;
use crate::fixtures::{self, p2, tangent_p2, P2_RHO0};
use crate::polyhedra::Divisor;
use crate::rational::q;

fn o_p2(a: i64) -> WeilDecoration {
    WeilDecoration::line_bundle(p2(), Divisor::prime(3, P2_RHO0).scale(a)).unwrap()
}

fn nonzero(t: &GradedCohomologyTable) -> Vec<(Vec<i64>, Vec<usize>)> {
    t.nonzero().map(|(m, d)| (m.clone(), d.clone())).collect()
}

#[test]
fn box_examples() {
    let b = degree_support_box(&o_p2(-3));
    assert!(b.contains(&[-1, -1]));
    assert_eq!(b, DegreeBox::new(vec![-4, -4], vec![1, 1]));
    assert_eq!(degree_support_box(&o_p2(0)), DegreeBox::new(vec![-1, -1], vec![1, 1]));
    assert_eq!(DegreeBox::new(vec![0], vec![2]).shell(), vec![vec![-1], vec![3]]);
}

#[test]
fn line_bundle_minus_three() {
    let dec = o_p2(-3);
    for method in [Method::Cech, Method::Polyhedral, Method::Interior] {
        let t = cohomology_table(&dec, method, None).unwrap();
        assert_eq!(nonzero(&t), vec![(vec![-1, -1], vec![0, 0, 1])], "{method:?}");
    }
}

#[test]
fn structure_sheaf() {
    let dec = o_p2(0);
    assert_eq!(klyachko_cech(&dec, &[0, 0]), vec![1, 0, 0]);
    assert_eq!(cohomology_polyhedral(&dec, &[0, 0], Variant::Closed).unwrap(), vec![1, 0, 0]);
    assert_eq!(klyachko_cech(&dec, &[1, 0]), vec![0, 0, 0]);
}

#[test]
fn tangent_sections() {
    let t = tangent_p2(0);
    assert_eq!(klyachko_cech(&t, &[0, 0]), vec![2, 0, 0]);
    let table = cohomology_table(&t, Method::Cech, None).unwrap();
    assert_eq!(table.totals(), vec![8, 0, 0]);
    for m in [[1, 0], [-1, 0], [0, 1], [0, -1], [1, -1], [-1, 1]] {
        assert_eq!(table.dims(&m), vec![1, 0, 0]);
    }
    let poly = cohomology_table(&t, Method::Polyhedral, None).unwrap();
    assert!(poly.same_dims(&table));
    for m in table.degree_box.points() {
        assert_eq!(global_sections(&t, &m).unwrap().dim(), table.dims(&m)[0]);
    }
    assert!(global_sections(&t, &[0, 0]).unwrap().is_full());
    assert!(global_sections(&t, &[7, 7]).unwrap().is_zero());
    let o = WeilDecoration::line_bundle(p2(), Divisor::prime(3, P2_RHO0)).unwrap();
    assert_eq!(global_sections(&o, &[0, 1]).unwrap().dim(), 1);
}

#[test]
fn cotangent_height_one() {
    let omega = tangent_p2(-3);
    let t = cohomology_table(&omega, Method::Cech, None).unwrap();
    assert_eq!(nonzero(&t), vec![(vec![-1, -1], vec![0, 1, 0])]);
    let rep = height_one_cone(&omega, &[-1, -1]).unwrap();
    assert_eq!(rep.dims, vec![0, 1, 0]);
    assert_eq!(rep.ker_a.len(), 1);
    let k = &rep.ker_a[0];
    assert!(k.iter().all(|&x| x == k[0]) && k[0] != 0);
    assert_eq!(height_one_cone(&tangent_p2(-1), &[0, 0]).unwrap().dims, vec![1, 0, 0]);
    assert!(matches!(height_one_cone(&o_p2(1), &[0, 0]), Err(crate::Error::NotHeightOne)));
}

#[test]
fn height_one_agrees_everywhere() {
    for l in [-5, -3, -1, 0] {
        let dec = tangent_p2(l);
        let engine = PolyhedralEngine::new(&dec).unwrap();
        for m in degree_support_box(&dec).points() {
            assert_eq!(engine.height_one(&m).unwrap().dims, klyachko_cech(&dec, &m), "l={l} m={m:?}");
        }
    }
}

#[test]
fn deep_twist_has_top_cohomology() {
    // all three D⁺(ρ) inside int Δ first happens at ℓ = 6
    let dec = tangent_p2(-6);
    assert_eq!(height_one_cone(&dec, &[-2, -2]).unwrap().dims, vec![0, 0, 2]);
    assert_eq!(klyachko_cech(&dec, &[-2, -2]), vec![0, 0, 2]);
    let t = cohomology_table(&tangent_p2(-5), Method::Cech, None).unwrap();
    assert_eq!(t.totals(), vec![0, 0, 3]);
    assert!(t.nonzero().all(|(_, d)| d == &vec![0, 0, 1]));
}

#[test]
fn immaculate_twists() {
    for l in [-2, -4] {
        let dec = tangent_p2(l);
        for method in [Method::Cech, Method::Polyhedral] {
            assert_eq!(cohomology_table(&dec, method, None).unwrap().totals(), vec![0, 0, 0]);
        }
    }
}

#[test]
fn euler_of_twisted_tangent() {
    for l in -5..=3 {
        let dec = tangent_p2(l);
        let expect = (l + 3) * (l + 3) - 1;
        let table = cohomology_table(&dec, Method::Cech, None).unwrap();
        assert_eq!(table.euler(), expect, "table l={l}");
        assert_eq!(euler_total_mobius(&dec).unwrap(), expect, "mobius l={l}");
        let eq = euler_equivariant(&dec, &table.degree_box).unwrap();
        assert_eq!(eq.values().sum::<i64>(), expect, "equivariant l={l}");
    }
}

#[test]
fn weights_and_mobius() {
    let dec = tangent_p2(-2);
    assert_eq!(stratum_weights(&dec), vec![0, 1, 1, 1, -1]);
    let mu = mobius(&dec);
    assert_eq!(mu, mobius_by_chains(&dec));
    assert!(incidence(&dec).mul(&mu) == crate::linalg::Matrix::identity(dec.len()));
    assert_eq!(mu.get(1, 4), &q(-1));
}

#[test]
fn nef_line_bundle_euler_in_degree_zero() {
    let fan = p2();
    for d in [Divisor::new(vec![1, 0, 0]), Divisor::new(vec![0, 0, 0]), Divisor::new(vec![-1, 1, 1])] {
        let line = WeilDecoration::line_bundle(fan.clone(), d.clone()).unwrap();
        let expect = fan.section_polyhedron(&d).contains(&[q(0), q(0)]) as i64;
        assert_eq!(euler_mobius(&line, &[0, 0]).unwrap(), expect);
    }
}

#[test]
fn e1_reports() {
    let line = o_p2(-3);
    let r = spectral_e1(&line, &[-1, -1]).unwrap();
    assert_eq!(r.entries.len(), 1);
    assert_eq!((r.entries[0].ell, r.entries[0].q, r.entries[0].dim), (0, 2, 1));
    let omega = spectral_e1(&tangent_p2(-3), &[-1, -1]).unwrap();
    assert!(omega.entries.iter().all(|e| e.ell <= 1));
    // h^t ≤ Σ_{q−ℓ=t} E₁
    let e1 = |t: i64| omega.entries.iter().filter(|e| e.q as i64 - e.ell as i64 == t).map(|e| e.dim).sum::<usize>();
    assert!(e1(1) >= 1);
    assert!(spectral_e1(&WeilDecoration::zero_sheaf(p2()), &[0, 0]).unwrap().entries.is_empty());
}

#[test]
fn total_complexes_square_to_zero() {
    let dec = tangent_p2(-3);
    let engine = PolyhedralEngine::new(&dec).unwrap();
    for variant in [Variant::Closed, Variant::Interior] {
        assert!(engine.ambient_total_complex(&[-1, -1], variant).unwrap().is_complex());
    }
    for m in degree_support_box(&dec).points() {
        assert!(cech_squares_to_zero(&dec, &m));
    }
    assert!(cech_squares_to_zero(&fixtures::kaneyama_e2(), &[0, 0]));
}

#[test]
fn kaneyama_has_higher_cohomology() {
    let e2 = fixtures::kaneyama_e2();
    let t = cohomology_table(&e2, Method::Cech, None).unwrap();
    assert!(t.totals()[1..].iter().any(|&h| h > 0), "{:?}", t.totals());
}

#[test]
fn zero_sheaf_is_empty() {
    let z = WeilDecoration::zero_sheaf(p2());
    let t = cohomology_table(&z, Method::Polyhedral, None).unwrap();
    assert_eq!(t.totals(), vec![0, 0, 0]);
}
