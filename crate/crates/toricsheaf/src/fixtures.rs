//! Standard varieties and sheaves used throughout the tests and examples.

use std::sync::Arc;

use crate::decoration::{StratumSpec, WeilDecoration};
use crate::fan::Fan;
use crate::polyhedra::Divisor;
use crate::rational::q;

/// Index of the ray (−1,−1) in [`p2`]; its prime divisor is the hyperplane class used for twists.
pub const P2_RHO0: usize = 2;

/// P² with rays (1,0), (0,1), (−1,−1) and the unit simplex as ample polytope.
pub fn p2() -> Arc<Fan> {
    Arc::new(Fan::from_ample_polytope(&[vec![0, 0], vec![1, 0], vec![0, 1]]).expect("simplex"))
}

pub fn p1xp1() -> Arc<Fan> {
    Arc::new(Fan::from_ample_polytope(&[vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).expect("square"))
}

/// The Hirzebruch surface F₁ with rays (1,0), (0,1), (−1,−1), (0,−1).
pub fn f1() -> Arc<Fan> {
    let fan = Fan::new(
        vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("F1");
    Arc::new(fan.with_ample(Divisor::new(vec![0, 0, 2, 1])).expect("trapezoid is ample"))
}

/// A smooth surface with six rays (1,0), (0,1), (−1,0), (−2,−1), (−1,−1), (0,−1),
/// polarised by the hexagon with vertices (0,0), (3,0), (3,1), (2,3), (1,4), (0,4).
pub fn hexagon_surface() -> Arc<Fan> {
    let rays = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![-2, -1], vec![-1, -1], vec![0, -1]];
    let cones = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
    let fan = Fan::new(rays, cones).expect("smooth hexagon fan");
    Arc::new(fan.with_ample(Divisor::new(vec![0, 0, 3, 7, 5, 4])).expect("hexagon is ample"))
}

pub fn p3() -> Arc<Fan> {
    Arc::new(Fan::from_ample_polytope(&[vec![0, 0, 0], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).expect("simplex"))
}

/// Decoration whose strata are the lines through the rays with divisor
/// `line(i)`, under a generic stratum with divisor `generic`. Rays must be
/// pairwise non-collinear.
pub fn ray_lines(fan: &Arc<Fan>, line: impl Fn(usize) -> Divisor, generic: Divisor) -> WeilDecoration {
    let n = fan.dim();
    let mut specs = vec![StratumSpec::zero()];
    for i in 0..fan.num_rays() {
        specs.push(StratumSpec::new(vec![fan.ray(i).iter().map(|&x| q(x)).collect()], line(i)));
    }
    let full = (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect();
    specs.push(StratumSpec::new(full, generic));
    WeilDecoration::new(fan.clone(), n, specs).expect("ray-line decoration")
}

/// Tangent sheaf: a line through rays gets the sum of their prime divisors, the generic stratum 0.
pub fn tangent(fan: &Arc<Fan>) -> WeilDecoration {
    let r = fan.num_rays();
    let n = fan.dim();
    let mut lines: Vec<(Vec<i64>, Divisor)> = Vec::new();
    for i in 0..r {
        let ray = fan.ray(i);
        let neg: Vec<i64> = ray.iter().map(|x| -x).collect();
        match lines.iter_mut().find(|(v, _)| v.as_slice() == ray || *v == neg) {
            Some((_, d)) => *d = &*d + &Divisor::prime(r, i),
            None => lines.push((ray.to_vec(), Divisor::prime(r, i))),
        }
    }
    let mut specs = vec![StratumSpec::zero()];
    for (v, d) in lines {
        specs.push(StratumSpec::new(vec![v.iter().map(|&x| q(x)).collect()], d));
    }
    let full = (0..n).map(|i| (0..n).map(|j| q((i == j) as i64)).collect()).collect();
    specs.push(StratumSpec::new(full, Divisor::zero(r)));
    WeilDecoration::new(fan.clone(), n, specs).expect("tangent decoration")
}

/// T_{P²}(ℓ) = T_{P²} ⊗ O(ℓ D_ρ₀).
pub fn tangent_p2(l: i64) -> WeilDecoration {
    let fan = p2();
    tangent(&fan).twist(&Divisor::prime(3, P2_RHO0).scale(l))
}

/// The rank-2 bundle E₂ on P² defined by 0 → O(A) → ⊕ O(A + 4D_i) → E₂ → 0
/// with A = −D₀−D₁−D₂, the maps being fourth powers of the coordinates.
pub fn kaneyama_e2() -> WeilDecoration {
    let fan = p2();
    let a = Divisor::new(vec![-1, -1, -1]);
    ray_lines(&fan, |i| &a + &Divisor::prime(3, i).scale(4), a.clone())
}
