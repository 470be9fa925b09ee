//! Weil decorations: admissible stratifications of E = ℚ^r with an
//! order-reversing map from strata to divisors.

mod materialise;
mod ops;

use std::fmt::Write as _;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fan::{dot, Cone, Fan};
use crate::linalg::Subspace;
use crate::polyhedra::{Divisor, ExtDivisor};
use crate::rational::Q;

pub(crate) use materialise::least_k;
pub use materialise::{MaterialisedDecoration, Twist};
pub use ops::DEFAULT_STRATA_CAP;

/// Input form of a stratum: spanning vectors of its closure and its divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumSpec {
    pub closure: Vec<Vec<Q>>,
    pub divisor: ExtDivisor,
}

impl StratumSpec {
    pub fn new(closure: Vec<Vec<Q>>, divisor: impl Into<ExtDivisor>) -> Self {
        StratumSpec { closure, divisor: divisor.into() }
    }

    pub fn zero() -> Self {
        StratumSpec { closure: Vec::new(), divisor: ExtDivisor::Infinity }
    }
}

#[derive(Clone, Debug)]
pub struct Stratum {
    closure: Subspace,
    /// Basis of the closure as presented by the caller, when independent.
    basis: Vec<Vec<Q>>,
    divisor: ExtDivisor,
}

/// Equality ignores the presentation basis.
impl PartialEq for Stratum {
    fn eq(&self, other: &Self) -> bool {
        self.closure == other.closure && self.divisor == other.divisor
    }
}

impl Eq for Stratum {}

impl Stratum {
    pub fn closure(&self) -> &Subspace {
        &self.closure
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn divisor(&self) -> &ExtDivisor {
        &self.divisor
    }

    pub fn dim(&self) -> usize {
        self.closure.dim()
    }
}

/// A validated Weil decoration. Strata are sorted by closure dimension, so
/// index 0 is the zero stratum and indices form a linear extension of the order.
#[derive(Clone, Debug)]
pub struct WeilDecoration {
    fan: Arc<Fan>,
    rank: usize,
    strata: Vec<Stratum>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    generic: usize,
}

impl PartialEq for WeilDecoration {
    fn eq(&self, other: &Self) -> bool {
        same_fan(&self.fan, &other.fan) && self.rank == other.rank && self.strata == other.strata
    }
}

pub(crate) fn same_fan(a: &Arc<Fan>, b: &Arc<Fan>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn independent_or_canonical(closure: &Subspace, given: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let nonzero: Vec<Vec<Q>> = given.iter().filter(|v| v.iter().any(|x| !x.is_zero())).cloned().collect();
    if nonzero.len() == closure.dim() {
        nonzero
    } else {
        closure.basis().to_vec()
    }
}

/// All invariant violations of a would-be decoration; empty means valid.
pub fn validate_parts(fan: &Fan, rank: usize, specs: &[StratumSpec]) -> Vec<String> {
    let mut bad = Vec::new();
    let n = fan.num_rays();
    for (i, s) in specs.iter().enumerate() {
        if s.closure.iter().any(|v| v.len() != rank) {
            bad.push(format!("stratum {i}: closure vectors must have length {rank}"));
        }
        if let ExtDivisor::Finite(d) = &s.divisor {
            if d.len() != n {
                bad.push(format!("stratum {i}: divisor must have {n} coefficients"));
            }
        }
    }
    if !bad.is_empty() {
        return bad;
    }
    let cl: Vec<Subspace> = specs.iter().map(|s| Subspace::span(rank, s.closure.clone())).collect();
    for i in 0..cl.len() {
        for j in 0..i {
            if cl[i] == cl[j] {
                bad.push(format!("strata {j} and {i} have the same closure"));
            }
        }
    }
    let zero = cl.iter().position(Subspace::is_zero);
    if zero.is_none() {
        bad.push("zero stratum missing".into());
    }
    if !cl.iter().any(Subspace::is_full) {
        bad.push("generic stratum (closure = E) missing".into());
    }
    for (i, s) in specs.iter().enumerate() {
        if s.divisor.is_infinite() != cl[i].is_zero() {
            bad.push(format!("stratum {i}: divisor is infinite exactly on the zero stratum"));
        }
    }
    if !bad.is_empty() {
        return bad;
    }
    let find = |v: &Subspace| cl.iter().position(|c| c == v);
    for i in 0..cl.len() {
        for j in 0..i {
            if find(&cl[i].intersect(&cl[j])).is_none() {
                bad.push(format!("strata {j} and {i}: closures meet outside every stratum closure"));
            }
            let sum = cl[i].sum(&cl[j]);
            let uppers: Vec<usize> = (0..cl.len()).filter(|&k| sum.is_subspace_of(&cl[k])).collect();
            let least = uppers.iter().copied().find(|&k| uppers.iter().all(|&u| cl[k].is_subspace_of(&cl[u])));
            match least {
                None => bad.push(format!("strata {j} and {i} have no least upper bound")),
                Some(k) => {
                    let m = specs[i].divisor.meet(&specs[j].divisor);
                    if specs[k].divisor != m {
                        bad.push(format!("divisor of join of strata {j} and {i} is not the meet"));
                    }
                }
            }
        }
    }
    for i in 0..cl.len() {
        for j in 0..cl.len() {
            if i != j && cl[i].is_subspace_of(&cl[j]) && !specs[j].divisor.leq(&specs[i].divisor) {
                bad.push(format!("strata {i} <= {j} but divisors do not reverse the order"));
            }
        }
    }
    bad
}

impl WeilDecoration {
    /// Validate and build. The strata must include the zero stratum.
    pub fn new(fan: Arc<Fan>, rank: usize, specs: Vec<StratumSpec>) -> Result<Self> {
        let bad = validate_parts(&fan, rank, &specs);
        if !bad.is_empty() {
            return Err(Error::InvalidDecoration(bad));
        }
        Ok(Self::build(fan, rank, specs))
    }

    /// As [`WeilDecoration::new`], adding the zero stratum when absent.
    pub fn with_zero(fan: Arc<Fan>, rank: usize, mut specs: Vec<StratumSpec>) -> Result<Self> {
        if !specs.iter().any(|s| Subspace::span(rank, s.closure.clone()).is_zero()) {
            specs.push(StratumSpec::zero());
        }
        Self::new(fan, rank, specs)
    }

    /// Assumes the parts are valid.
    fn build(fan: Arc<Fan>, rank: usize, specs: Vec<StratumSpec>) -> Self {
        let mut strata: Vec<Stratum> = specs
            .into_iter()
            .map(|s| {
                let closure = Subspace::span(rank, s.closure.clone());
                let basis = independent_or_canonical(&closure, &s.closure);
                Stratum { closure, basis, divisor: s.divisor }
            })
            .collect();
        strata.sort_by(|a, b| (a.dim(), &a.closure).cmp(&(b.dim(), &b.closure)));
        let k = strata.len();
        let leq: Vec<Vec<bool>> =
            (0..k).map(|i| (0..k).map(|j| strata[i].closure.is_subspace_of(&strata[j].closure)).collect()).collect();
        let mut join = vec![vec![0; k]; k];
        for i in 0..k {
            for j in 0..k {
                // sorted by dimension, so the first upper bound is the least
                join[i][j] = (0..k).find(|&u| leq[i][u] && leq[j][u]).expect("validated join");
            }
        }
        let generic = k - 1;
        WeilDecoration { fan, rank, strata, leq, join, generic }
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum(&self, i: usize) -> &Stratum {
        &self.strata[i]
    }

    pub fn len(&self) -> usize {
        self.strata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strata.is_empty()
    }

    pub fn generic(&self) -> usize {
        self.generic
    }

    pub fn zero_stratum(&self) -> usize {
        0
    }

    /// S ≤ T, i.e. closure(S) ⊆ closure(T).
    pub fn leq(&self, s: usize, t: usize) -> bool {
        self.leq[s][t]
    }

    pub fn join(&self, s: usize, t: usize) -> usize {
        self.join[s][t]
    }

    /// Finite divisor of a nonzero stratum.
    pub fn divisor(&self, s: usize) -> &Divisor {
        self.strata[s].divisor.finite().expect("nonzero stratum")
    }

    pub fn nonzero(&self) -> impl Iterator<Item = usize> {
        1..self.strata.len()
    }

    /// Re-check every invariant.
    pub fn validate(&self) -> Vec<String> {
        validate_parts(&self.fan, self.rank, &self.specs())
    }

    pub fn specs(&self) -> Vec<StratumSpec> {
        self.strata.iter().map(|s| StratumSpec { closure: s.basis.clone(), divisor: s.divisor.clone() }).collect()
    }

    /// The stratum containing a vector: the smallest closure holding it.
    pub fn stratum_of(&self, v: &[Q]) -> usize {
        (0..self.strata.len()).find(|&i| self.strata[i].closure.contains(v)).expect("generic stratum contains all")
    }

    /// The stratum of a generic point of V. The point is found on the curve
    /// t ↦ Σ tⁱ bᵢ for t = 1, 2, …, which leaves any proper subspace after
    /// at most dim V − 1 values.
    pub fn generic_stratum(&self, v: &Subspace) -> usize {
        if v.is_zero() {
            return 0;
        }
        let avoid: Vec<Subspace> =
            self.strata.iter().filter(|s| !v.is_subspace_of(&s.closure)).map(|s| s.closure.intersect(v)).collect();
        let basis = v.basis();
        for t in 1i64.. {
            let mut p = vec![Q::zero(); v.ambient()];
            let mut pow = Q::from_integer(1.into());
            for b in basis {
                for (x, y) in p.iter_mut().zip(b) {
                    *x += &pow * y;
                }
                pow *= Q::from_integer(t.into());
            }
            if avoid.iter().all(|w| !w.contains(&p)) {
                return self.stratum_of(&p);
            }
        }
        unreachable!()
    }

    /// Length of the longest chain of nonzero strata, counted in steps.
    pub fn height(&self) -> usize {
        self.chains().iter().map(|c| c.len() - 1).max().unwrap_or(0)
    }

    /// All strict chains S₀ < … < S_ℓ of nonzero strata, shortest first.
    pub fn chains(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.nonzero().map(|s| vec![s]).collect();
        let mut frontier = out.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for c in &frontier {
                let last = *c.last().unwrap();
                for t in last + 1..self.strata.len() {
                    if self.leq[last][t] {
                        let mut d = c.clone();
                        d.push(t);
                        next.push(d);
                    }
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// E^ℓ_ρ: span of closures of strata whose ρ-coefficient is at least ℓ.
    pub fn klyachko_filtration(&self, ray: usize, level: i64) -> Subspace {
        self.nonzero()
            .filter(|&s| self.divisor(s).coeffs()[ray] >= level)
            .fold(Subspace::zero(self.rank), |acc, s| acc.sum(&self.strata[s].closure))
    }

    /// Join of all strata satisfying a predicate on their divisors; 0 if none.
    pub(crate) fn join_where(&self, mut pred: impl FnMut(&Divisor) -> bool) -> usize {
        self.nonzero().filter(|&s| pred(self.divisor(s))).fold(0, |acc, s| self.join[acc][s])
    }

    /// Degree-m sections over the affine chart of any cone σ:
    /// the strata S with ⟨m, ρ⟩ ≥ −a_ρ(S) for all ρ ∈ σ(1).
    pub fn eval_cone(&self, cone: &Cone, m: &[i64]) -> &Subspace {
        let rays = cone.rays();
        let pairing: Vec<i64> = rays.iter().map(|&r| dot(m, self.fan.ray(r))).collect();
        let s = self.join_where(|d| rays.iter().zip(&pairing).all(|(&r, &p)| p >= -d.coeffs()[r]));
        &self.strata[s].closure
    }

    /// Graphviz rendering of all strata, the zero stratum at the bottom,
    /// with their covering relations.
    pub fn hasse_dot(&self) -> String {
        let mut s = String::from("digraph strata {\n  rankdir=BT;\n");
        let n = self.strata.len();
        for i in 0..n {
            let label = match self.strata[i].divisor.finite() {
                Some(d) => d.pretty(),
                None => "inf".to_string(),
            };
            let _ = writeln!(s, "  s{i} [label=\"{label} | dim {}\"];", self.strata[i].dim());
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && self.leq[i][j] {
                    let covered = !(0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j]);
                    if covered {
                        let _ = writeln!(s, "  s{i} -> s{j};");
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }

    pub(crate) fn check_fan(&self, other: &WeilDecoration) -> Result<()> {
        if same_fan(&self.fan, &other.fan) {
            Ok(())
        } else {
            Err(Error::FanMismatch)
        }
    }
}

#[cfg(test)]
pub(crate) mod tests;
