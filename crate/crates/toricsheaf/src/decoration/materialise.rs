//! Ample twists of decorations and what they enable.

use std::collections::{BTreeMap, BTreeSet};

use super::WeilDecoration;
use crate::error::{Error, Result};
use crate::fan::dot;
use crate::linalg::Subspace;
use crate::polyhedra::{Divisor, ExtDivisor};

/// How to choose the multiple k of the fan's ample divisor Δ₀.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Twist {
    /// Smallest k ≥ `min` with every twisted divisor ample.
    AutoAmple {
        min: u64,
    },
    /// Smallest k ≥ `min` with every twisted divisor nef.
    AutoPositive {
        min: u64,
    },
    Fixed(u64),
}

/// Search bound for automatic twists.
pub const MAX_TWIST: u64 = 1 << 20;

/// A decoration together with the twist D⁺(S) = D(S) + kΔ₀.
#[derive(Clone, Debug)]
pub struct MaterialisedDecoration {
    base: WeilDecoration,
    k: u64,
    delta: Divisor,
    plus: Vec<ExtDivisor>,
    positive: bool,
    ample: bool,
}

/// Least k ≥ min with pred(k), for a predicate monotone in k.
pub(crate) fn least_k(min: u64, mut pred: impl FnMut(u64) -> bool) -> Result<u64> {
    if pred(min) {
        return Ok(min);
    }
    let mut lo = min;
    let mut hi = min.max(1) * 2;
    while !pred(hi) {
        if hi >= MAX_TWIST {
            return Err(Error::CannotAmplify(MAX_TWIST));
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

impl WeilDecoration {
    pub fn materialise(&self, twist: Twist) -> Result<MaterialisedDecoration> {
        let fan = self.fan.clone();
        let delta0 = fan.ample().ok_or(Error::NoAmpleAvailable)?.clone();
        let all = |k: u64, ample: bool| {
            let dk = delta0.scale(k as i64);
            self.nonzero().all(|s| {
                let d = self.divisor(s) + &dk;
                if ample {
                    fan.is_ample(&d)
                } else {
                    fan.is_nef(&d)
                }
            })
        };
        let k = match twist {
            Twist::Fixed(k) => k,
            Twist::AutoAmple { min } => least_k(min, |k| all(k, true))?,
            Twist::AutoPositive { min } => least_k(min, |k| all(k, false))?,
        };
        let delta = delta0.scale(k as i64);
        let plus: Vec<ExtDivisor> = self.strata.iter().map(|s| s.divisor.shift(&delta)).collect();
        let positive = all(k, false);
        let ample = all(k, true);
        Ok(MaterialisedDecoration { base: self.clone(), k, delta, plus, positive, ample })
    }

    /// Klyachko compatibility on every maximal cone, by inclusion-exclusion
    /// over the grid of jump levels.
    pub fn is_locally_free(&self) -> bool {
        let n = self.fan.dim();
        for cone in self.fan.max_cones() {
            let rays = cone.rays();
            let levels: Vec<Vec<i64>> = rays
                .iter()
                .map(|&r| {
                    let mut l: BTreeSet<i64> = self.nonzero().map(|s| self.divisor(s).coeffs()[r]).collect();
                    if let Some(&top) = l.iter().next_back() {
                        l.insert(top + 1);
                    }
                    l.into_iter().collect()
                })
                .collect();
            if levels.iter().any(Vec::is_empty) {
                continue;
            }
            let mut dims: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let mut dim_at = |idx: &Vec<usize>| -> usize {
                *dims.entry(idx.clone()).or_insert_with(|| {
                    (0..n)
                        .map(|i| self.klyachko_filtration(rays[i], levels[i][idx[i]]))
                        .fold(Subspace::full(self.rank), |a, b| a.intersect(&b))
                        .dim()
                })
            };
            let mut idx = vec![0usize; n];
            loop {
                let mut mult: i64 = 0;
                for eps in 0u32..(1 << n) {
                    let mut j = idx.clone();
                    let mut ok = true;
                    for (i, ji) in j.iter_mut().enumerate() {
                        if eps >> i & 1 == 1 {
                            *ji += 1;
                            if *ji >= levels[i].len() {
                                ok = false;
                            }
                        }
                    }
                    // beyond the last level every filtration is zero
                    let d = if ok { dim_at(&j) as i64 } else { 0 };
                    mult += if eps.count_ones() % 2 == 0 { d } else { -d };
                }
                if mult < 0 {
                    return false;
                }
                let mut i = 0;
                while i < n {
                    idx[i] += 1;
                    if idx[i] < levels[i].len() {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        true
    }
}

impl MaterialisedDecoration {
    pub fn base(&self) -> &WeilDecoration {
        &self.base
    }

    /// Multiple of the fan's ample divisor used.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Δ = k·Δ₀.
    pub fn delta(&self) -> &Divisor {
        &self.delta
    }

    pub fn plus(&self, s: usize) -> &Divisor {
        self.plus[s].finite().expect("nonzero stratum")
    }

    pub fn plus_ext(&self, s: usize) -> &ExtDivisor {
        &self.plus[s]
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn is_ample(&self) -> bool {
        self.ample
    }

    /// Degree-m global sections of the twisted sheaf: strata whose twisted
    /// section polytope contains m.
    pub fn eval_global(&self, m: &[i64]) -> Result<&Subspace> {
        if !self.positive {
            return Err(Error::NotPositive);
        }
        let fan = self.base.fan();
        let pairing: Vec<i64> = fan.rays().iter().map(|r| dot(m, r)).collect();
        let s = self.base.nonzero().filter(|&s| self.plus(s).coeffs().iter().zip(&pairing).all(|(a, p)| *p >= -a));
        let j = s.fold(0, |acc, s| self.base.join(acc, s));
        Ok(self.base.stratum(j).closure())
    }
}
