use std::collections::HashMap;

use super::{CellComplex, CellSet};
use crate::linalg::{CochainComplex, SparseRow};

/// Chains c₀ < … < c_k of the face order on a set of cells, each listed by
/// increasing dimension. The chain of length k+1 is a k-simplex.
#[derive(Clone, Debug)]
pub struct OrderComplex {
    top_dim: usize,
    simplices: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl CellComplex {
    /// Order complex of the cells in `ground`. For face-closed or open
    /// sets it is homotopy equivalent to the union of the open cells.
    pub fn order_complex(&self, ground: &CellSet) -> OrderComplex {
        let mut simplices = Vec::new();
        let mut stack: Vec<Vec<usize>> = ground.iter().map(|c| vec![c]).collect();
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            for &up in self.cofaces(last) {
                if ground.contains(up) {
                    let mut next = chain.clone();
                    next.push(up);
                    stack.push(next);
                }
            }
            simplices.push(chain);
        }
        simplices.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        let index = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        OrderComplex { top_dim: self.dim(), simplices, index }
    }
}

impl OrderComplex {
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, chain: &[usize]) -> Option<usize> {
        self.index.get(chain).copied()
    }

    /// Signed codimension-one faces of a simplex with at least two vertices.
    pub fn boundary(&self, s: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        let chain = &self.simplices[s];
        (0..chain.len()).filter(move |_| chain.len() > 1).map(move |i| {
            let mut face = chain.clone();
            face.remove(i);
            (self.index[&face], if i % 2 == 0 { 1 } else { -1 })
        })
    }

    /// Simplices whose top cell lies in `support`, grouped by dimension.
    pub fn basis(&self, support: &CellSet) -> Vec<Vec<usize>> {
        let mut by_dim = vec![Vec::new(); self.top_dim + 1];
        for (i, s) in self.simplices.iter().enumerate() {
            if support.contains(*s.last().unwrap()) {
                by_dim[s.len() - 1].push(i);
            }
        }
        by_dim
    }

    /// Cochains on the simplices with top cell in `support`. When `support`
    /// is open this is the relative complex; when it is the whole ground set
    /// and `augmented`, the augmented complex computing reduced cohomology.
    pub fn cochains(&self, support: &CellSet, augmented: bool) -> CochainComplex {
        let basis = self.basis(support);
        let mut pos = vec![usize::MAX; self.simplices.len()];
        for b in &basis {
            for (j, &s) in b.iter().enumerate() {
                pos[s] = j;
            }
        }
        let mut dims: Vec<usize> = basis.iter().map(Vec::len).collect();
        let mut maps: Vec<Vec<SparseRow>> = Vec::new();
        if augmented {
            dims.insert(0, 1);
            maps.push(vec![(0..basis[0].len()).map(|j| (j, 1)).collect()]);
        }
        for q in 0..self.top_dim {
            let mut rows: Vec<SparseRow> = vec![Vec::new(); basis[q].len()];
            for (j, &t) in basis[q + 1].iter().enumerate() {
                for (f, sgn) in self.boundary(t) {
                    if pos[f] != usize::MAX && support.contains(*self.simplices[f].last().unwrap()) {
                        rows[pos[f]].push((j, sgn));
                    }
                }
            }
            maps.push(rows);
        }
        CochainComplex::new(if augmented { -1 } else { 0 }, dims, maps)
    }
}
