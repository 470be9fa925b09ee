use std::collections::BTreeMap;

use super::sparse::{rank, SparseRow};

/// A bounded cochain complex over ℚ with integer differentials.
/// `maps[i]` sends C^{lowest+i} to the next term; its rows are the images
/// of the source basis vectors.
#[derive(Clone, Debug, Default)]
pub struct CochainComplex {
    pub lowest: i64,
    pub dims: Vec<usize>,
    pub maps: Vec<Vec<SparseRow>>,
}

impl CochainComplex {
    pub fn new(lowest: i64, dims: Vec<usize>, maps: Vec<Vec<SparseRow>>) -> Self {
        debug_assert_eq!(maps.len() + 1, dims.len().max(1));
        debug_assert!(maps.iter().zip(&dims).all(|(m, &d)| m.len() == d));
        CochainComplex { lowest, dims, maps }
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.maps.iter().map(|m| rank(m)).collect()
    }

    /// Cohomology dimensions, one per term.
    pub fn cohomology(&self) -> Vec<usize> {
        let r = self.ranks();
        (0..self.dims.len())
            .map(|i| {
                let out = r.get(i).copied().unwrap_or(0);
                let inc = if i == 0 { 0 } else { r[i - 1] };
                self.dims[i] - out - inc
            })
            .collect()
    }

    pub fn euler(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| if (self.lowest + i as i64) % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Every composite of consecutive differentials vanishes.
    pub fn is_complex(&self) -> bool {
        self.maps.windows(2).all(|w| composite_is_zero(&w[0], &w[1]))
    }
}

/// `second ∘ first = 0`, the rows of `first` indexing the rows of `second`.
pub fn composite_is_zero(first: &[SparseRow], second: &[SparseRow]) -> bool {
    first.iter().all(|row| {
        let mut acc: BTreeMap<usize, i128> = BTreeMap::new();
        for &(j, a) in row {
            for &(k, b) in &second[j] {
                *acc.entry(k).or_default() += a as i128 * b as i128;
            }
        }
        acc.values().all(|&v| v == 0)
    })
}

/// Collect (column, value) pairs into a sorted sparse row without zeros.
pub fn sparse_row(entries: impl IntoIterator<Item = (usize, i64)>) -> SparseRow {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (c, v) in entries {
        *acc.entry(c).or_default() += v;
    }
    acc.into_iter().filter(|e| e.1 != 0).collect()
}
