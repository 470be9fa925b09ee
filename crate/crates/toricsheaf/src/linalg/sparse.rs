use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Sparse integer row: strictly increasing column indices, nonzero values.
pub type SparseRow = Vec<(usize, i64)>;

trait Entry: Clone + Sized {
    fn from_i64(x: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn gcd(&self, other: &Self) -> Self;
    fn neg(&self) -> Option<Self>;
    fn is_negative(&self) -> bool;
    /// a·x − b·y
    fn axby(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_one(&self) -> bool;
}

impl Entry for i128 {
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn axby(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl Entry for BigInt {
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn axby(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_one(&self) -> bool {
        *self == BigInt::from(1)
    }
}

type Row<T> = Vec<(usize, T)>;

fn normalize<T: Entry>(row: &mut Row<T>) -> Option<()> {
    let mut g = row[0].1.clone();
    for (_, x) in row.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(x);
    }
    let g = if row[0].1.is_negative() { g.neg()? } else { g };
    if !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
    Some(())
}

/// `a·row − b·pivot`, dropping cancelled entries.
fn combine<T: Entry>(a: &T, row: &Row<T>, b: &T, pivot: &Row<T>) -> Option<Row<T>> {
    let zero = T::from_i64(0);
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci == cj {
            let v = T::axby(a, &row[i].1, b, &pivot[j].1)?;
            i += 1;
            j += 1;
            (ci, v)
        } else if ci < cj {
            let v = T::axby(a, &row[i].1, b, &zero)?;
            i += 1;
            (ci, v)
        } else {
            let v = T::axby(a, &zero, b, &pivot[j].1)?;
            j += 1;
            (cj, v)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    Some(out)
}

fn rank_with<T: Entry>(rows: &[SparseRow]) -> Option<usize> {
    let ncols = rows.iter().filter_map(|r| r.last()).map(|e| e.0 + 1).max().unwrap_or(0);
    let mut pivots: Vec<Option<Row<T>>> = vec![None; ncols];
    let mut rank = 0;
    for r in rows {
        let mut row: Row<T> = r.iter().map(|&(c, v)| (c, T::from_i64(v))).collect();
        while let Some((lead, a)) = row.first().cloned() {
            match &pivots[lead] {
                Some(p) => {
                    let b = p[0].1.clone();
                    let g = a.gcd(&b);
                    row = combine(&b.div_exact(&g), &row, &a.div_exact(&g), p)?;
                    if !row.is_empty() {
                        normalize(&mut row)?;
                    }
                }
                None => {
                    normalize(&mut row)?;
                    pivots[lead] = Some(row);
                    rank += 1;
                    break;
                }
            }
        }
    }
    Some(rank)
}

/// Rank over ℚ of a sparse integer matrix, by fraction-free elimination.
/// Runs in 128-bit arithmetic and restarts with big integers on overflow.
pub fn rank(rows: &[SparseRow]) -> usize {
    debug_assert!(rows.iter().all(|r| r.windows(2).all(|w| w[0].0 < w[1].0)));
    debug_assert!(rows.iter().all(|r| r.iter().all(|e| e.1 != 0)));
    rank_with::<i128>(rows).unwrap_or_else(|| rank_with::<BigInt>(rows).expect("bigint cannot overflow"))
}
