//! Recovering every bid from the outcome exponents.
//!
//! Without the per-cell randomizers, cell `(i, j)` of the outcome decrypts
//! to `Y^l_ij`, where `l_ij` counts the `Y` factors in that cell's product:
//! bids above price `j` from anyone, bids below `j` from bidder `i`, and bids
//! at `j` from bidders with a lower index. Stacking all bid vectors into one
//! 0/1 vector `b` of length `nk` gives `l = M b` for the block matrix
//!
//! ```text
//!        | U+L   U    U  ... |
//!    M = | U+I  U+L   U  ... |
//!        | U+I  U+I  U+L ... |
//! ```
//!
//! with `U`, `L` the strict upper and lower all-ones triangles of size `k`.
//! `M` is injective on valid bid vectors and [`recover_bids`] inverts it by
//! back-substitution, last price first.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};

/// Implicit `nk x nk` outcome matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuredMatrix {
    pub n: usize,
    pub k: usize,
}

impl StructuredMatrix {
    pub fn new(n: usize, k: usize) -> Self {
        assert!(n >= 1 && k >= 1, "matrix needs at least one bidder and one price");
        StructuredMatrix { n, k }
    }

    pub fn dim(&self) -> usize {
        self.n * self.k
    }

    /// Entry for row cell `(i, j)` and column cell `(h, d)`, all 1-based.
    pub fn entry(&self, (i, j): (usize, usize), (h, d): (usize, usize)) -> u8 {
        let above = d > j;
        let own_lower = h == i && d < j;
        let earlier_same_price = h < i && d == j;
        u8::from(above || own_lower || earlier_same_price)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let cells: Vec<_> = cells(self.n, self.k).collect();
        cells
            .iter()
            .map(|&row| cells.iter().map(|&col| self.entry(row, col)).collect())
            .collect()
    }
}

/// Cells `(i, j)` in row-major order, 1-based.
pub fn cells(n: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).flat_map(move |i| (1..=k).map(move |j| (i, j)))
}

/// Build the outcome matrix for `n` bidders and `k` prices.
pub fn build_matrix(n: usize, k: usize) -> StructuredMatrix {
    StructuredMatrix::new(n, k)
}

/// Stacked 0/1 bid vectors, one block of `k` per bidder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredBids {
    pub n: usize,
    pub k: usize,
    pub b: Vec<u8>,
}

impl RecoveredBids {
    /// From 1-based prices.
    pub fn from_prices(k: usize, prices: &[usize]) -> Result<Self> {
        let mut b = vec![0u8; prices.len() * k];
        for (i, &p) in prices.iter().enumerate() {
            if p == 0 || p > k {
                return Err(Error::PriceOutOfRange { price: p, k });
            }
            b[i * k + p - 1] = 1;
        }
        Ok(RecoveredBids { n: prices.len(), k, b })
    }

    /// 1-based price per bidder.
    pub fn prices(&self) -> Vec<usize> {
        self.b
            .chunks(self.k)
            .map(|block| block.iter().position(|&x| x == 1).map_or(0, |p| p + 1))
            .collect()
    }
}

fn check_bid_vector(m: &StructuredMatrix, b: &[u8]) -> Result<()> {
    if b.len() != m.dim() {
        return Err(Error::InvalidBidVector(format!("length {}, expected {}", b.len(), m.dim())));
    }
    for (i, block) in b.chunks(m.k).enumerate() {
        if block.iter().any(|&x| x > 1) {
            return Err(Error::InvalidBidVector(format!("bidder {} has an entry outside {{0, 1}}", i + 1)));
        }
        let ones = block.iter().filter(|&&x| x == 1).count();
        if ones != 1 {
            return Err(Error::InvalidBidVector(format!("bidder {} has {ones} marked prices", i + 1)));
        }
    }
    Ok(())
}

/// `l = M b`, computed in `O(nk)` from column and row running sums.
pub fn apply_f(m: &StructuredMatrix, b: &[u8]) -> Result<ExponentVector> {
    check_bid_vector(m, b)?;
    let (n, k) = (m.n, m.k);
    let at = |i: usize, j: usize| u32::from(b[(i - 1) * k + j - 1]);
    let column: Vec<u32> = (1..=k).map(|j| (1..=n).map(|i| at(i, j)).sum()).collect();
    // above[j-1] = bids strictly above price j, from anyone
    let mut above = vec![0u32; k];
    for j in (1..k).rev() {
        above[j - 1] = above[j] + column[j];
    }
    let mut l = vec![vec![0u32; k]; n];
    let mut earlier = vec![0u32; k];
    for i in 1..=n {
        let mut own_lower = 0;
        for j in 1..=k {
            l[i - 1][j - 1] = above[j - 1] + own_lower + earlier[j - 1];
            own_lower += at(i, j);
        }
        for j in 1..=k {
            earlier[j - 1] += at(i, j);
        }
    }
    ExponentVector::new(l)
}

/// Dense matrix-vector product; the reference `apply_f` is checked against.
pub fn apply_dense(m: &StructuredMatrix, b: &[u8]) -> Vec<u32> {
    m.to_dense()
        .iter()
        .map(|row| row.iter().zip(b).map(|(&a, &x)| u32::from(a) * u32::from(x)).sum())
        .collect()
}

/// Outcome exponents `l_ij`, one row per bidder. Serializes as a plain
/// integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct ExponentVector {
    rows: Vec<Vec<u32>>,
}

impl ExponentVector {
    /// Checks the shape and `0 <= l_ij <= n`.
    pub fn new(rows: Vec<Vec<u32>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        if n == 0 || k == 0 {
            return Err(Error::InvalidExponents("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidExponents("rows of different length".into()));
        }
        if let Some(v) = rows.iter().flatten().find(|&&v| v as usize > n) {
            return Err(Error::InvalidExponents(format!("entry {v} exceeds n = {n}")));
        }
        Ok(ExponentVector { rows })
    }

    pub fn from_flat(n: usize, k: usize, flat: &[u32]) -> Result<Self> {
        if flat.len() != n * k || n == 0 {
            return Err(Error::InvalidExponents(format!("{} entries for a {n}x{k} matrix", flat.len())));
        }
        Self::new(flat.chunks(k).map(<[u32]>::to_vec).collect())
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn k(&self) -> usize {
        self.rows[0].len()
    }

    /// 1-based.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i - 1][j - 1]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn flat(&self) -> Vec<u32> {
        self.rows.iter().flatten().copied().collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rows).expect("integer matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rows: Vec<Vec<u32>> = serde_json::from_str(s).map_err(|e| Error::InvalidExponents(e.to_string()))?;
        Self::new(rows)
    }
}

impl TryFrom<Vec<Vec<u32>>> for ExponentVector {
    type Error = Error;

    fn try_from(rows: Vec<Vec<u32>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<ExponentVector> for Vec<Vec<u32>> {
    fn from(e: ExponentVector) -> Self {
        e.rows
    }
}

/// Result of a solver run with its instrumented addition count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recovery {
    pub bids: RecoveredBids,
    pub additions: u64,
}

fn to_bit(value: i64, cell: (usize, usize)) -> Result<u8> {
    match value {
        0 => Ok(0),
        1 => Ok(1),
        v => Err(Error::InconsistentExponents(format!(
            "cell ({}, {}) solves to {v}",
            cell.0, cell.1
        ))),
    }
}

fn finish(l: &ExponentVector, x: Vec<u8>) -> Result<RecoveredBids> {
    let m = StructuredMatrix::new(l.n(), l.k());
    check_bid_vector(&m, &x).map_err(|e| Error::InconsistentExponents(e.to_string()))?;
    if &apply_f(&m, &x)? != l {
        return Err(Error::InconsistentExponents("solution does not reproduce the exponents".into()));
    }
    Ok(RecoveredBids {
        n: l.n(),
        k: l.k(),
        b: x,
    })
}

/// Back-substitution with running sums.
///
/// Order: `x_{1,k}, ..., x_{n,k}, x_{1,k-1}, ...`, each from
/// `x_{r,t} = 1 - l_{r,t} + sum_{i<r} x_{i,t} + sum_{j>t} sum_{i!=r} x_{i,j}`.
/// The double sum is kept as (all bids above `t`) minus (bidder `r`'s bids
/// above `t`), so each cell costs a constant number of additions. Only
/// additions whose operands are not structurally empty are counted.
pub fn recover_bids_counted(l: &ExponentVector) -> Result<Recovery> {
    let (n, k) = (l.n(), l.k());
    let mut x = vec![0u8; n * k];
    let mut ops = 0u64;
    // all bids at prices above t, and the same per bidder
    let mut all_above: i64 = 0;
    let mut row_above = vec![0i64; n];
    for t in (1..=k).rev() {
        let mut column_so_far: i64 = 0;
        for r in 1..=n {
            let mut v = 1 - i64::from(l.get(r, t));
            ops += 1;
            if r > 1 {
                v += column_so_far;
                ops += 1;
            }
            if t < k {
                v += all_above - row_above[r - 1];
                ops += 2;
            }
            let bit = to_bit(v, (r, t))?;
            x[(r - 1) * k + t - 1] = bit;
            if r > 1 {
                ops += 1;
            }
            column_so_far += i64::from(bit);
            if t > 1 {
                if t < k {
                    ops += 1;
                }
                row_above[r - 1] += i64::from(bit);
            }
        }
        if t > 1 {
            if t < k {
                ops += 1;
            }
            all_above += column_so_far;
        }
    }
    Ok(Recovery {
        bids: finish(l, x)?,
        additions: ops,
    })
}

pub fn recover_bids(l: &ExponentVector) -> Result<RecoveredBids> {
    recover_bids_counted(l).map(|r| r.bids)
}

/// The same recurrence with every sum expanded, `sum_r sum_t (r + (k-t) n)`
/// additions in total. Kept as a second route for cross-checking.
pub fn recover_bids_direct(l: &ExponentVector) -> Result<Recovery> {
    let (n, k) = (l.n(), l.k());
    let mut x = vec![0u8; n * k];
    let mut ops = 0u64;
    let at = |x: &[u8], i: usize, j: usize| i64::from(x[(i - 1) * k + j - 1]);
    for t in (1..=k).rev() {
        for r in 1..=n {
            let mut v = 1 - i64::from(l.get(r, t));
            ops += 1;
            for i in 1..r {
                v += at(&x, i, t);
                ops += 1;
            }
            for j in t + 1..=k {
                for i in (1..=n).filter(|&i| i != r) {
                    v += at(&x, i, j);
                    ops += 1;
                }
            }
            x[(r - 1) * k + t - 1] = to_bit(v, (r, t))?;
        }
    }
    Ok(Recovery {
        bids: finish(l, x)?,
        additions: ops,
    })
}

/// Addition count of [`recover_bids`] for an `n x k` instance. The count
/// does not depend on the bids; every bidder bidding the top price is used.
pub fn count_operations(n: usize, k: usize) -> u64 {
    let m = StructuredMatrix::new(n, k);
    let bids = RecoveredBids::from_prices(k, &vec![k; n]).expect("top price is in range");
    let l = apply_f(&m, &bids.b).expect("valid bid vector");
    recover_bids_counted(&l).expect("exponents of a valid vector").additions
}

/// Lookup table `base^0, ..., base^n` for reading exponents off decrypted
/// outcome cells.
#[derive(Clone, Debug)]
pub struct ExponentTable {
    n: usize,
    powers: HashMap<GroupElement, u32>,
}

impl ExponentTable {
    pub fn new(params: &GroupParams, base: &GroupElement, n: usize) -> Self {
        let mut powers = HashMap::new();
        let mut acc = params.identity();
        for e in 0..=n as u32 {
            powers.entry(acc.clone()).or_insert(e);
            acc = params.mul(&acc, base);
        }
        ExponentTable { n, powers }
    }

    pub fn lookup(&self, v: &GroupElement) -> Result<u32> {
        self.powers.get(v).copied().ok_or(Error::NotAPower(self.n))
    }
}

/// `l` with `v = Y^l`, `0 <= l <= n`.
pub fn exponent_from_power(params: &GroupParams, v: &GroupElement, big_y: &GroupElement, n: usize) -> Result<u32> {
    ExponentTable::new(params, big_y, n).lookup(v)
}
