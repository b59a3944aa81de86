// SPDX-License-Identifier: MIT OR Apache-2.0

//! Inner-product tables with interval sums.
//!
//! Every scan statistic in this crate is a combination of three kinds of
//! sums of `X_i^T X_j` over index rectangles: pairs within a block, and the
//! cross sum between two adjacent blocks. [`IntervalSums`] abstracts those
//! queries. [`GramTable`] answers them in O(1) from a two-dimensional prefix
//! table held in double-double precision; [`PairTable`] is the cheaper
//! workspace used once per bootstrap replicate.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Interval queries over a symmetric `n x n` inner-product table.
///
/// Indices are 1-based and inclusive.
pub trait IntervalSums {
    /// Number of observations `n`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `sum_{a <= i < j <= b} G[i][j]`; zero when `b <= a`.
    fn pair_sum(&self, a: usize, b: usize) -> f64;

    /// `sum_{i=a..m} sum_{j=m+1..b} G[i][j]`.
    fn cross_sum(&self, a: usize, m: usize, b: usize) -> f64 {
        self.pair_sum(a, b) - self.pair_sum(a, m) - self.pair_sum(m + 1, b)
    }
}

/// Error-free transformation: `a + b = s + err` exactly.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    #[inline]
    fn add(self, other: DoubleDouble) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = two_sum(s, e);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn add_f64(self, x: f64) -> DoubleDouble {
        let (s, e) = two_sum(self.hi, x);
        let (hi, lo) = two_sum(s, e + self.lo);
        DoubleDouble { hi, lo }
    }

    #[inline]
    fn neg(self) -> DoubleDouble {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    fn sub(self, other: DoubleDouble) -> DoubleDouble {
        self.add(other.neg())
    }

    #[inline]
    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Gram matrix `G[i][j] = <X_i, X_j>` with 2D prefix sums.
///
/// Immutable after construction; all queries are pure reads.
#[derive(Clone, Debug)]
pub struct GramTable {
    n: usize,
    gram: Vec<f64>,
    // (n+1) x (n+1), prefix[i][j] = sum of gram over rows < i, cols < j
    prefix: Vec<DoubleDouble>,
    diag_prefix: Vec<DoubleDouble>,
}

impl GramTable {
    /// Builds the Gram table of the rows of `x`. Cost `O(n^2 p)`.
    pub fn build(x: &DataMatrix) -> Self {
        let n = x.n();
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            let ri = x.row(i);
            for j in i..n {
                let v: f64 = ri.iter().zip(x.row(j)).map(|(a, b)| a * b).sum();
                gram[i * n + j] = v;
                gram[j * n + i] = v;
            }
        }
        Self::from_symmetric(n, gram)
    }

    /// Wraps an explicit `n x n` row-major matrix. Only the upper triangle
    /// is read; it is mirrored so the stored table is exactly symmetric.
    pub fn from_matrix(n: usize, mut gram: Vec<f64>) -> Result<Self> {
        if gram.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: gram.len(),
            });
        }
        if let Some(pos) = gram.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / n,
                col: pos % n,
            });
        }
        for i in 0..n {
            for j in 0..i {
                gram[i * n + j] = gram[j * n + i];
            }
        }
        Ok(Self::from_symmetric(n, gram))
    }

    fn from_symmetric(n: usize, gram: Vec<f64>) -> Self {
        let w = n + 1;
        let mut prefix = vec![DoubleDouble::default(); w * w];
        for i in 0..n {
            let mut row = DoubleDouble::default();
            for j in 0..n {
                row = row.add_f64(gram[i * n + j]);
                prefix[(i + 1) * w + j + 1] = prefix[i * w + j + 1].add(row);
            }
        }
        let mut diag_prefix = vec![DoubleDouble::default(); w];
        for i in 0..n {
            diag_prefix[i + 1] = diag_prefix[i].add_f64(gram[i * n + i]);
        }
        Self {
            n,
            gram,
            prefix,
            diag_prefix,
        }
    }

    /// Table of `e_i e_j G[i][j]`.
    pub fn reweighted(&self, e: &[f64]) -> Result<Self> {
        if e.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: e.len(),
            });
        }
        let n = self.n;
        let mut gram = self.gram.clone();
        for i in 0..n {
            for j in 0..n {
                gram[i * n + j] *= e[i] * e[j];
            }
        }
        Self::from_matrix(n, gram)
    }

    /// Entry `G[i][j]`, 1-based.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.gram[(i - 1) * self.n + (j - 1)]
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.gram
    }

    fn rect(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> DoubleDouble {
        if r1 < r0 || c1 < c0 {
            return DoubleDouble::default();
        }
        let w = self.n + 1;
        let p = |i: usize, j: usize| self.prefix[i * w + j];
        p(r1, c1)
            .sub(p(r0 - 1, c1))
            .sub(p(r1, c0 - 1))
            .add(p(r0 - 1, c0 - 1))
    }

    fn diag(&self, a: usize, b: usize) -> DoubleDouble {
        if b < a {
            return DoubleDouble::default();
        }
        self.diag_prefix[b].sub(self.diag_prefix[a - 1])
    }

    /// Sum of `G[i][j]` over rows `r0..=r1` and columns `c0..=c1`.
    pub fn block_sum(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        self.rect(r0, r1, c0, c1).value()
    }

    /// `block_sum(a,b,a,b)` minus the diagonal over `[a,b]`.
    pub fn off_diag_sum(&self, a: usize, b: usize) -> f64 {
        self.rect(a, b, a, b).sub(self.diag(a, b)).value()
    }

    /// `sum_{i=a..b} G[i][i]`.
    pub fn diag_sum(&self, a: usize, b: usize) -> f64 {
        self.diag(a, b).value()
    }
}

impl IntervalSums for GramTable {
    fn len(&self) -> usize {
        self.n
    }

    fn pair_sum(&self, a: usize, b: usize) -> f64 {
        if b <= a {
            return 0.0;
        }
        0.5 * self.rect(a, b, a, b).sub(self.diag(a, b)).value()
    }

    fn cross_sum(&self, a: usize, m: usize, b: usize) -> f64 {
        self.block_sum(a, m, m + 1, b)
    }
}

/// Upper-triangular table of within-interval pair sums `P(a, b)`.
///
/// Rebuilt in `O(n^2)` for each bootstrap replicate from a fixed Gram
/// table and a multiplier vector, without allocating.
#[derive(Clone, Debug)]
pub struct PairTable {
    n: usize,
    // pairs[(a-1)*n + (b-1)] = P(a, b) for a <= b
    pairs: Vec<f64>,
}

impl PairTable {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            pairs: vec![0.0; n * n],
        }
    }

    /// Fills the table with pair sums of `e_i e_j G[i][j]`.
    pub fn fill_weighted(&mut self, gram: &GramTable, e: &[f64]) {
        let n = self.n;
        debug_assert_eq!(gram.len(), n);
        debug_assert_eq!(e.len(), n);
        let g = gram.entries();
        for a in (0..n).rev() {
            // row a: P(a, b) = P(a+1, b) + e_a * sum_{j=a+1..b} e_j G[a][j]
            let mut run = 0.0;
            self.pairs[a * n + a] = 0.0;
            for b in a + 1..n {
                run += e[b] * g[a * n + b];
                let below = if a + 1 < n { self.pairs[(a + 1) * n + b] } else { 0.0 };
                self.pairs[a * n + b] = below + e[a] * run;
            }
        }
    }
}

impl IntervalSums for PairTable {
    fn len(&self) -> usize {
        self.n
    }

    fn pair_sum(&self, a: usize, b: usize) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.pairs[(a - 1) * self.n + (b - 1)]
    }
}
