//! Degree budget and pipeline parameters.

use num_bigint::BigUint;
use num_traits::Pow;

use crate::algebra::Monomial;
use crate::error::{Error, Result};

/// Resource ceilings for the annihilator pipeline.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Max Delta^m (row count of the product matrix).
    pub max_rows: u64,
    /// Max number of product-matrix columns examined.
    pub max_columns: usize,
    /// Max terms in any intermediate polynomial.
    pub max_terms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_rows: 1_000_000, max_columns: 1_000_000, max_terms: 1_000_000 }
    }
}

/// D = ceil((nd)^(m/(n-m))) + 1, i.e. one more than the least c with
/// c^(n-m) >= (nd)^m.
pub fn degree_bound(m: usize, n: usize, d: u32) -> Result<u32> {
    if m == 0 || d == 0 {
        return Err(Error::Params("degree_bound needs m >= 1 and d >= 1".into()));
    }
    if n <= m {
        return Err(Error::Params(format!("degree_bound needs n > m (n = {n}, m = {m})")));
    }
    let target: BigUint = BigUint::from(n as u64 * d as u64).pow(m as u32);
    let k = (n - m) as u32;
    // integer k-th root, rounded up
    let mut lo = 1u64;
    let mut hi = 2u64;
    while BigUint::from(hi).pow(k) < target {
        hi *= 2;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if BigUint::from(mid).pow(k) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let big_d = u32::try_from(lo + 1).map_err(|_| Error::Overflow("D does not fit in 32 bits".into()))?;
    if !dimension_count_ok(m, n, d, big_d) {
        return Err(Error::Internal(format!("dimension count fails for m={m} n={n} d={d} D={big_d}")));
    }
    Ok(big_d)
}

/// (n d D)^m < D^n.
pub fn dimension_count_ok(m: usize, n: usize, d: u32, big_d: u32) -> bool {
    let delta = BigUint::from(n as u64 * d as u64 * big_d as u64);
    delta.pow(m as u32) < BigUint::from(big_d).pow(n as u32)
}

/// Base^m as u64, None on overflow.
pub fn checked_pow(base: u64, m: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Everything the later stages need.
#[derive(Clone, Debug)]
pub struct AnnihilatorParams {
    pub m: usize,
    /// Number of map outputs fed to the pipeline (after truncation).
    pub n: usize,
    pub d: u32,
    pub big_d: u32,
    /// Row base: z-exponents of products are below it.
    pub delta: u64,
    /// Bits per exponent coordinate.
    pub small_delta: usize,
    /// Bits per row/column index of M~.
    pub big_l: usize,
    pub alpha: u64,
    pub k: usize,
    /// Delta^m.
    pub r: u64,
    /// e^(1) .. e^(K).
    pub columns: Vec<Monomial>,
}

impl AnnihilatorParams {
    /// sign of the last row of M~: (-1)^(K-1).
    pub fn last_row_sign(&self) -> i64 {
        if (self.k - 1) % 2 == 0 {
            1
        } else {
            -1
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(degree_bound(1, 2, 1).unwrap(), 3);
        assert_eq!(degree_bound(1, 3, 2).unwrap(), 4);
        let d = degree_bound(2, 4, 3).unwrap();
        assert_eq!(d, 13);
        assert!(d - 1 <= 3 * 2 * 3);
        assert!(degree_bound(2, 2, 1).is_err());
    }

    #[test]
    fn count_holds_over_a_grid() {
        for m in 1..=3 {
            for n in m + 1..=m + 4 {
                for d in 1..=4 {
                    let big_d = degree_bound(m, n, d).unwrap();
                    assert!(dimension_count_ok(m, n, d, big_d));
                    if n >= 2 * m {
                        assert!(big_d - 1 <= 3 * m as u32 * d);
                    }
                }
            }
        }
    }
}
