//! Linear algebra modulo word-sized primes and CRT reconstruction.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::{bigint_mod, inv_mod, mul_mod, sub_mod};

/// Rank of a dense matrix mod p.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(piv) = (r..nrows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(piv, r);
        let inv = inv_mod(a[r][c], p).expect("nonzero pivot");
        for i in r + 1..nrows {
            if a[i][c] == 0 {
                continue;
            }
            let f = mul_mod(a[i][c], inv, p);
            for j in c..ncols {
                let t = mul_mod(f, a[r][j], p);
                a[i][j] = sub_mod(a[i][j], t, p);
            }
        }
        r += 1;
    }
    r
}

/// Solve `B f = c` mod p for square `B`; returns `(det B, f)` or `None` if singular.
pub fn solve_mod_p(b: &[Vec<u64>], c: &[u64], p: u64) -> Option<(u64, Vec<u64>)> {
    let n = b.len();
    let mut a: Vec<Vec<u64>> = b.iter().zip(c).map(|(r, &v)| {
        let mut r = r.clone();
        r.push(v);
        r
    }).collect();
    let mut det = 1u64;
    for col in 0..n {
        let piv = (col..n).find(|&i| a[i][col] != 0)?;
        if piv != col {
            a.swap(piv, col);
            det = sub_mod(0, det, p);
        }
        det = mul_mod(det, a[col][col], p);
        let inv = inv_mod(a[col][col], p)?;
        for j in col..=n {
            a[col][j] = mul_mod(a[col][j], inv, p);
        }
        for i in 0..n {
            if i == col || a[i][col] == 0 {
                continue;
            }
            let f = a[i][col];
            for j in col..=n {
                let t = mul_mod(f, a[col][j], p);
                a[i][j] = sub_mod(a[i][j], t, p);
            }
        }
    }
    Some((det, a.into_iter().map(|r| r[n]).collect()))
}

/// Incremental column basis mod p over a growing row space.
///
/// Each stored vector has a pivot row where it is 1 and every later vector is 0.
#[derive(Clone, Debug)]
pub struct ColumnBasis {
    p: u64,
    basis: Vec<(usize, Vec<u64>)>,
}

impl ColumnBasis {
    pub fn new(p: u64) -> Self {
        ColumnBasis { p, basis: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pivot_rows(&self) -> Vec<usize> {
        self.basis.iter().map(|(r, _)| *r).collect()
    }

    /// Try to extend the basis; returns false if `v` is dependent.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let p = self.p;
        for (piv, b) in &self.basis {
            let f = v.get(*piv).copied().unwrap_or(0);
            if f == 0 {
                continue;
            }
            if v.len() < b.len() {
                v.resize(b.len(), 0);
            }
            for (x, y) in v.iter_mut().zip(b) {
                if *y != 0 {
                    *x = sub_mod(*x, mul_mod(f, *y, p), p);
                }
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(v[piv], p).expect("prime modulus");
        for x in v.iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        // keep earlier vectors reduced at the new pivot
        for (_, b) in self.basis.iter_mut() {
            let f = b.get(piv).copied().unwrap_or(0);
            if f == 0 {
                continue;
            }
            if b.len() < v.len() {
                b.resize(v.len(), 0);
            }
            for (x, y) in b.iter_mut().zip(&v) {
                if *y != 0 {
                    *x = sub_mod(*x, mul_mod(f, *y, p), p);
                }
            }
        }
        self.basis.push((piv, v));
        true
    }
}

/// Incremental Chinese remaindering into a symmetric-range integer.
#[derive(Clone, Debug)]
pub struct Crt {
    value: BigInt,
    modulus: BigInt,
}

impl Default for Crt {
    fn default() -> Self {
        Crt { value: BigInt::zero(), modulus: BigInt::one() }
    }
}

impl Crt {
    pub fn push(&mut self, r: u64, p: u64) {
        let cur = bigint_mod(&self.value, p);
        let minv = inv_mod(bigint_mod(&self.modulus, p), p).expect("coprime moduli");
        let t = mul_mod(sub_mod(r % p, cur, p), minv, p);
        self.value += &self.modulus * BigInt::from(t);
        self.modulus *= BigInt::from(p);
    }

    pub fn modulus_bits(&self) -> u64 {
        self.modulus.bits()
    }

    /// Representative in (-M/2, M/2].
    pub fn symmetric(&self) -> BigInt {
        let half: BigInt = &self.modulus >> 1;
        if self.value > half {
            &self.value - &self.modulus
        } else {
            self.value.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::{prime_sequence, DEFAULT_PRIME};

    #[test]
    fn crt_recovers_negative() {
        let x = BigInt::parse_bytes(b"-123456789012345678901234567890123", 10).unwrap();
        let mut c = Crt::default();
        for p in prime_sequence(3) {
            c.push(bigint_mod(&x, p), p);
        }
        assert_eq!(c.symmetric(), x);
    }

    #[test]
    fn basis_detects_dependency() {
        let p = DEFAULT_PRIME;
        let mut b = ColumnBasis::new(p);
        assert!(b.insert(vec![1, 2, 3]));
        assert!(b.insert(vec![0, 1, 1]));
        assert!(!b.insert(vec![2, 5, 7]));
        assert!(b.insert(vec![0, 0, 0, 4]));
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn solve_small() {
        let p = 101;
        let (det, f) = solve_mod_p(&[vec![2, 1], vec![1, 3]], &[5, 10], p).unwrap();
        assert_eq!(det, 5);
        assert_eq!(f, vec![1, 3]);
        assert!(solve_mod_p(&[vec![1, 2], vec![2, 4]], &[1, 1], p).is_none());
        assert_eq!(rank_mod_p(&[vec![1, 2], vec![2, 4]], p), 1);
    }
}
