//! Dense exact matrices and fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Label {
    Monomial(Monomial),
    Index(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
    pub row_labels: Option<Vec<Label>>,
    pub col_labels: Option<Vec<Label>>,
}

/// Outcome of [`ExactMatrix::rank_and_first_dependency`].
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyInfo {
    pub rank: usize,
    /// 0-based index of the first column lying in the span of earlier ones.
    pub first_dependent: Option<usize>,
    /// `column_K = sum_j coeffs[j] * column_j` for `j < K`.
    pub coeffs: Vec<BigRational>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols], row_labels: None, col_labels: None }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ArityMismatch { expected: c, got: row.len() });
            }
            data.extend(row);
        }
        Ok(ExactMatrix { rows: r, cols: c, data, row_labels: None, col_labels: None })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("rectangular")
    }

    pub fn with_labels(mut self, rows: Option<Vec<Label>>, cols: Option<Vec<Label>>) -> Result<Self> {
        if rows.as_ref().is_some_and(|l| l.len() != self.rows) || cols.as_ref().is_some_and(|l| l.len() != self.cols) {
            return Err(Error::Params("label count does not match dimensions".into()));
        }
        self.row_labels = rows;
        self.col_labels = cols;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<BigRational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    /// Keep the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m.set(r, k, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(rows.len(), self.cols);
        for (k, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                m.set(k, c, self.get(r, c).clone());
            }
        }
        m
    }

    pub fn mul(&self, o: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != o.rows {
            return Err(Error::ArityMismatch { expected: self.cols, got: o.rows });
        }
        let mut m = ExactMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j) + a * o.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>> {
        if v.len() != self.cols {
            return Err(Error::ArityMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).fold(BigRational::zero(), |s, t| s + t))
            .collect())
    }

    /// Rows scaled by the lcm of their denominators; column relations are unchanged.
    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
                row.iter().map(|q| (q * BigRational::from_integer(l.clone())).to_integer()).collect()
            })
            .collect()
    }

    pub fn exact_det(&self) -> Result<BigRational> {
        if self.rows != self.cols {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        if self.rows == 0 {
            return Ok(BigRational::one());
        }
        // undo the row scaling afterwards
        let mut scale = BigRational::one();
        for r in 0..self.rows {
            let l = self.row(r).iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            scale = scale * BigRational::from_integer(l);
        }
        let mut a = self.integer_rows();
        let (pivots, swaps) = bareiss_echelon(&mut a, self.cols);
        if pivots.len() < self.rows {
            return Ok(BigRational::zero());
        }
        let mut d = a[self.rows - 1][self.cols - 1].clone();
        if swaps % 2 == 1 {
            d = -d;
        }
        Ok(BigRational::from_integer(d) / scale)
    }

    pub fn rank(&self) -> usize {
        let mut a = self.integer_rows();
        bareiss_echelon(&mut a, self.cols).0.len()
    }

    pub fn rank_and_first_dependency(&self) -> Result<DependencyInfo> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut a = self.integer_rows();
        let (pivots, _) = bareiss_echelon(&mut a, self.cols);
        let rank = pivots.len();
        let k = (0..self.cols).find(|c| pivots.get(*c) != Some(c));
        let coeffs = match k {
            None => Vec::new(),
            Some(k) => back_substitute(&a, k),
        };
        Ok(DependencyInfo { rank, first_dependent: k, coeffs })
    }
}

/// Fraction-free row echelon form in place. Returns pivot columns and the
/// number of row swaps.
pub fn bareiss_echelon(a: &mut [Vec<BigInt>], ncols: usize) -> (Vec<usize>, usize) {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut swaps = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        let (top, rest) = a.split_at_mut(r + 1);
        let prow = &top[r];
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let v = &prow[c] * &row[j] - &f * &prow[j];
                row[j] = if prev.is_one() { v } else { v.div_floor(&prev) };
            }
            row[c] = BigInt::zero();
        }
        // rows above keep their entries; columns after c in skipped rows are untouched
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, swaps)
}

// Solve the leading k x k upper-triangular system against column k.
fn back_substitute(a: &[Vec<BigInt>], k: usize) -> Vec<BigRational> {
    let mut f = vec![BigRational::zero(); k];
    for i in (0..k).rev() {
        let mut s = BigRational::from_integer(a[i][k].clone());
        for j in i + 1..k {
            s -= BigRational::from_integer(a[i][j].clone()) * &f[j];
        }
        f[i] = s / BigRational::from_integer(a[i][i].clone());
    }
    f
}

/// Hadamard-type bound: log2 of the product of column norms, rounded up.
pub fn column_norm_log2(cols: &[Vec<BigInt>]) -> u64 {
    let mut bits = 0u64;
    for c in cols {
        let sq: BigInt = c.iter().map(|x| x * x).sum();
        if sq > BigInt::one() {
            bits += (sq.bits() + 1) / 2;
        }
    }
    bits
}

pub fn is_zero_vec(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn max_abs_bits(v: &[BigInt]) -> u64 {
    v.iter().map(|x| x.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;

    fn cofactor(m: &[Vec<BigRational>]) -> BigRational {
        let n = m.len();
        if n == 0 {
            return BigRational::one();
        }
        let mut s = BigRational::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigRational>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| v.clone()).collect()).collect();
            let t = &m[0][j] * cofactor(&minor);
            if j % 2 == 0 {
                s += t
            } else {
                s -= t
            }
        }
        s
    }

    #[test]
    fn identity_det_and_rank() {
        let i = ExactMatrix::from_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(i.exact_det().unwrap(), rat(1));
        let d = i.rank_and_first_dependency().unwrap();
        assert_eq!(d.rank, 3);
        assert_eq!(d.first_dependent, None);
    }

    #[test]
    fn two_by_two() {
        let m = ExactMatrix::from_i64(&[vec![3, 7], vec![2, 5]]);
        assert_eq!(m.exact_det().unwrap(), rat(1));
        let m = ExactMatrix::from_i64(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(m.exact_det().unwrap(), rat(-1));
        assert!(ExactMatrix::from_i64(&[vec![1, 2]]).exact_det().is_err());
    }

    #[test]
    fn duplicate_column_dependency() {
        let m = ExactMatrix::from_i64(&[vec![2, 2], vec![-5, -5]]);
        let d = m.rank_and_first_dependency().unwrap();
        assert_eq!(d.first_dependent, Some(1));
        assert_eq!(d.coeffs, vec![rat(1)]);
    }

    #[test]
    fn rank_deficient_with_skipped_columns() {
        // second column zero, fourth = first + third
        let m = ExactMatrix::from_i64(&[vec![1, 0, 2, 3], vec![4, 0, 5, 9], vec![7, 0, 8, 15]]);
        let d = m.rank_and_first_dependency().unwrap();
        assert_eq!(d.rank, 2);
        assert_eq!(d.first_dependent, Some(1));
        assert_eq!(d.coeffs, vec![rat(0)]);
    }

    #[test]
    fn rational_entries() {
        let half = BigRational::new(1.into(), 2.into());
        let m = ExactMatrix::from_rows(vec![vec![half.clone(), rat(1)], vec![rat(3), half.clone()]]).unwrap();
        assert_eq!(m.exact_det().unwrap(), BigRational::new((-11).into(), 4.into()));
        assert_eq!(cofactor(&[vec![half.clone(), rat(1)], vec![rat(3), half]]), BigRational::new((-11).into(), 4.into()));
    }

    #[test]
    fn det_matches_cofactor_fixed() {
        let rows = vec![
            vec![2, -1, 0, 3, 1],
            vec![1, 4, -2, 0, 5],
            vec![-3, 2, 1, 1, 0],
            vec![0, 1, 3, -4, 2],
            vec![5, 0, -1, 2, -2],
        ];
        let m = ExactMatrix::from_i64(&rows);
        let q: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect();
        assert_eq!(m.exact_det().unwrap(), cofactor(&q));
    }
}
