//! The product matrix M (columns = coefficient vectors of G^e) and its first
//! column dependency.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::params::{checked_pow, Limits};
use crate::algebra::matrix::{column_norm_log2, Label};
use crate::algebra::modular::{solve_mod_p, ColumnBasis, Crt};
use crate::algebra::scalar::{bigint_mod, prime_sequence, rational_mod};
use crate::algebra::monomial::monomials_grlex_prefix;
use crate::algebra::{monomials_grlex, ExactMatrix, Monomial, SparsePoly};
use crate::error::{Error, Result};

/// `x^{e^(K)} = sum_j coeffs[j] x^{e^(j)}` holds after substituting G.
#[derive(Clone, Debug, PartialEq)]
pub struct DependencyCertificate {
    /// K (1-based index of the dependent column).
    pub k: usize,
    /// f_{e^(1)} .. f_{e^(K-1)}.
    pub coeffs: Vec<BigRational>,
    /// e^(1) .. e^(K).
    pub labels: Vec<Monomial>,
}

impl DependencyCertificate {
    pub fn dependent(&self) -> &Monomial {
        &self.labels[self.k - 1]
    }

    /// x^{e^(K)} - sum_j f_j x^{e^(j)}.
    pub fn polynomial(&self) -> SparsePoly {
        let n = self.labels[0].arity();
        let mut a = SparsePoly::monomial(self.dependent().clone(), BigRational::one());
        for (f, e) in self.coeffs.iter().zip(&self.labels) {
            if !f.is_zero() {
                a.add_term(e.clone(), -f.clone());
            }
        }
        debug_assert_eq!(a.nvars(), n);
        a
    }

    /// Exact recombination against materialized columns.
    pub fn recombines(&self, columns: &[SparsePoly]) -> bool {
        if columns.len() < self.k {
            return false;
        }
        let mut acc = columns[self.k - 1].clone();
        for (f, c) in self.coeffs.iter().zip(columns) {
            if !f.is_zero() {
                acc = acc.sub(&c.scale(f)).expect("arity");
            }
        }
        acc.is_zero()
    }
}

/// G^e for exponent vectors visited in graded-lex order, memoized.
pub struct ProductColumns<'a> {
    comps: &'a [SparsePoly],
    memo: HashMap<Monomial, SparsePoly>,
    max_terms: usize,
}

impl<'a> ProductColumns<'a> {
    pub fn new(comps: &'a [SparsePoly], max_terms: usize) -> Self {
        ProductColumns { comps, memo: HashMap::new(), max_terms }
    }

    fn nz(&self) -> usize {
        self.comps.first().map_or(0, |g| g.nvars())
    }

    pub fn product(&mut self, e: &Monomial) -> Result<SparsePoly> {
        if let Some(p) = self.memo.get(e) {
            return Ok(p.clone());
        }
        let p = match e.exps().iter().rposition(|&x| x > 0) {
            None => SparsePoly::one(self.nz()),
            Some(a) => {
                let mut parent = e.exps().to_vec();
                parent[a] -= 1;
                let base = self.product(&Monomial(parent))?;
                base.mul(&self.comps[a])?
            }
        };
        if p.num_terms() > self.max_terms {
            return Err(Error::ResourceCap(format!("product G^{e} has {} terms (cap {})", p.num_terms(), self.max_terms)));
        }
        self.memo.insert(e.clone(), p.clone());
        Ok(p)
    }
}

fn row_base_check(nz: usize, delta: u64, limits: &Limits) -> Result<u64> {
    match checked_pow(delta, nz) {
        Some(r) if r <= limits.max_rows => Ok(r),
        _ => Err(Error::ResourceCap(format!("Delta^m = {delta}^{nz} exceeds the row cap {}", limits.max_rows))),
    }
}

/// Materialized M: rows are z-monomials of individual degree < Delta,
/// columns x-monomials of individual degree < D, both graded-lex.
pub fn build_product_matrix(comps: &[SparsePoly], big_d: u32, delta: u64, limits: &Limits) -> Result<ExactMatrix> {
    let nz = comps.first().map_or(0, |g| g.nvars());
    let n = comps.len();
    let r = row_base_check(nz, delta, limits)?;
    let ncols = checked_pow(big_d as u64, n).filter(|c| *c as usize <= limits.max_columns);
    let ncols = ncols.ok_or_else(|| Error::ResourceCap(format!("D^n = {big_d}^{n} columns exceed the cap")))?;
    if r.saturating_mul(ncols) > 50_000_000 {
        return Err(Error::ResourceCap(format!("product matrix {r} x {ncols} is too large to materialize")));
    }
    let rows = monomials_grlex(nz, (delta - 1) as u32);
    let index: HashMap<&Monomial, usize> = rows.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let cols = monomials_grlex(n, big_d - 1);
    let mut mat = ExactMatrix::zeros(rows.len(), cols.len());
    let mut gen = ProductColumns::new(comps, limits.max_terms);
    for (j, e) in cols.iter().enumerate() {
        let p = gen.product(e)?;
        for (mono, c) in p.terms() {
            let i = *index.get(mono).ok_or_else(|| Error::Params(format!("product exponent {mono} reaches Delta = {delta}")))?;
            mat.set(i, j, c.clone());
        }
    }
    mat.with_labels(
        Some(rows.into_iter().map(Label::Monomial).collect()),
        Some(cols.into_iter().map(Label::Monomial).collect()),
    )
}

/// Reference path: Bareiss on a materialized M.
pub fn first_dependency_of_matrix(m: &ExactMatrix) -> Result<DependencyCertificate> {
    let info = m.rank_and_first_dependency()?;
    let k0 = info.first_dependent.ok_or_else(|| Error::Internal("product matrix has independent columns".into()))?;
    let labels = match &m.col_labels {
        Some(l) => l[..=k0]
            .iter()
            .map(|x| match x {
                Label::Monomial(e) => Ok(e.clone()),
                Label::Index(_) => Err(Error::Params("columns must be labelled by exponent vectors".into())),
            })
            .collect::<Result<Vec<_>>>()?,
        None => return Err(Error::Params("columns must be labelled by exponent vectors".into())),
    };
    let cert = DependencyCertificate { k: k0 + 1, coeffs: info.coeffs, labels };
    // recombination on the matrix itself
    for r in 0..m.rows() {
        let mut s = m.get(r, k0).clone();
        for (j, f) in cert.coeffs.iter().enumerate() {
            s -= f * m.get(r, j);
        }
        if !s.is_zero() {
            return Err(Error::Verification(format!("certificate fails on row {}", r + 1)));
        }
    }
    Ok(cert)
}

/// Outcome of the streaming dependency search.
#[derive(Clone, Debug)]
pub struct Dependency {
    pub cert: DependencyCertificate,
    /// G^{e^(1)} .. G^{e^(K)}.
    pub products: Vec<SparsePoly>,
}

/// First dependent column of M, scanning columns in graded-lex order with
/// individual degree below `big_d`. Rank profile mod p, Cramer numerators by
/// CRT, exact check over Q.
pub fn first_dependency(comps: &[SparsePoly], big_d: u32, limits: &Limits) -> Result<Dependency> {
    let n = comps.len();
    let labels = monomials_grlex_prefix(n, big_d - 1, limits.max_columns);
    let mut gen = ProductColumns::new(comps, limits.max_terms);
    let mut products: Vec<SparsePoly> = Vec::new();
    let primes = prime_sequence(4);
    for (attempt, &p) in primes.iter().enumerate() {
        let mut rows: HashMap<Monomial, usize> = HashMap::new();
        let mut basis = ColumnBasis::new(p);
        let mut found = None;
        let mut bad_prime = false;
        for (j, e) in labels.iter().enumerate() {
            if products.len() <= j {
                products.push(gen.product(e)?);
            }
            let col = &products[j];
            for (mono, _) in col.terms() {
                let next = rows.len();
                rows.entry(mono.clone()).or_insert(next);
            }
            let mut v = vec![0u64; rows.len()];
            for (mono, c) in col.terms() {
                match rational_mod(c, p) {
                    Some(x) => v[rows[mono]] = x,
                    None => bad_prime = true,
                }
            }
            if bad_prime {
                break;
            }
            if !basis.insert(v) {
                found = Some(j);
                break;
            }
        }
        if bad_prime {
            continue;
        }
        let Some(k0) = found else {
            return Err(Error::Internal(format!(
                "no dependency among the first {} columns; parameters are inconsistent",
                labels.len()
            )));
        };
        let pivots = basis.pivot_rows();
        let coeffs = cramer_solve(&products[..=k0], &rows, &pivots, attempt)?;
        let cert = DependencyCertificate { k: k0 + 1, coeffs, labels: labels[..=k0].to_vec() };
        if cert.recombines(&products) {
            products.truncate(k0 + 1);
            return Ok(Dependency { cert, products });
        }
    }
    Err(Error::Verification("dependency certificate failed exact recombination for every prime tried".into()))
}

// Integer columns restricted to the pivot rows, Cramer numerators by CRT.
fn cramer_solve(cols: &[SparsePoly], rows: &HashMap<Monomial, usize>, pivots: &[usize], salt: usize) -> Result<Vec<BigRational>> {
    let k = cols.len() - 1;
    let pos: HashMap<usize, usize> = pivots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    // integer scaling per column
    let mut scale = Vec::with_capacity(k + 1);
    let mut int_cols: Vec<Vec<BigInt>> = Vec::with_capacity(k + 1);
    for c in cols {
        let mut l = BigInt::one();
        for (_, q) in c.terms() {
            l = l.lcm(q.denom());
        }
        let mut v = vec![BigInt::zero(); k];
        for (mono, q) in c.terms() {
            if let Some(&i) = pos.get(&rows[mono]) {
                v[i] = (q * BigRational::from_integer(l.clone())).to_integer();
            }
        }
        scale.push(l);
        int_cols.push(v);
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let bound = column_norm_log2(&int_cols) + 2;
    // plenty of primes, walked in parallel batches
    let primes = prime_sequence((bound / 60 + 8) as usize * 2 + salt * 4);
    let primes: Vec<u64> = primes.into_iter().skip(4 + salt).collect();
    let mut det = Crt::default();
    let mut nums: Vec<Crt> = vec![Crt::default(); k];
    let mut used = 0usize;
    for chunk in primes.chunks(16) {
        if det.modulus_bits() > bound {
            break;
        }
        let res: Vec<Option<(u64, u64, Vec<u64>)>> = chunk
            .par_iter()
            .map(|&p| {
                let b: Vec<Vec<u64>> = (0..k).map(|r| (0..k).map(|j| bigint_mod(&int_cols[j][r], p)).collect()).collect();
                let c: Vec<u64> = int_cols[k].iter().map(|x| bigint_mod(x, p)).collect();
                let (d, f) = solve_mod_p(&b, &c, p)?;
                let u = f.iter().map(|&x| crate::algebra::scalar::mul_mod(x, d, p)).collect();
                Some((p, d, u))
            })
            .collect();
        for (p, d, u) in res.into_iter().flatten() {
            if det.modulus_bits() > bound {
                break;
            }
            det.push(d, p);
            for (crt, x) in nums.iter_mut().zip(u) {
                crt.push(x, p);
            }
            used += 1;
        }
    }
    if det.modulus_bits() <= bound || used == 0 {
        return Err(Error::Internal("ran out of primes for CRT reconstruction".into()));
    }
    let d = det.symmetric();
    if d.is_zero() {
        return Err(Error::Internal("pivot minor reconstructed as zero".into()));
    }
    let sk = BigRational::from_integer(scale[k].clone());
    Ok(nums
        .iter()
        .zip(&scale)
        .map(|(u, s)| BigRational::new(u.symmetric(), d.clone()) * BigRational::from_integer(s.clone()) / &sk)
        .collect())
}

/// Exact nullspace membership against an independently built product matrix.
pub fn in_product_nullspace(a: &SparsePoly, comps: &[SparsePoly]) -> Result<bool> {
    let mut gen = ProductColumns::new(comps, usize::MAX);
    let mut acc = SparsePoly::zero(comps.first().map_or(0, |g| g.nvars()));
    for (e, c) in a.terms() {
        acc = acc.add(&gen.product(e)?.scale(c))?;
    }
    Ok(acc.is_zero())
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn z(k: u32) -> SparsePoly {
        SparsePoly::var(1, 0).pow(k)
    }

    #[test]
    fn identical_components_share_columns() {
        let g = vec![z(1), z(1)];
        let m = build_product_matrix(&g, 3, 6, &Limits::default()).unwrap();
        // columns in order 1, x2, x1, ...
        assert_eq!(m.column(1), m.column(2));
        assert_eq!(m.get(0, 0), &rat(1));
        assert!((1..m.rows()).all(|r| m.get(r, 0).is_zero()));
    }

    #[test]
    fn square_relation() {
        let g = vec![z(1), z(2)];
        let m = build_product_matrix(&g, 5, 20, &Limits::default()).unwrap();
        let cols = monomials_grlex(2, 4);
        let a = cols.iter().position(|e| e.exps() == [2, 0]).unwrap();
        let b = cols.iter().position(|e| e.exps() == [0, 1]).unwrap();
        assert_eq!(m.column(a), m.column(b));
    }

    #[test]
    fn streaming_matches_bareiss() {
        let cases = vec![
            vec![z(1), z(1)],
            vec![z(1), z(2)],
            vec![z(1), SparsePoly::zero(1)],
            vec![z(2).add(&z(1)).unwrap(), z(3).sub(&SparsePoly::one(1)).unwrap()],
        ];
        for g in cases {
            let d = 4;
            let delta = 2 * 3 * d as u64;
            let m = build_product_matrix(&g, d, delta, &Limits::default()).unwrap();
            let reference = first_dependency_of_matrix(&m).unwrap();
            let fast = first_dependency(&g, d, &Limits::default()).unwrap();
            assert_eq!(fast.cert, reference, "{g:?}");
        }
    }

    #[test]
    fn examples() {
        let dep = first_dependency(&[z(1), z(1)], 3, &Limits::default()).unwrap();
        let a = dep.cert.polynomial();
        assert_eq!(a.to_text(), "vars 2\n1 : 1 0\n-1 : 0 1\n");
        let dep = first_dependency(&[z(1), SparsePoly::zero(1)], 3, &Limits::default()).unwrap();
        assert_eq!(dep.cert.k, 2);
        assert!(dep.cert.coeffs.iter().all(|c| c.is_zero()));
        let dep = first_dependency(&[z(1), z(2)], 5, &Limits::default()).unwrap();
        assert_eq!(dep.cert.polynomial().to_text(), "vars 2\n1 : 2 0\n-1 : 0 1\n");
        assert!(in_product_nullspace(&dep.cert.polynomial(), &[z(1), z(2)]).unwrap());
    }
}
