//! The K x K matrix M~: K-1 rows of evaluations (G(v_{alpha,i}))^{e^(j)} and a
//! last row of signed monomials; its determinant and its encoder circuit.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use super::alpha::eval_point;
use super::map::ExplicitMap;
use super::params::AnnihilatorParams;
use crate::algebra::{rat, ExactMatrix, SparsePoly};
use crate::circuit::{Builder, GateId, Var, Wire};
use crate::detc::encoder::{index_width, MatrixEncoder};
use crate::error::{Error, Result};
use crate::gadgets::bits::{and, eq_const, gate_of, lt_const, sum_exclusive, vars_as_bits, Bit};
use crate::gadgets::mon::mon;
use crate::gadgets::pow::{pow_from_table, pow_table};

#[derive(Clone, Debug)]
pub struct Mtilde {
    /// First K-1 rows.
    pub numeric: ExactMatrix,
    /// (-1)^(K-1).
    pub last_sign: i64,
    /// x-arity of the last row.
    pub nx: usize,
    pub labels: Vec<crate::algebra::Monomial>,
}

impl Mtilde {
    pub fn k(&self) -> usize {
        self.labels.len()
    }

    /// All entries as polynomials in x.
    pub fn materialize(&self) -> Vec<Vec<SparsePoly>> {
        let k = self.k();
        let mut rows: Vec<Vec<SparsePoly>> = (0..k - 1)
            .map(|i| (0..k).map(|j| SparsePoly::constant(self.nx, self.numeric.get(i, j).clone())).collect())
            .collect();
        rows.push(self.labels.iter().map(|e| SparsePoly::monomial(e.clone(), rat(self.last_sign))).collect());
        rows
    }
}

/// Cap on the bit size of a single numeric entry.
pub const MAX_ENTRY_BITS: u64 = 1 << 22;

pub fn build_mtilde(comps: &[SparsePoly], params: &AnnihilatorParams) -> Result<Mtilde> {
    let k = params.k;
    let labels = &params.columns;
    if labels.len() != k {
        return Err(Error::Params(format!("{} column labels for K = {k}", labels.len())));
    }
    // rough size guard: log2 of the largest z-coordinate times degree
    let est = (k as f64) * (params.delta as f64).powi(params.m as i32 - 1) * ((params.alpha + 1) as f64).log2()
        * params.d as f64
        * labels.iter().map(|e| e.total_degree()).max().unwrap_or(0) as f64;
    if est > MAX_ENTRY_BITS as f64 {
        return Err(Error::ResourceCap(format!("M~ entries would need about {est:.0} bits")));
    }
    let rows: Vec<Vec<BigRational>> = (0..k - 1)
        .into_par_iter()
        .map(|i| {
            let g = eval_point(comps, params.alpha, i, params.delta)?;
            Ok(labels
                .iter()
                .map(|e| {
                    e.exps().iter().zip(&g).fold(BigRational::one(), |acc, (&x, v)| {
                        if x == 0 {
                            acc
                        } else {
                            acc * Pow::pow(v, x)
                        }
                    })
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let numeric = if k == 1 { ExactMatrix::zeros(0, 1) } else { ExactMatrix::from_rows(rows)? };
    Ok(Mtilde { numeric, last_sign: params.last_row_sign(), nx: params.n, labels: labels.clone() })
}

/// det(M~) by expansion along the last row, minors concurrently. Also returns
/// det(M' without its last column), the coefficient of x^{e^(K)} up to sign.
pub fn annihilator_direct(mt: &Mtilde) -> Result<(SparsePoly, BigRational)> {
    let k = mt.k();
    let minors: Vec<BigRational> = (0..k)
        .into_par_iter()
        .map(|j| {
            if k == 1 {
                return Ok(BigRational::one());
            }
            let cols: Vec<usize> = (0..k).filter(|&c| c != j).collect();
            mt.numeric.select_columns(&cols).exact_det()
        })
        .collect::<Result<_>>()?;
    let mut a = SparsePoly::zero(mt.nx);
    for (j, (minor, e)) in minors.iter().zip(&mt.labels).enumerate() {
        // cofactor sign (-1)^((K-1) + j), 0-based
        let mut c = minor.clone() * rat(mt.last_sign);
        if (k - 1 + j) % 2 == 1 {
            c = -c;
        }
        if !c.is_zero() {
            a.add_term(e.clone(), c);
        }
    }
    if a.is_zero() {
        return Err(Error::Verification("det(M~) vanishes; alpha or K is wrong".into()));
    }
    Ok((a, minors[k - 1].clone()))
}

/// Encoder C~(x, i, j) = M~[i, e^(j)] for i, j < K.
///
/// ROW(i)_a = LT(i, K-1) * g_a(pow(i)) + EQ(i, K-1) * x_a and the entry is
/// prod_a prod_b (C'_ab(j) ROW_a^(2^b) + 1 - C'_ab(j)) times
/// LT(i, K-1) + (-1)^(K-1) EQ(i, K-1). The n components come from one
/// multi-output instance of C_G labelled "C_G".
pub fn encode_mtilde(map: &ExplicitMap, params: &AnnihilatorParams) -> Result<MatrixEncoder> {
    let k = params.k;
    let n = params.n;
    let m = params.m;
    if map.n() < n || map.m != m {
        return Err(Error::Params(format!("map has {} outputs on {} inputs, params expect {n} on {m}", map.n(), map.m)));
    }
    let w = index_width(k);
    if w != params.big_l {
        return Err(Error::Params(format!("index width {w} but L = {}", params.big_l)));
    }
    let sd = params.small_delta;
    for e in &params.columns {
        if e.exps().iter().any(|&x| (x as u64) >> sd != 0) {
            return Err(Error::Params(format!("exponent {e} does not fit in {sd} bits")));
        }
    }

    // n-output specialization of C_G at a_1..a_n, over z only
    let mut cg = Builder::new(m);
    let mut outs = Vec::with_capacity(n);
    for a in &map.assigns[..n] {
        let mut wiring: Vec<Wire> = (0..m).map(|i| Wire::Var(Var(i as u32))).collect();
        for v in a {
            wiring.push(Wire::Gate(cg.const_rational(v)));
        }
        outs.push(cg.inline(&map.encoder, &wiring, None)?[0]);
    }
    let cg = cg.finish(outs);

    let mut b = Builder::new(n + 2 * w);
    let i = vars_as_bits(&mut b, n, w);
    let j = vars_as_bits(&mut b, n + w, w);
    let table = pow_table(&mut b, &BigInt::from(params.alpha), params.delta, w, m);
    let z = pow_from_table(&mut b, &i, &table)?;
    let wiring: Vec<Wire> = z.iter().map(|&g| Wire::Gate(g)).collect();
    let g = b.inline(&cg, &wiring, Some("C_G"))?;

    let lt = lt_const(&mut b, &i, k as u64 - 1);
    let eq = eq_const(&mut b, &i, k as u64 - 1);
    let mut row: Vec<GateId> = Vec::with_capacity(n);
    for a in 0..n {
        let x = b.var(a);
        let l = and(&mut b, lt, Bit::G(g[a]));
        let r = and(&mut b, eq, Bit::G(x));
        let s = sum_exclusive(&mut b, &[l, r]);
        row.push(gate_of(&mut b, s));
    }

    // C'_ab(j): lookup over the K column labels
    let sel: Vec<Bit> = (0..k).map(|t| eq_const(&mut b, &j, t as u64)).collect();
    let mut ebits: Vec<Vec<Bit>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut bits = Vec::with_capacity(sd);
        for bw in (0..sd).rev() {
            let hits: Vec<Bit> = params
                .columns
                .iter()
                .enumerate()
                .filter(|(_, e)| (e.exps()[a] >> bw) & 1 == 1)
                .map(|(t, _)| sel[t])
                .collect();
            bits.push(sum_exclusive(&mut b, &hits));
        }
        ebits.push(bits);
    }
    let entry = mon(&mut b, &row, &ebits);
    let sign = if params.last_row_sign() == 1 {
        sum_exclusive(&mut b, &[lt, eq])
    } else {
        let e = gate_of(&mut b, eq);
        let ne = b.neg(e);
        sum_exclusive(&mut b, &[lt, Bit::G(ne)])
    };
    let out = and(&mut b, sign, Bit::G(entry));
    let out = gate_of(&mut b, out);
    MatrixEncoder::new(b.finish(vec![out]), n, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annihilator::pipeline::{annihilate, AnnihilateOptions};

    fn z(k: u32) -> SparsePoly {
        SparsePoly::var(1, 0).pow(k)
    }

    #[test]
    fn rows_and_direct_det() {
        let g = vec![z(1), z(2)];
        let map = ExplicitMap::from_components(1, &g).unwrap();
        let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
        let p = &res.params;
        let mt = build_mtilde(&g, p).unwrap();
        // row 0 is G(1)^e = 1
        for c in 0..p.k {
            assert_eq!(mt.numeric.get(0, c), &rat(1));
        }
        if p.k > 2 {
            let v = eval_point(&g, p.alpha, 1, p.delta).unwrap();
            for (c, e) in p.columns.iter().enumerate() {
                let want = v[0].clone().pow(e.exps()[0] as i32) * v[1].clone().pow(e.exps()[1] as i32);
                assert_eq!(mt.numeric.get(1, c), &want);
            }
        }
        let (a, _) = annihilator_direct(&mt).unwrap();
        assert!(a.proportional_to(&SparsePoly::parse("vars 2\n1 : 2 0\n-1 : 0 1\n").unwrap()));
    }

    #[test]
    fn encoder_matches_materialized() {
        for g in [vec![z(1), z(1)], vec![z(1), z(2)], vec![z(2).add(&z(1)).unwrap(), z(1).sub(&SparsePoly::one(1)).unwrap()]] {
            let map = ExplicitMap::from_components(1, &g).unwrap();
            let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
            let p = &res.params;
            let mt = build_mtilde(&g, p).unwrap().materialize();
            let enc = encode_mtilde(&map, p).unwrap();
            assert_eq!(enc.circuit.count_instances("C_G"), 1);
            for r in 0..p.k {
                for c in 0..p.k {
                    assert_eq!(enc.entry(r, c).unwrap(), mt[r][c], "entry ({r},{c})");
                }
            }
        }
    }
}
