//! Matrix encoders: circuits C(x, row bits, col bits) = M[row, col].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{PolyRing, SparsePoly};
use crate::circuit::{eval_env, Builder, Circuit, EvalLimits, GateId};
use crate::error::{Error, Result};
use crate::gadgets::bits::{eq, eq_const, gate_of, log2_ceil, vars_as_bits, Bit};

/// Encoder for an N x N matrix. Variables: x (nx), row bits (w), col bits (w),
/// bit vectors MSB-first, w = max(1, ceil(log2 N)).
#[derive(Clone, Debug)]
pub struct MatrixEncoder {
    pub circuit: Circuit,
    pub nx: usize,
    pub n: usize,
}

impl MatrixEncoder {
    pub fn new(circuit: Circuit, nx: usize, n: usize) -> Result<Self> {
        let w = index_width(n);
        if circuit.num_vars() != nx + 2 * w || circuit.outputs().len() != 1 {
            return Err(Error::Params(format!(
                "matrix encoder for N={n} needs {} variables and one output, has {} and {}",
                nx + 2 * w,
                circuit.num_vars(),
                circuit.outputs().len()
            )));
        }
        Ok(MatrixEncoder { circuit, nx, n })
    }

    pub fn width(&self) -> usize {
        index_width(self.n)
    }

    /// Entry (r, c) as a polynomial in x.
    pub fn entry(&self, r: usize, c: usize) -> Result<SparsePoly> {
        let w = self.width();
        let ring = PolyRing { nvars: self.nx };
        let mut env: Vec<Option<SparsePoly>> = (0..self.nx).map(|i| Some(SparsePoly::var(self.nx, i))).collect();
        for k in 0..w {
            env.push(Some(SparsePoly::constant(self.nx, BigRational::from_integer(((r >> (w - 1 - k)) & 1).into()))));
        }
        for k in 0..w {
            env.push(Some(SparsePoly::constant(self.nx, BigRational::from_integer(((c >> (w - 1 - k)) & 1).into()))));
        }
        Ok(eval_env(&self.circuit, &ring, &env, EvalLimits::default())?.remove(0))
    }

    pub fn materialize(&self) -> Result<Vec<Vec<SparsePoly>>> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.entry(r, c)).collect()).collect()
    }
}

pub fn index_width(n: usize) -> usize {
    log2_ceil(n as u64)
}

/// Constant-free circuit for a sparse polynomial in the given gates.
pub fn poly_to_gates(b: &mut Builder, p: &SparsePoly, xs: &[GateId]) -> GateId {
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let mut factors = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            if e > 0 {
                factors.push(crate::gadgets::pow::gate_pow(b, xs[i], &num_bigint::BigUint::from(e)));
            }
        }
        let mono = if factors.is_empty() { None } else { Some(b.prod_all(&factors)) };
        let t = match (mono, c.is_one(), (-c).is_one()) {
            (Some(g), true, _) => g,
            (Some(g), _, true) => b.neg(g),
            (Some(g), _, _) => {
                let k = coeff_gate(b, c);
                b.mul(k, g)
            }
            (None, _, _) => coeff_gate(b, c),
        };
        terms.push(t);
    }
    b.sum_all(&terms)
}

fn coeff_gate(b: &mut Builder, c: &BigRational) -> GateId {
    if c.is_integer() {
        b.const_int(c.numer())
    } else {
        b.const_rational(c)
    }
}

/// Encoder for an explicitly given matrix of polynomials over nx variables:
/// sum_{a,b} EQ(row, a) EQ(col, b) M[a][b].
pub fn encode_matrix(m: &[Vec<SparsePoly>], nx: usize) -> Result<MatrixEncoder> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::Params("matrix must be square and nonempty".into()));
    }
    let w = index_width(n);
    let mut b = Builder::new(nx + 2 * w);
    let xs: Vec<GateId> = (0..nx).map(|i| b.var(i)).collect();
    let row = vars_as_bits(&mut b, nx, w);
    let col = vars_as_bits(&mut b, nx + w, w);
    let row_sel: Vec<Bit> = (0..n).map(|a| eq_const(&mut b, &row, a as u64)).collect();
    let col_sel: Vec<Bit> = (0..n).map(|a| eq_const(&mut b, &col, a as u64)).collect();
    let mut terms = Vec::new();
    for (a, r) in m.iter().enumerate() {
        let mut row_terms = Vec::new();
        for (c, p) in r.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if p.nvars() != nx {
                return Err(Error::ArityMismatch { expected: nx, got: p.nvars() });
            }
            let v = poly_to_gates(&mut b, p, &xs);
            let s = gate_of(&mut b, col_sel[c]);
            row_terms.push(b.mul(s, v));
        }
        if row_terms.is_empty() {
            continue;
        }
        let rs = b.sum_all(&row_terms);
        let sel = gate_of(&mut b, row_sel[a]);
        terms.push(b.mul(sel, rs));
    }
    let out = b.sum_all(&terms);
    MatrixEncoder::new(b.finish(vec![out]).prune(), nx, n)
}

/// Integer matrix encoder (no x variables).
pub fn encode_int_matrix(m: &[Vec<i64>]) -> Result<MatrixEncoder> {
    let p: Vec<Vec<SparsePoly>> = m
        .iter()
        .map(|r| r.iter().map(|&v| SparsePoly::constant(0, BigRational::from_integer(BigInt::from(v)))).collect())
        .collect();
    encode_matrix(&p, 0)
}

/// Identity: EQ(row, col).
pub fn identity_encoder(n: usize) -> MatrixEncoder {
    let w = index_width(n);
    let mut b = Builder::new(2 * w);
    let row = vars_as_bits(&mut b, 0, w);
    let col = vars_as_bits(&mut b, w, w);
    let e = eq(&mut b, &row, &col);
    let g = gate_of(&mut b, e);
    MatrixEncoder::new(b.finish(vec![g]), 0, n).expect("widths match")
}

/// The fully symbolic N x N matrix with entry (i, j) = x_{iN+j+1}.
pub fn symbolic_matrix(n: usize) -> Vec<Vec<SparsePoly>> {
    let nx = n * n;
    (0..n).map(|i| (0..n).map(|j| SparsePoly::var(nx, i * n + j)).collect()).collect()
}
