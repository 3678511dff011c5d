//! Coefficient functions of projection circuits.
//!
//! The circuit is split into monotone rails; the coefficient of x^e on a rail
//! is computed gate by gate from the children's coefficients using the
//! streaming operations, so every answer goes through bit queries.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::split::{monotone_split, MonotoneSplit};
use super::stream::{bounded, read_int, stream_add, stream_mul, stream_nonneg_sum, stream_sub, BitOracle, IntOracle, Oracle, WorkspaceMeter};
use crate::circuit::{Circuit, Gate, GateId};
use crate::error::{Error, Result};
use crate::gadgets::bits::bit_width;

#[derive(Clone, Copy, Debug, Default)]
pub struct CoeffOptions {
    /// Recompute every sub-coefficient on demand instead of caching values.
    pub strict: bool,
}

// One monotone rail with static bounds.
struct Rail {
    circuit: Circuit,
    ideg: Vec<Vec<u32>>,
    width: Vec<usize>,
}

impl Rail {
    fn new(circuit: Circuit) -> Rail {
        let n = circuit.num_vars();
        let mut ideg: Vec<Vec<u32>> = Vec::with_capacity(circuit.gates().len());
        let mut ones: Vec<BigInt> = Vec::with_capacity(circuit.gates().len());
        for g in circuit.gates() {
            let (d, v) = match g {
                Gate::Input(x) => {
                    let mut d = vec![0; n];
                    d[x.index()] = 1;
                    (d, BigInt::one())
                }
                Gate::One => (vec![0; n], BigInt::one()),
                Gate::Add(a, b) => (
                    ideg[a.index()].iter().zip(&ideg[b.index()]).map(|(x, y)| *x.max(y)).collect(),
                    &ones[a.index()] + &ones[b.index()],
                ),
                Gate::Mul(a, b) => (
                    ideg[a.index()].iter().zip(&ideg[b.index()]).map(|(x, y)| x + y).collect(),
                    &ones[a.index()] * &ones[b.index()],
                ),
                Gate::Proj { var, child, .. } => {
                    let mut d = ideg[child.index()].clone();
                    d[var.index()] = 0;
                    (d, ones[child.index()].clone())
                }
                _ => unreachable!("rails are monotone"),
            };
            ideg.push(d);
            ones.push(v);
        }
        // a monotone circuit's coefficients are bounded by its value at all ones
        let width = ones.iter().map(|v| v.bits() as usize).collect();
        Rail { circuit, ideg, width }
    }

    fn out(&self) -> GateId {
        self.circuit.outputs()[0]
    }
}

struct Inner {
    rails: [Option<Rail>; 2],
    strict: bool,
    cache: Mutex<HashMap<(usize, u32, Vec<u32>), BigInt>>,
}

fn zero() -> Oracle {
    IntOracle::new(BigInt::zero())
}

fn one() -> Oracle {
    IntOracle::new(BigInt::one())
}

impl Inner {
    fn rail(&self, r: usize) -> &Rail {
        self.rails[r].as_ref().expect("rail present")
    }

    fn oracle(self: &Arc<Self>, r: usize, g: GateId, e: &[u32]) -> Result<Oracle> {
        let rail = self.rail(r);
        if e.iter().zip(&rail.ideg[g.index()]).any(|(x, d)| x > d) {
            return Ok(zero());
        }
        if self.strict {
            return Ok(Arc::new(GateOracle { inner: self.clone(), rail: r, gate: g, e: e.to_vec() }));
        }
        let key = (r, g.0, e.to_vec());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return IntOracle::with_width(v.clone(), rail.width[g.index()]);
        }
        let expr = self.expr(r, g, e)?;
        let v = read_int(expr.as_ref(), &mut WorkspaceMeter::new())?;
        self.cache.lock().unwrap().insert(key, v.clone());
        IntOracle::with_width(v, rail.width[g.index()])
    }

    // Coefficient of x^e at gate g in terms of the children's oracles.
    fn expr(self: &Arc<Self>, r: usize, g: GateId, e: &[u32]) -> Result<Oracle> {
        let rail = self.rail(r);
        let o = match rail.circuit.gate(g) {
            Gate::One => {
                if e.iter().all(|&x| x == 0) {
                    one()
                } else {
                    zero()
                }
            }
            Gate::Input(v) => {
                if e.iter().enumerate().all(|(k, &x)| x == u32::from(k == v.index())) {
                    one()
                } else {
                    zero()
                }
            }
            Gate::Add(a, b) => stream_add(self.oracle(r, *a, e)?, self.oracle(r, *b, e)?),
            Gate::Mul(a, b) => {
                // convolution over e' <= e, skipping splits outside the degree boxes
                let (da, db) = (&rail.ideg[a.index()], &rail.ideg[b.index()]);
                let mut terms = Vec::new();
                let mut ep: Vec<u32> = e.iter().zip(db).map(|(x, d)| x.saturating_sub(*d)).collect();
                let lo = ep.clone();
                let hi: Vec<u32> = e.iter().zip(da).map(|(x, d)| *x.min(d)).collect();
                if lo.iter().zip(&hi).all(|(l, h)| l <= h) {
                    loop {
                        let rest: Vec<u32> = e.iter().zip(&ep).map(|(x, y)| x - y).collect();
                        terms.push(stream_mul(self.oracle(r, *a, &ep)?, self.oracle(r, *b, &rest)?));
                        // odometer step
                        let mut k = 0;
                        while k < ep.len() && ep[k] == hi[k] {
                            ep[k] = lo[k];
                            k += 1;
                        }
                        if k == ep.len() {
                            break;
                        }
                        ep[k] += 1;
                    }
                }
                stream_nonneg_sum(terms)
            }
            Gate::Proj { var, bit, child } => {
                let z = var.index();
                if e[z] > 0 {
                    zero()
                } else if !bit {
                    self.oracle(r, *child, e)?
                } else {
                    let mut terms = Vec::new();
                    let mut ez = e.to_vec();
                    for a in 0..=rail.ideg[child.index()][z] {
                        ez[z] = a;
                        terms.push(self.oracle(r, *child, &ez)?);
                    }
                    stream_nonneg_sum(terms)
                }
            }
            _ => unreachable!("rails are monotone"),
        };
        Ok(bounded(o, rail.width[g.index()]))
    }
}

// Recomputes the coefficient from scratch on every bit query.
struct GateOracle {
    inner: Arc<Inner>,
    rail: usize,
    gate: GateId,
    e: Vec<u32>,
}

impl GateOracle {
    fn frame_bits(&self) -> u64 {
        // the exponent vector and the gate name
        let ebits: u64 = self.e.iter().map(|&x| bit_width(x as u64) as u64).sum();
        ebits + bit_width(self.gate.0 as u64) as u64
    }
}

impl BitOracle for GateOracle {
    fn width(&self) -> usize {
        self.inner.rail(self.rail).width[self.gate.index()]
    }
    fn sign(&self, _: &mut WorkspaceMeter) -> Result<bool> {
        Ok(false)
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        m.frame(self.frame_bits(), |m| self.inner.expr(self.rail, self.gate, &self.e)?.mag(j, m))
    }
}

/// Queryable coefficient function. Coefficients use 2^b address bits: bit 0
/// is the sign, bits 1..2^b - 1 the magnitude from the most significant bit.
#[derive(Clone)]
pub struct CoeffFunction {
    inner: Arc<Inner>,
    n: usize,
    d: u32,
    b: usize,
}

impl std::fmt::Debug for CoeffFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoeffFunction").field("n", &self.n).field("d", &self.d).field("b", &self.b).finish()
    }
}

impl CoeffFunction {
    /// Arity.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Individual-degree bound.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Address bits for the bit index.
    pub fn b(&self) -> usize {
        self.b
    }

    /// Magnitude bits, 2^b - 1.
    pub fn magnitude_bits(&self) -> usize {
        (1usize << self.b) - 1
    }

    /// Bits per exponent coordinate.
    pub fn delta(&self) -> usize {
        bit_width(self.d as u64)
    }

    /// Signed coefficient of x^e as an oracle.
    pub fn oracle(&self, e: &[u32]) -> Result<Oracle> {
        if e.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: e.len() });
        }
        let side = |r: usize| -> Result<Oracle> {
            match &self.inner.rails[r] {
                Some(rail) => self.inner.oracle(r, rail.out(), e),
                None => Ok(zero()),
            }
        };
        Ok(bounded(stream_sub(side(0)?, side(1)?), self.magnitude_bits()))
    }

    /// Bit i of the coefficient of x^e (0 = sign, 1 = most significant).
    pub fn bit(&self, e: &[u32], i: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        let w = self.magnitude_bits();
        if i > w {
            return Err(Error::Params(format!("bit index {i} beyond {w} magnitude bits")));
        }
        let o = self.oracle(e)?;
        m.count_query();
        if i == 0 {
            o.sign(m)
        } else {
            o.mag(w - i, m)
        }
    }

    /// Query by packed address: exponent bits (coordinate-major, MSB-first,
    /// delta bits each) followed by the b bits of i.
    pub fn bit_at(&self, address: &[bool], m: &mut WorkspaceMeter) -> Result<bool> {
        let delta = self.delta();
        if address.len() != self.n * delta + self.b {
            return Err(Error::ArityMismatch { expected: self.n * delta + self.b, got: address.len() });
        }
        let val = |bits: &[bool]| bits.iter().fold(0u64, |acc, &x| acc << 1 | x as u64);
        let e: Vec<u32> = (0..self.n).map(|k| val(&address[k * delta..(k + 1) * delta]) as u32).collect();
        let i = val(&address[self.n * delta..]) as usize;
        if e.iter().any(|&x| x > self.d) {
            return Ok(false);
        }
        self.bit(&e, i, m)
    }

    /// Whole coefficient, read bit by bit.
    pub fn coefficient(&self, e: &[u32]) -> Result<BigInt> {
        read_int(self.oracle(e)?.as_ref(), &mut WorkspaceMeter::new())
    }

    /// All nonzero coefficients over the degree box, in lex order of e.
    pub fn nonzero_coefficients(&self) -> Result<Vec<(Vec<u32>, BigInt)>> {
        let mut out = Vec::new();
        let mut e = vec![0u32; self.n];
        loop {
            let c = self.coefficient(&e)?;
            if !c.is_zero() {
                out.push((e.clone(), c));
            }
            let mut k = self.n;
            loop {
                if k == 0 {
                    return Ok(out);
                }
                k -= 1;
                if e[k] < self.d {
                    e[k] += 1;
                    break;
                }
                e[k] = 0;
            }
        }
    }
}

/// Coefficient function of the first output of `c`.
pub fn coeff_fn_of_circuit(c: &Circuit, opts: CoeffOptions) -> Result<CoeffFunction> {
    c.validate()?;
    let MonotoneSplit { pos, neg } = monotone_split(c)?;
    let rails = [pos.map(Rail::new), neg.map(Rail::new)];
    let n = c.num_vars();
    let mut d = 0;
    let mut w = 0;
    for r in rails.iter().flatten() {
        d = d.max(r.ideg[r.out().index()].iter().copied().max().unwrap_or(0));
        w = w.max(r.width[r.out().index()]);
    }
    // 2^b - 1 >= w
    let b = bit_width(w as u64);
    let inner = Arc::new(Inner { rails, strict: opts.strict, cache: Mutex::new(HashMap::new()) });
    Ok(CoeffFunction { inner, n, d, b })
}
