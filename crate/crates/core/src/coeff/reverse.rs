//! Projection circuits from coefficient functions.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::function::CoeffFunction;
use crate::circuit::{Builder, Circuit, GateId, Var, Wire};
use crate::error::{Error, Result};
use crate::gadgets::bits::{eq_const, gate_of, not, and_all, vars_as_bits, Bit};
use crate::gadgets::mon::{check, mon};

/// 2^(2^b - 1 - i) for the MSB-first bits of i:
/// prod_k (1 + (1 - i_k)(2^(2^(b-1-k)) - 1)).
fn pow_of_index(b: &mut Builder, i: &[GateId]) -> GateId {
    let w = i.len();
    let mut factors = Vec::with_capacity(w);
    for (k, &ik) in i.iter().enumerate() {
        let c = (BigInt::one() << (1usize << (w - 1 - k))) - 1;
        let c = b.const_int(&c);
        let nk = b.one_minus(ik);
        let t = b.mul(nk, c);
        let one = b.one();
        factors.push(b.add(one, t));
    }
    b.prod_all(&factors)
}

/// Polynomial sum_e c_e x^e from a circuit CF(y, i) giving bit i of c_e.
///
/// CF has n*delta exponent bits y (coordinate-major, MSB-first) followed by
/// b index bits. The result has variables x (n), then y and i, which are
/// bound by Sum gates. With `max_total_degree`, exponents of larger total
/// degree are masked out by the check gadget.
pub fn circuit_from_coeff_fn(cf: &Circuit, n: usize, delta: usize, b: usize, max_total_degree: Option<u64>) -> Result<Circuit> {
    if cf.num_vars() != n * delta + b || cf.outputs().len() != 1 || b == 0 || delta == 0 {
        return Err(Error::Wiring(format!(
            "coefficient circuit has {} variables and {} outputs; expected {} = {n}*{delta} + {b} variables and one output",
            cf.num_vars(),
            cf.outputs().len(),
            n * delta + b
        )));
    }
    let nv = n + n * delta + b;
    let mut bl = Builder::new(nv);
    let wiring: Vec<Wire> = (n..nv).map(|v| Wire::Var(Var(v as u32))).collect();
    let cfv = bl.inline(cf, &wiring, Some("CF"))?[0];
    let ivars: Vec<GateId> = (n + n * delta..nv).map(|v| bl.var(v)).collect();

    // magnitude: sum over i != 0 of pow(i) * CF(y, i)
    let p = pow_of_index(&mut bl, &ivars);
    let ibits: Vec<Bit> = ivars.iter().map(|&g| Bit::G(g)).collect();
    let zero_bits: Vec<Bit> = ibits.iter().map(|&x| not(&mut bl, x)).collect();
    let is_zero = and_all(&mut bl, &zero_bits);
    let nz = not(&mut bl, is_zero);
    let nz = gate_of(&mut bl, nz);
    let t = bl.mul(p, cfv);
    let mut mag = bl.mul(nz, t);
    for v in (n + n * delta..nv).rev() {
        mag = bl.sum_over(Var(v as u32), mag);
    }

    // sign: 1 - 2 * CF(y, 0)
    let mut s = cfv;
    for v in n + n * delta..nv {
        s = bl.proj(Var(v as u32), false, s);
    }
    let s2 = bl.add(s, s);
    let sign = bl.one_minus(s2);

    let x: Vec<GateId> = (0..n).map(|k| bl.var(k)).collect();
    let e: Vec<Vec<Bit>> = (0..n).map(|k| vars_as_bits(&mut bl, n + k * delta, delta)).collect();
    let m = mon(&mut bl, &x, &e);
    let mut term = bl.mul(sign, mag);
    term = bl.mul(m, term);
    if let Some(d) = max_total_degree {
        let ok = check(&mut bl, &e, d);
        let ok = gate_of(&mut bl, ok);
        term = bl.mul(ok, term);
    }
    for v in (n..n + n * delta).rev() {
        term = bl.sum_over(Var(v as u32), term);
    }
    Ok(bl.finish(vec![term]))
}

/// Projection-free circuit computing the coefficient function's bits as a
/// lookup table: sum over set bits of EQ(y, e) * EQ(i, t).
pub fn coeff_table_circuit(cf: &CoeffFunction) -> Result<Circuit> {
    let (n, delta, b) = (cf.n(), cf.delta(), cf.b());
    if n * delta > 63 || b > 63 {
        return Err(Error::ResourceCap(format!("table address of {} bits", n * delta + b)));
    }
    let w = cf.magnitude_bits();
    let mut bl = Builder::new(n * delta + b);
    let y = vars_as_bits(&mut bl, 0, n * delta);
    let i = vars_as_bits(&mut bl, n * delta, b);
    let mut terms = Vec::new();
    for (e, v) in cf.nonzero_coefficients()? {
        let packed = e.iter().fold(0u64, |acc, &x| acc << delta | x as u64);
        let mut set: Vec<u64> = Vec::new();
        if v.is_negative() {
            set.push(0);
        }
        let mag = v.magnitude();
        set.extend((1..=w as u64).filter(|&t| mag.bit(w as u64 - t)));
        let ey = eq_const(&mut bl, &y, packed);
        let ey = gate_of(&mut bl, ey);
        let mut bits = Vec::new();
        for t in set {
            let et = eq_const(&mut bl, &i, t);
            bits.push(gate_of(&mut bl, et));
        }
        let s = bl.sum_all(&bits);
        terms.push(bl.mul(ey, s));
    }
    let out = bl.sum_all(&terms);
    Ok(bl.finish(vec![out]))
}
