//! Binary powering with precomputed squares.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::bits::{vars_as_bits, Bit};
use crate::circuit::{Builder, Circuit, GateId};
use crate::error::{Error, Result};

/// g^e by square-and-multiply.
pub fn gate_pow(b: &mut Builder, g: GateId, e: &BigUint) -> GateId {
    if e.is_zero() {
        return b.one();
    }
    let bits = e.bits();
    let mut acc = g;
    for k in (0..bits - 1).rev() {
        acc = b.square(acc);
        if e.bit(k) {
            acc = b.mul(acc, g);
        }
    }
    acc
}

/// Table C[l][k] = alpha^(2^l * delta^k) for l < big_l, k < m.
pub fn pow_table(b: &mut Builder, alpha: &BigInt, delta: u64, big_l: usize, m: usize) -> Vec<Vec<GateId>> {
    let a = b.const_int(alpha);
    let mut col0 = Vec::with_capacity(m);
    let mut cur = a;
    for k in 0..m {
        if k > 0 {
            cur = gate_pow(b, cur, &BigUint::from(delta));
        }
        col0.push(cur);
    }
    let mut table = vec![col0];
    for l in 1..big_l {
        let row: Vec<GateId> = table[l - 1].clone().into_iter().map(|g| b.square(g)).collect();
        table.push(row);
    }
    table
}

/// Output k = prod_l (i_l * C[l][k] + (1 - i_l)), where `i` is MSB-first and
/// i_l is the bit of weight 2^l.
pub fn pow_from_table(b: &mut Builder, i: &[Bit], table: &[Vec<GateId>]) -> Result<Vec<GateId>> {
    let big_l = i.len();
    if table.len() < big_l {
        return Err(Error::Params(format!("pow table has {} rows, need {big_l}", table.len())));
    }
    let m = table.first().map_or(0, |r| r.len());
    let mut outs = Vec::with_capacity(m);
    for k in 0..m {
        let mut factors = Vec::new();
        for l in 0..big_l {
            let c = *table[l].get(k).ok_or_else(|| Error::Params(format!("pow table entry ({l},{k}) missing")))?;
            match i[big_l - 1 - l] {
                Bit::Zero => {}
                Bit::One => factors.push(c),
                Bit::G(bit) => {
                    // 1 + bit * (C - 1)
                    let mo = b.minus_one();
                    let cm1 = b.add(c, mo);
                    let t = b.mul(bit, cm1);
                    let one = b.one();
                    factors.push(b.add(one, t));
                }
            }
        }
        outs.push(b.prod_all(&factors));
    }
    Ok(outs)
}

/// pow(i) = (alpha^i, alpha^(i*delta), ..., alpha^(i*delta^(m-1))) on L input bits.
pub fn build_pow(big_l: usize, alpha: &BigInt, delta: u64, m: usize) -> Circuit {
    let mut b = Builder::new(big_l);
    let i = vars_as_bits(&mut b, 0, big_l);
    let t = pow_table(&mut b, alpha, delta, big_l, m);
    let outs = pow_from_table(&mut b, &i, &t).expect("table matches width");
    b.finish(outs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rationals};
    use crate::circuit::eval;
    use crate::gadgets::bits::bools;
    use num_rational::BigRational;
    use num_traits::Pow;

    fn run(c: &Circuit, i: u64, w: usize) -> Vec<BigRational> {
        let p: Vec<_> = bools(i, w).into_iter().map(|x| rat(x as i64)).collect();
        eval(c, &Rationals, &p).unwrap()
    }

    #[test]
    fn zero_exponent_gives_ones() {
        let c = build_pow(3, &BigInt::from(5), 4, 3);
        assert_eq!(run(&c, 0, 3), vec![rat(1); 3]);
    }

    #[test]
    fn first_power() {
        let c = build_pow(2, &BigInt::from(7), 4, 1);
        assert_eq!(run(&c, 1, 2), vec![rat(7)]);
    }

    #[test]
    fn alpha2_delta3_i5() {
        let c = build_pow(3, &BigInt::from(2), 3, 2);
        assert_eq!(run(&c, 5, 3), vec![rat(32), rat(32768)]);
    }

    #[test]
    fn matches_direct_exponentiation() {
        let alpha = BigInt::from(3);
        let c = build_pow(3, &alpha, 5, 3);
        for i in 0..8u64 {
            let want: Vec<BigRational> = (0..3u32)
                .map(|k| BigRational::from_integer(alpha.clone().pow(i as u32 * 5u32.pow(k))))
                .collect();
            assert_eq!(run(&c, i, 3), want);
        }
    }

    #[test]
    fn missing_entry_is_error() {
        let mut b = Builder::new(2);
        let i = vars_as_bits(&mut b, 0, 2);
        let t = pow_table(&mut b, &BigInt::from(2), 3, 1, 1);
        assert!(pow_from_table(&mut b, &i, &t).is_err());
    }

    #[test]
    fn gate_pow_values() {
        let mut b = Builder::new(1);
        let x = b.var(0);
        let g = gate_pow(&mut b, x, &BigUint::from(13u32));
        let c = b.finish(vec![g]);
        assert_eq!(eval(&c, &Rationals, &[rat(2)]).unwrap(), vec![rat(8192)]);
    }
}
