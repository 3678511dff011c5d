//! Monomial selection and total-degree check on exponent bits.

use super::bits::{add_bits, gate_of, gt_const, not, vars_as_bits, Bit};
use crate::circuit::{Builder, Circuit, GateId};

/// x^e where e[a] are the MSB-first bits of coordinate a:
/// prod_a prod_b (e_ab * x_a^(2^b) + 1 - e_ab).
pub fn mon(b: &mut Builder, x: &[GateId], e: &[Vec<Bit>]) -> GateId {
    assert_eq!(x.len(), e.len());
    let mut factors = Vec::new();
    for (xa, bits) in x.iter().zip(e) {
        let w = bits.len();
        let mut sq = *xa;
        for bw in 0..w {
            if bw > 0 {
                // only square while some higher bit can still select it
                if bits[..w - bw].iter().all(|x| *x == Bit::Zero) {
                    break;
                }
                sq = b.square(sq);
            }
            match bits[w - 1 - bw] {
                Bit::Zero => {}
                Bit::One => factors.push(sq),
                Bit::G(eb) => {
                    let mo = b.minus_one();
                    let sm1 = b.add(sq, mo);
                    let t = b.mul(eb, sm1);
                    let one = b.one();
                    factors.push(b.add(one, t));
                }
            }
        }
    }
    b.prod_all(&factors)
}

/// 1 iff sum of the coordinates of e is at most d.
pub fn check(b: &mut Builder, e: &[Vec<Bit>], d: u64) -> Bit {
    let mut acc: Vec<Bit> = vec![Bit::Zero];
    for bits in e {
        acc = add_bits(b, &acc, bits);
    }
    let over = gt_const(b, &acc, d);
    not(b, over)
}

/// Variables: x1..xn, then n*delta exponent bits (coordinate-major, MSB-first).
pub fn build_mon(n: usize, delta: usize) -> Circuit {
    let mut b = Builder::new(n + n * delta);
    let x: Vec<GateId> = (0..n).map(|i| b.var(i)).collect();
    let e: Vec<Vec<Bit>> = (0..n).map(|a| vars_as_bits(&mut b, n + a * delta, delta)).collect();
    let g = mon(&mut b, &x, &e);
    b.finish(vec![g])
}

/// Variables: n*delta exponent bits.
pub fn build_check(n: usize, delta: usize, d: u64) -> Circuit {
    let mut b = Builder::new(n * delta);
    let e: Vec<Vec<Bit>> = (0..n).map(|a| vars_as_bits(&mut b, a * delta, delta)).collect();
    let r = check(&mut b, &e, d);
    let g = gate_of(&mut b, r);
    b.finish(vec![g])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rationals};
    use crate::circuit::eval;
    use crate::gadgets::bits::bools;
    use num_rational::BigRational;

    fn mon_at(c: &Circuit, x: &[i64], e: &[u64], delta: usize) -> BigRational {
        let mut p: Vec<BigRational> = x.iter().map(|&v| rat(v)).collect();
        for &ea in e {
            p.extend(bools(ea, delta).into_iter().map(|b| rat(b as i64)));
        }
        eval(c, &Rationals, &p).unwrap().remove(0)
    }

    #[test]
    fn zero_exponent() {
        let c = build_mon(2, 2);
        assert_eq!(mon_at(&c, &[3, 5], &[0, 0], 2), rat(1));
    }

    #[test]
    fn example_45() {
        let c = build_mon(2, 2);
        assert_eq!(mon_at(&c, &[3, 5], &[2, 1], 2), rat(45));
    }

    #[test]
    fn exhaustive_delta2() {
        let c = build_mon(2, 2);
        for e1 in 0..4u64 {
            for e2 in 0..4u64 {
                let want = 3i64.pow(e1 as u32) * (-2i64).pow(e2 as u32);
                assert_eq!(mon_at(&c, &[3, -2], &[e1, e2], 2), rat(want));
            }
        }
    }

    #[test]
    fn check_exhaustive() {
        for d in 0..7u64 {
            let c = build_check(2, 2, d);
            for e1 in 0..4u64 {
                for e2 in 0..4u64 {
                    let mut p = Vec::new();
                    for ea in [e1, e2] {
                        p.extend(bools(ea, 2).into_iter().map(|b| rat(b as i64)));
                    }
                    let got = eval(&c, &Rationals, &p).unwrap().remove(0);
                    assert_eq!(got, rat((e1 + e2 <= d) as i64), "d={d} e=({e1},{e2})");
                }
            }
        }
    }
}
