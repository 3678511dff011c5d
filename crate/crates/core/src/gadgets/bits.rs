//! Boolean gadgets on MSB-first bit vectors, with constant folding.

use num_bigint::BigInt;

use crate::circuit::{Builder, Circuit, GateId};

/// A bit that is either a known constant or a gate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Zero,
    One,
    G(GateId),
}

impl Bit {
    pub fn from_bool(b: bool) -> Bit {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }
}

pub fn gate_of(b: &mut Builder, x: Bit) -> GateId {
    match x {
        Bit::Zero => b.zero(),
        Bit::One => b.one(),
        Bit::G(g) => g,
    }
}

pub fn vars_as_bits(b: &mut Builder, start: usize, width: usize) -> Vec<Bit> {
    (start..start + width).map(|i| Bit::G(b.var(i))).collect()
}

/// MSB-first constant of the given width (high bits beyond width dropped).
pub fn const_bits(v: u64, width: usize) -> Vec<Bit> {
    (0..width).map(|i| Bit::from_bool(v >> (width - 1 - i) & 1 == 1)).collect()
}

/// MSB-first bits of a small integer as plain booleans.
pub fn bools(v: u64, width: usize) -> Vec<bool> {
    (0..width).map(|i| v >> (width - 1 - i) & 1 == 1).collect()
}

/// Number of bits needed to write `n` (at least 1).
pub fn bit_width(n: u64) -> usize {
    (64 - n.leading_zeros() as usize).max(1)
}

/// ceil(log2 n), at least 1.
pub fn log2_ceil(n: u64) -> usize {
    if n <= 2 {
        1
    } else {
        64 - (n - 1).leading_zeros() as usize
    }
}

pub fn not(b: &mut Builder, x: Bit) -> Bit {
    match x {
        Bit::Zero => Bit::One,
        Bit::One => Bit::Zero,
        Bit::G(g) => Bit::G(b.one_minus(g)),
    }
}

pub fn and(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    match (x, y) {
        (Bit::Zero, _) | (_, Bit::Zero) => Bit::Zero,
        (Bit::One, o) | (o, Bit::One) => o,
        (Bit::G(p), Bit::G(q)) => Bit::G(b.mul(p, q)),
    }
}

/// x + y - 2xy
pub fn xor(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    match (x, y) {
        (Bit::Zero, o) | (o, Bit::Zero) => o,
        (Bit::One, o) | (o, Bit::One) => not(b, o),
        (Bit::G(p), Bit::G(q)) => {
            let pq = b.mul(p, q);
            let two = b.add(pq, pq);
            let s = b.add(p, q);
            Bit::G(b.sub(s, two))
        }
    }
}

pub fn xnor(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    match (x, y) {
        (Bit::One, o) | (o, Bit::One) => o,
        (Bit::Zero, o) | (o, Bit::Zero) => not(b, o),
        _ => {
            let t = xor(b, x, y);
            not(b, t)
        }
    }
}

/// 1 - (1-x)(1-y)
pub fn or(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    let nx = not(b, x);
    let ny = not(b, y);
    let t = and(b, nx, ny);
    not(b, t)
}

/// Arithmetic sum of bits known to be mutually exclusive.
pub fn sum_exclusive(b: &mut Builder, xs: &[Bit]) -> Bit {
    if xs.iter().any(|x| *x == Bit::One) {
        return Bit::One;
    }
    let gs: Vec<GateId> = xs.iter().filter_map(|x| if let Bit::G(g) = x { Some(*g) } else { None }).collect();
    if gs.is_empty() {
        Bit::Zero
    } else {
        Bit::G(b.sum_all(&gs))
    }
}

pub fn and_all(b: &mut Builder, xs: &[Bit]) -> Bit {
    if xs.iter().any(|x| *x == Bit::Zero) {
        return Bit::Zero;
    }
    let gs: Vec<GateId> = xs.iter().filter_map(|x| if let Bit::G(g) = x { Some(*g) } else { None }).collect();
    if gs.is_empty() {
        Bit::One
    } else {
        Bit::G(b.prod_all(&gs))
    }
}

fn pad(a: &[Bit], w: usize) -> Vec<Bit> {
    let mut v = vec![Bit::Zero; w.saturating_sub(a.len())];
    v.extend_from_slice(a);
    v
}

/// 1 iff a = c as unsigned integers.
pub fn eq(b: &mut Builder, a: &[Bit], c: &[Bit]) -> Bit {
    let w = a.len().max(c.len());
    let (a, c) = (pad(a, w), pad(c, w));
    let terms: Vec<Bit> = a.iter().zip(&c).map(|(x, y)| xnor(b, *x, *y)).collect();
    and_all(b, &terms)
}

/// 1 iff a > c: sum over positions k of [a and c agree above k] * a_k * (1 - c_k).
pub fn gt(b: &mut Builder, a: &[Bit], c: &[Bit]) -> Bit {
    let w = a.len().max(c.len());
    let (a, c) = (pad(a, w), pad(c, w));
    let mut prefix = Bit::One;
    let mut terms = Vec::with_capacity(w);
    for k in 0..w {
        let nc = not(b, c[k]);
        let here = and(b, a[k], nc);
        terms.push(and(b, prefix, here));
        if k + 1 < w {
            let e = xnor(b, a[k], c[k]);
            prefix = and(b, prefix, e);
        }
    }
    sum_exclusive(b, &terms)
}

pub fn lt(b: &mut Builder, a: &[Bit], c: &[Bit]) -> Bit {
    gt(b, c, a)
}

/// a + 1 modulo 2^width.
pub fn inc(b: &mut Builder, a: &[Bit]) -> Vec<Bit> {
    let mut out = vec![Bit::Zero; a.len()];
    let mut carry = Bit::One;
    for k in (0..a.len()).rev() {
        out[k] = xor(b, a[k], carry);
        carry = and(b, a[k], carry);
    }
    out
}

/// Ripple-carry sum, width max(|a|,|c|)+1, MSB-first.
pub fn add_bits(b: &mut Builder, a: &[Bit], c: &[Bit]) -> Vec<Bit> {
    let w = a.len().max(c.len());
    let (a, c) = (pad(a, w), pad(c, w));
    let mut out = vec![Bit::Zero; w + 1];
    let mut carry = Bit::Zero;
    for k in (0..w).rev() {
        let t = xor(b, a[k], c[k]);
        out[k + 1] = xor(b, t, carry);
        // majority: ab + carry*(a xor b)
        let ab = and(b, a[k], c[k]);
        let ct = and(b, carry, t);
        carry = sum_exclusive(b, &[ab, ct]);
    }
    out[0] = carry;
    out
}

/// Arithmetic value sum_k 2^(w-1-k) bits[k] as a gate.
pub fn bits_value(b: &mut Builder, bits: &[Bit]) -> GateId {
    let mut terms = Vec::new();
    let w = bits.len();
    for (k, bit) in bits.iter().enumerate() {
        let weight = BigInt::from(1) << (w - 1 - k);
        match bit {
            Bit::Zero => {}
            Bit::One => terms.push(b.const_int(&weight)),
            Bit::G(g) => {
                let c = b.const_int(&weight);
                terms.push(b.mul(c, *g));
            }
        }
    }
    b.sum_all(&terms)
}

/// 1 iff a equals the constant v.
pub fn eq_const(b: &mut Builder, a: &[Bit], v: u64) -> Bit {
    let c = const_bits(v, a.len());
    if a.len() < 64 && v >> a.len() != 0 {
        return Bit::Zero;
    }
    eq(b, a, &c)
}

pub fn lt_const(b: &mut Builder, a: &[Bit], v: u64) -> Bit {
    if a.len() < 64 && v >> a.len() != 0 {
        return Bit::One;
    }
    let c = const_bits(v, a.len());
    lt(b, a, &c)
}

pub fn gt_const(b: &mut Builder, a: &[Bit], v: u64) -> Bit {
    if a.len() < 64 && v >> a.len() != 0 {
        return Bit::Zero;
    }
    let c = const_bits(v, a.len());
    gt(b, a, &c)
}

fn comparator(width: usize, f: fn(&mut Builder, &[Bit], &[Bit]) -> Bit) -> Circuit {
    assert!(width >= 1);
    let mut b = Builder::new(2 * width);
    let a = vars_as_bits(&mut b, 0, width);
    let c = vars_as_bits(&mut b, width, width);
    let r = f(&mut b, &a, &c);
    let g = gate_of(&mut b, r);
    b.finish(vec![g])
}

/// EQ on two width-bit inputs: variables a (x1..xw) then b.
pub fn build_eq(width: usize) -> Circuit {
    comparator(width, eq)
}

pub fn build_gt(width: usize) -> Circuit {
    comparator(width, gt)
}

pub fn build_lt(width: usize) -> Circuit {
    comparator(width, lt)
}

/// INC with `width` outputs; the all-ones input wraps to zero.
pub fn build_inc(width: usize) -> Circuit {
    assert!(width >= 1);
    let mut b = Builder::new(width);
    let a = vars_as_bits(&mut b, 0, width);
    let r = inc(&mut b, &a);
    let outs = r.into_iter().map(|x| gate_of(&mut b, x)).collect();
    b.finish(outs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rationals};
    use crate::circuit::eval;

    fn point(a: u64, c: u64, w: usize) -> Vec<num_rational::BigRational> {
        bools(a, w).into_iter().chain(bools(c, w)).map(|x| rat(x as i64)).collect()
    }

    #[test]
    fn eq_gt_lt_examples() {
        let w = 3;
        assert_eq!(eval(&build_eq(w), &Rationals, &point(0b101, 0b101, w)).unwrap(), vec![rat(1)]);
        assert_eq!(eval(&build_gt(w), &Rationals, &point(0b110, 0b101, w)).unwrap(), vec![rat(1)]);
        assert_eq!(eval(&build_lt(w), &Rationals, &point(0b110, 0b101, w)).unwrap(), vec![rat(0)]);
    }

    #[test]
    fn comparators_exhaustive() {
        for w in 1..=4usize {
            let (e, g, l) = (build_eq(w), build_gt(w), build_lt(w));
            for a in 0..1u64 << w {
                for c in 0..1u64 << w {
                    let p = point(a, c, w);
                    assert_eq!(eval(&e, &Rationals, &p).unwrap()[0], rat((a == c) as i64));
                    assert_eq!(eval(&g, &Rationals, &p).unwrap()[0], rat((a > c) as i64));
                    assert_eq!(eval(&l, &Rationals, &p).unwrap()[0], rat((a < c) as i64));
                }
            }
        }
    }

    #[test]
    fn inc_examples_and_exhaustive() {
        let c = build_inc(3);
        let r = |v: u64| -> Vec<num_rational::BigRational> {
            eval(&c, &Rationals, &bools(v, 3).into_iter().map(|x| rat(x as i64)).collect::<Vec<_>>()).unwrap()
        };
        assert_eq!(r(0b011), vec![rat(1), rat(0), rat(0)]);
        assert_eq!(r(0b000), vec![rat(0), rat(0), rat(1)]);
        assert_eq!(r(0b111), vec![rat(0), rat(0), rat(0)]);
        for w in 1..=5usize {
            let c = build_inc(w);
            for v in 0..1u64 << w {
                let p: Vec<_> = bools(v, w).into_iter().map(|x| rat(x as i64)).collect();
                let want: Vec<_> = bools((v + 1) % (1 << w), w).into_iter().map(|x| rat(x as i64)).collect();
                assert_eq!(eval(&c, &Rationals, &p).unwrap(), want);
            }
        }
    }

    #[test]
    fn adder_exhaustive_small() {
        for a in 0..8u64 {
            for c in 0..4u64 {
                let mut b = Builder::new(0);
                let s = add_bits(&mut b, &const_bits(a, 3), &const_bits(c, 2));
                let v = bits_value(&mut b, &s);
                let circ = b.finish(vec![v]);
                assert_eq!(eval(&circ, &Rationals, &[]).unwrap()[0], rat((a + c) as i64));
            }
        }
    }

    #[test]
    fn widths() {
        assert_eq!(bit_width(0), 1);
        assert_eq!(bit_width(4), 3);
        assert_eq!(log2_ceil(1), 1);
        assert_eq!(log2_ceil(4), 2);
        assert_eq!(log2_ceil(5), 3);
    }
}
