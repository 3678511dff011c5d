//! Split a circuit into a difference of two monotone circuits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::circuit::{Builder, Circuit, Gate, GateId};
use crate::error::{Error, Result};

/// Positive and negative rails; `None` is the zero polynomial.
#[derive(Clone, Debug)]
pub struct MonotoneSplit {
    pub pos: Option<Circuit>,
    pub neg: Option<Circuit>,
}

type Rail = Option<GateId>;

fn add(b: &mut Builder, x: Rail, y: Rail) -> Rail {
    match (x, y) {
        (Some(x), Some(y)) => Some(b.add(x, y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn mul(b: &mut Builder, x: Rail, y: Rail) -> Rail {
    Some(b.mul(x?, y?))
}

fn proj(b: &mut Builder, g: &Gate, x: Rail) -> Rail {
    let x = x?;
    Some(match *g {
        Gate::Proj { var, bit, .. } => b.proj(var, bit, x),
        _ => unreachable!(),
    })
}

fn constant(b: &mut Builder, q: &BigRational, gate: usize) -> Result<(Rail, Rail)> {
    if !q.is_integer() {
        return Err(Error::InvalidCircuit { gate, msg: format!("non-integer constant {q}") });
    }
    let v: &BigInt = q.numer();
    if v.is_zero() {
        return Ok((None, None));
    }
    let g = Some(b.const_int(&v.abs()));
    Ok(if v.is_negative() { (None, g) } else { (g, None) })
}

/// C = C1 - C2 with C1, C2 built from 1, inputs, Add, Mul and Proj only.
/// Gates with a constant value are emitted as constants, so ConstDiv is
/// accepted whenever its value is an integer. Only the first output is split.
pub fn monotone_split(c: &Circuit) -> Result<MonotoneSplit> {
    let out = *c.outputs().first().ok_or_else(|| Error::Params("circuit has no outputs".into()))?;
    let sub = c.sub_circuit(out);
    let n = sub.num_vars();
    let mut b = Builder::new(n);
    let mut rails: Vec<(Rail, Rail)> = Vec::with_capacity(sub.gates().len());
    let mut consts: Vec<Option<BigRational>> = Vec::with_capacity(sub.gates().len());
    for (i, g) in sub.gates().iter().enumerate() {
        let cv = |x: &GateId| consts[x.index()].clone();
        let k: Option<BigRational> = match g {
            Gate::Input(_) => None,
            Gate::One => Some(BigRational::one()),
            Gate::MinusOne => Some(-BigRational::one()),
            Gate::Const(q) => Some(q.clone()),
            Gate::ConstDiv(x, y) => match (cv(x), cv(y)) {
                (Some(_), Some(q)) if q.is_zero() => return Err(Error::DivisionByZero(i)),
                (Some(p), Some(q)) => Some(p / q),
                _ => return Err(Error::InvalidCircuit { gate: i, msg: "cdiv of a non-constant".into() }),
            },
            Gate::Add(x, y) => cv(x).zip(cv(y)).map(|(p, q)| p + q),
            Gate::Mul(x, y) => cv(x).zip(cv(y)).map(|(p, q)| p * q),
            Gate::Proj { child, .. } => cv(child),
            Gate::Sum { child, .. } => cv(child).map(|p| &p + &p),
            Gate::Prod { child, .. } => cv(child).map(|p| &p * &p),
        };
        let r = if let Some(q) = &k {
            constant(&mut b, q, i)?
        } else {
            match g {
                Gate::Input(v) => (Some(b.input(*v)), None),
                Gate::Add(x, y) => {
                    let (px, nx) = rails[x.index()];
                    let (py, ny) = rails[y.index()];
                    (add(&mut b, px, py), add(&mut b, nx, ny))
                }
                Gate::Mul(x, y) => {
                    let (px, nx) = rails[x.index()];
                    let (py, ny) = rails[y.index()];
                    let pp = mul(&mut b, px, py);
                    let nn = mul(&mut b, nx, ny);
                    let pn = mul(&mut b, px, ny);
                    let np = mul(&mut b, nx, py);
                    (add(&mut b, pp, nn), add(&mut b, pn, np))
                }
                Gate::Proj { child, .. } => {
                    let (p, q) = rails[child.index()];
                    (proj(&mut b, g, p), proj(&mut b, g, q))
                }
                Gate::Sum { var, child } | Gate::Prod { var, child } => {
                    let (p, q) = rails[child.index()];
                    let p0 = p.map(|x| b.proj(*var, false, x));
                    let p1 = p.map(|x| b.proj(*var, true, x));
                    let q0 = q.map(|x| b.proj(*var, false, x));
                    let q1 = q.map(|x| b.proj(*var, true, x));
                    if matches!(g, Gate::Sum { .. }) {
                        (add(&mut b, p0, p1), add(&mut b, q0, q1))
                    } else {
                        // (p0 - q0)(p1 - q1)
                        let a = mul(&mut b, p0, p1);
                        let bb = mul(&mut b, q0, q1);
                        let c1 = mul(&mut b, p0, q1);
                        let c2 = mul(&mut b, q0, p1);
                        (add(&mut b, a, bb), add(&mut b, c1, c2))
                    }
                }
                _ => unreachable!("constant gates handled above"),
            }
        };
        consts.push(k);
        rails.push(r);
    }
    let (p, q) = rails[sub.outputs()[0].index()];
    let finish = |g: Rail| g.map(|g| b.clone().finish(vec![g]).prune());
    Ok(MonotoneSplit { pos: finish(p), neg: finish(q) })
}

/// True when the circuit uses only 1, inputs, Add, Mul and Proj.
pub fn is_monotone(c: &Circuit) -> bool {
    c.gates().iter().all(|g| matches!(g, Gate::One | Gate::Input(_) | Gate::Add(..) | Gate::Mul(..) | Gate::Proj { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::SparsePoly;
    use crate::circuit::{expand, Var};
    use crate::corpus::random_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(c: &Option<Circuit>, n: usize) -> SparsePoly {
        c.as_ref().map(|c| expand(c, 100_000).unwrap().remove(0)).unwrap_or_else(|| SparsePoly::zero(n))
    }

    fn check(c: &Circuit) -> MonotoneSplit {
        let s = monotone_split(c).unwrap();
        let n = c.num_vars();
        for side in [&s.pos, &s.neg].into_iter().flatten() {
            assert!(is_monotone(side));
        }
        let diff = poly(&s.pos, n).sub(&poly(&s.neg, n)).unwrap();
        assert_eq!(diff, expand(c, 100_000).unwrap().remove(0));
        s
    }

    #[test]
    fn negation() {
        let mut b = Builder::new(1);
        let x = b.var(0);
        let g = b.neg(x);
        let s = check(&b.finish(vec![g]));
        assert!(s.pos.is_none());
        assert_eq!(poly(&s.neg, 1), SparsePoly::var(1, 0));
    }

    #[test]
    fn product_with_negated_factor() {
        let mut b = Builder::new(2);
        let (x, y) = (b.var(0), b.var(1));
        let ny = b.neg(y);
        let p = b.mul(x, ny);
        let one = b.one();
        let g = b.add(p, one);
        check(&b.finish(vec![g]));
    }

    #[test]
    fn monotone_is_kept() {
        let mut b = Builder::new(2);
        let (x, y) = (b.var(0), b.var(1));
        let s = b.add(x, y);
        let g = b.mul(s, x);
        let c = b.finish(vec![g]);
        let sp = check(&c);
        assert!(sp.neg.is_none());
        assert_eq!(sp.pos.unwrap().size(), c.size());
    }

    #[test]
    fn projections_and_binders() {
        let mut b = Builder::new(2);
        let (x, z) = (b.var(0), b.var(1));
        let m = b.minus_one();
        let zm = b.add(z, m);
        let t = b.mul(zm, x);
        let p = b.prod_over(Var(1), t);
        let s = b.sum_over(Var(1), t);
        let g = b.add(p, s);
        check(&b.finish(vec![g]));
    }

    #[test]
    fn integer_cdiv_and_fraction() {
        let mut b = Builder::new(1);
        let x = b.var(0);
        let one = b.one();
        let two = b.add(one, one);
        let four = b.add(two, two);
        let q = b.cdiv(four, two);
        let g = b.mul(q, x);
        let s = check(&b.finish(vec![g]));
        assert!(s.neg.is_none());
        let mut b = Builder::new(1);
        let x = b.var(0);
        let one = b.one();
        let two = b.add(one, one);
        let h = b.cdiv(one, two);
        let g = b.mul(h, x);
        assert!(monotone_split(&b.finish(vec![g])).is_err());
    }

    #[test]
    fn random_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let c = random_circuit(3, 10, &mut rng);
            let s = check(&c);
            let total = s.pos.map_or(0, |c| c.size()) + s.neg.map_or(0, |c| c.size());
            assert!(total <= 6 * c.size() + 4, "{total} vs {}", c.size());
        }
    }
}
