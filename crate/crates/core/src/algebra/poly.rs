//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::scalar::{fmt_rational, parse_rational, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigRational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::var(nvars, i), BigRational::one());
        p
    }

    pub fn monomial(m: Monomial, c: BigRational) -> Self {
        let mut p = Self::zero(m.arity());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigRational)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            if m.arity() != nvars {
                return Err(Error::ArityMismatch { expected: nvars, got: m.arity() });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer exponent/coefficient pairs.
    pub fn from_int_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(Monomial(e.to_vec()), BigRational::from_integer(BigInt::from(*c)));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.arity(), self.nvars);
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_arity(&self, o: &SparsePoly) -> Result<()> {
        if self.nvars != o.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: o.nvars });
        }
        Ok(())
    }

    pub fn add(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.check_arity(o)?;
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn sub(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &BigRational) -> SparsePoly {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, o: &SparsePoly) -> Result<SparsePoly> {
        self.check_arity(o)?;
        let mut r = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(r)
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same arity");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same arity");
            }
        }
        result
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u64> {
        self.terms.keys().map(|m| m.total_degree()).max()
    }

    pub fn individual_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.individual_degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Substitute `subs[i]` for `x_i`.
    pub fn compose(&self, subs: &[SparsePoly]) -> Result<SparsePoly> {
        if subs.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: subs.len() });
        }
        let m = match subs.first() {
            Some(s) => s.nvars,
            None => 0,
        };
        for s in subs {
            if s.nvars != m {
                return Err(Error::ArityMismatch { expected: m, got: s.nvars });
            }
        }
        // cache powers per variable
        let mut powers: Vec<Vec<SparsePoly>> = subs.iter().map(|s| vec![Self::one(m), s.clone()]).collect();
        let mut out = Self::zero(m);
        for (mono, c) in &self.terms {
            let mut t = Self::constant(m, c.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul(&subs[i])?;
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e as usize])?;
            }
            out = out.add(&t)?;
        }
        Ok(out)
    }

    /// Evaluate in any ring; coefficients must embed.
    pub fn eval<R: Ring>(&self, ring: &R, point: &[R::Elem]) -> Result<R::Elem> {
        if point.len() != self.nvars {
            return Err(Error::ArityMismatch { expected: self.nvars, got: point.len() });
        }
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = ring
                .from_rational(c)
                .ok_or_else(|| Error::Params("coefficient denominator not invertible".into()))?;
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = ring.mul(&t, &point[i]);
                }
            }
            acc = ring.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Re-embed into `n` variables; the dropped trailing variables must not occur.
    pub fn with_nvars(&self, n: usize) -> Result<SparsePoly> {
        let mut r = Self::zero(n);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            if n < e.len() {
                if e[n..].iter().any(|&x| x != 0) {
                    return Err(Error::ArityMismatch { expected: n, got: self.nvars });
                }
                e.truncate(n);
            } else {
                e.resize(n, 0);
            }
            r.add_term(Monomial(e), c.clone());
        }
        Ok(r)
    }

    /// Multiply by the lcm of denominators and divide by the content, making
    /// the leading coefficient positive.
    pub fn primitive_integer(&self) -> SparsePoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut l = BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            let v = (c * BigRational::from_integer(l.clone())).to_integer();
            g = g.gcd(&v);
        }
        let mut s = BigRational::new(l, g);
        if self.leading().unwrap().1.is_negative() {
            s = -s;
        }
        self.scale(&s)
    }

    /// True if `self = c * other` for a nonzero rational `c`.
    pub fn proportional_to(&self, other: &SparsePoly) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.is_zero() && other.is_zero();
        }
        if self.terms.len() != other.terms.len() {
            return false;
        }
        let (m0, c0) = self.leading().unwrap();
        let d0 = other.coeff(m0);
        if d0.is_zero() {
            return false;
        }
        let ratio = c0 / d0;
        self.terms.iter().all(|(m, c)| other.coeff(m) * &ratio == *c)
    }

    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.values().map(|c| c.numer().bits().max(c.denom().bits())).max().unwrap_or(0)
    }

    /// Text format: `vars n`, then `<coeff> : e1 .. en`, leading term first.
    pub fn to_text(&self) -> String {
        let mut s = format!("vars {}\n", self.nvars);
        for (m, c) in self.terms.iter().rev() {
            s.push_str(&fmt_rational(c));
            s.push_str(" :");
            for e in &m.0 {
                s.push(' ');
                s.push_str(&e.to_string());
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<SparsePoly> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `vars n` header"))?;
        let n: usize = header
            .strip_prefix("vars")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::parse(ln, "expected `vars n`"))?;
        let mut p = SparsePoly::zero(n);
        let mut seen = std::collections::HashSet::new();
        for (ln, line) in lines {
            let (c, es) = line.split_once(':').ok_or_else(|| Error::parse(ln, "expected `<coeff> : <exponents>`"))?;
            let c = parse_rational(c).ok_or_else(|| Error::parse(ln, format!("bad coefficient `{}`", c.trim())))?;
            let e: Vec<u32> = es
                .split_whitespace()
                .map(|t| t.parse::<u32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(ln, "bad exponent"))?;
            if e.len() != n {
                return Err(Error::parse(ln, format!("expected {n} exponents, found {}", e.len())));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::parse(ln, "duplicate monomial"));
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m.total_degree() == 0 {
                write!(f, "{}", fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&a))?;
            }
        }
        Ok(())
    }
}

/// Polynomials over Q as a ring, used for symbolic expansion.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing {
    pub nvars: usize,
}

impl Ring for PolyRing {
    type Elem = SparsePoly;
    fn zero(&self) -> SparsePoly {
        SparsePoly::zero(self.nvars)
    }
    fn one(&self) -> SparsePoly {
        SparsePoly::one(self.nvars)
    }
    fn add(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        a.add(b).expect("same arity")
    }
    fn neg(&self, a: &SparsePoly) -> SparsePoly {
        a.neg()
    }
    fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        a.mul(b).expect("same arity")
    }
    fn is_zero(&self, a: &SparsePoly) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> Option<SparsePoly> {
        Some(SparsePoly::constant(self.nvars, q.clone()))
    }
    fn div(&self, a: &SparsePoly, b: &SparsePoly) -> Option<SparsePoly> {
        let c = b.as_constant()?;
        if c.is_zero() {
            return None;
        }
        Some(a.scale(&(BigRational::one() / c)))
    }
    fn weight(&self, a: &SparsePoly) -> usize {
        a.num_terms().max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;

    fn x(n: usize, i: usize) -> SparsePoly {
        SparsePoly::var(n, i)
    }

    #[test]
    fn difference_of_squares() {
        let one = SparsePoly::one(1);
        let a = x(1, 0).add(&one).unwrap();
        let b = x(1, 0).sub(&one).unwrap();
        let expect = SparsePoly::from_int_terms(1, &[(&[2], 1), (&[0], -1)]);
        assert_eq!(a.mul(&b).unwrap(), expect);
    }

    #[test]
    fn times_zero() {
        let p = x(2, 0).add(&x(2, 1)).unwrap();
        assert!(p.mul(&SparsePoly::zero(2)).unwrap().is_zero());
    }

    #[test]
    fn cube_matches_repeated_multiplication() {
        let s = x(2, 0).add(&x(2, 1)).unwrap();
        let rep = s.mul(&s).unwrap().mul(&s).unwrap();
        assert_eq!(s.pow(3), rep);
        // binomial coefficients 1 3 3 1 computed independently
        let expect = SparsePoly::from_int_terms(2, &[(&[3, 0], 1), (&[2, 1], 3), (&[1, 2], 3), (&[0, 3], 1)]);
        assert_eq!(rep, expect);
        assert_eq!(rep.total_degree(), Some(3));
    }

    #[test]
    fn arity_mismatch_is_error() {
        assert!(x(1, 0).mul(&x(2, 0)).is_err());
        assert!(x(2, 0).compose(&[x(1, 0)]).is_err());
    }

    #[test]
    fn compose_examples() {
        let z = x(1, 0);
        let a = x(2, 0).sub(&x(2, 1)).unwrap();
        assert!(a.compose(&[z.clone(), z.clone()]).unwrap().is_zero());
        let b = x(2, 0).pow(2).sub(&x(2, 1)).unwrap();
        assert!(b.compose(&[z.clone(), z.pow(2)]).unwrap().is_zero());
        let s = x(2, 0).add(&x(2, 1)).unwrap();
        assert_eq!(x(1, 0).compose(&[s.clone()]).unwrap(), s);
    }

    #[test]
    fn text_round_trip() {
        let p = SparsePoly::from_terms(
            2,
            vec![(Monomial(vec![2, 0]), rat(1)), (Monomial(vec![0, 1]), BigRational::new((-3).into(), 4.into()))],
        )
        .unwrap();
        let t = p.to_text();
        assert_eq!(t, "vars 2\n1 : 2 0\n-3/4 : 0 1\n");
        assert_eq!(SparsePoly::parse(&t).unwrap(), p);
        assert_eq!(SparsePoly::parse(&t).unwrap().to_text(), t);
    }

    #[test]
    fn parse_errors_have_lines() {
        let e = SparsePoly::parse("vars 2\n1 : 1 0\n2 : 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        assert!(SparsePoly::parse("").is_err());
    }

    #[test]
    fn primitive_form() {
        let p = SparsePoly::from_terms(
            2,
            vec![(Monomial(vec![1, 0]), BigRational::new((-2).into(), 3.into())), (Monomial(vec![0, 1]), rat(4))],
        )
        .unwrap();
        let q = p.primitive_integer();
        assert_eq!(q, SparsePoly::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], -6)]));
        assert!(p.proportional_to(&q));
    }
}
