//! Scalars and the ring abstraction used by evaluators.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default PIT modulus, 2^61 - 1.
pub const DEFAULT_PRIME: u64 = (1u64 << 61) - 1;

/// Residue modulo a word-sized prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    pub residue: u64,
    pub modulus: u64,
}

impl Fp {
    pub fn new(v: u64, modulus: u64) -> Self {
        Fp { residue: v % modulus, modulus }
    }

    fn check(&self, other: &Fp) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    pub fn add(&self, o: &Fp) -> Result<Fp> {
        self.check(o)?;
        Ok(Fp { residue: add_mod(self.residue, o.residue, self.modulus), modulus: self.modulus })
    }

    pub fn mul(&self, o: &Fp) -> Result<Fp> {
        self.check(o)?;
        Ok(Fp { residue: mul_mod(self.residue, o.residue, self.modulus), modulus: self.modulus })
    }
}

/// An exact scalar: integer, rational or prime-field residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BigScalar {
    Integer(BigInt),
    Rational(BigRational),
    Modular(Fp),
}

impl BigScalar {
    /// Rational view; `None` for residues.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self {
            BigScalar::Integer(i) => Some(BigRational::from_integer(i.clone())),
            BigScalar::Rational(q) => Some(q.clone()),
            BigScalar::Modular(_) => None,
        }
    }

    /// Collapse a rational with unit denominator to an integer.
    pub fn normalize(q: BigRational) -> BigScalar {
        if q.is_integer() {
            BigScalar::Integer(q.to_integer())
        } else {
            BigScalar::Rational(q)
        }
    }
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BigScalar::Integer(i) => write!(f, "{i}"),
            BigScalar::Rational(q) => write!(f, "{}", fmt_rational(q)),
            BigScalar::Modular(x) => write!(f, "{} mod {}", x.residue, x.modulus),
        }
    }
}

pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `-12`, `3/4` or `+5`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n).ok()?;
        let d = BigInt::from_str(d).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        BigInt::from_str(s).ok().map(BigRational::from_integer)
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    r
}

/// Inverse by Fermat; `p` must be prime and `a != 0 mod p`.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

pub fn bigint_mod(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits")
}

pub fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let n = bigint_mod(q.numer(), p);
    let d = bigint_mod(q.denom(), p);
    inv_mod(d, p).map(|di| mul_mod(n, di, p))
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes descending from 2^62, skipping `DEFAULT_PRIME`.
pub fn prime_sequence(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut c = (1u64 << 62) - 1;
    while out.len() < count {
        if c != DEFAULT_PRIME && is_prime_u64(c) {
            out.push(c);
        }
        c -= 2;
    }
    out
}

/// The ring interface shared by all evaluators.
pub trait Ring {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// `None` when the denominator is not invertible.
    fn from_rational(&self, q: &BigRational) -> Option<Self::Elem>;
    /// Division of constants; `None` on zero or non-invertible divisor.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
    fn from_i64(&self, v: i64) -> Self::Elem {
        self.from_rational(&rat(v)).expect("integers embed")
    }
    /// Size measure for resource caps (terms for polynomials).
    fn weight(&self, _a: &Self::Elem) -> usize {
        1
    }
}

/// The field of rationals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rationals;

impl Ring for Rationals {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_rational(&self, q: &BigRational) -> Option<BigRational> {
        Some(q.clone())
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> Option<BigRational> {
        if b.is_zero() {
            None
        } else {
            Some(a / b)
        }
    }
    fn weight(&self, a: &BigRational) -> usize {
        1 + (a.numer().bits() + a.denom().bits()) as usize / 4096
    }
}

/// F_p for a word-sized prime p.
#[derive(Clone, Copy, Debug)]
pub struct PrimeField {
    pub p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        PrimeField { p }
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

impl Ring for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        add_mod(*a, *b, self.p)
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        sub_mod(*a, *b, self.p)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_rational(&self, q: &BigRational) -> Option<u64> {
        rational_mod(q, self.p)
    }
    fn div(&self, a: &u64, b: &u64) -> Option<u64> {
        inv_mod(*b, self.p).map(|bi| mul_mod(*a, bi, self.p))
    }
}

/// Absolute value helper used by bound computations.
pub fn abs_bits(x: &BigInt) -> u64 {
    x.abs().bits()
}
