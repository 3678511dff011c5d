//! Bit-streamed integer arithmetic with metered workspace.
//!
//! Integers are sign-magnitude: bit 0 is the sign, bits 1..=w the magnitude
//! from the most significant bit down. Internally everything is addressed by
//! weight (position 0 = least significant). An oracle never materializes its
//! value; each query recomputes from the inputs' query interfaces.

use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::gadgets::bits::bit_width;

/// Peak auxiliary bits in use. Frames are pushed and popped around each
/// oracle's local state; nested queries stack.
#[derive(Clone, Debug, Default)]
pub struct WorkspaceMeter {
    current: u64,
    peak: u64,
    queries: u64,
}

impl WorkspaceMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn peak(&self) -> u64 {
        self.peak
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn reset(&mut self) {
        *self = Self::default();
    }

    /// Run `f` with `bits` of local state charged.
    pub fn frame<T>(&mut self, bits: u64, f: impl FnOnce(&mut Self) -> T) -> T {
        self.current += bits;
        self.peak = self.peak.max(self.current);
        let out = f(self);
        self.current -= bits;
        out
    }

    pub fn count_query(&mut self) {
        self.queries += 1;
    }
}

/// Bits needed for a counter ranging over 0..=n.
pub fn counter_bits(n: u64) -> u64 {
    bit_width(n).max(1) as u64
}

pub trait BitOracle: Send + Sync {
    /// Magnitude width w: the value is below 2^w in absolute value.
    fn width(&self) -> usize;
    /// Sign bit (true for negative; zero is never negative).
    fn sign(&self, m: &mut WorkspaceMeter) -> Result<bool>;
    /// Magnitude bit of weight 2^j (0 for j >= width).
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool>;

    /// Query by address: 0 = sign, 1 = most significant magnitude bit.
    fn bit(&self, i: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        m.count_query();
        if i == 0 {
            return self.sign(m);
        }
        let w = self.width();
        if i > w {
            return Ok(false);
        }
        self.mag(w - i, m)
    }
}

pub type Oracle = Arc<dyn BitOracle>;

/// A literal input; reading it costs no workspace.
pub struct IntOracle {
    value: BigInt,
    width: usize,
}

impl IntOracle {
    pub fn new(value: BigInt) -> Oracle {
        let width = value.bits() as usize;
        Arc::new(IntOracle { value, width })
    }

    /// With an explicit (larger) declared width.
    pub fn with_width(value: BigInt, width: usize) -> Result<Oracle> {
        if value.bits() as usize > width {
            return Err(Error::Overflow(format!("{value} does not fit in {width} magnitude bits")));
        }
        Ok(Arc::new(IntOracle { value, width }))
    }
}

impl BitOracle for IntOracle {
    fn width(&self) -> usize {
        self.width
    }
    fn sign(&self, _: &mut WorkspaceMeter) -> Result<bool> {
        Ok(self.value.sign() == Sign::Minus)
    }
    fn mag(&self, j: usize, _: &mut WorkspaceMeter) -> Result<bool> {
        Ok(self.value.magnitude().bit(j as u64))
    }
}

/// Read an oracle into a big integer (for oracles and tests).
pub fn read_int(o: &dyn BitOracle, m: &mut WorkspaceMeter) -> Result<BigInt> {
    let w = o.width();
    let mut mag = num_bigint::BigUint::zero();
    for j in 0..w {
        if o.mag(j, m)? {
            mag.set_bit(j as u64, true);
        }
    }
    let neg = o.sign(m)?;
    Ok(BigInt::from_biguint(if neg { Sign::Minus } else { Sign::Plus }, mag))
}

// magnitude comparison: Less / Equal / Greater of |a| vs |b|, scanning down
fn cmp_mag(a: &dyn BitOracle, b: &dyn BitOracle, m: &mut WorkspaceMeter) -> Result<std::cmp::Ordering> {
    let w = a.width().max(b.width());
    m.frame(counter_bits(w as u64), |m| {
        for j in (0..w).rev() {
            let (x, y) = (a.mag(j, m)?, b.mag(j, m)?);
            if x != y {
                return Ok(if x { std::cmp::Ordering::Greater } else { std::cmp::Ordering::Less });
            }
        }
        Ok(std::cmp::Ordering::Equal)
    })
}

fn is_zero(a: &dyn BitOracle, m: &mut WorkspaceMeter) -> Result<bool> {
    let w = a.width();
    m.frame(counter_bits(w as u64), |m| {
        for j in 0..w {
            if a.mag(j, m)? {
                return Ok(false);
            }
        }
        Ok(true)
    })
}

// Carry into position j of |a| + |b|: the nearest lower position where the
// operand bits agree decides it.
fn carry_in(a: &dyn BitOracle, b: &dyn BitOracle, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
    m.frame(counter_bits(j as u64) + 2, |m| {
        for k in (0..j).rev() {
            let (x, y) = (a.mag(k, m)?, b.mag(k, m)?);
            if x == y {
                return Ok(x);
            }
        }
        Ok(false)
    })
}

// Borrow into position j of |a| - |b| (|a| >= |b|).
fn borrow_in(a: &dyn BitOracle, b: &dyn BitOracle, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
    m.frame(counter_bits(j as u64) + 2, |m| {
        for k in (0..j).rev() {
            let (x, y) = (a.mag(k, m)?, b.mag(k, m)?);
            if x != y {
                return Ok(y);
            }
        }
        Ok(false)
    })
}

/// a + b (or a - b with `negate_b`).
pub struct AddOracle {
    a: Oracle,
    b: Oracle,
    negate_b: bool,
}

impl AddOracle {
    fn sign_b(&self, m: &mut WorkspaceMeter) -> Result<bool> {
        let s = self.b.sign(m)?;
        if !self.negate_b {
            return Ok(s);
        }
        // -0 is 0
        Ok(!s && !is_zero(self.b.as_ref(), m)?)
    }
}

impl BitOracle for AddOracle {
    fn width(&self) -> usize {
        self.a.width().max(self.b.width()) + 1
    }

    fn sign(&self, m: &mut WorkspaceMeter) -> Result<bool> {
        m.frame(3, |m| {
            let sa = self.a.sign(m)?;
            let sb = self.sign_b(m)?;
            if sa == sb {
                return Ok(sa);
            }
            Ok(match cmp_mag(self.a.as_ref(), self.b.as_ref(), m)? {
                std::cmp::Ordering::Greater => sa,
                std::cmp::Ordering::Less => sb,
                std::cmp::Ordering::Equal => false,
            })
        })
    }

    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        if j >= self.width() {
            return Ok(false);
        }
        m.frame(4, |m| {
            let sa = self.a.sign(m)?;
            let sb = self.sign_b(m)?;
            let (x, y) = (self.a.mag(j, m)?, self.b.mag(j, m)?);
            if sa == sb {
                let c = carry_in(self.a.as_ref(), self.b.as_ref(), j, m)?;
                return Ok(x ^ y ^ c);
            }
            let (big, small) = match cmp_mag(self.a.as_ref(), self.b.as_ref(), m)? {
                std::cmp::Ordering::Less => (&self.b, &self.a),
                _ => (&self.a, &self.b),
            };
            let c = borrow_in(big.as_ref(), small.as_ref(), j, m)?;
            Ok(x ^ y ^ c)
        })
    }
}

pub fn stream_add(a: Oracle, b: Oracle) -> Oracle {
    Arc::new(AddOracle { a, b, negate_b: false })
}

pub fn stream_sub(a: Oracle, b: Oracle) -> Oracle {
    Arc::new(AddOracle { a, b, negate_b: true })
}

// Column sums with a forward carry: position j of sum_t col(t, k) 2^k.
// `col` returns the count of ones in column k; it is at most `max_col`.
fn column_bit(
    j: usize,
    max_col: u64,
    m: &mut WorkspaceMeter,
    col: &dyn Fn(usize, &mut WorkspaceMeter) -> Result<u64>,
) -> Result<bool> {
    // carry stays below max_col; counters for k, carry and the column count
    let bits = counter_bits(j as u64) + 2 * counter_bits(max_col.max(1));
    m.frame(bits, |m| {
        let mut carry = 0u64;
        for k in 0..j {
            carry = (col(k, m)? + carry) / 2;
        }
        Ok((col(j, m)? + carry) & 1 == 1)
    })
}

/// Sum of a list of non-negative oracles (signs are ignored).
struct NonNegSum {
    items: Vec<Oracle>,
    width: usize,
}

impl BitOracle for NonNegSum {
    fn width(&self) -> usize {
        self.width
    }
    fn sign(&self, _: &mut WorkspaceMeter) -> Result<bool> {
        Ok(false)
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        if j >= self.width || self.items.is_empty() {
            return Ok(false);
        }
        let l = self.items.len() as u64;
        column_bit(j, l, m, &|k, m| {
            m.frame(counter_bits(l), |m| {
                let mut c = 0;
                for it in &self.items {
                    if it.mag(k, m)? {
                        c += 1;
                    }
                }
                Ok(c)
            })
        })
    }
}

/// Items of a list with a given sign, as non-negative magnitudes.
struct SignFiltered {
    items: Vec<Oracle>,
    negative: bool,
    width: usize,
}

impl BitOracle for SignFiltered {
    fn width(&self) -> usize {
        self.width
    }
    fn sign(&self, _: &mut WorkspaceMeter) -> Result<bool> {
        Ok(false)
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        if j >= self.width || self.items.is_empty() {
            return Ok(false);
        }
        let l = self.items.len() as u64;
        column_bit(j, l, m, &|k, m| {
            m.frame(counter_bits(l) + 1, |m| {
                let mut c = 0;
                for it in &self.items {
                    if it.sign(m)? == self.negative && it.mag(k, m)? {
                        c += 1;
                    }
                }
                Ok(c)
            })
        })
    }
}

/// Sum of a list of signed oracles: (sum of positives) - (sum of negatives).
pub fn stream_list_sum(items: Vec<Oracle>) -> Oracle {
    let w = items.iter().map(|o| o.width()).max().unwrap_or(0) + counter_bits(items.len() as u64) as usize;
    if items.len() <= 1 {
        if let Some(o) = items.into_iter().next() {
            return o;
        }
        return IntOracle::new(BigInt::zero());
    }
    let pos: Oracle = Arc::new(SignFiltered { items: items.clone(), negative: false, width: w });
    let neg: Oracle = Arc::new(SignFiltered { items, negative: true, width: w });
    Arc::new(Difference { pos, neg })
}

/// Sum of non-negative oracles (no sign handling).
pub fn stream_nonneg_sum(items: Vec<Oracle>) -> Oracle {
    let w = items.iter().map(|o| o.width()).max().unwrap_or(0) + counter_bits(items.len() as u64) as usize;
    Arc::new(NonNegSum { items, width: w })
}

// pos - neg for non-negative inputs; width is that of the larger input.
struct Difference {
    pos: Oracle,
    neg: Oracle,
}

impl BitOracle for Difference {
    fn width(&self) -> usize {
        self.pos.width().max(self.neg.width())
    }
    fn sign(&self, m: &mut WorkspaceMeter) -> Result<bool> {
        Ok(cmp_mag(self.pos.as_ref(), self.neg.as_ref(), m)? == std::cmp::Ordering::Less)
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        m.frame(3, |m| {
            let (big, small) = match cmp_mag(self.pos.as_ref(), self.neg.as_ref(), m)? {
                std::cmp::Ordering::Less => (&self.neg, &self.pos),
                _ => (&self.pos, &self.neg),
            };
            let (x, y) = (big.mag(j, m)?, small.mag(j, m)?);
            let c = borrow_in(big.as_ref(), small.as_ref(), j, m)?;
            Ok(x ^ y ^ c)
        })
    }
}

/// School-method product: column k of the partial-product array has
/// sum_t a_t b_(k-t) ones.
pub struct MulOracle {
    a: Oracle,
    b: Oracle,
}

impl BitOracle for MulOracle {
    fn width(&self) -> usize {
        self.a.width() + self.b.width()
    }
    fn sign(&self, m: &mut WorkspaceMeter) -> Result<bool> {
        m.frame(2, |m| {
            let s = self.a.sign(m)? ^ self.b.sign(m)?;
            Ok(s && !is_zero(self.a.as_ref(), m)? && !is_zero(self.b.as_ref(), m)?)
        })
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        if j >= self.width() {
            return Ok(false);
        }
        let wa = self.a.width();
        let wb = self.b.width();
        let max_col = wa.min(wb).max(1) as u64;
        column_bit(j, max_col, m, &|k, m| {
            m.frame(counter_bits(wa as u64) + counter_bits(max_col), |m| {
                let mut c = 0;
                for t in 0..=k.min(wa.saturating_sub(1)) {
                    if k - t < wb && self.a.mag(t, m)? && self.b.mag(k - t, m)? {
                        c += 1;
                    }
                }
                Ok(c)
            })
        })
    }
}

pub fn stream_mul(a: Oracle, b: Oracle) -> Oracle {
    Arc::new(MulOracle { a, b })
}

/// Declared width; queries fail if the value does not fit.
pub struct Bounded {
    inner: Oracle,
    width: usize,
}

impl BitOracle for Bounded {
    fn width(&self) -> usize {
        self.width
    }
    fn sign(&self, m: &mut WorkspaceMeter) -> Result<bool> {
        self.check(m)?;
        self.inner.sign(m)
    }
    fn mag(&self, j: usize, m: &mut WorkspaceMeter) -> Result<bool> {
        self.check(m)?;
        if j >= self.width {
            return Ok(false);
        }
        self.inner.mag(j, m)
    }
}

impl Bounded {
    fn check(&self, m: &mut WorkspaceMeter) -> Result<()> {
        let w = self.inner.width();
        m.frame(counter_bits(w as u64), |m| {
            for j in self.width..w {
                if self.inner.mag(j, m)? {
                    return Err(Error::Overflow(format!("value exceeds the declared {} magnitude bits", self.width)));
                }
            }
            Ok(())
        })
    }
}

pub fn bounded(inner: Oracle, width: usize) -> Oracle {
    Arc::new(Bounded { inner, width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn int(v: i64) -> Oracle {
        IntOracle::new(BigInt::from(v))
    }

    fn read(o: &Oracle) -> BigInt {
        read_int(o.as_ref(), &mut WorkspaceMeter::new()).unwrap()
    }

    #[test]
    fn small_examples() {
        let s = stream_add(int(5), int(3));
        assert_eq!(read(&s), BigInt::from(8));
        let mut m = WorkspaceMeter::new();
        // 8 in 4 magnitude bits + sign: 0 1 0 0 0
        let bits: Vec<bool> = (0..=s.width()).map(|i| s.bit(i, &mut m).unwrap()).collect();
        assert_eq!(bits, vec![false, true, false, false, false]);
        let d = stream_sub(int(3), int(5));
        assert_eq!(read(&d), BigInt::from(-2));
        assert!(d.bit(0, &mut m).unwrap());
        assert_eq!(read(&stream_sub(int(4), int(4))), BigInt::zero());
        assert!(!stream_sub(int(4), int(4)).bit(0, &mut m).unwrap());
        assert_eq!(read(&stream_mul(int(-6), int(7))), BigInt::from(-42));
        assert_eq!(read(&stream_mul(int(-6), int(0))), BigInt::zero());
        assert!(!stream_mul(int(-6), int(0)).bit(0, &mut m).unwrap());
        assert_eq!(read(&stream_list_sum(vec![int(3), int(-10), int(4)])), BigInt::from(-3));
    }

    #[test]
    fn random_against_bigint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a: i64 = rng.gen_range(-(1 << 31)..(1 << 31));
            let b: i64 = rng.gen_range(-(1 << 31)..(1 << 31));
            assert_eq!(read(&stream_add(int(a), int(b))), BigInt::from(a + b));
            assert_eq!(read(&stream_sub(int(a), int(b))), BigInt::from(a - b));
            let (c, d) = (a >> 16, b >> 16);
            assert_eq!(read(&stream_mul(int(c), int(d))), BigInt::from(c * d));
            let xs: Vec<i64> = (0..7).map(|_| rng.gen_range(-(1 << 31)..(1 << 31))).collect();
            let s: i64 = xs.iter().sum();
            assert_eq!(read(&stream_list_sum(xs.into_iter().map(int).collect())), BigInt::from(s));
        }
    }

    #[test]
    fn overflow_is_detected() {
        let o = bounded(stream_add(int(200), int(100)), 8);
        assert!(matches!(read_int(o.as_ref(), &mut WorkspaceMeter::new()), Err(Error::Overflow(_))));
        let o = bounded(stream_add(int(100), int(100)), 8);
        assert_eq!(read(&o), BigInt::from(200));
    }

    #[test]
    fn workspace_is_small() {
        let mut m = WorkspaceMeter::new();
        let s = stream_add(int(i32::MAX as i64), int(12345));
        for i in 0..=s.width() {
            s.bit(i, &mut m).unwrap();
        }
        assert!(m.peak() <= 16 * 5, "{}", m.peak());
    }
}
