//! Randomized polynomial identity testing over F_p.

use rand::Rng;

use super::poly::SparsePoly;
use super::scalar::{is_prime_u64, PrimeField};
use crate::circuit::{eval::eval_env, passes::output_degree_bound, Circuit, EvalLimits};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Zero,
    NonZero,
}

fn check_modulus(p: u64, degree: u64) -> Result<()> {
    if !is_prime_u64(p) || (p as u128) <= 2 * degree as u128 {
        return Err(Error::ModulusTooSmall { p, degree });
    }
    Ok(())
}

/// Schwartz-Zippel test of a sparse polynomial.
pub fn zero_test_poly(f: &SparsePoly, p: u64, trials: usize, rng: &mut impl Rng) -> Result<Verdict> {
    check_modulus(p, f.total_degree().unwrap_or(0))?;
    let field = PrimeField::new(p);
    for _ in 0..trials {
        let pt: Vec<u64> = (0..f.nvars()).map(|_| rng.gen_range(0..p)).collect();
        if f.eval(&field, &pt)? != 0 {
            return Ok(Verdict::NonZero);
        }
    }
    Ok(Verdict::Zero)
}

/// Schwartz-Zippel test of every output of a circuit (all must vanish).
/// `degree` overrides the syntactic degree bound when given.
pub fn zero_test_circuit(c: &Circuit, p: u64, trials: usize, degree: Option<u64>, rng: &mut impl Rng) -> Result<Verdict> {
    let deg = degree.unwrap_or_else(|| output_degree_bound(c));
    check_modulus(p, deg)?;
    let field = PrimeField::new(p);
    for _ in 0..trials {
        let env: Vec<Option<u64>> = (0..c.num_vars()).map(|_| Some(rng.gen_range(0..p))).collect();
        let vals = eval_env(c, &field, &env, EvalLimits::default())?;
        if vals.iter().any(|&v| v != 0) {
            return Ok(Verdict::NonZero);
        }
    }
    Ok(Verdict::Zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::DEFAULT_PRIME;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_poly_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(zero_test_poly(&SparsePoly::zero(3), 101, 5, &mut rng).unwrap(), Verdict::Zero);
    }

    #[test]
    fn difference_is_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = SparsePoly::var(2, 0).sub(&SparsePoly::var(2, 1)).unwrap();
        assert_eq!(zero_test_poly(&f, (1 << 31) - 1, 20, &mut rng).unwrap(), Verdict::NonZero);
    }

    #[test]
    fn binomial_identity_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = SparsePoly::var(2, 0);
        let y = SparsePoly::var(2, 1);
        let two = SparsePoly::constant(2, crate::algebra::rat(2));
        let lhs = x.add(&y).unwrap().pow(2);
        let rhs = x.pow(2).add(&two.mul(&x).unwrap().mul(&y).unwrap()).unwrap().add(&y.pow(2)).unwrap();
        let f = lhs.sub(&rhs).unwrap();
        assert!(f.is_zero());
        assert_eq!(zero_test_poly(&f, DEFAULT_PRIME, 10, &mut rng).unwrap(), Verdict::Zero);
    }

    #[test]
    fn small_modulus_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = SparsePoly::var(1, 0).pow(10);
        assert!(matches!(zero_test_poly(&f, 11, 3, &mut rng), Err(Error::ModulusTooSmall { .. })));
    }
}
