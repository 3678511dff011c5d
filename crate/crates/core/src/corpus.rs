//! Seeded random instances for tests, benches and the CLI self-test.

use rand::Rng;

use crate::algebra::{monomials_grlex, rat, SparsePoly};
use crate::circuit::{Builder, Circuit, GateId, Var};

/// Every monomial of total degree <= d gets a coefficient uniform in [-c, c].
pub fn random_poly(nvars: usize, d: u32, c: i64, rng: &mut impl Rng) -> SparsePoly {
    let mut p = SparsePoly::zero(nvars);
    for m in monomials_grlex(nvars, d) {
        if m.total_degree() <= d as u64 {
            let v = rng.gen_range(-c..=c);
            if v != 0 {
                p.add_term(m, rat(v));
            }
        }
    }
    p
}

/// n random components in m variables of degree <= d, coefficients in [-c, c].
pub fn random_map(m: usize, n: usize, d: u32, c: i64, rng: &mut impl Rng) -> Vec<SparsePoly> {
    (0..n).map(|_| random_poly(m, d, c, rng)).collect()
}

pub fn random_int_matrix(n: usize, c: i64, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    (0..n).map(|_| (0..n).map(|_| rng.gen_range(-c..=c)).collect()).collect()
}

/// Random projection-free circuit with `size` add/mul gates over the leaves
/// x1..xn, 1 and -1. The last gate is the output.
pub fn random_circuit(nvars: usize, size: usize, rng: &mut impl Rng) -> Circuit {
    let mut b = Builder::new(nvars);
    let mut pool: Vec<GateId> = (0..nvars).map(|i| b.var(i)).collect();
    pool.push(b.one());
    pool.push(b.minus_one());
    let mut last = pool[0];
    for _ in 0..size.max(1) {
        let x = pool[rng.gen_range(0..pool.len())];
        let y = pool[rng.gen_range(0..pool.len())];
        last = if rng.gen_bool(0.5) { b.add(x, y) } else { b.mul(x, y) };
        pool.push(last);
    }
    b.finish(vec![last])
}

/// Random circuit over `nfree` free and `nbound` bound variables: `size`
/// gates drawn from add, mul, and projections/sums over the bound variables,
/// the last of which is the output. Bound variables sit after the free ones.
pub fn random_proj_circuit(nfree: usize, nbound: usize, size: usize, rng: &mut impl Rng) -> Circuit {
    let n = nfree + nbound;
    let mut b = Builder::new(n);
    let mut pool: Vec<GateId> = (0..n).map(|i| b.var(i)).collect();
    pool.push(b.one());
    pool.push(b.minus_one());
    let mut last = pool[0];
    for _ in 0..size.max(1) {
        let x = pool[rng.gen_range(0..pool.len())];
        let y = pool[rng.gen_range(0..pool.len())];
        let kind = if nbound == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) };
        last = match kind {
            0 => b.add(x, y),
            1 => b.mul(x, y),
            2 => {
                let v = Var((nfree + rng.gen_range(0..nbound)) as u32);
                b.proj(v, rng.gen_bool(0.5), x)
            }
            _ => b.sum_over(Var((nfree + rng.gen_range(0..nbound)) as u32), x),
        };
        pool.push(last);
    }
    // close off the bound variables at the output
    for v in nfree..n {
        last = b.proj(Var(v as u32), rng.gen_bool(0.5), last);
    }
    b.finish(vec![last])
}
