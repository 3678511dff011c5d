//! Exponent vectors under graded-lex order.

use std::cmp::Ordering;
use std::fmt;

/// Exponent vector; arity equals the ambient variable count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

pub type ExponentVector = Monomial;

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn individual_degree(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All exponent vectors of arity `n` with entries `<= max_individual`,
/// in ascending graded-lex order.
pub fn monomials_grlex(n: usize, max_individual: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let top = n as u64 * max_individual as u64;
    for t in 0..=top {
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, t, max_individual, &mut out);
    }
    out
}

/// Like [`monomials_grlex`] but stops after `limit` entries.
pub fn monomials_grlex_prefix(n: usize, max_individual: u32, limit: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    let top = n as u64 * max_individual as u64;
    for t in 0..=top {
        let mut cur = vec![0u32; n];
        fill(&mut cur, 0, t, max_individual, &mut out);
        if out.len() >= limit {
            out.truncate(limit);
            break;
        }
    }
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, rest: u64, cap: u32, out: &mut Vec<Monomial>) {
    let n = cur.len();
    if pos == n {
        if rest == 0 {
            out.push(Monomial(cur.clone()));
        }
        return;
    }
    let remaining_slots = (n - pos - 1) as u64;
    let hi = rest.min(cap as u64);
    for e in 0..=hi {
        // the other slots must absorb rest - e
        if rest - e > remaining_slots * cap as u64 {
            continue;
        }
        cur[pos] = e as u32;
        fill(cur, pos + 1, rest - e, cap, out);
    }
    cur[pos] = 0;
}
