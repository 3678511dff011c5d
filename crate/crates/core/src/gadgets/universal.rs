//! A naive degree-stratified universal circuit with a witness generator.
//!
//! Values g_0 = 1, g_1..g_n = x. Layer t (1-based) computes
//! g_{n+t} = A_t * B_t + C_t where A_t, B_t, C_t are parameter-weighted sums
//! of all earlier values. Each value is kept as homogeneous components of
//! degree 0..d in x, so products drop anything above d.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::circuit::{passes::lower_constants, Builder, Circuit, Gate, GateId, Var, Wire};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Universal {
    pub circuit: Circuit,
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub layers: usize,
    pub r: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    A,
    B,
    C,
}

impl Universal {
    /// Index of the parameter weighting g_j in slot `slot` of layer `t` (1-based).
    pub fn param(&self, t: usize, slot: Slot, j: usize) -> usize {
        param_index(self.n, t, slot, j)
    }

    /// Parameter assignment making U(x, a) equal the polynomial of `c`.
    ///
    /// `c` must be projection-free with one output, of size at most s and
    /// degree at most d.
    pub fn witness(&self, c: &Circuit) -> Result<Vec<BigRational>> {
        witness(self, c)
    }

    /// Fix all parameters except `free` to `base`; the result has variables
    /// x1..xn followed by the free parameters in the given order.
    pub fn restrict(&self, free: &[usize], base: &[BigRational]) -> Result<Circuit> {
        if base.len() != self.r {
            return Err(Error::ArityMismatch { expected: self.r, got: base.len() });
        }
        let mut b = Builder::new(self.n + free.len());
        let mut wiring: Vec<Wire> = (0..self.n).map(|i| Wire::Var(Var(i as u32))).collect();
        for (k, v) in base.iter().enumerate() {
            match free.iter().position(|&f| f == k) {
                Some(pos) => wiring.push(Wire::Var(Var((self.n + pos) as u32))),
                None => wiring.push(Wire::Gate(b.const_rational(v))),
            }
        }
        let outs = b.inline(&self.circuit, &wiring, None)?;
        Ok(b.finish(outs).prune())
    }
}

fn param_index(n: usize, t: usize, slot: Slot, j: usize) -> usize {
    // layers before t use 3 * (n + t') parameters each
    let before: usize = (1..t).map(|tt| 3 * (n + tt)).sum();
    let width = n + t;
    before
        + match slot {
            Slot::A => 0,
            Slot::B => width,
            Slot::C => 2 * width,
        }
        + j
}

/// Build U(x, y) for n variables, degree d and size s.
pub fn build_universal(n: usize, d: usize, s: usize) -> Universal {
    assert!(n >= 1 && d >= 1 && s >= 1);
    let layers = (s / 2).max(1);
    let r: usize = (1..=layers).map(|t| 3 * (n + t)).sum();
    let mut b = Builder::new(n + r);
    // comps[j][deg] = component of g_j in degree deg, None for zero
    let mut comps: Vec<Vec<Option<GateId>>> = Vec::new();
    let one = b.one();
    let mut c0 = vec![None; d + 1];
    c0[0] = Some(one);
    comps.push(c0);
    for i in 0..n {
        let mut ci = vec![None; d + 1];
        ci[1] = Some(b.var(i));
        comps.push(ci);
    }
    for t in 1..=layers {
        let width = n + t;
        let weighted = |b: &mut Builder, slot: Slot, comps: &Vec<Vec<Option<GateId>>>| -> Vec<Option<GateId>> {
            let mut out = vec![None; d + 1];
            for deg in 0..=d {
                let mut terms = Vec::new();
                for (j, cj) in comps.iter().enumerate().take(width) {
                    if let Some(g) = cj[deg] {
                        let y = b.var(n + param_index(n, t, slot, j));
                        terms.push(b.mul(y, g));
                    }
                }
                if !terms.is_empty() {
                    out[deg] = Some(b.sum_all(&terms));
                }
            }
            out
        };
        let a = weighted(&mut b, Slot::A, &comps);
        let bb = weighted(&mut b, Slot::B, &comps);
        let c = weighted(&mut b, Slot::C, &comps);
        let mut g = vec![None; d + 1];
        for deg in 0..=d {
            let mut terms = Vec::new();
            for d1 in 0..=deg {
                if let (Some(p), Some(q)) = (a[d1], bb[deg - d1]) {
                    terms.push(b.mul(p, q));
                }
            }
            if let Some(cc) = c[deg] {
                terms.push(cc);
            }
            if !terms.is_empty() {
                g[deg] = Some(b.sum_all(&terms));
            }
        }
        comps.push(g);
    }
    let last: Vec<GateId> = comps.last().unwrap().iter().flatten().copied().collect();
    let out = b.sum_all(&last);
    Universal { circuit: b.finish(vec![out]).prune(), n, d, s, layers, r }
}

// A value during witness construction: a linear form over g_0..g_k.
type Form = BTreeMap<usize, BigRational>;

fn form_const(f: &Form) -> Option<BigRational> {
    if f.keys().all(|&k| k == 0) {
        Some(f.get(&0).cloned().unwrap_or_else(BigRational::zero))
    } else {
        None
    }
}

fn form_add(a: &Form, b: &Form) -> Form {
    let mut r = a.clone();
    for (k, v) in b {
        let e = r.entry(*k).or_insert_with(BigRational::zero);
        *e += v;
        if e.is_zero() {
            r.remove(k);
        }
    }
    r
}

fn form_scale(a: &Form, s: &BigRational) -> Form {
    if s.is_zero() {
        return Form::new();
    }
    a.iter().map(|(k, v)| (*k, v * s)).collect()
}

fn witness(u: &Universal, c: &Circuit) -> Result<Vec<BigRational>> {
    if c.outputs().len() != 1 {
        return Err(Error::Params("witness needs a single-output circuit".into()));
    }
    if !c.is_projection_free() {
        return Err(Error::Params("witness needs a projection-free circuit".into()));
    }
    if c.num_vars() != u.n {
        return Err(Error::ArityMismatch { expected: u.n, got: c.num_vars() });
    }
    let c = lower_constants(c).prune();
    let n = u.n;
    let mut a = vec![BigRational::zero(); u.r];
    let mut forms: Vec<Form> = Vec::with_capacity(c.gates().len());
    let mut t = 0usize;
    for (i, g) in c.gates().iter().enumerate() {
        let f = match g {
            Gate::Input(v) => Form::from([(v.index() + 1, BigRational::one())]),
            Gate::One => Form::from([(0, BigRational::one())]),
            Gate::MinusOne => Form::from([(0, -BigRational::one())]),
            Gate::Const(q) => Form::from([(0, q.clone())]),
            Gate::ConstDiv(x, y) => {
                let (p, q) = (form_const(&forms[x.index()]), form_const(&forms[y.index()]));
                match (p, q) {
                    (Some(p), Some(q)) if !q.is_zero() => Form::from([(0, p / q)]),
                    _ => return Err(Error::invalid(i, "cdiv of non-constant or zero")),
                }
            }
            Gate::Add(x, y) => form_add(&forms[x.index()], &forms[y.index()]),
            Gate::Mul(x, y) => {
                let (fx, fy) = (&forms[x.index()], &forms[y.index()]);
                if let Some(k) = form_const(fx) {
                    form_scale(fy, &k)
                } else if let Some(k) = form_const(fy) {
                    form_scale(fx, &k)
                } else {
                    t += 1;
                    if t > u.layers {
                        return Err(Error::Params(format!("circuit needs more than {} product layers", u.layers)));
                    }
                    for (j, v) in fx {
                        a[param_index(n, t, Slot::A, *j)] = v.clone();
                    }
                    for (j, v) in fy {
                        a[param_index(n, t, Slot::B, *j)] = v.clone();
                    }
                    Form::from([(n + t, BigRational::one())])
                }
            }
            _ => unreachable!(),
        };
        forms.push(f);
    }
    let out = &forms[c.outputs()[0].index()];
    let exact_last = t == u.layers && out.len() == 1 && out.get(&(n + t)).is_some_and(|v| v.is_one());
    if !exact_last {
        if t == u.layers {
            return Err(Error::Params("no free layer left to route the output".into()));
        }
        // middle layers stay zero; the last layer copies the output form
        for (j, v) in out {
            a[param_index(n, u.layers, Slot::C, *j)] = v.clone();
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, SparsePoly};
    use crate::circuit::expand;

    fn specialize(u: &Universal, a: &[BigRational]) -> SparsePoly {
        let c = u.restrict(&[], a).unwrap();
        expand(&c, 100_000).unwrap().remove(0)
    }

    #[test]
    fn target_x1() {
        let u = build_universal(2, 2, 3);
        let mut b = Builder::new(2);
        let x = b.var(0);
        let c = b.finish(vec![x]);
        let a = u.witness(&c).unwrap();
        assert_eq!(specialize(&u, &a), SparsePoly::var(2, 0));
    }

    #[test]
    fn zero_assignment() {
        let u = build_universal(2, 2, 4);
        assert!(specialize(&u, &vec![rat(0); u.r]).is_zero());
        assert_eq!(u.r, 3 * ((2 + 1) + (2 + 2)));
    }

    #[test]
    fn product_and_sum_targets() {
        let u = build_universal(2, 2, 6);
        let mut b = Builder::new(2);
        let x = b.var(0);
        let y = b.var(1);
        let one = b.one();
        let s = b.add(x, one);
        let m = b.mul(s, y);
        let m2 = b.neg(m);
        let c = b.finish(vec![m2]);
        let a = u.witness(&c).unwrap();
        assert_eq!(specialize(&u, &a), expand(&c, 100).unwrap()[0]);
    }

    #[test]
    fn degree_is_truncated() {
        let u = build_universal(1, 1, 4);
        let p = specialize(&u, &vec![rat(1); u.r]);
        assert!(p.total_degree().unwrap_or(0) <= 1);
    }
}
