//! Rewriting passes over circuits.

use super::ir::{Builder, Circuit, Gate, GateId, Var, Wire};
use crate::error::Result;

/// Replace Sum/Prod by explicit Proj pairs.
pub fn desugar(c: &Circuit) -> Circuit {
    let mut b = Builder::new(c.num_vars());
    let mut map: Vec<GateId> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let id = match g {
            Gate::Sum { var, child } | Gate::Prod { var, child } => {
                let ch = map[child.index()];
                let p0 = b.proj(*var, false, ch);
                let p1 = b.proj(*var, true, ch);
                if matches!(g, Gate::Sum { .. }) {
                    b.add(p0, p1)
                } else {
                    b.mul(p0, p1)
                }
            }
            other => b.push(remap(other, &map)),
        };
        map.push(id);
    }
    let outs = c.outputs().iter().map(|o| map[o.index()]).collect();
    b.finish(outs)
}

/// Rewrite general `Const` gates into the 1 / -1 / cdiv dialect.
pub fn lower_constants(c: &Circuit) -> Circuit {
    let mut b = Builder::new(c.num_vars());
    let mut map: Vec<GateId> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let id = match g {
            Gate::Const(q) => b.const_rational(q),
            other => b.push(remap(other, &map)),
        };
        map.push(id);
    }
    let outs = c.outputs().iter().map(|o| map[o.index()]).collect();
    b.finish(outs)
}

/// Move variable `i` to `perm[i]` in a space of `new_vars` variables.
pub fn relabel_vars(c: &Circuit, perm: &[usize], new_vars: usize) -> Result<Circuit> {
    let mut b = Builder::new(new_vars);
    let wiring: Vec<Wire> = perm.iter().map(|&p| Wire::Var(Var(p as u32))).collect();
    let outs = b.inline(c, &wiring, None)?;
    Ok(b.finish(outs))
}

pub(crate) fn remap(g: &Gate, map: &[GateId]) -> Gate {
    let m = |x: &GateId| map[x.index()];
    match g {
        Gate::ConstDiv(a, b) => Gate::ConstDiv(m(a), m(b)),
        Gate::Add(a, b) => Gate::Add(m(a), m(b)),
        Gate::Mul(a, b) => Gate::Mul(m(a), m(b)),
        Gate::Proj { var, bit, child } => Gate::Proj { var: *var, bit: *bit, child: m(child) },
        Gate::Sum { var, child } => Gate::Sum { var: *var, child: m(child) },
        Gate::Prod { var, child } => Gate::Prod { var: *var, child: m(child) },
        g => g.clone(),
    }
}

/// Syntactic upper bound on the total degree of each gate.
pub fn degree_bounds(c: &Circuit) -> Vec<u64> {
    let mut d: Vec<u64> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let v = match g {
            Gate::Input(_) => 1,
            Gate::One | Gate::MinusOne | Gate::Const(_) | Gate::ConstDiv(..) => 0,
            Gate::Add(a, b) => d[a.index()].max(d[b.index()]),
            Gate::Mul(a, b) => d[a.index()].saturating_add(d[b.index()]),
            Gate::Proj { child, .. } | Gate::Sum { child, .. } => d[child.index()],
            Gate::Prod { child, .. } => d[child.index()].saturating_mul(2),
        };
        d.push(v);
    }
    d
}

/// Syntactic per-variable degree bounds for each gate.
pub fn var_degree_bounds(c: &Circuit) -> Vec<Vec<u64>> {
    let n = c.num_vars();
    let mut d: Vec<Vec<u64>> = Vec::with_capacity(c.gates().len());
    for g in c.gates() {
        let v = match g {
            Gate::Input(x) => {
                let mut v = vec![0; n];
                v[x.index()] = 1;
                v
            }
            Gate::One | Gate::MinusOne | Gate::Const(_) | Gate::ConstDiv(..) => vec![0; n],
            Gate::Add(a, b) => d[a.index()].iter().zip(&d[b.index()]).map(|(x, y)| *x.max(y)).collect(),
            Gate::Mul(a, b) => d[a.index()].iter().zip(&d[b.index()]).map(|(x, y)| x.saturating_add(*y)).collect(),
            Gate::Proj { var, child, .. } | Gate::Sum { var, child } => {
                let mut v = d[child.index()].clone();
                v[var.index()] = 0;
                v
            }
            Gate::Prod { var, child } => {
                let mut v: Vec<u64> = d[child.index()].iter().map(|x| x.saturating_mul(2)).collect();
                v[var.index()] = 0;
                v
            }
        };
        d.push(v);
    }
    d
}

/// Degree bound of the outputs (max over outputs).
pub fn output_degree_bound(c: &Circuit) -> u64 {
    let d = degree_bounds(c);
    c.outputs().iter().map(|o| d[o.index()]).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::eval::expand;
    use num_rational::BigRational;

    #[test]
    fn desugar_preserves_polynomial() {
        let mut b = Builder::new(2);
        let z = b.var(0);
        let x = b.var(1);
        let s = b.add(z, x);
        let m = b.mul(s, x);
        let p = b.prod_over(Var(0), m);
        let q = b.sum_over(Var(0), m);
        let c = b.finish(vec![p, q]);
        let d = desugar(&c);
        assert!(d.gates().iter().all(|g| !matches!(g, Gate::Sum { .. } | Gate::Prod { .. })));
        assert_eq!(expand(&c, 1000).unwrap(), expand(&d, 1000).unwrap());
    }

    #[test]
    fn lowering_constants() {
        let mut b = Builder::new(1);
        let x = b.var(0);
        let k = b.general_const(BigRational::new((-7).into(), 3.into()));
        let m = b.mul(k, x);
        let c = b.finish(vec![m]);
        let l = lower_constants(&c);
        assert!(l.is_constant_free());
        assert!(l.validate().is_ok());
        let e = expand(&l, 100).unwrap().remove(0);
        assert_eq!(e.coeff(&crate::algebra::Monomial(vec![1])), BigRational::new((-7).into(), 3.into()));
        assert_eq!(expand(&c, 100).unwrap()[0], e);
    }
}
