//! Evaluation with projection overrides.
//!
//! Variables bound by Sum/Prod are kept symbolic: a gate evaluates to a table
//! over the {0,1} assignments of the lazily bound variables it depends on.
//! Proj overrides fix a variable outright. Results are memoized per
//! (gate, bindings of the variables occurring below the gate).

use std::collections::HashMap;
use std::rc::Rc;

use super::ir::{Circuit, Gate, GateId};
use crate::algebra::{PolyRing, Ring, SparsePoly};
use crate::error::{Error, Result};

/// Resource ceilings for one evaluation.
#[derive(Clone, Copy, Debug)]
pub struct EvalLimits {
    /// Maximum number of entries in one table.
    pub max_entries: usize,
    /// Maximum ring weight (terms, for polynomials) of one value.
    pub max_weight: usize,
}

impl Default for EvalLimits {
    fn default() -> Self {
        EvalLimits { max_entries: 1 << 22, max_weight: 1_000_000 }
    }
}

const FIX0: u8 = 0;
const FIX1: u8 = 1;
const LAZY: u8 = 2;

#[derive(Clone, Debug)]
enum Table<E> {
    Scalar(E),
    Map { vars: Vec<u32>, entries: HashMap<u64, E> },
}

type Ctx = Vec<(u32, u8)>;

struct Evaluator<'a, R: Ring> {
    c: &'a Circuit,
    ring: &'a R,
    env: &'a [Option<R::Elem>],
    limits: EvalLimits,
    words: usize,
    below: Vec<u64>,
    ctx_ids: HashMap<Ctx, u32>,
    ctxs: Vec<Ctx>,
    memo: HashMap<(u32, u32), Rc<Table<R::Elem>>>,
}

/// Evaluate all outputs. `point` may be shorter than the variable count;
/// missing variables are unbound.
pub fn eval<R: Ring>(c: &Circuit, ring: &R, point: &[R::Elem]) -> Result<Vec<R::Elem>> {
    let env: Vec<Option<R::Elem>> = (0..c.num_vars()).map(|i| point.get(i).cloned()).collect();
    eval_env(c, ring, &env, EvalLimits::default())
}

pub fn eval_env<R: Ring>(c: &Circuit, ring: &R, env: &[Option<R::Elem>], limits: EvalLimits) -> Result<Vec<R::Elem>> {
    if env.len() < c.num_vars() {
        return Err(Error::ArityMismatch { expected: c.num_vars(), got: env.len() });
    }
    if c.is_projection_free() {
        return eval_straight(c, ring, env, limits);
    }
    let mut ev = Evaluator::new(c, ring, env, limits);
    c.outputs().iter().map(|&o| ev.root(o)).collect()
}

/// Symbolic expansion of every output.
pub fn expand(c: &Circuit, max_terms: usize) -> Result<Vec<SparsePoly>> {
    let n = c.num_vars();
    let ring = PolyRing { nvars: n };
    let env: Vec<Option<SparsePoly>> = (0..n).map(|i| Some(SparsePoly::var(n, i))).collect();
    let limits = EvalLimits { max_weight: max_terms, ..EvalLimits::default() };
    eval_env(c, &ring, &env, limits)
}

fn eval_straight<R: Ring>(c: &Circuit, ring: &R, env: &[Option<R::Elem>], limits: EvalLimits) -> Result<Vec<R::Elem>> {
    let live = c.live_mask();
    let mut vals: Vec<Option<R::Elem>> = vec![None; c.gates().len()];
    for (i, g) in c.gates().iter().enumerate() {
        if !live[i] {
            continue;
        }
        let get = |x: &GateId| vals[x.index()].as_ref().expect("topological order");
        let v = match g {
            Gate::Input(v) => env[v.index()].clone().ok_or(Error::Unbound(v.index() + 1))?,
            Gate::One => ring.one(),
            Gate::MinusOne => ring.neg(&ring.one()),
            Gate::Const(q) => ring.from_rational(q).ok_or(Error::DivisionByZero(i))?,
            Gate::ConstDiv(a, b) => ring.div(get(a), get(b)).ok_or(Error::DivisionByZero(i))?,
            Gate::Add(a, b) => ring.add(get(a), get(b)),
            Gate::Mul(a, b) => ring.mul(get(a), get(b)),
            _ => unreachable!("projection-free"),
        };
        if ring.weight(&v) > limits.max_weight {
            return Err(Error::ResourceCap(format!("value at g{i} exceeds {} terms", limits.max_weight)));
        }
        vals[i] = Some(v);
    }
    Ok(c.outputs().iter().map(|o| vals[o.index()].clone().unwrap()).collect())
}

impl<'a, R: Ring> Evaluator<'a, R> {
    fn new(c: &'a Circuit, ring: &'a R, env: &'a [Option<R::Elem>], limits: EvalLimits) -> Self {
        let words = c.num_vars().div_ceil(64).max(1);
        let mut below = vec![0u64; words * c.gates().len()];
        for (i, g) in c.gates().iter().enumerate() {
            let (pre, cur) = below.split_at_mut(i * words);
            let cur = &mut cur[..words];
            if let Gate::Input(v) = g {
                cur[v.index() / 64] |= 1 << (v.index() % 64);
            }
            for ch in g.children() {
                let s = &pre[ch.index() * words..(ch.index() + 1) * words];
                for (a, b) in cur.iter_mut().zip(s) {
                    *a |= b;
                }
            }
        }
        let mut ev = Evaluator {
            c,
            ring,
            env,
            limits,
            words,
            below,
            ctx_ids: HashMap::new(),
            ctxs: Vec::new(),
            memo: HashMap::new(),
        };
        ev.intern(Vec::new());
        ev
    }

    fn intern(&mut self, ctx: Ctx) -> u32 {
        if let Some(&id) = self.ctx_ids.get(&ctx) {
            return id;
        }
        let id = self.ctxs.len() as u32;
        self.ctxs.push(ctx.clone());
        self.ctx_ids.insert(ctx, id);
        id
    }

    fn is_below(&self, g: GateId, v: u32) -> bool {
        let w = self.below[g.index() * self.words + v as usize / 64];
        w >> (v % 64) & 1 == 1
    }

    // Context for `child`, given the parent context and an optional new binding.
    fn child_ctx(&mut self, ctx: u32, child: GateId, bind: Option<(u32, u8)>) -> u32 {
        let base = &self.ctxs[ctx as usize];
        let mut out: Ctx = base
            .iter()
            .copied()
            .filter(|(v, _)| bind.is_none_or(|(bv, _)| bv != *v) && self.is_below(child, *v))
            .collect();
        if let Some((bv, bb)) = bind {
            if self.is_below(child, bv) {
                out.push((bv, bb));
                out.sort_unstable();
            }
        }
        if out == *base {
            return ctx;
        }
        self.intern(out)
    }

    fn children_of(&mut self, g: GateId, ctx: u32) -> Vec<(GateId, u32)> {
        match self.c.gate(g).clone() {
            Gate::ConstDiv(a, b) | Gate::Add(a, b) | Gate::Mul(a, b) => {
                let ca = self.child_ctx(ctx, a, None);
                let cb = self.child_ctx(ctx, b, None);
                vec![(a, ca), (b, cb)]
            }
            Gate::Proj { var, bit, child } => {
                let cc = self.child_ctx(ctx, child, Some((var.0, if bit { FIX1 } else { FIX0 })));
                vec![(child, cc)]
            }
            Gate::Sum { var, child } | Gate::Prod { var, child } => {
                let cc = self.child_ctx(ctx, child, Some((var.0, LAZY)));
                vec![(child, cc)]
            }
            _ => Vec::new(),
        }
    }

    fn root(&mut self, out: GateId) -> Result<R::Elem> {
        let ctx = self.child_ctx(0, out, None);
        let t = self.run(out, ctx)?;
        match &*t {
            Table::Scalar(e) => Ok(e.clone()),
            Table::Map { vars, .. } => Err(Error::Unbound(vars[0] as usize + 1)),
        }
    }

    fn run(&mut self, root: GateId, rctx: u32) -> Result<Rc<Table<R::Elem>>> {
        let mut stack = vec![(root, rctx)];
        while let Some(&(g, ctx)) = stack.last() {
            if self.memo.contains_key(&(g.0, ctx)) {
                stack.pop();
                continue;
            }
            let kids = self.children_of(g, ctx);
            let missing: Vec<(GateId, u32)> =
                kids.iter().copied().filter(|(k, kc)| !self.memo.contains_key(&(k.0, *kc))).collect();
            if !missing.is_empty() {
                stack.extend(missing);
                continue;
            }
            stack.pop();
            let vals: Vec<Rc<Table<R::Elem>>> = kids.iter().map(|(k, kc)| self.memo[&(k.0, *kc)].clone()).collect();
            let t = self.compute(g, ctx, &vals)?;
            self.memo.insert((g.0, ctx), Rc::new(t));
        }
        Ok(self.memo[&(root.0, rctx)].clone())
    }

    fn compute(&self, g: GateId, ctx: u32, kids: &[Rc<Table<R::Elem>>]) -> Result<Table<R::Elem>> {
        let ring = self.ring;
        let i = g.index();
        let t = match self.c.gate(g) {
            Gate::Input(v) => {
                let b = self.ctxs[ctx as usize].iter().find(|(x, _)| *x == v.0).map(|(_, b)| *b);
                match b {
                    Some(FIX0) => Table::Scalar(ring.zero()),
                    Some(FIX1) => Table::Scalar(ring.one()),
                    Some(_) => Table::Map { vars: vec![v.0], entries: HashMap::from([(1u64, ring.one())]) },
                    None => Table::Scalar(self.env[v.index()].clone().ok_or(Error::Unbound(v.index() + 1))?),
                }
            }
            Gate::One => Table::Scalar(ring.one()),
            Gate::MinusOne => Table::Scalar(ring.neg(&ring.one())),
            Gate::Const(q) => Table::Scalar(ring.from_rational(q).ok_or(Error::DivisionByZero(i))?),
            Gate::ConstDiv(..) => match (&*kids[0], &*kids[1]) {
                (Table::Scalar(a), Table::Scalar(b)) => Table::Scalar(ring.div(a, b).ok_or(Error::DivisionByZero(i))?),
                _ => return Err(Error::invalid(i, "cdiv child depends on a bound variable")),
            },
            Gate::Add(..) => self.add(&kids[0], &kids[1])?,
            Gate::Mul(..) => self.mul(&kids[0], &kids[1])?,
            Gate::Proj { .. } => (*kids[0]).clone(),
            Gate::Sum { var, .. } => self.sum_out(&kids[0], var.0)?,
            Gate::Prod { var, .. } => self.prod_out(&kids[0], var.0)?,
        };
        self.check(&t, i)?;
        Ok(normalize(ring, t))
    }

    fn check(&self, t: &Table<R::Elem>, gate: usize) -> Result<()> {
        match t {
            Table::Scalar(e) => {
                if self.ring.weight(e) > self.limits.max_weight {
                    return Err(Error::ResourceCap(format!("value at g{gate} exceeds {} terms", self.limits.max_weight)));
                }
            }
            Table::Map { entries, .. } => {
                if entries.len() > self.limits.max_entries {
                    return Err(Error::ResourceCap(format!("table at g{gate} exceeds {} entries", self.limits.max_entries)));
                }
                let w: usize = entries.values().map(|e| self.ring.weight(e)).sum();
                if w > self.limits.max_weight.saturating_mul(16) {
                    return Err(Error::ResourceCap(format!("table at g{gate} exceeds the term ceiling")));
                }
            }
        }
        Ok(())
    }

    fn mul(&self, a: &Table<R::Elem>, b: &Table<R::Elem>) -> Result<Table<R::Elem>> {
        let ring = self.ring;
        Ok(match (a, b) {
            (Table::Scalar(x), Table::Scalar(y)) => Table::Scalar(ring.mul(x, y)),
            (Table::Scalar(s), Table::Map { vars, entries }) | (Table::Map { vars, entries }, Table::Scalar(s)) => {
                if ring.is_zero(s) {
                    Table::Scalar(ring.zero())
                } else {
                    let swapped = matches!(a, Table::Map { .. });
                    let entries = entries
                        .iter()
                        .map(|(k, v)| (*k, if swapped { ring.mul(v, s) } else { ring.mul(s, v) }))
                        .filter(|(_, v)| !ring.is_zero(v))
                        .collect();
                    Table::Map { vars: vars.clone(), entries }
                }
            }
            (Table::Map { vars: va, entries: ea }, Table::Map { vars: vb, entries: eb }) => {
                let u = union(va, vb);
                let pa = positions(va, &u);
                let pb = positions(vb, &u);
                let shared: u64 = va.iter().filter(|v| vb.contains(v)).map(|v| 1u64 << u.binary_search(v).unwrap()).sum();
                let (small, sp, large, lp, small_is_a) =
                    if ea.len() <= eb.len() { (ea, &pa, eb, &pb, true) } else { (eb, &pb, ea, &pa, false) };
                let mut index: HashMap<u64, Vec<(u64, &R::Elem)>> = HashMap::new();
                for (k, v) in small {
                    let uk = scatter(*k, sp);
                    index.entry(uk & shared).or_default().push((uk, v));
                }
                let mut out = HashMap::new();
                for (k, v) in large {
                    let uk = scatter(*k, lp);
                    if let Some(ms) = index.get(&(uk & shared)) {
                        for (sk, sv) in ms {
                            let p = if small_is_a { ring.mul(sv, v) } else { ring.mul(v, sv) };
                            if !ring.is_zero(&p) {
                                out.insert(uk | sk, p);
                            }
                        }
                    }
                    if out.len() > self.limits.max_entries {
                        return Err(Error::ResourceCap(format!("product table exceeds {} entries", self.limits.max_entries)));
                    }
                }
                Table::Map { vars: u, entries: out }
            }
        })
    }

    fn add(&self, a: &Table<R::Elem>, b: &Table<R::Elem>) -> Result<Table<R::Elem>> {
        let ring = self.ring;
        if let (Table::Scalar(x), Table::Scalar(y)) = (a, b) {
            return Ok(Table::Scalar(ring.add(x, y)));
        }
        let empty = Vec::new();
        let va = match a {
            Table::Map { vars, .. } => vars,
            _ => &empty,
        };
        let vb = match b {
            Table::Map { vars, .. } => vars,
            _ => &empty,
        };
        let u = union(va, vb);
        if u.len() > 63 {
            return Err(Error::ResourceCap("more than 63 lazily bound variables in one table".into()));
        }
        let mut out: HashMap<u64, R::Elem> = HashMap::new();
        for t in [a, b] {
            let (vars, pairs): (&Vec<u32>, Vec<(u64, &R::Elem)>) = match t {
                Table::Scalar(s) => {
                    if ring.is_zero(s) {
                        continue;
                    }
                    (&empty, vec![(0, s)])
                }
                Table::Map { vars, entries } => (vars, entries.iter().map(|(k, v)| (*k, v)).collect()),
            };
            let pos = positions(vars, &u);
            let free: Vec<usize> = (0..u.len()).filter(|i| !pos.contains(i)).collect();
            let fill = 1u64 << free.len();
            if (pairs.len() as u128) * (fill as u128) > self.limits.max_entries as u128 {
                return Err(Error::ResourceCap(format!("sum table exceeds {} entries", self.limits.max_entries)));
            }
            for (k, v) in pairs {
                let base = scatter(k, &pos);
                for f in 0..fill {
                    let key = base | scatter(f, &free);
                    match out.get_mut(&key) {
                        Some(x) => *x = ring.add(x, v),
                        None => {
                            out.insert(key, v.clone());
                        }
                    }
                }
            }
        }
        out.retain(|_, v| !ring.is_zero(v));
        Ok(Table::Map { vars: u, entries: out })
    }

    fn sum_out(&self, t: &Table<R::Elem>, var: u32) -> Result<Table<R::Elem>> {
        let ring = self.ring;
        let (vars, entries) = match t {
            Table::Map { vars, entries } if vars.contains(&var) => (vars, entries),
            // independent of var: f + f
            _ => return self.add(t, t),
        };
        let k = vars.iter().position(|&v| v == var).unwrap();
        let mut out: HashMap<u64, R::Elem> = HashMap::new();
        for (key, v) in entries {
            let nk = drop_bit(*key, k);
            match out.get_mut(&nk) {
                Some(x) => *x = ring.add(x, v),
                None => {
                    out.insert(nk, v.clone());
                }
            }
        }
        out.retain(|_, v| !ring.is_zero(v));
        let nv: Vec<u32> = vars.iter().copied().filter(|&v| v != var).collect();
        Ok(Table::Map { vars: nv, entries: out })
    }

    fn prod_out(&self, t: &Table<R::Elem>, var: u32) -> Result<Table<R::Elem>> {
        let ring = self.ring;
        let (vars, entries) = match t {
            Table::Map { vars, entries } if vars.contains(&var) => (vars, entries),
            _ => return self.mul(t, t),
        };
        let k = vars.iter().position(|&v| v == var).unwrap();
        let mut out = HashMap::new();
        for (key, v) in entries {
            if key >> k & 1 == 0 {
                if let Some(w) = entries.get(&(key | 1 << k)) {
                    let p = ring.mul(v, w);
                    if !ring.is_zero(&p) {
                        out.insert(drop_bit(*key, k), p);
                    }
                }
            }
        }
        let nv: Vec<u32> = vars.iter().copied().filter(|&v| v != var).collect();
        Ok(Table::Map { vars: nv, entries: out })
    }
}

fn normalize<R: Ring>(ring: &R, t: Table<R::Elem>) -> Table<R::Elem> {
    match t {
        Table::Map { entries, .. } if entries.is_empty() => Table::Scalar(ring.zero()),
        Table::Map { vars, mut entries } if vars.is_empty() => Table::Scalar(entries.remove(&0).unwrap_or_else(|| ring.zero())),
        t => t,
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut u: Vec<u32> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn positions(sub: &[u32], u: &[u32]) -> Vec<usize> {
    sub.iter().map(|v| u.binary_search(v).unwrap()).collect()
}

fn scatter(key: u64, pos: &[usize]) -> u64 {
    let mut out = 0;
    for (i, &p) in pos.iter().enumerate() {
        out |= (key >> i & 1) << p;
    }
    out
}

fn drop_bit(key: u64, k: usize) -> u64 {
    let low = key & ((1u64 << k) - 1);
    let high = key >> (k + 1);
    low | high << k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rationals};
    use crate::circuit::ir::{Builder, Var};
    use num_rational::BigRational;

    #[test]
    fn proj_substitutes_bit() {
        // Proj_{z=1}(z*x) at x=5
        let mut b = Builder::new(2);
        let z = b.var(0);
        let x = b.var(1);
        let m = b.mul(z, x);
        let p = b.proj(Var(0), true, m);
        let c = b.finish(vec![p]);
        let env = vec![None, Some(rat(5))];
        assert_eq!(eval_env(&c, &Rationals, &env, EvalLimits::default()).unwrap(), vec![rat(5)]);
    }

    #[test]
    fn sum_of_two_terms() {
        // Sum_z (z*x + 1) at x=3 -> 1 + 4 = 5
        let mut b = Builder::new(2);
        let z = b.var(0);
        let x = b.var(1);
        let m = b.mul(z, x);
        let one = b.one();
        let s = b.add(m, one);
        let g = b.sum_over(Var(0), s);
        let c = b.finish(vec![g]);
        let env = vec![None, Some(rat(3))];
        assert_eq!(eval_env(&c, &Rationals, &env, EvalLimits::default()).unwrap(), vec![rat(5)]);
    }

    #[test]
    fn override_wins_over_env() {
        let mut b = Builder::new(2);
        let z = b.var(0);
        let x = b.var(1);
        let s = b.add(z, x);
        let p = b.proj(Var(0), false, s);
        let c = b.finish(vec![p]);
        let a = eval(&c, &Rationals, &[rat(100), rat(2)]).unwrap();
        let bb = eval(&c, &Rationals, &[rat(-7), rat(2)]).unwrap();
        assert_eq!(a, bb);
        assert_eq!(a, vec![rat(2)]);
    }

    #[test]
    fn unbound_variable_reported() {
        let mut b = Builder::new(2);
        let z = b.var(0);
        let x = b.var(1);
        let s = b.mul(z, x);
        let g = b.sum_over(Var(0), s);
        let c = b.finish(vec![g]);
        assert_eq!(eval_env(&c, &Rationals, &[None, None], EvalLimits::default()).unwrap_err(), Error::Unbound(2));
        let c2 = Builder::new(1);
        let mut c2 = c2;
        let z = c2.var(0);
        let c2 = c2.finish(vec![z]);
        assert_eq!(eval_env(&c2, &Rationals, &[None], EvalLimits::default()).unwrap_err(), Error::Unbound(1));
    }

    #[test]
    fn nested_prod_sum_matches_expansion() {
        // Prod_z Sum_w (z + w + x)(w - x z)
        let mut b = Builder::new(3);
        let z = b.var(0);
        let w = b.var(1);
        let x = b.var(2);
        let a = b.add(z, w);
        let a = b.add(a, x);
        let xz = b.mul(x, z);
        let d = b.sub(w, xz);
        let m = b.mul(a, d);
        let s = b.sum_over(Var(1), m);
        let p = b.prod_over(Var(0), s);
        let c = b.finish(vec![p]);
        let poly = expand(&c, 10_000).unwrap().remove(0);
        assert_eq!(poly.degree_in(0), 0);
        assert_eq!(poly.degree_in(1), 0);
        for xv in [-2i64, 0, 3, 7] {
            let direct = eval(&c, &Rationals, &[rat(11), rat(13), rat(xv)]).unwrap()[0].clone();
            let via = poly.eval(&Rationals, &[rat(0), rat(0), rat(xv)]).unwrap();
            assert_eq!(direct, via);
            // hand oracle: z=0: sum_w (w+x)w = (x)(0)+(1+x)(1) = 1+x
            // z=1: sum_w (1+w+x)(w-x) = (1+x)(-x) + (2+x)(1-x)
            let x = BigRational::from_integer(xv.into());
            let one = rat(1);
            let two = rat(2);
            let f0 = &one + &x;
            let f1 = (&one + &x) * (-&x) + (&two + &x) * (&one - &x);
            assert_eq!(direct, f0 * f1);
        }
    }

    #[test]
    fn shadowing_binders() {
        // Sum_z Proj_{z=1}(z) = 2 ; Proj_{z=0} Sum_z (z) = 1
        let mut b = Builder::new(1);
        let z = b.var(0);
        let p = b.proj(Var(0), true, z);
        let s = b.sum_over(Var(0), p);
        let s2 = b.sum_over(Var(0), z);
        let p2 = b.proj(Var(0), false, s2);
        let c = b.finish(vec![s, p2]);
        assert_eq!(eval_env(&c, &Rationals, &[None], EvalLimits::default()).unwrap(), vec![rat(2), rat(1)]);
    }
}
