//! Quantified boolean formulas and their arithmetization.
//!
//! Text format (`#` starts a comment):
//!
//! ```text
//! vars 3
//! forall x2
//! exists x3
//! matrix or x1 and x2 not x3
//! ```
//!
//! Quantifier lines run outermost first. The matrix is in prefix notation over
//! `and`, `or`, `not`, `x<k>`, `0` and `1`, and may continue on later lines.
//! Variables that are not quantified are free.

use std::fmt::Write;

use rand::Rng;

use crate::circuit::{Builder, Circuit, GateId, Var};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Boolean formula over variables 0..n (printed 1-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Const(bool),
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eval(&self, a: &[bool]) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => a[*v],
            Formula::Not(f) => !f.eval(a),
            Formula::And(f, g) => f.eval(a) && g.eval(a),
            Formula::Or(f, g) => f.eval(a) || g.eval(a),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Const(_) | Formula::Var(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(f, g) | Formula::Or(f, g) => 1 + f.size() + g.size(),
        }
    }

    fn max_var(&self) -> Option<usize> {
        match self {
            Formula::Const(_) => None,
            Formula::Var(v) => Some(*v),
            Formula::Not(f) => f.max_var(),
            Formula::And(f, g) | Formula::Or(f, g) => f.max_var().max(g.max_var()),
        }
    }

    fn write_prefix(&self, s: &mut String) {
        match self {
            Formula::Const(b) => s.push(if *b { '1' } else { '0' }),
            Formula::Var(v) => write!(s, "x{}", v + 1).unwrap(),
            Formula::Not(f) => {
                s.push_str("not ");
                f.write_prefix(s);
            }
            Formula::And(f, g) | Formula::Or(f, g) => {
                s.push_str(if matches!(self, Formula::And(..)) { "and " } else { "or " });
                f.write_prefix(s);
                s.push(' ');
                g.write_prefix(s);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qbf {
    pub num_vars: usize,
    /// Outermost first.
    pub prefix: Vec<(Quantifier, usize)>,
    pub matrix: Formula,
}

impl Qbf {
    pub fn new(num_vars: usize, prefix: Vec<(Quantifier, usize)>, matrix: Formula) -> Result<Qbf> {
        if let Some(v) = matrix.max_var() {
            if v >= num_vars {
                return Err(Error::Unbound(v + 1));
            }
        }
        let mut seen = vec![false; num_vars];
        for &(_, v) in &prefix {
            if v >= num_vars {
                return Err(Error::Unbound(v + 1));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Params(format!("x{} quantified twice", v + 1)));
            }
        }
        Ok(Qbf { num_vars, prefix, matrix })
    }

    pub fn free_vars(&self) -> Vec<usize> {
        (0..self.num_vars).filter(|v| !self.prefix.iter().any(|(_, w)| w == v)).collect()
    }

    /// Truth value for an assignment of all variables; quantified entries
    /// are ignored.
    pub fn eval(&self, assignment: &[bool]) -> Result<bool> {
        if assignment.len() != self.num_vars {
            return Err(Error::ArityMismatch { expected: self.num_vars, got: assignment.len() });
        }
        let mut a = assignment.to_vec();
        Ok(self.eval_from(0, &mut a))
    }

    fn eval_from(&self, k: usize, a: &mut [bool]) -> bool {
        let Some(&(q, v)) = self.prefix.get(k) else {
            return self.matrix.eval(a);
        };
        let mut r = Vec::with_capacity(2);
        for bit in [false, true] {
            a[v] = bit;
            r.push(self.eval_from(k + 1, a));
        }
        match q {
            Quantifier::Forall => r[0] && r[1],
            Quantifier::Exists => r[0] || r[1],
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("vars {}\n", self.num_vars);
        for &(q, v) in &self.prefix {
            let kw = if q == Quantifier::Forall { "forall" } else { "exists" };
            writeln!(s, "{kw} x{}", v + 1).unwrap();
        }
        s.push_str("matrix ");
        self.matrix.write_prefix(&mut s);
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Qbf> {
        let mut num_vars = None;
        let mut prefix = Vec::new();
        let mut tokens: Vec<(usize, String)> = Vec::new();
        let mut in_matrix = false;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: ln + 1, msg };
            let mut it = line.split_whitespace();
            let head = it.next().unwrap();
            if in_matrix {
                tokens.extend(line.split_whitespace().map(|t| (ln + 1, t.to_string())));
                continue;
            }
            match head {
                "vars" => {
                    let n = it.next().and_then(|t| t.parse::<usize>().ok()).ok_or_else(|| err("bad vars line".into()))?;
                    num_vars = Some(n);
                }
                "forall" | "exists" => {
                    let v = it.next().ok_or_else(|| err("missing variable".into()))?;
                    let v = parse_var(v).ok_or_else(|| err(format!("bad variable {v}")))?;
                    let q = if head == "forall" { Quantifier::Forall } else { Quantifier::Exists };
                    prefix.push((q, v));
                }
                "matrix" => {
                    in_matrix = true;
                    tokens.extend(it.map(|t| (ln + 1, t.to_string())));
                    continue;
                }
                other => return Err(err(format!("unexpected '{other}'"))),
            }
            if it.next().is_some() {
                return Err(err("trailing tokens".into()));
            }
        }
        let num_vars = num_vars.ok_or(Error::Parse { line: 1, msg: "missing vars line".into() })?;
        if !in_matrix {
            return Err(Error::Parse { line: text.lines().count().max(1), msg: "missing matrix".into() });
        }
        let mut pos = 0;
        let matrix = parse_formula(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse { line: tokens[pos].0, msg: "trailing tokens after matrix".into() });
        }
        Qbf::new(num_vars, prefix, matrix)
    }
}

fn parse_var(t: &str) -> Option<usize> {
    let k: usize = t.strip_prefix('x')?.parse().ok()?;
    k.checked_sub(1)
}

fn parse_formula(tokens: &[(usize, String)], pos: &mut usize) -> Result<Formula> {
    let last_line = tokens.last().map_or(1, |t| t.0);
    let (line, t) = tokens.get(*pos).cloned().ok_or(Error::Parse { line: last_line, msg: "formula ends early".into() })?;
    *pos += 1;
    Ok(match t.as_str() {
        "0" => Formula::Const(false),
        "1" => Formula::Const(true),
        "not" => Formula::Not(Box::new(parse_formula(tokens, pos)?)),
        "and" | "or" => {
            let f = Box::new(parse_formula(tokens, pos)?);
            let g = Box::new(parse_formula(tokens, pos)?);
            if t == "and" {
                Formula::And(f, g)
            } else {
                Formula::Or(f, g)
            }
        }
        v => Formula::Var(parse_var(v).ok_or(Error::Parse { line, msg: format!("bad token '{v}'") })?),
    })
}

fn arith(b: &mut Builder, f: &Formula) -> GateId {
    match f {
        Formula::Const(true) => b.one(),
        Formula::Const(false) => b.zero(),
        Formula::Var(v) => b.var(*v),
        Formula::Not(g) => {
            let x = arith(b, g);
            b.one_minus(x)
        }
        Formula::And(g, h) => {
            let x = arith(b, g);
            let y = arith(b, h);
            b.mul(x, y)
        }
        Formula::Or(g, h) => {
            let x = arith(b, g);
            let y = arith(b, h);
            let nx = b.one_minus(x);
            let ny = b.one_minus(y);
            let p = b.mul(nx, ny);
            b.one_minus(p)
        }
    }
}

/// Circuit over all variables whose value on boolean free variables is the
/// truth value of the formula. Each quantifier adds one gadget over the two
/// projections of the same gate.
pub fn arithmetize_qbf(q: &Qbf) -> Circuit {
    let mut b = Builder::new(q.num_vars);
    let mut p = arith(&mut b, &q.matrix);
    for &(quant, v) in q.prefix.iter().rev() {
        let p0 = b.proj(Var(v as u32), false, p);
        let p1 = b.proj(Var(v as u32), true, p);
        p = match quant {
            Quantifier::Forall => b.mul(p0, p1),
            Quantifier::Exists => {
                let n0 = b.one_minus(p0);
                let n1 = b.one_minus(p1);
                let t = b.mul(n0, n1);
                b.one_minus(t)
            }
        };
    }
    b.finish(vec![p])
}

fn random_formula(n: usize, size: usize, rng: &mut impl Rng) -> Formula {
    if size <= 1 {
        return Formula::Var(rng.gen_range(0..n));
    }
    match rng.gen_range(0..5) {
        k if k == 0 || size == 2 => Formula::Not(Box::new(random_formula(n, size - 1, rng))),
        k => {
            let l = rng.gen_range(1..=size - 2);
            let f = Box::new(random_formula(n, l, rng));
            let g = Box::new(random_formula(n, size - 1 - l, rng));
            if k % 2 == 0 {
                Formula::And(f, g)
            } else {
                Formula::Or(f, g)
            }
        }
    }
}

/// Random formula over n variables with `nquant` of them quantified.
pub fn random_qbf(n: usize, nquant: usize, size: usize, rng: &mut impl Rng) -> Qbf {
    assert!(nquant <= n && n > 0);
    let mut vars: Vec<usize> = (0..n).collect();
    for i in 0..nquant {
        let j = rng.gen_range(i..n);
        vars.swap(i, j);
    }
    let prefix = vars[..nquant]
        .iter()
        .map(|&v| (if rng.gen_bool(0.5) { Quantifier::Forall } else { Quantifier::Exists }, v))
        .collect();
    let size = size.max(3);
    Qbf::new(n, prefix, random_formula(n, size, rng)).expect("generated formula is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::Rationals;
    use crate::algebra::Ring;
    use crate::circuit::eval;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn value(c: &Circuit, a: &[bool]) -> i64 {
        let pt: Vec<_> = a.iter().map(|&x| Rationals.from_i64(x as i64)).collect();
        let v = eval(c, &Rationals, &pt).unwrap().remove(0);
        assert!(v.is_integer());
        i64::try_from(v.numer().clone()).unwrap()
    }

    #[test]
    fn tautology() {
        let q = Qbf::parse("vars 1\nforall x1\nmatrix or x1 not x1\n").unwrap();
        let c = arithmetize_qbf(&q);
        assert_eq!(value(&c, &[false]), 1);
        assert!(q.eval(&[false]).unwrap());
    }

    #[test]
    fn exists_and() {
        let q = Qbf::parse("# exists y (y and x)\nvars 2\nexists x2\nmatrix and x2\n  x1\n").unwrap();
        let c = arithmetize_qbf(&q);
        assert_eq!(value(&c, &[true, false]), 1);
        assert_eq!(value(&c, &[false, false]), 0);
        assert_eq!(q.free_vars(), vec![0]);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = random_qbf(4, 2, 9, &mut rng);
            let t = q.to_text();
            assert_eq!(Qbf::parse(&t).unwrap(), q);
            assert_eq!(Qbf::parse(&t).unwrap().to_text(), t);
        }
        assert!(matches!(Qbf::parse("vars 1\nmatrix x2\n"), Err(Error::Unbound(2))));
        assert!(Qbf::parse("vars 1\nmatrix and x1\n").is_err());
        assert!(Qbf::parse("vars 1\nforall x1\nforall x1\nmatrix x1\n").is_err());
        assert!(Qbf::parse("vars 1\n").is_err());
    }

    #[test]
    fn random_against_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let q = random_qbf(3, 2, 8, &mut rng);
            let c = arithmetize_qbf(&q);
            for mask in 0..8u32 {
                let a: Vec<bool> = (0..3).map(|k| mask >> k & 1 == 1).collect();
                assert_eq!(value(&c, &a), q.eval(&a).unwrap() as i64);
            }
        }
    }
}
