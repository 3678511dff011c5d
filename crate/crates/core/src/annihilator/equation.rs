//! Multilinear equations for evaluation vectors of a universal template.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::map::ExplicitMap;
use super::pipeline::{annihilate, AnnihilateOptions, Annihilation};
use crate::algebra::{rat, PolyRing, Rationals, SparsePoly};
use crate::circuit::{eval, eval_env, Circuit, EvalLimits};
use crate::error::{Error, Result};
use crate::gadgets::universal::{build_universal, Slot, Universal};

/// I_{n,d} = {a in {0..d}^n : sum a <= d}, in graded-lex order.
pub fn grid(n: usize, d: u32) -> Vec<Vec<u32>> {
    crate::algebra::monomials_grlex(n, d).into_iter().filter(|m| m.total_degree() <= d as u64).map(|m| m.0).collect()
}

#[derive(Clone, Debug)]
pub struct Equation {
    /// Multilinear A_N in N = |grid| variables.
    pub a: SparsePoly,
    pub grid: Vec<Vec<u32>>,
    pub universal: Universal,
    /// Parameter indices left free, in template variable order.
    pub free: Vec<usize>,
    pub base: Vec<BigRational>,
    /// U restricted: variables x1..xn then the free parameters.
    pub template: Circuit,
    pub result: Annihilation,
}

impl Equation {
    /// (f(a))_{a in grid} for the template instance at `y`.
    pub fn evaluation_vector(&self, y: &[BigRational]) -> Result<Vec<BigRational>> {
        self.grid
            .iter()
            .map(|a| {
                let mut pt: Vec<BigRational> = a.iter().map(|&v| rat(v as i64)).collect();
                pt.extend_from_slice(y);
                Ok(eval(&self.template, &Rationals, &pt)?.remove(0))
            })
            .collect()
    }
}

/// Run the pipeline in multilinear mode on (U(a, y))_{a in grid}, with all but
/// `r` last-layer additive weights fixed from a seeded random base point.
pub fn build_equation(n: usize, d: u32, s: usize, r: usize, seed: u64, opts: &AnnihilateOptions) -> Result<Equation> {
    if r == 0 {
        return Err(Error::Params("need at least one free parameter".into()));
    }
    let u = build_universal(n, d as usize, s);
    let last = u.layers;
    if r > n + last {
        return Err(Error::Params(format!("at most {} free parameters available", n + last)));
    }
    let free: Vec<usize> = (0..r).map(|j| u.param(last, Slot::C, j)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<BigRational> = (0..u.r).map(|_| rat(rng.gen_range(-2..=2))).collect();
    let template = u.restrict(&free, &base)?;
    let g = grid(n, d);
    let nn = g.len();
    let ring = PolyRing { nvars: r };
    let comps: Vec<SparsePoly> = g
        .iter()
        .map(|a| {
            let mut env: Vec<Option<SparsePoly>> = a.iter().map(|&v| Some(SparsePoly::constant(r, rat(v as i64)))).collect();
            env.extend((0..r).map(|k| Some(SparsePoly::var(r, k))));
            Ok(eval_env(&template, &ring, &env, EvalLimits::default())?.remove(0))
        })
        .collect::<Result<_>>()?;
    if nn <= r {
        return Err(Error::Params(format!("grid of size {nn} is too small for {r} parameters")));
    }
    let map = ExplicitMap::from_components(r, &comps)?;
    let mut o = opts.clone();
    o.multilinear = true;
    o.big_d = Some(2);
    let result = annihilate(&map, &o)?;
    if result.a.individual_degree() > 1 {
        return Err(Error::Verification("equation is not multilinear".into()));
    }
    Ok(Equation { a: result.a.clone(), grid: g, universal: u, free, base, template, result })
}
