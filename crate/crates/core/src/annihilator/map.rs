//! Explicit polynomial maps G = (g_1, ..., g_n) presented by an encoder C_G(z, y).

use std::fmt::Write;

use num_rational::BigRational;

use crate::algebra::{fmt_rational, parse_rational, rat, PolyRing, SparsePoly};
use crate::circuit::{eval_env, print_circuit, text::parse_circuit_lines, Builder, Circuit, EvalLimits};
use crate::error::{Error, Result};

/// Encoder variables are z_1..z_m followed by the parameter variables y.
#[derive(Clone, Debug)]
pub struct ExplicitMap {
    pub m: usize,
    pub encoder: Circuit,
    pub assigns: Vec<Vec<BigRational>>,
    components: Option<Vec<SparsePoly>>,
}

impl ExplicitMap {
    pub fn new(encoder: Circuit, m: usize, assigns: Vec<Vec<BigRational>>) -> Result<Self> {
        if encoder.outputs().len() != 1 {
            return Err(Error::Params(format!("map encoder must have one output, has {}", encoder.outputs().len())));
        }
        if encoder.num_vars() < m {
            return Err(Error::Params(format!("encoder has {} variables, fewer than m = {m}", encoder.num_vars())));
        }
        let q = encoder.num_vars() - m;
        for (i, a) in assigns.iter().enumerate() {
            if a.len() != q {
                return Err(Error::Params(format!("assignment {} has {} values, encoder expects {q}", i + 1, a.len())));
            }
        }
        if assigns.is_empty() {
            return Err(Error::Params("map has no outputs".into()));
        }
        Ok(ExplicitMap { m, encoder, assigns, components: None })
    }

    /// C_G(z, y) = sum_i y_i g_i(z) with a_i the i-th unit vector.
    pub fn from_components(m: usize, comps: &[SparsePoly]) -> Result<Self> {
        let n = comps.len();
        if n == 0 {
            return Err(Error::Params("map has no outputs".into()));
        }
        for g in comps {
            if g.nvars() != m {
                return Err(Error::ArityMismatch { expected: m, got: g.nvars() });
            }
        }
        let mut b = Builder::new(m + n);
        let zs: Vec<_> = (0..m).map(|i| b.var(i)).collect();
        let mut terms = Vec::new();
        for (i, g) in comps.iter().enumerate() {
            if g.is_zero() {
                continue;
            }
            let gi = crate::detc::encoder::poly_to_gates(&mut b, g, &zs);
            let y = b.var(m + i);
            terms.push(b.mul(y, gi));
        }
        let out = if terms.is_empty() { b.zero() } else { b.sum_all(&terms) };
        let assigns = (0..n).map(|i| (0..n).map(|j| rat((i == j) as i64)).collect()).collect();
        let mut map = ExplicitMap::new(b.finish(vec![out]), m, assigns)?;
        map.components = Some(comps.to_vec());
        Ok(map)
    }

    pub fn n(&self) -> usize {
        self.assigns.len()
    }

    pub fn num_params(&self) -> usize {
        self.encoder.num_vars() - self.m
    }

    /// g_1..g_n, expanding the encoder when not materialized.
    pub fn components(&self) -> Result<Vec<SparsePoly>> {
        if let Some(c) = &self.components {
            return Ok(c.clone());
        }
        let ring = PolyRing { nvars: self.m };
        self.assigns
            .iter()
            .map(|a| {
                let mut env: Vec<Option<SparsePoly>> = (0..self.m).map(|i| Some(SparsePoly::var(self.m, i))).collect();
                env.extend(a.iter().map(|v| Some(SparsePoly::constant(self.m, v.clone()))));
                Ok(eval_env(&self.encoder, &ring, &env, EvalLimits::default())?.remove(0))
            })
            .collect()
    }

    /// Materialize once so later calls are cheap.
    pub fn materialized(mut self) -> Result<Self> {
        if self.components.is_none() {
            self.components = Some(self.components()?);
        }
        Ok(self)
    }

    /// Max total degree of the components (at least 1).
    pub fn degree(&self) -> Result<u32> {
        let d = self.components()?.iter().filter_map(|g| g.total_degree()).max().unwrap_or(0);
        Ok((d as u32).max(1))
    }

    /// The first k outputs.
    pub fn truncate(&self, k: usize) -> ExplicitMap {
        let k = k.min(self.n());
        ExplicitMap {
            m: self.m,
            encoder: self.encoder.clone(),
            assigns: self.assigns[..k].to_vec(),
            components: self.components.as_ref().map(|c| c[..k].to_vec()),
        }
    }

    /// Circuit file for C_G followed by `assign i : v1 v2 ..` lines, and an
    /// `inputs m` header line.
    pub fn to_text(&self) -> String {
        let mut s = format!("inputs {}\n", self.m);
        s.push_str(&print_circuit(&self.encoder));
        for (i, a) in self.assigns.iter().enumerate() {
            write!(s, "assign {} :", i + 1).unwrap();
            for v in a {
                write!(s, " {}", fmt_rational(v)).unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<ExplicitMap> {
        let mut m = None;
        let mut circuit_lines = Vec::new();
        let mut assigns: Vec<(usize, Vec<BigRational>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if let Some(r) = line.strip_prefix("inputs ") {
                m = Some(r.trim().parse::<usize>().map_err(|_| Error::parse(ln, "bad `inputs` count"))?);
            } else if let Some(r) = line.strip_prefix("assign") {
                let (idx, vals) = r.split_once(':').ok_or_else(|| Error::parse(ln, "expected `assign i : v1 v2 ...`"))?;
                let idx: usize = idx.trim().parse().map_err(|_| Error::parse(ln, "bad assignment index"))?;
                if idx != assigns.len() + 1 {
                    return Err(Error::parse(ln, format!("assignment {idx} out of order")));
                }
                let vals = vals
                    .split_whitespace()
                    .map(|t| parse_rational(t).ok_or_else(|| Error::parse(ln, format!("bad rational `{t}`"))))
                    .collect::<Result<Vec<_>>>()?;
                assigns.push((ln, vals));
            } else {
                circuit_lines.push((ln, raw));
            }
        }
        let c = parse_circuit_lines(circuit_lines.into_iter())?;
        let m = m.ok_or_else(|| Error::parse(1, "missing `inputs m` line"))?;
        if let Some((ln, a)) = assigns.iter().find(|(_, a)| a.len() + m != c.num_vars()) {
            return Err(Error::parse(*ln, format!("assignment has {} values, encoder expects {}", a.len(), c.num_vars().saturating_sub(m))));
        }
        ExplicitMap::new(c, m, assigns.into_iter().map(|(_, a)| a).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_round_trip() {
        let g = vec![SparsePoly::var(1, 0), SparsePoly::var(1, 0).pow(2), SparsePoly::zero(1)];
        let map = ExplicitMap::from_components(1, &g).unwrap();
        let text = map.to_text();
        let back = ExplicitMap::parse(&text).unwrap();
        assert_eq!(back.components().unwrap(), g);
        assert_eq!(back.to_text(), text);
        assert_eq!(back.degree().unwrap(), 2);
    }

    #[test]
    fn shared_encoder_with_parameters() {
        // C_G(z, y) = y1 * z + y2
        let text = "inputs 1\nvars 3\ng0 = input x1\ng1 = input x2\ng2 = mul g1 g0\ng3 = input x3\ng4 = add g2 g3\noutputs g4\nassign 1 : 2 0\nassign 2 : 1 -1/2\n";
        let map = ExplicitMap::parse(text).unwrap();
        let c = map.components().unwrap();
        assert_eq!(c[0], SparsePoly::var(1, 0).scale(&rat(2)));
        assert_eq!(c[1].to_text(), "vars 1\n1 : 1\n-1/2 : 0\n");
    }

    #[test]
    fn bad_assignment_reports_line() {
        let text = "inputs 1\nvars 2\ng0 = input x1\noutputs g0\nassign 1 : 1 2\n";
        match ExplicitMap::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
