//! Materialized layered ABPs and the Mahajan-Vinay determinant ABP.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use crate::algebra::{Ring, SparsePoly};
use crate::circuit::{expand, text::parse_circuit_lines, Builder, Circuit, GateId};
use crate::error::{Error, Result};

use super::encoder::poly_to_gates;

/// Vertex label (layer, i, j), all 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub layer: usize,
    pub i: usize,
    pub j: usize,
}

impl Vertex {
    pub fn new(layer: usize, i: usize, j: usize) -> Self {
        Vertex { layer, i, j }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LayeredABP {
    pub nvars: usize,
    pub source: Vertex,
    pub sink: Vertex,
    pub edges: Vec<(Vertex, Vertex, SparsePoly)>,
}

impl LayeredABP {
    pub fn layer_count(&self) -> usize {
        self.sink.layer - self.source.layer + 1
    }

    pub fn validate(&self) -> Result<()> {
        for (u, v, l) in &self.edges {
            if v.layer != u.layer + 1 {
                return Err(Error::Params(format!("edge {u:?} -> {v:?} skips a layer")));
            }
            if l.nvars() != self.nvars {
                return Err(Error::ArityMismatch { expected: self.nvars, got: l.nvars() });
            }
        }
        Ok(())
    }

    /// Edge label lookup (zero when absent).
    pub fn label(&self, u: Vertex, v: Vertex) -> SparsePoly {
        let mut acc = SparsePoly::zero(self.nvars);
        for (a, b, l) in &self.edges {
            if *a == u && *b == v {
                acc = acc.add(l).expect("arity");
            }
        }
        acc
    }

    pub fn to_text(&self) -> String {
        let mut b = Builder::new(self.nvars);
        let xs: Vec<GateId> = (0..self.nvars).map(|i| b.var(i)).collect();
        let mut ids = Vec::new();
        let mut cache: HashMap<String, GateId> = HashMap::new();
        for (_, _, l) in &self.edges {
            let key = l.to_text();
            let g = match cache.get(&key) {
                Some(g) => *g,
                None => {
                    let g = poly_to_gates(&mut b, l, &xs);
                    cache.insert(key, g);
                    g
                }
            };
            ids.push(g);
        }
        let c = b.finish(Vec::new());
        let text = crate::circuit::print_circuit(&c);
        let mut s = text.trim_end().strip_suffix("outputs").unwrap_or(&text).to_string();
        let fmt = |v: &Vertex| format!("({},{},{})", v.layer, v.i, v.j);
        writeln!(s, "source {}", fmt(&self.source)).unwrap();
        writeln!(s, "sink {}", fmt(&self.sink)).unwrap();
        for ((u, v, _), g) in self.edges.iter().zip(ids) {
            writeln!(s, "edge {} {} = g{}", fmt(u), fmt(v), g.0).unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<LayeredABP> {
        let mut circuit_lines = Vec::new();
        let mut source = None;
        let mut sink = None;
        let mut edges = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            let line = raw.trim();
            if let Some(r) = line.strip_prefix("source") {
                source = Some(parse_vertex(r.trim(), ln)?);
            } else if let Some(r) = line.strip_prefix("sink") {
                sink = Some(parse_vertex(r.trim(), ln)?);
            } else if let Some(r) = line.strip_prefix("edge") {
                let (lhs, g) = r.split_once('=').ok_or_else(|| Error::parse(ln, "expected `edge (l,i,j) (l,i,j) = g<a>`"))?;
                let mut vs = lhs.split_whitespace();
                let u = parse_vertex(vs.next().unwrap_or(""), ln)?;
                let v = parse_vertex(vs.next().unwrap_or(""), ln)?;
                let g = g
                    .trim()
                    .strip_prefix('g')
                    .and_then(|x| x.parse::<u32>().ok())
                    .ok_or_else(|| Error::parse(ln, "bad gate reference"))?;
                edges.push((u, v, g, ln));
            } else {
                circuit_lines.push((ln, raw));
            }
        }
        let last = circuit_lines.last().map_or(1, |(l, _)| *l);
        circuit_lines.push((last, "outputs"));
        let c = parse_circuit_lines(circuit_lines.into_iter())?;
        let source = source.ok_or_else(|| Error::parse(last, "missing `source` line"))?;
        let sink = sink.ok_or_else(|| Error::parse(last, "missing `sink` line"))?;
        let mut labels: HashMap<u32, SparsePoly> = HashMap::new();
        let mut out = Vec::new();
        for (u, v, g, ln) in edges {
            if g as usize >= c.gates().len() {
                return Err(Error::parse(ln, format!("edge label g{g} does not exist")));
            }
            let l = match labels.get(&g) {
                Some(l) => l.clone(),
                None => {
                    let l = expand(&c.sub_circuit(GateId(g)), 1_000_000)?.remove(0);
                    labels.insert(g, l.clone());
                    l
                }
            };
            out.push((u, v, l));
        }
        let abp = LayeredABP { nvars: c.num_vars(), source, sink, edges: out };
        abp.validate()?;
        Ok(abp)
    }
}

fn parse_vertex(s: &str, ln: usize) -> Result<Vertex> {
    let inner = s
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::parse(ln, format!("bad vertex `{s}`")))?;
    let parts: Vec<usize> = inner
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(ln, format!("bad vertex `{s}`")))?;
    if parts.len() != 3 {
        return Err(Error::parse(ln, format!("vertex `{s}` needs three fields")));
    }
    Ok(Vertex::new(parts[0], parts[1], parts[2]))
}

/// Sum over source-sink paths of the product of labels, by layered DP.
pub fn abp_path_sum<R: Ring>(abp: &LayeredABP, ring: &R, point: &[R::Elem]) -> Result<R::Elem> {
    let mut by_layer: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, (u, _, _)) in abp.edges.iter().enumerate() {
        by_layer.entry(u.layer).or_default().push(k);
    }
    let mut val: HashMap<Vertex, R::Elem> = HashMap::new();
    val.insert(abp.source, ring.one());
    for (_, ks) in by_layer {
        for k in ks {
            let (u, v, l) = &abp.edges[k];
            let Some(a) = val.get(u) else { continue };
            if ring.is_zero(a) {
                continue;
            }
            let w = ring.mul(a, &l.eval(ring, point)?);
            let e = val.entry(*v).or_insert_with(|| ring.zero());
            *e = ring.add(e, &w);
        }
    }
    Ok(val.remove(&abp.sink).unwrap_or_else(|| ring.zero()))
}

/// The clow-sequence ABP of an N x N matrix.
///
/// Vertex (l, i, j): after l steps, current clow head i, current vertex j.
/// Layers 0..N-1 hold all (i, j); layer N holds only the sink (N, 0, 0).
/// Its path sum is (-1)^N det(M).
pub fn mv_abp(m: &[Vec<SparsePoly>]) -> Result<LayeredABP> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Params("matrix must be at least 1x1".into()));
    }
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::NotSquare(n, m[0].len()));
    }
    let nvars = m[0][0].nvars();
    let mut edges = Vec::new();
    for l in 0..n - 1 {
        for i in 0..n {
            for j in 0..n {
                let u = Vertex::new(l, i, j);
                for k in i + 1..n {
                    if !m[j][k].is_zero() {
                        edges.push((u, Vertex::new(l + 1, i, k), m[j][k].clone()));
                    }
                    if !m[j][i].is_zero() {
                        edges.push((u, Vertex::new(l + 1, k, k), m[j][i].neg()));
                    }
                }
            }
        }
    }
    let sink = Vertex::new(n, 0, 0);
    for i in 0..n {
        for j in 0..n {
            if !m[j][i].is_zero() {
                edges.push((Vertex::new(n - 1, i, j), sink, m[j][i].neg()));
            }
        }
    }
    Ok(LayeredABP { nvars, source: Vertex::new(0, 0, 0), sink, edges })
}

/// sigma(N) in `path_sum = sigma(N) * det`.
pub fn mv_sign_derived(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Calibrate sigma(N) on a fixed generic integer matrix; checks it matches
/// the derived value.
pub fn calibrate_mv_sign(n: usize) -> Result<i64> {
    use crate::algebra::{rat, ExactMatrix, Rationals};
    // first nonsingular member of a fixed family
    let (vals, det) = (1..64i64)
        .map(|c| {
            let v: Vec<Vec<i64>> = (0..n as i64)
                .map(|i| (0..n as i64).map(|j| (7 * i * i + 3 * j + 5 * i * j + c * (i + 2 * j + 1)) % 11 - 4).collect())
                .collect();
            let d = ExactMatrix::from_i64(&v).exact_det();
            (v, d)
        })
        .find(|(_, d)| matches!(d, Ok(d) if *d != rat(0)))
        .ok_or_else(|| Error::Internal("no nonsingular calibration matrix".into()))?;
    let det = det?;
    let m: Vec<Vec<SparsePoly>> =
        vals.iter().map(|r| r.iter().map(|&v| SparsePoly::constant(0, rat(v))).collect()).collect();
    let ps = abp_path_sum(&mv_abp(&m)?, &Rationals, &[])?;
    let derived = mv_sign_derived(n);
    let sigma = if ps == det { 1 } else if ps == -det.clone() { -1 } else {
        return Err(Error::Internal(format!("MV path sum {ps} is not +-det {det}")));
    };
    if sigma != derived {
        return Err(Error::Internal(format!("calibrated sign {sigma} differs from derived {derived} at N={n}")));
    }
    Ok(sigma)
}

/// A single-edge ABP, handy for tests.
pub fn single_edge(label: SparsePoly) -> LayeredABP {
    LayeredABP { nvars: label.nvars(), source: Vertex::new(0, 0, 0), sink: Vertex::new(1, 0, 0), edges: vec![(Vertex::new(0, 0, 0), Vertex::new(1, 0, 0), label)] }
}

/// Circuit computing one label (used by the file format).
pub fn label_circuit(l: &SparsePoly) -> Circuit {
    let mut b = Builder::new(l.nvars());
    let xs: Vec<GateId> = (0..l.nvars()).map(|i| b.var(i)).collect();
    let g = poly_to_gates(&mut b, l, &xs);
    b.finish(vec![g])
}
