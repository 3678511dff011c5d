//! Explicit (encoder-presented) ABPs for the MV determinant construction.

use crate::algebra::{PolyRing, Ring, SparsePoly};
use crate::circuit::{eval_env, Builder, Circuit, EvalLimits, GateId, Var, Wire};
use crate::error::{Error, Result};
use crate::gadgets::bits::{and, and_all, bit_width, eq, eq_const, gate_of, gt, inc, lt_const, not, sum_exclusive, vars_as_bits, Bit};

use super::abp::Vertex;
use super::encoder::MatrixEncoder;

/// Encoder C~(x, u, v) for the edge labels of a layered ABP. Vertex labels
/// are [layer (lw)][i (iw)][j (iw)] bits, MSB-first.
#[derive(Clone, Debug)]
pub struct ExplicitABP {
    pub circuit: Circuit,
    pub nx: usize,
    /// Number of layer steps (source layer 0, sink layer `steps`).
    pub steps: usize,
    pub lw: usize,
    pub iw: usize,
    pub source: Vertex,
    pub sink: Vertex,
}

impl ExplicitABP {
    pub fn label_bits(&self) -> usize {
        self.lw + 2 * self.iw
    }

    pub fn vertex_bits(&self, v: Vertex) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.label_bits());
        for (val, w) in [(v.layer, self.lw), (v.i, self.iw), (v.j, self.iw)] {
            for k in 0..w {
                out.push((val >> (w - 1 - k)) & 1 == 1);
            }
        }
        out
    }

    /// Label of (u, v) evaluated at the point x.
    pub fn label_at<R: Ring>(&self, ring: &R, x: &[R::Elem], u: Vertex, v: Vertex) -> Result<R::Elem> {
        let mut env: Vec<Option<R::Elem>> = x.iter().cloned().map(Some).collect();
        for bit in self.vertex_bits(u).into_iter().chain(self.vertex_bits(v)) {
            env.push(Some(if bit { ring.one() } else { ring.zero() }));
        }
        Ok(eval_env(&self.circuit, ring, &env, EvalLimits::default())?.remove(0))
    }

    /// Label of the pair (u, v) as a polynomial in x (0 on non-edges).
    pub fn label(&self, u: Vertex, v: Vertex) -> Result<SparsePoly> {
        let ring = PolyRing { nvars: self.nx };
        let mut env: Vec<Option<SparsePoly>> = (0..self.nx).map(|i| Some(SparsePoly::var(self.nx, i))).collect();
        for bit in self.vertex_bits(u).into_iter().chain(self.vertex_bits(v)) {
            env.push(Some(if bit { SparsePoly::one(self.nx) } else { SparsePoly::zero(self.nx) }));
        }
        Ok(eval_env(&self.circuit, &ring, &env, EvalLimits::default())?.remove(0))
    }
}

struct Fields {
    l: Vec<Bit>,
    i: Vec<Bit>,
    j: Vec<Bit>,
}

fn fields(b: &mut Builder, start: usize, lw: usize, iw: usize) -> Fields {
    Fields {
        l: vars_as_bits(b, start, lw),
        i: vars_as_bits(b, start + lw, iw),
        j: vars_as_bits(b, start + lw + iw, iw),
    }
}

fn bits_to_gates(b: &mut Builder, bits: &[Bit]) -> Vec<GateId> {
    bits.iter().map(|&x| gate_of(b, x)).collect()
}

// One instance of the matrix encoder at (row, col).
fn entry(b: &mut Builder, enc: &MatrixEncoder, row: &[Bit], col: &[Bit], label: &str) -> Result<GateId> {
    let mut wiring: Vec<Wire> = (0..enc.nx).map(|i| Wire::Var(Var(i as u32))).collect();
    for g in bits_to_gates(b, row).into_iter().chain(bits_to_gates(b, col)) {
        wiring.push(Wire::Gate(g));
    }
    Ok(b.inline(&enc.circuit, &wiring, Some(label))?[0])
}

/// valid(w): layer <= last_layer and i, j < n.
fn valid(b: &mut Builder, f: &Fields, last_layer: usize, n: usize) -> Bit {
    let a = lt_const(b, &f.l, last_layer as u64 + 1);
    let c = lt_const(b, &f.i, n as u64);
    let d = lt_const(b, &f.j, n as u64);
    and_all(b, &[a, c, d])
}

/// Explicit MV ABP for the matrix encoded by `enc`.
pub fn encode_mv_abp(enc: &MatrixEncoder) -> Result<ExplicitABP> {
    let n = enc.n;
    let nx = enc.nx;
    let iw = enc.width();
    let lw = bit_width(n as u64);
    let lb = lw + 2 * iw;
    let mut b = Builder::new(nx + 2 * lb);
    let u = fields(&mut b, nx, lw, iw);
    let v = fields(&mut b, nx + lb, lw, iw);

    let lu_inc = inc(&mut b, &u.l);
    let step = eq(&mut b, &v.l, &lu_inc);
    let not_last = lt_const(&mut b, &u.l, n as u64 - 1);
    let at_last = eq_const(&mut b, &u.l, n as u64 - 1);

    // continue the clow: (l,i,j) -> (l+1,i,k), k > i, label M[j,k]
    let same_head = eq(&mut b, &u.i, &v.i);
    let k_after = gt(&mut b, &v.j, &u.i);
    let m_jk = entry(&mut b, enc, &u.j, &v.j, "C")?;
    let t1 = and_all(&mut b, &[step, not_last, same_head, k_after]);
    let t1 = and(&mut b, t1, Bit::G(m_jk));

    // close the clow: to (l+1,k,k) with k > i, or to the sink; label -M[j,i]
    let new_head = eq(&mut b, &v.i, &v.j);
    let k_gt = gt(&mut b, &v.i, &u.i);
    let open = and(&mut b, k_gt, not_last);
    let zero_i = eq_const(&mut b, &v.i, 0);
    let close = and(&mut b, at_last, zero_i);
    let branch = sum_exclusive(&mut b, &[open, close]);
    let m_ji = entry(&mut b, enc, &u.j, &u.i, "C")?;
    let neg = b.neg(m_ji);
    let t2 = and_all(&mut b, &[step, new_head, branch]);
    let t2 = and(&mut b, t2, Bit::G(neg));

    let g = sum_exclusive(&mut b, &[t1, t2]);
    let vu = valid(&mut b, &u, n, n);
    let vv = valid(&mut b, &v, n, n);
    let inner = and(&mut b, vv, g);
    let out = and(&mut b, vu, inner);
    let out = gate_of(&mut b, out);
    Ok(ExplicitABP {
        circuit: b.finish(vec![out]),
        nx,
        steps: n,
        lw,
        iw,
        source: Vertex::new(0, 0, 0),
        sink: Vertex::new(n, 0, 0),
    })
}

/// Extend the layering to a power-of-two number of steps with unit chain
/// edges from the old sink.
pub fn pad_to_power_of_two(a: &ExplicitABP) -> Result<ExplicitABP> {
    let n = a.steps;
    let np = n.next_power_of_two();
    if np == n {
        return Ok(a.clone());
    }
    if a.sink != Vertex::new(n, 0, 0) {
        return Err(Error::Params("padding expects the sink at (steps, 0, 0)".into()));
    }
    let lw = bit_width(np as u64);
    let iw = a.iw;
    let nx = a.nx;
    let lb = lw + 2 * iw;
    let old_lb = a.label_bits();
    let extra = lw - a.lw;
    let mut b = Builder::new(nx + 2 * lb);
    let u = fields(&mut b, nx, lw, iw);
    let v = fields(&mut b, nx + lb, lw, iw);

    // old encoder on the low layer bits, guarded by zero high bits
    let mut wiring: Vec<Wire> = (0..nx).map(|i| Wire::Var(Var(i as u32))).collect();
    for f in [&u, &v] {
        for bit in f.l[extra..].iter().chain(&f.i).chain(&f.j) {
            wiring.push(Wire::Gate(gate_of(&mut b, *bit)));
        }
    }
    debug_assert_eq!(wiring.len(), nx + 2 * old_lb);
    let old = b.inline(&a.circuit, &wiring, Some("C~"))?[0];
    let mut guard = Vec::new();
    for f in [&u, &v] {
        for &bit in &f.l[..extra] {
            guard.push(not(&mut b, bit));
        }
    }
    let guard = and_all(&mut b, &guard);
    let t_old = and(&mut b, guard, Bit::G(old));

    // chain (l,0,0) -> (l+1,0,0) for n <= l < np, label 1
    let lu_inc = inc(&mut b, &u.l);
    let step = eq(&mut b, &v.l, &lu_inc);
    let below_n = lt_const(&mut b, &u.l, n as u64);
    let past_old = not(&mut b, below_n);
    let in_range = lt_const(&mut b, &u.l, np as u64);
    let mut zeros = Vec::new();
    for bit in u.i.iter().chain(&u.j).chain(&v.i).chain(&v.j) {
        zeros.push(not(&mut b, *bit));
    }
    let zeros = and_all(&mut b, &zeros);
    let chain = and_all(&mut b, &[step, past_old, in_range, zeros]);
    let out = sum_exclusive(&mut b, &[t_old, chain]);
    let out = gate_of(&mut b, out);
    Ok(ExplicitABP {
        circuit: b.finish(vec![out]),
        nx,
        steps: np,
        lw,
        iw,
        source: a.source,
        sink: Vertex::new(np, 0, 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::detc::abp::mv_abp;
    use crate::detc::encoder::{encode_matrix, symbolic_matrix};

    fn all_vertices(a: &ExplicitABP) -> Vec<Vertex> {
        let mut out = Vec::new();
        for l in 0..1usize << a.lw {
            for i in 0..1usize << a.iw {
                for j in 0..1usize << a.iw {
                    out.push(Vertex::new(l, i, j));
                }
            }
        }
        out
    }

    #[test]
    fn encoder_agrees_with_materialized_mv() {
        for n in 1..=3 {
            let m = symbolic_matrix(n);
            let enc = encode_matrix(&m, n * n).unwrap();
            let e = encode_mv_abp(&enc).unwrap();
            let abp = mv_abp(&m).unwrap();
            for u in all_vertices(&e) {
                for v in all_vertices(&e) {
                    assert_eq!(e.label(u, v).unwrap(), abp.label(u, v), "N={n} {u:?} -> {v:?}");
                }
            }
        }
    }

    #[test]
    fn encoder_agrees_with_mv_mod_p() {
        use crate::algebra::{PrimeField, DEFAULT_PRIME};
        use rand::{Rng, SeedableRng};
        use std::collections::HashMap;
        let f = PrimeField { p: DEFAULT_PRIME };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for n in 4..=5 {
            let m = symbolic_matrix(n);
            let x: Vec<u64> = (0..n * n).map(|_| rng.gen_range(1..f.p)).collect();
            let e = encode_mv_abp(&encode_matrix(&m, n * n).unwrap()).unwrap();
            let abp = mv_abp(&m).unwrap();
            let mut want: HashMap<(Vertex, Vertex), u64> = HashMap::new();
            for (a, b, l) in &abp.edges {
                let v = l.eval(&f, &x).unwrap();
                let slot = want.entry((*a, *b)).or_insert(0);
                *slot = f.add(slot, &v);
            }
            let verts = all_vertices(&e);
            for &u in &verts {
                for &v in &verts {
                    let got = e.label_at(&f, &x, u, v).unwrap();
                    assert_eq!(got, want.get(&(u, v)).copied().unwrap_or(0), "N={n} {u:?} -> {v:?}");
                }
            }
        }
    }

    #[test]
    fn padding_adds_chain() {
        let m = symbolic_matrix(3);
        let enc = encode_matrix(&m, 9).unwrap();
        let e = encode_mv_abp(&enc).unwrap();
        let p = pad_to_power_of_two(&e).unwrap();
        assert_eq!(p.steps, 4);
        assert_eq!(p.label(Vertex::new(3, 0, 0), Vertex::new(4, 0, 0)).unwrap(), SparsePoly::one(9));
        assert!(p.label(Vertex::new(3, 1, 0), Vertex::new(4, 0, 0)).unwrap().is_zero());
        assert!(p.label(Vertex::new(0, 0, 0), Vertex::new(2, 0, 1)).unwrap().is_zero());
        assert_eq!(p.label(Vertex::new(0, 0, 0), Vertex::new(1, 0, 2)).unwrap(), m[0][2]);
        let _ = rat(0);
    }
}
