//! Repeated squaring of an explicit ABP into a circuit with projection gates.

use crate::circuit::{Builder, Circuit, GateId, Var, Wire};
use crate::error::{Error, Result};

use super::abp::{calibrate_mv_sign, mv_sign_derived};
use super::encoder::MatrixEncoder;
use super::explicit::{encode_mv_abp, pad_to_power_of_two, ExplicitABP};

/// Variable layout of a compiled circuit: x, u, v, then (w^i, z_i) per level.
#[derive(Clone, Copy, Debug)]
pub struct Layout {
    pub nx: usize,
    pub lb: usize,
    pub levels: usize,
}

impl Layout {
    pub fn u(&self, b: usize) -> usize {
        self.nx + b
    }
    pub fn v(&self, b: usize) -> usize {
        self.nx + self.lb + b
    }
    /// `level` is 1-based.
    pub fn w(&self, level: usize, b: usize) -> usize {
        self.nx + 2 * self.lb + (level - 1) * (self.lb + 1) + b
    }
    pub fn z(&self, level: usize) -> usize {
        self.w(level, self.lb)
    }
    pub fn num_vars(&self) -> usize {
        self.nx + 2 * self.lb + self.levels * (self.lb + 1)
    }
}

/// Circuits D_0..D_k over the full layout; D_i(x, u, v) is the (u, v) entry of
/// the adjacency matrix raised to 2^i. Each D_i holds one instance of D_{i-1}.
pub fn squaring_chain(a: &ExplicitABP) -> Result<(Layout, Vec<Circuit>)> {
    if !a.steps.is_power_of_two() {
        return Err(Error::Params(format!("ABP has {} steps, not a power of two", a.steps)));
    }
    let levels = a.steps.trailing_zeros() as usize;
    let lay = Layout { nx: a.nx, lb: a.label_bits(), levels };
    let total = lay.num_vars();
    let id = |i: usize| Wire::Var(Var(i as u32));

    let mut b = Builder::new(total);
    let wiring: Vec<Wire> = (0..a.nx + 2 * lay.lb).map(id).collect();
    let out = b.inline(&a.circuit, &wiring, Some("C~"))?;
    let mut chain = vec![b.finish(out)];

    for level in 1..=levels {
        let prev = chain.last().unwrap();
        let mut b = Builder::new(total);
        let z = b.var(lay.z(level));
        let nz = b.one_minus(z);
        let mut wiring: Vec<Wire> = (0..total).map(id).collect();
        for bit in 0..lay.lb {
            let u = b.var(lay.u(bit));
            let v = b.var(lay.v(bit));
            let w = b.var(lay.w(level, bit));
            // P(u, w, v, z) = D((1-z)u + zw, (1-z)w + zv)
            let a0 = b.mul(nz, u);
            let a1 = b.mul(z, w);
            let su = b.add(a0, a1);
            let c0 = b.mul(nz, w);
            let c1 = b.mul(z, v);
            let sv = b.add(c0, c1);
            wiring[lay.u(bit)] = Wire::Gate(su);
            wiring[lay.v(bit)] = Wire::Gate(sv);
        }
        let p = b.inline(prev, &wiring, Some(&format!("D{}", level - 1)))?[0];
        let zv = Var(lay.z(level) as u32);
        let left = b.proj(zv, false, p);
        let right = b.proj(zv, true, p);
        let mut g = b.mul(left, right);
        for bit in 0..lay.lb {
            g = b.sum_over(Var(lay.w(level, bit) as u32), g);
        }
        chain.push(b.finish(vec![g]));
    }
    Ok((lay, chain))
}

fn fix_endpoints(b: &mut Builder, lay: &Layout, a: &ExplicitABP, g: GateId) -> GateId {
    let mut g = g;
    let s = a.vertex_bits(a.source);
    let t = a.vertex_bits(a.sink);
    for bit in (0..lay.lb).rev() {
        g = b.proj(Var(lay.v(bit) as u32), t[bit], g);
    }
    for bit in (0..lay.lb).rev() {
        g = b.proj(Var(lay.u(bit) as u32), s[bit], g);
    }
    g
}

/// Path sum of `a` from source to sink as a projection circuit. The result has
/// the x variables first; all other variables are bound inside.
pub fn compile_to_projection_circuit(a: &ExplicitABP) -> Result<Circuit> {
    let (lay, chain) = squaring_chain(a)?;
    let top = chain.last().unwrap();
    let mut b = Builder::new(lay.num_vars());
    let wiring: Vec<Wire> = (0..lay.num_vars()).map(|i| Wire::Var(Var(i as u32))).collect();
    let g = b.inline(top, &wiring, Some(&format!("D{}", lay.levels)))?[0];
    let out = fix_endpoints(&mut b, &lay, a, g);
    Ok(b.finish(vec![out]))
}

/// MV sign for N: calibrated against exact determinants while cheap.
pub fn mv_sign(n: usize) -> Result<i64> {
    if n <= 12 {
        calibrate_mv_sign(n)
    } else {
        Ok(mv_sign_derived(n))
    }
}

/// Projection circuit computing det of the matrix encoded by `enc`.
pub fn det_circuit(enc: &MatrixEncoder) -> Result<Circuit> {
    let abp = pad_to_power_of_two(&encode_mv_abp(enc)?)?;
    let c = compile_to_projection_circuit(&abp)?;
    if mv_sign(enc.n)? == 1 {
        return Ok(c);
    }
    let mut b = Builder::from_circuit(&c);
    let m = b.minus_one();
    let out = b.mul(m, c.outputs()[0]);
    Ok(b.finish(vec![out]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, ExactMatrix, PrimeField, Rationals, SparsePoly, DEFAULT_PRIME};
    use crate::circuit::{eval, expand};
    use crate::detc::encoder::{encode_int_matrix, encode_matrix, identity_encoder, symbolic_matrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_step_is_the_edge_label() {
        let m = vec![vec![SparsePoly::var(1, 0).scale(&rat(3))]];
        let a = encode_mv_abp(&encode_matrix(&m, 1).unwrap()).unwrap();
        assert_eq!(a.steps, 1);
        let c = compile_to_projection_circuit(&a).unwrap();
        let e = expand(&c, 1000).unwrap().remove(0).with_nvars(1).unwrap();
        assert_eq!(e, a.label(a.source, a.sink).unwrap());
    }

    #[test]
    fn one_squaring_matches_direct_convolution() {
        let m: Vec<Vec<i64>> = vec![vec![2, -1], vec![3, 5]];
        let a = encode_mv_abp(&encode_int_matrix(&m).unwrap()).unwrap();
        let (lay, chain) = squaring_chain(&a).unwrap();
        assert_eq!(lay.levels, 1);
        assert_eq!(chain[1].count_instances("D0"), 1);
        let lb = lay.lb;
        let verts: Vec<_> = (0..1usize << lb).map(|k| {
            let l = k >> (2 * a.iw);
            let i = (k >> a.iw) & ((1 << a.iw) - 1);
            let j = k & ((1 << a.iw) - 1);
            crate::detc::Vertex::new(l, i, j)
        }).collect();
        for &s in &verts {
            for &t in &verts {
                let mut direct = rat(0);
                for &w in &verts {
                    direct += a.label(s, w).unwrap().as_constant().unwrap() * a.label(w, t).unwrap().as_constant().unwrap();
                }
                let mut point: Vec<_> = a.vertex_bits(s).into_iter().chain(a.vertex_bits(t)).map(|b| rat(b as i64)).collect();
                point.resize(lay.num_vars(), rat(0));
                assert_eq!(eval(&chain[1], &Rationals, &point).unwrap()[0], direct);
            }
        }
    }

    #[test]
    fn symbolic_2x2() {
        let m = symbolic_matrix(2);
        let c = det_circuit(&encode_matrix(&m, 4).unwrap()).unwrap();
        let e = expand(&c, 10_000).unwrap().remove(0).with_nvars(4).unwrap();
        let want = SparsePoly::parse("vars 4\n1 : 1 0 0 1\n-1 : 0 1 1 0\n").unwrap();
        assert_eq!(e, want);
        assert!(c.is_constant_free());
    }

    #[test]
    fn identity_det_is_one() {
        let c = det_circuit(&identity_encoder(4)).unwrap();
        assert_eq!(eval(&c, &Rationals, &[]).unwrap()[0], rat(1));
    }

    #[test]
    fn random_integer_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..3 {
                let m: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
                let c = det_circuit(&encode_int_matrix(&m).unwrap()).unwrap();
                let want = ExactMatrix::from_i64(&m).exact_det().unwrap();
                assert_eq!(eval(&c, &Rationals, &[]).unwrap()[0], want, "{m:?}");
            }
        }
    }

    #[test]
    fn nested_instances_are_linear() {
        let (lay, chain) = squaring_chain(&pad_to_power_of_two(&encode_mv_abp(&identity_encoder(5)).unwrap()).unwrap()).unwrap();
        assert_eq!(lay.levels, 3);
        for i in 1..chain.len() {
            assert_eq!(chain[i].count_instances(&format!("D{}", i - 1)), 1);
            assert_eq!(chain[i].count_instances("C~"), chain[0].count_instances("C~"));
        }
    }

    #[test]
    #[ignore]
    fn timing_probe() {
        let f = PrimeField { p: DEFAULT_PRIME };
        for n in [4usize, 6, 8, 9] {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| ((i * 7 + j * 3) % 5) as i64 - 2).collect()).collect();
            let t = std::time::Instant::now();
            let c = det_circuit(&encode_int_matrix(&m).unwrap()).unwrap();
            let v = eval(&c, &f, &[]).unwrap();
            eprintln!("n={n} size={} {:?} {:?}", c.size(), v, t.elapsed());
        }
    }
}
