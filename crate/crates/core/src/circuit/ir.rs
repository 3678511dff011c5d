//! Gates, circuits and the circuit builder.

use std::collections::HashMap;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rationals;
use crate::error::{Error, Result};

/// Index into a circuit's gate list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateId(pub u32);

impl GateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ambient variable, 0-based (printed as `x<k+1>`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(Var),
    One,
    MinusOne,
    /// General field constant; not part of the constant-free dialect.
    Const(BigRational),
    ConstDiv(GateId, GateId),
    Add(GateId, GateId),
    Mul(GateId, GateId),
    Proj { var: Var, bit: bool, child: GateId },
    Sum { var: Var, child: GateId },
    Prod { var: Var, child: GateId },
}

impl Gate {
    pub fn children(&self) -> impl Iterator<Item = GateId> {
        let (a, b) = match *self {
            Gate::Input(_) | Gate::One | Gate::MinusOne | Gate::Const(_) => (None, None),
            Gate::ConstDiv(a, b) | Gate::Add(a, b) | Gate::Mul(a, b) => (Some(a), Some(b)),
            Gate::Proj { child, .. } | Gate::Sum { child, .. } | Gate::Prod { child, .. } => (Some(child), None),
        };
        a.into_iter().chain(b)
    }

    pub fn fan_in(&self) -> usize {
        self.children().count()
    }

    /// Variable bound by a Proj/Sum/Prod gate.
    pub fn binder(&self) -> Option<Var> {
        match *self {
            Gate::Proj { var, .. } | Gate::Sum { var, .. } | Gate::Prod { var, .. } => Some(var),
            _ => None,
        }
    }

    fn map_children(&self, f: impl Fn(GateId) -> GateId) -> Gate {
        match self {
            Gate::ConstDiv(a, b) => Gate::ConstDiv(f(*a), f(*b)),
            Gate::Add(a, b) => Gate::Add(f(*a), f(*b)),
            Gate::Mul(a, b) => Gate::Mul(f(*a), f(*b)),
            Gate::Proj { var, bit, child } => Gate::Proj { var: *var, bit: *bit, child: f(*child) },
            Gate::Sum { var, child } => Gate::Sum { var: *var, child: f(*child) },
            Gate::Prod { var, child } => Gate::Prod { var: *var, child: f(*child) },
            g => g.clone(),
        }
    }
}

/// A recorded spliced subcircuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub label: String,
    pub gates: Range<usize>,
}

/// Multi-output DAG in topological order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    num_vars: usize,
    gates: Vec<Gate>,
    outputs: Vec<GateId>,
    instances: Vec<Instance>,
}

impl Circuit {
    /// Unchecked constructor; call [`Circuit::validate`] on untrusted input.
    pub fn from_parts(num_vars: usize, gates: Vec<Gate>, outputs: Vec<GateId>) -> Self {
        Circuit { num_vars, gates, outputs, instances: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g.index()]
    }

    pub fn outputs(&self) -> &[GateId] {
        &self.outputs
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn count_instances(&self, label: &str) -> usize {
        self.instances.iter().filter(|i| i.label == label).count()
    }

    /// Wire count: sum of fan-ins over all gates.
    pub fn size(&self) -> usize {
        self.gates.iter().map(Gate::fan_in).sum()
    }

    /// Wires in the cone of the outputs only.
    pub fn live_size(&self) -> usize {
        let live = self.live_mask();
        self.gates.iter().zip(&live).filter(|(_, l)| **l).map(|(g, _)| g.fan_in()).sum()
    }

    pub fn live_mask(&self) -> Vec<bool> {
        let mut live = vec![false; self.gates.len()];
        for o in &self.outputs {
            live[o.index()] = true;
        }
        for i in (0..self.gates.len()).rev() {
            if live[i] {
                for c in self.gates[i].children() {
                    live[c.index()] = true;
                }
            }
        }
        live
    }

    /// True iff no general `Const` gate occurs.
    pub fn is_constant_free(&self) -> bool {
        !self.gates.iter().any(|g| matches!(g, Gate::Const(_)))
    }

    pub fn is_projection_free(&self) -> bool {
        !self.gates.iter().any(|g| g.binder().is_some())
    }

    pub fn with_num_vars(mut self, n: usize) -> Result<Self> {
        if n < self.num_vars && self.gates.iter().any(|g| uses_var_at_least(g, n)) {
            return Err(Error::Params(format!("circuit uses variables beyond x{n}")));
        }
        self.num_vars = n;
        Ok(self)
    }

    pub fn with_outputs(mut self, outputs: Vec<GateId>) -> Self {
        self.outputs = outputs;
        self
    }

    /// Variables free in each gate (binders remove their variable).
    pub fn free_vars(&self) -> Vec<Vec<Var>> {
        let mut out: Vec<Vec<Var>> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = match g {
                Gate::Input(v) => vec![*v],
                Gate::Proj { var, child, .. } | Gate::Sum { var, child } | Gate::Prod { var, child } => {
                    out[child.index()].iter().copied().filter(|x| x != var).collect()
                }
                Gate::ConstDiv(a, b) | Gate::Add(a, b) | Gate::Mul(a, b) => merge(&out[a.index()], &out[b.index()]),
                _ => Vec::new(),
            };
            out.push(v);
        }
        out
    }

    /// First structural violation, if any.
    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            for c in g.children() {
                if c.index() >= i {
                    return Err(Error::invalid(i, format!("references g{} which does not precede it (cycle or order violation)", c.0)));
                }
            }
            let var = match g {
                Gate::Input(v) => Some(*v),
                _ => g.binder(),
            };
            if let Some(v) = var {
                if v.index() >= self.num_vars {
                    return Err(Error::invalid(i, format!("variable x{} out of range (vars {})", v.0 + 1, self.num_vars)));
                }
            }
        }
        for o in &self.outputs {
            if o.index() >= self.gates.len() {
                return Err(Error::invalid(o.index(), "output refers to a missing gate"));
            }
        }
        let free = self.free_vars();
        for (i, g) in self.gates.iter().enumerate() {
            if let Gate::ConstDiv(a, b) = g {
                for c in [a, b] {
                    if !free[c.index()].is_empty() {
                        return Err(Error::invalid(i, format!("cdiv child g{} is not constant", c.0)));
                    }
                }
                let sub = self.sub_circuit(*b);
                let v = crate::circuit::eval::eval(&sub, &Rationals, &[])?;
                if v[0].is_zero() {
                    return Err(Error::invalid(i, "cdiv divisor is zero"));
                }
            }
        }
        Ok(())
    }

    /// The cone of one gate as a standalone single-output circuit.
    pub fn sub_circuit(&self, root: GateId) -> Circuit {
        let mut keep = vec![false; root.index() + 1];
        keep[root.index()] = true;
        for i in (0..=root.index()).rev() {
            if keep[i] {
                for c in self.gates[i].children() {
                    keep[c.index()] = true;
                }
            }
        }
        let mut remap = vec![GateId(0); root.index() + 1];
        let mut gates = Vec::new();
        for i in 0..=root.index() {
            if keep[i] {
                remap[i] = GateId(gates.len() as u32);
                gates.push(self.gates[i].map_children(|c| remap[c.index()]));
            }
        }
        Circuit::from_parts(self.num_vars, gates, vec![remap[root.index()]])
    }

    /// Drop gates outside the output cone. Instances are kept when their
    /// range survives contiguously.
    pub fn prune(&self) -> Circuit {
        let live = self.live_mask();
        let mut remap = vec![GateId(0); self.gates.len()];
        let mut gates = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            if live[i] {
                remap[i] = GateId(gates.len() as u32);
                gates.push(g.map_children(|c| remap[c.index()]));
            }
        }
        let mut prefix = vec![0usize; self.gates.len() + 1];
        for i in 0..self.gates.len() {
            prefix[i + 1] = prefix[i] + live[i] as usize;
        }
        let instances = self
            .instances
            .iter()
            .map(|ins| Instance { label: ins.label.clone(), gates: prefix[ins.gates.start]..prefix[ins.gates.end] })
            .filter(|ins| !ins.gates.is_empty())
            .collect();
        Circuit { num_vars: self.num_vars, gates, outputs: self.outputs.iter().map(|o| remap[o.index()]).collect(), instances }
    }
}

fn uses_var_at_least(g: &Gate, n: usize) -> bool {
    match g {
        Gate::Input(v) => v.index() >= n,
        _ => g.binder().is_some_and(|v| v.index() >= n),
    }
}

fn merge(a: &[Var], b: &[Var]) -> Vec<Var> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

/// What a donor variable is connected to when inlining.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wire {
    Var(Var),
    Gate(GateId),
}

/// Append-only circuit builder. Leaves and small constants are shared.
#[derive(Clone, Debug)]
pub struct Builder {
    num_vars: usize,
    gates: Vec<Gate>,
    instances: Vec<Instance>,
    leaf_cache: HashMap<Gate, GateId>,
    int_cache: HashMap<BigInt, GateId>,
}

impl Builder {
    pub fn new(num_vars: usize) -> Self {
        Builder { num_vars, gates: Vec::new(), instances: Vec::new(), leaf_cache: HashMap::new(), int_cache: HashMap::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g.index()]
    }

    /// Append without sharing.
    pub fn push(&mut self, g: Gate) -> GateId {
        debug_assert!(g.children().all(|c| c.index() < self.gates.len()));
        self.gates.push(g);
        GateId(self.gates.len() as u32 - 1)
    }

    fn leaf(&mut self, g: Gate) -> GateId {
        if let Some(&id) = self.leaf_cache.get(&g) {
            return id;
        }
        let id = self.push(g.clone());
        self.leaf_cache.insert(g, id);
        id
    }

    pub fn input(&mut self, v: Var) -> GateId {
        assert!(v.index() < self.num_vars, "variable out of range");
        self.leaf(Gate::Input(v))
    }

    pub fn var(&mut self, i: usize) -> GateId {
        self.input(Var(i as u32))
    }

    pub fn one(&mut self) -> GateId {
        self.leaf(Gate::One)
    }

    pub fn minus_one(&mut self) -> GateId {
        self.leaf(Gate::MinusOne)
    }

    pub fn zero(&mut self) -> GateId {
        let one = self.one();
        let m = self.minus_one();
        if let Some(&z) = self.leaf_cache.get(&Gate::Add(one, m)) {
            return z;
        }
        let z = self.push(Gate::Add(one, m));
        self.leaf_cache.insert(Gate::Add(one, m), z);
        z
    }

    pub fn add(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Add(a, b))
    }

    pub fn mul(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::Mul(a, b))
    }

    pub fn neg(&mut self, a: GateId) -> GateId {
        let m = self.minus_one();
        self.mul(m, a)
    }

    pub fn sub(&mut self, a: GateId, b: GateId) -> GateId {
        let nb = self.neg(b);
        self.add(a, nb)
    }

    /// `1 - a`
    pub fn one_minus(&mut self, a: GateId) -> GateId {
        let one = self.one();
        self.sub(one, a)
    }

    pub fn square(&mut self, a: GateId) -> GateId {
        self.mul(a, a)
    }

    pub fn proj(&mut self, var: Var, bit: bool, child: GateId) -> GateId {
        self.push(Gate::Proj { var, bit, child })
    }

    pub fn sum_over(&mut self, var: Var, child: GateId) -> GateId {
        self.push(Gate::Sum { var, child })
    }

    pub fn prod_over(&mut self, var: Var, child: GateId) -> GateId {
        self.push(Gate::Prod { var, child })
    }

    pub fn cdiv(&mut self, a: GateId, b: GateId) -> GateId {
        self.push(Gate::ConstDiv(a, b))
    }

    pub fn general_const(&mut self, q: BigRational) -> GateId {
        self.push(Gate::Const(q))
    }

    /// Balanced sum; empty list gives 0.
    pub fn sum_all(&mut self, xs: &[GateId]) -> GateId {
        match xs.len() {
            0 => self.zero(),
            1 => xs[0],
            _ => {
                let (l, r) = xs.split_at(xs.len() / 2);
                let a = self.sum_all(l);
                let b = self.sum_all(r);
                self.add(a, b)
            }
        }
    }

    /// Balanced product; empty list gives 1.
    pub fn prod_all(&mut self, xs: &[GateId]) -> GateId {
        match xs.len() {
            0 => self.one(),
            1 => xs[0],
            _ => {
                let (l, r) = xs.split_at(xs.len() / 2);
                let a = self.prod_all(l);
                let b = self.prod_all(r);
                self.mul(a, b)
            }
        }
    }

    /// Constant-free integer: binary doubling from 1 (or -1).
    pub fn const_int(&mut self, v: &BigInt) -> GateId {
        if let Some(&g) = self.int_cache.get(v) {
            return g;
        }
        let g = if v.is_zero() {
            self.zero()
        } else if v.is_one() {
            self.one()
        } else if *v == BigInt::from(-1) {
            self.minus_one()
        } else if v.is_negative() {
            let p = self.const_int(&-v);
            self.neg(p)
        } else {
            // MSB-first: acc = 2*acc + bit
            let bits = v.bits();
            let one = self.one();
            let mut acc = one;
            for k in (0..bits - 1).rev() {
                acc = self.add(acc, acc);
                if v.bit(k) {
                    acc = self.add(acc, one);
                }
            }
            acc
        };
        self.int_cache.insert(v.clone(), g);
        g
    }

    pub fn const_i64(&mut self, v: i64) -> GateId {
        self.const_int(&BigInt::from(v))
    }

    /// Constant-free rational: integer numerator, then `cdiv` when needed.
    pub fn const_rational(&mut self, q: &BigRational) -> GateId {
        if q.is_integer() {
            return self.const_int(q.numer());
        }
        let n = self.const_int(q.numer());
        let d = self.const_int(q.denom());
        self.cdiv(n, d)
    }

    /// Inline `donor` with its variables wired per `wiring`. Gates are appended
    /// fresh so the donor occupies one contiguous range, recorded as an
    /// instance when `label` is given. Returns the donor's outputs.
    pub fn inline(&mut self, donor: &Circuit, wiring: &[Wire], label: Option<&str>) -> Result<Vec<GateId>> {
        if wiring.len() != donor.num_vars() {
            return Err(Error::Wiring(format!("donor has {} variables, wiring has {}", donor.num_vars(), wiring.len())));
        }
        for w in wiring {
            match *w {
                Wire::Var(v) if v.index() >= self.num_vars => {
                    return Err(Error::Wiring(format!("host variable x{} out of range", v.0 + 1)))
                }
                Wire::Gate(g) if g.index() >= self.gates.len() => {
                    return Err(Error::Wiring(format!("host gate g{} does not exist yet", g.0)))
                }
                _ => {}
            }
        }
        let start = self.gates.len();
        let mut map: Vec<GateId> = Vec::with_capacity(donor.gates().len());
        let map_var = |v: Var| -> Result<Var> {
            match wiring[v.index()] {
                Wire::Var(h) => Ok(h),
                Wire::Gate(_) => Err(Error::Wiring(format!("donor binds x{} which is wired to a gate", v.0 + 1))),
            }
        };
        for g in donor.gates() {
            let id = match g {
                Gate::Input(v) => match wiring[v.index()] {
                    Wire::Var(h) => self.push(Gate::Input(h)),
                    Wire::Gate(h) => h,
                },
                Gate::Proj { var, bit, child } => {
                    let h = map_var(*var)?;
                    self.push(Gate::Proj { var: h, bit: *bit, child: map[child.index()] })
                }
                Gate::Sum { var, child } => {
                    let h = map_var(*var)?;
                    self.push(Gate::Sum { var: h, child: map[child.index()] })
                }
                Gate::Prod { var, child } => {
                    let h = map_var(*var)?;
                    self.push(Gate::Prod { var: h, child: map[child.index()] })
                }
                g => self.push(g.map_children(|c| map[c.index()])),
            };
            map.push(id);
        }
        for ins in donor.instances() {
            self.instances.push(Instance {
                label: ins.label.clone(),
                gates: start + ins.gates.start..start + ins.gates.end,
            });
        }
        if let Some(l) = label {
            self.instances.push(Instance { label: l.to_string(), gates: start..self.gates.len() });
        }
        Ok(donor.outputs().iter().map(|o| map[o.index()]).collect())
    }

    pub fn record_instance(&mut self, label: &str, gates: Range<usize>) {
        self.instances.push(Instance { label: label.to_string(), gates });
    }

    pub fn finish(self, outputs: Vec<GateId>) -> Circuit {
        Circuit { num_vars: self.num_vars, gates: self.gates, outputs, instances: self.instances }
    }

    /// Start from an existing circuit (instances carried over).
    pub fn from_circuit(c: &Circuit) -> Self {
        let mut b = Builder::new(c.num_vars);
        b.gates = c.gates.clone();
        b.instances = c.instances.clone();
        b
    }
}

/// Replace gate `socket` of `host` by the output of `donor`.
///
/// Donor variables are wired to host variables or to host gates preceding the
/// socket. The result lists the donor as one instance labelled `label`.
pub fn splice(host: &Circuit, socket: GateId, donor: &Circuit, wiring: &[Wire], label: &str) -> Result<Circuit> {
    if donor.outputs().len() != 1 {
        return Err(Error::Wiring(format!("donor must have one output, has {}", donor.outputs().len())));
    }
    if socket.index() >= host.gates.len() {
        return Err(Error::Wiring(format!("socket g{} does not exist", socket.0)));
    }
    for w in wiring {
        if let Wire::Gate(g) = w {
            if g.index() >= socket.index() {
                return Err(Error::Wiring(format!("wired gate g{} does not precede socket g{}", g.0, socket.0)));
            }
        }
    }
    let mut b = Builder::new(host.num_vars);
    b.gates = host.gates[..socket.index()].to_vec();
    let out = b.inline(donor, wiring, Some(label))?[0];
    let shift = b.gates.len() as i64 - socket.index() as i64 - 1;
    let remap = |c: GateId| -> GateId {
        match c.index().cmp(&socket.index()) {
            std::cmp::Ordering::Less => c,
            std::cmp::Ordering::Equal => out,
            std::cmp::Ordering::Greater => GateId((c.index() as i64 + shift) as u32),
        }
    };
    for g in &host.gates[socket.index() + 1..] {
        b.gates.push(g.map_children(remap));
    }
    let mut instances: Vec<Instance> = host
        .instances
        .iter()
        .map(|ins| {
            let adj = |x: usize| if x > socket.index() { (x as i64 + shift) as usize } else { x };
            Instance { label: ins.label.clone(), gates: adj(ins.gates.start)..adj(ins.gates.end) }
        })
        .collect();
    instances.extend(b.instances.drain(..));
    let outputs = host.outputs.iter().map(|&o| remap(o)).collect();
    Ok(Circuit { num_vars: host.num_vars, gates: b.gates, outputs, instances })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adder() -> Circuit {
        let mut b = Builder::new(2);
        let x = b.var(0);
        let y = b.var(1);
        let s = b.add(x, y);
        b.finish(vec![s])
    }

    #[test]
    fn adder_is_valid_and_has_size_two() {
        let c = adder();
        assert!(c.validate().is_ok());
        assert_eq!(c.size(), 2);
        assert!(c.is_constant_free());
    }

    #[test]
    fn later_reference_is_order_violation() {
        let c = Circuit::from_parts(1, vec![Gate::Add(GateId(1), GateId(1)), Gate::Input(Var(0))], vec![GateId(0)]);
        let e = c.validate().unwrap_err();
        assert!(matches!(e, Error::InvalidCircuit { gate: 0, .. }));
    }

    #[test]
    fn cdiv_with_variable_child() {
        let c = Circuit::from_parts(1, vec![Gate::Input(Var(0)), Gate::One, Gate::ConstDiv(GateId(0), GateId(1))], vec![GateId(2)]);
        assert!(matches!(c.validate().unwrap_err(), Error::InvalidCircuit { gate: 2, .. }));
        let z = Circuit::from_parts(
            0,
            vec![Gate::One, Gate::MinusOne, Gate::Add(GateId(0), GateId(1)), Gate::ConstDiv(GateId(0), GateId(2))],
            vec![GateId(3)],
        );
        assert!(z.validate().is_err());
    }

    #[test]
    fn variable_out_of_range() {
        let c = Circuit::from_parts(1, vec![Gate::Input(Var(1))], vec![GateId(0)]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn literal_five_is_constant_free() {
        let mut b = Builder::new(0);
        let one = b.one();
        let mut acc = one;
        for _ in 0..4 {
            acc = b.add(acc, one);
        }
        let c = b.finish(vec![acc]);
        assert!(c.is_constant_free());
        let mut b = Builder::new(0);
        let k = b.general_const(BigRational::from_integer(5.into()));
        assert!(!b.finish(vec![k]).is_constant_free());
    }

    #[test]
    fn const_int_size_is_logarithmic() {
        let mut b = Builder::new(0);
        let g = b.const_int(&BigInt::from(1_000_000));
        let c = b.finish(vec![g]);
        assert!(c.size() <= 4 * 20);
    }
}
