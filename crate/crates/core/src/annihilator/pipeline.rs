//! End-to-end annihilator: G -> A and a projection circuit C_A for det(M~).

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::alpha::find_alpha;
use super::map::ExplicitMap;
use super::mtilde::{annihilator_direct, build_mtilde, encode_mtilde};
use super::params::{checked_pow, degree_bound, dimension_count_ok, AnnihilatorParams, Limits};
use super::product::{first_dependency, DependencyCertificate};
use crate::algebra::scalar::{fmt_rational, DEFAULT_PRIME};
use crate::algebra::{PrimeField, Ring, SparsePoly};
use crate::circuit::passes::relabel_vars;
use crate::circuit::{eval, Circuit};
use crate::detc::compile::det_circuit;
use crate::detc::encoder::index_width;
use crate::error::{Error, Result};
use crate::gadgets::bits::bit_width;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Symbolic,
    Random,
    Both,
}

impl std::str::FromStr for VerifyMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symbolic" => Ok(VerifyMode::Symbolic),
            "random" => Ok(VerifyMode::Random),
            "both" => Ok(VerifyMode::Both),
            _ => Err(Error::Params(format!("unknown verify mode `{s}` (symbolic|random|both)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AnnihilateOptions {
    /// Override for D (default: the degree-bound formula, or 2 when multilinear).
    pub big_d: Option<u32>,
    pub multilinear: bool,
    pub verify: VerifyMode,
    /// Largest K for which det(M~) is expanded minor by minor.
    pub direct_max_k: usize,
    pub build_circuit: bool,
    /// Largest K for which C_A is evaluated against A.
    pub circuit_check_max_k: usize,
    pub seed: u64,
    pub limits: Limits,
}

impl Default for AnnihilateOptions {
    fn default() -> Self {
        AnnihilateOptions {
            big_d: None,
            multilinear: false,
            verify: VerifyMode::Both,
            direct_max_k: 12,
            build_circuit: true,
            circuit_check_max_k: 9,
            seed: 1,
            limits: Limits::default(),
        }
    }
}

/// Flat key=value report; keys keep insertion order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub entries: Vec<(String, String)>,
}

impl Report {
    pub fn set(&mut self, k: &str, v: impl ToString) {
        let v = v.to_string();
        match self.entries.iter_mut().find(|(key, _)| key == k) {
            Some(e) => e.1 = v,
            None => self.entries.push((k.to_string(), v)),
        }
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.entries.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            writeln!(s, "{k}={v}").unwrap();
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct Annihilation {
    /// Annihilator over all n outputs' variables.
    pub a: SparsePoly,
    pub circuit: Option<Circuit>,
    pub params: AnnihilatorParams,
    pub cert: DependencyCertificate,
    pub report: Report,
}

pub fn annihilate(map: &ExplicitMap, opts: &AnnihilateOptions) -> Result<Annihilation> {
    let all = map.components()?;
    let m = map.m;
    let n = all.len();
    if n <= m {
        return Err(Error::Params(format!("need more outputs than inputs (n = {n}, m = {m})")));
    }
    let d = map.degree()?;
    let used = if opts.multilinear { n } else { n.min(2 * m) };
    let comps = &all[..used];
    let (big_d, delta) = if opts.multilinear {
        let big_d = opts.big_d.unwrap_or(2);
        if big_d != 2 {
            return Err(Error::Params("multilinear mode fixes D = 2".into()));
        }
        (big_d, used as u64 * d as u64 + 1)
    } else {
        let big_d = match opts.big_d {
            Some(x) if x >= 2 => x,
            Some(x) => return Err(Error::Params(format!("D must be at least 2, got {x}"))),
            None => degree_bound(m, used, d)?,
        };
        (big_d, used as u64 * d as u64 * big_d as u64)
    };
    let r = checked_pow(delta, m).filter(|r| *r <= opts.limits.max_rows).ok_or_else(|| {
        Error::ResourceCap(format!("Delta^m = {delta}^{m} exceeds the row cap {}", opts.limits.max_rows))
    })?;
    let count_ok = if opts.multilinear {
        checked_pow(2, used).is_none_or(|cols| r < cols)
    } else {
        dimension_count_ok(m, used, d, big_d)
    };
    if !count_ok {
        return Err(Error::Params(format!("dimension count fails: Delta^m = {r} is not below D^n for D = {big_d}")));
    }

    let dep = first_dependency(comps, big_d, &opts.limits)?;
    let cert = dep.cert;
    let k = cert.k;
    let alpha_bound = r.saturating_mul((k as u64).saturating_sub(1)).max(1);
    let alpha = find_alpha(comps, &cert, delta, alpha_bound)?;
    let max_exp = cert.labels.iter().map(|e| e.individual_degree()).max().unwrap_or(0);
    let params = AnnihilatorParams {
        m,
        n: used,
        d,
        big_d,
        delta,
        small_delta: bit_width(max_exp as u64).max(1),
        big_l: index_width(k),
        alpha,
        k,
        r,
        columns: cert.labels.clone(),
    };

    let mut report = Report::default();
    report.set("m", m);
    report.set("n", n);
    report.set("n_used", used);
    report.set("d", d);
    report.set("multilinear", opts.multilinear);
    report.set("D", big_d);
    report.set("Delta", delta);
    report.set("R", r);
    report.set("K", k);
    report.set("alpha", alpha);
    report.set("L", params.big_l);
    report.set("delta_bits", params.small_delta);

    let cert_poly = cert.polynomial().primitive_integer();
    let (a_used, form, lead) = if k <= opts.direct_max_k {
        let mt = build_mtilde(comps, &params)?;
        let (a, lead) = annihilator_direct(&mt)?;
        if !a.proportional_to(&cert_poly) {
            return Err(Error::Verification("det(M~) is not proportional to the certificate polynomial".into()));
        }
        (a, "direct", Some(lead))
    } else {
        (cert_poly, "certificate", None)
    };
    report.set("a_form", form);
    if let Some(l) = &lead {
        report.set("minor_det", fmt_rational(l));
    }
    verify_annihilator(&a_used, comps, big_d, opts, &mut report)?;
    let a = a_used.with_nvars(n)?;
    report.set("a_terms", a.num_terms());
    report.set("a_total_degree", a.total_degree().unwrap_or(0));
    report.set("a_individual_degree", a.individual_degree());
    report.set("a_coeff_bits", a.max_coeff_bits());

    let circuit = if opts.build_circuit {
        let trunc = map.truncate(used);
        let enc = encode_mtilde(&trunc, &params)?;
        report.set("size_mtilde", enc.circuit.size());
        report.set("c_g_instances", enc.circuit.count_instances("C_G"));
        let c = det_circuit(&enc)?;
        // x first, then the internal variables shifted past all n outputs
        let perm: Vec<usize> = (0..c.num_vars()).map(|v| if v < used { v } else { v + n - used }).collect();
        let c = relabel_vars(&c, &perm, c.num_vars() + n - used)?;
        report.set("size_c_a", c.size());
        if k <= opts.circuit_check_max_k {
            check_circuit(&c, &a, lead.is_some(), opts.seed)?;
            report.set("c_a_check", "pass");
        } else {
            report.set("c_a_check", "skipped");
        }
        Some(c)
    } else {
        None
    };
    Ok(Annihilation { a, circuit, params, cert, report })
}

fn verify_annihilator(a: &SparsePoly, comps: &[SparsePoly], big_d: u32, opts: &AnnihilateOptions, report: &mut Report) -> Result<()> {
    if a.is_zero() {
        return Err(Error::Verification("annihilator is zero".into()));
    }
    if a.individual_degree() > big_d - 1 {
        return Err(Error::Verification(format!("individual degree {} exceeds D - 1 = {}", a.individual_degree(), big_d - 1)));
    }
    if matches!(opts.verify, VerifyMode::Symbolic | VerifyMode::Both) {
        if !a.compose(comps)?.is_zero() {
            return Err(Error::Verification("A o G is not identically zero".into()));
        }
        report.set("verify_symbolic", "pass");
    }
    if matches!(opts.verify, VerifyMode::Random | VerifyMode::Both) {
        let f = PrimeField { p: DEFAULT_PRIME };
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let m = comps.first().map_or(0, |g| g.nvars());
        for _ in 0..20 {
            let z: Vec<u64> = (0..m).map(|_| rng.gen_range(0..f.p)).collect();
            let g: Vec<u64> = comps.iter().map(|c| c.eval(&f, &z)).collect::<Result<_>>()?;
            if !f.is_zero(&a.eval(&f, &g)?) {
                return Err(Error::Verification("A(G(z)) is nonzero at a random point".into()));
            }
        }
        report.set("verify_random", "pass");
    }
    Ok(())
}

// C_A equals det(M~): equal to A in the direct form, proportional otherwise.
fn check_circuit(c: &Circuit, a: &SparsePoly, exact: bool, seed: u64) -> Result<()> {
    let f = PrimeField { p: DEFAULT_PRIME };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut ratio: Option<u64> = None;
    for _ in 0..3 {
        let x: Vec<u64> = (0..a.nvars()).map(|_| rng.gen_range(0..f.p)).collect();
        let got = eval(c, &f, &x)?[0];
        let want = a.eval(&f, &x)?;
        if exact {
            if got != want {
                return Err(Error::Verification("C_A disagrees with det(M~) at a random point".into()));
            }
        } else if want != 0 {
            let q = f.div(&got, &want).expect("nonzero");
            if *ratio.get_or_insert(q) != q || q == 0 {
                return Err(Error::Verification("C_A is not proportional to A at random points".into()));
            }
        }
    }
    Ok(())
}

/// A != 0 and A o G = 0 exactly.
pub fn annihilates(a: &SparsePoly, comps: &[SparsePoly]) -> Result<bool> {
    Ok(!a.is_zero() && a.compose(comps)?.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(k: u32) -> SparsePoly {
        SparsePoly::var(1, 0).pow(k)
    }

    #[test]
    fn identical_components() {
        let map = ExplicitMap::from_components(1, &[z(1), z(1)]).unwrap();
        let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
        assert!(res.a.proportional_to(&SparsePoly::parse("vars 2\n1 : 1 0\n-1 : 0 1\n").unwrap()));
        assert_eq!(res.report.get("c_a_check"), Some("pass"));
    }

    #[test]
    fn zero_component() {
        let map = ExplicitMap::from_components(1, &[z(1), SparsePoly::zero(1)]).unwrap();
        let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
        assert!(res.a.proportional_to(&SparsePoly::var(2, 1)));
    }

    #[test]
    fn truncation_pads_back() {
        let map = ExplicitMap::from_components(1, &[z(1), z(1), z(1), z(1)]).unwrap();
        let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
        assert_eq!(res.a.nvars(), 4);
        assert_eq!(res.a.degree_in(2) + res.a.degree_in(3), 0);
        assert!(annihilates(&res.a, &map.components().unwrap()).unwrap());
        let c = res.circuit.unwrap();
        let f = PrimeField { p: DEFAULT_PRIME };
        let x = [3u64, 5, 7, 11];
        assert_eq!(eval(&c, &f, &x).unwrap()[0], res.a.eval(&f, &x).unwrap());
    }

    #[test]
    fn square_map_circuit_proportional() {
        let map = ExplicitMap::from_components(1, &[z(1), z(2)]).unwrap();
        let res = annihilate(&map, &AnnihilateOptions::default()).unwrap();
        assert!(res.a.proportional_to(&SparsePoly::parse("vars 2\n1 : 2 0\n-1 : 0 1\n").unwrap()));
        assert!(res.params.big_d - 1 <= 3 * 1 * 2);
        let c = res.circuit.unwrap();
        let f = PrimeField { p: DEFAULT_PRIME };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let x: Vec<u64> = (0..2).map(|_| rng.gen_range(0..f.p)).collect();
            assert_eq!(eval(&c, &f, &x).unwrap()[0], res.a.eval(&f, &x).unwrap());
        }
    }
}
