//! Subcommand implementations.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use num_bigint::BigInt;
use num_rational::BigRational;

use vpspace_core::algebra::scalar::{is_prime_u64, Rationals};
use vpspace_core::algebra::{fmt_rational, parse_rational, PrimeField, Ring, SparsePoly};
use vpspace_core::annihilator::{annihilate, build_equation, AnnihilateOptions, ExplicitMap, Limits, VerifyMode};
use vpspace_core::circuit::{eval, expand, parse_circuit, print_circuit, Circuit};
use vpspace_core::coeff::{arithmetize_qbf, circuit_from_coeff_fn, coeff_fn_of_circuit, CoeffOptions, Qbf, WorkspaceMeter};
use vpspace_core::detc::{abp_path_sum, det_circuit, LayeredABP, MatrixEncoder};
use vpspace_core::gadgets::{build_check, build_eq, build_gt, build_inc, build_lt, build_mon, build_pow, build_universal};
use vpspace_core::{Error, ErrorClass};

use crate::config::{Ceilings, Cli, Command};

pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>().map(Error::class) {
            Some(ErrorClass::Verification) => 1,
            Some(ErrorClass::Resource) => 3,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn verification(msg: impl Into<String>) -> Failure {
    Error::Verification(msg.into()).into()
}

type Res = std::result::Result<(), Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_circuit(path: &Path) -> anyhow::Result<Circuit> {
    let text = read(path)?;
    let c = parse_circuit(&text).with_context(|| format!("in {}", path.display()))?;
    c.validate().with_context(|| format!("in {}", path.display()))?;
    Ok(c)
}

fn write_out(path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_point(s: &str) -> anyhow::Result<Vec<BigRational>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_rational(t).ok_or_else(|| anyhow!(Error::Params(format!("bad point value `{t}`")))))
        .collect()
}

fn field(p: u64) -> anyhow::Result<PrimeField> {
    if !is_prime_u64(p) {
        return Err(Error::Params(format!("{p} is not prime")).into());
    }
    Ok(PrimeField::new(p))
}

fn reduce(f: &PrimeField, pt: &[BigRational]) -> anyhow::Result<Vec<u64>> {
    pt.iter()
        .map(|q| f.from_rational(q).ok_or_else(|| anyhow!(Error::Params(format!("{q} has no value mod {}", f.p)))))
        .collect()
}

fn limits(c: &Ceilings) -> anyhow::Result<Limits> {
    if c.max_rows == 0 || c.max_columns == 0 || c.max_terms == 0 {
        return Err(Error::Params("resource ceilings must be positive".into()).into());
    }
    Ok(Limits { max_rows: c.max_rows, max_columns: c.max_columns, max_terms: c.max_terms })
}

pub fn run(cli: Cli) -> Res {
    match cli.command {
        Command::Annihilate {
            map,
            big_d,
            multilinear,
            verify,
            seed,
            no_circuit,
            out_poly,
            out_circuit,
            report,
            timings,
            ceilings,
        } => {
            let start = Instant::now();
            let m = ExplicitMap::parse(&read(&map)?).with_context(|| format!("in {}", map.display()))?;
            let opts = AnnihilateOptions {
                big_d,
                multilinear,
                verify: verify.parse::<VerifyMode>()?,
                build_circuit: !no_circuit || out_circuit.is_some(),
                seed,
                limits: limits(&ceilings)?,
                ..AnnihilateOptions::default()
            };
            let mut res = annihilate(&m, &opts)?;
            write_out(out_poly.as_ref(), &res.a.to_text())?;
            if let (Some(p), Some(c)) = (&out_circuit, &res.circuit) {
                write_out(Some(p), &print_circuit(c))?;
            }
            if timings {
                res.report.set("time_ms", start.elapsed().as_millis());
            }
            if let Some(r) = &report {
                write_out(Some(r), &res.report.to_text())?;
            }
            eprintln!("K={} D={} alpha={}", res.params.k, res.params.big_d, res.params.alpha);
            Ok(())
        }
        Command::DetCompile { matrix, n, out } => {
            let c = read_circuit(&matrix)?;
            let w = vpspace_core::detc::encoder::index_width(n);
            let nx = c
                .num_vars()
                .checked_sub(2 * w)
                .ok_or_else(|| anyhow!(Error::Params(format!("encoder for N={n} needs at least {} variables", 2 * w))))?;
            let enc = MatrixEncoder::new(c, nx, n)?;
            let d = det_circuit(&enc)?;
            write_out(out.as_ref(), &print_circuit(&d))?;
            eprintln!("size={} vars={}", d.size(), d.num_vars());
            Ok(())
        }
        Command::Eval { circuit, point, prime } => {
            let c = read_circuit(&circuit)?;
            let pt = parse_point(&point)?;
            let vals: Vec<String> = match prime {
                Some(p) => {
                    let f = field(p)?;
                    eval(&c, &f, &reduce(&f, &pt)?)?.iter().map(u64::to_string).collect()
                }
                None => eval(&c, &Rationals, &pt)?.iter().map(fmt_rational).collect(),
            };
            for v in vals {
                println!("{v}");
            }
            Ok(())
        }
        Command::Expand { circuit, output, max_terms, out } => {
            let c = read_circuit(&circuit)?;
            if output >= c.outputs().len() {
                return Err(Error::Params(format!("circuit has {} outputs", c.outputs().len())).into());
            }
            let c = c.sub_circuit(c.outputs()[output]);
            let p = expand(&c, max_terms)?.remove(0);
            write_out(out.as_ref(), &p.to_text())?;
            Ok(())
        }
        Command::Coeff { circuit, exponent, bit, strict } => {
            let c = read_circuit(&circuit)?;
            let e: Vec<u32> = exponent
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| anyhow!(Error::Params(format!("bad exponent `{t}`")))))
                .collect::<anyhow::Result<_>>()?;
            let cf = coeff_fn_of_circuit(&c, CoeffOptions { strict })?;
            match bit {
                Some(i) => {
                    let mut m = WorkspaceMeter::new();
                    println!("{}", cf.bit(&e, i, &mut m)? as u8);
                    eprintln!("b={} magnitude_bits={} workspace_peak={}", cf.b(), cf.magnitude_bits(), m.peak());
                }
                None => println!("{}", cf.coefficient(&e)?),
            }
            Ok(())
        }
        Command::FromCoeff { cf_circuit, n, dbits, cbits, max_degree, out } => {
            let cf = read_circuit(&cf_circuit)?;
            let c = circuit_from_coeff_fn(&cf, n, dbits, cbits, max_degree)?;
            write_out(out.as_ref(), &print_circuit(&c))?;
            Ok(())
        }
        Command::Qbf { formula, out, check } => {
            let q = Qbf::parse(&read(&formula)?).with_context(|| format!("in {}", formula.display()))?;
            let c = arithmetize_qbf(&q);
            if check {
                check_qbf(&q, &c)?;
                eprintln!("check=pass");
            }
            write_out(out.as_ref(), &print_circuit(&c))?;
            Ok(())
        }
        Command::Gadget { kind, params, out } => {
            let c = gadget(&kind, &params)?;
            write_out(out.as_ref(), &print_circuit(&c))?;
            Ok(())
        }
        Command::Equation { n, d, s, r, seed, out_poly, report, timings } => {
            let start = Instant::now();
            let eq = build_equation(n, d, s, r, seed, &AnnihilateOptions { seed, ..AnnihilateOptions::default() })?;
            write_out(out_poly.as_ref(), &eq.a.to_text())?;
            let mut rep = eq.result.report.clone();
            rep.set("grid_size", eq.grid.len());
            rep.set("free_params", eq.free.len());
            if timings {
                rep.set("time_ms", start.elapsed().as_millis());
            }
            if let Some(p) = &report {
                write_out(Some(p), &rep.to_text())?;
            }
            Ok(())
        }
        Command::AbpEval { abp, point, prime } => {
            let a = LayeredABP::parse(&read(&abp)?).with_context(|| format!("in {}", abp.display()))?;
            let mut pt = parse_point(&point)?;
            if pt.len() > a.nvars {
                return Err(Error::ArityMismatch { expected: a.nvars, got: pt.len() }.into());
            }
            pt.resize(a.nvars, BigRational::from_integer(BigInt::from(0)));
            let v = match prime {
                Some(p) => {
                    let f = field(p)?;
                    abp_path_sum(&a, &f, &reduce(&f, &pt)?)?.to_string()
                }
                None => fmt_rational(&abp_path_sum(&a, &Rationals, &pt)?),
            };
            println!("{v}");
            Ok(())
        }
        Command::Selftest => selftest(),
    }
}

fn check_qbf(q: &Qbf, c: &Circuit) -> Res {
    let free = q.free_vars();
    if free.len() > 20 {
        return Err(Error::ResourceCap(format!("{} free variables", free.len())).into());
    }
    for mask in 0u64..1 << free.len() {
        let mut a = vec![false; q.num_vars];
        let mut pt = vec![Rationals.zero(); q.num_vars];
        for (k, &v) in free.iter().enumerate() {
            a[v] = mask >> k & 1 == 1;
            pt[v] = Rationals.from_i64(a[v] as i64);
        }
        let got = eval(c, &Rationals, &pt)?.remove(0);
        if got != Rationals.from_i64(q.eval(&a)? as i64) {
            return Err(verification(format!("arithmetization disagrees with the formula at {a:?}")));
        }
    }
    Ok(())
}

fn gadget(kind: &str, params: &str) -> anyhow::Result<Circuit> {
    let mut kv = std::collections::BTreeMap::new();
    for item in params.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| anyhow!(Error::Params(format!("expected key=value, got `{item}`"))))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| -> anyhow::Result<u64> {
        let v = kv.get(k).ok_or_else(|| anyhow!(Error::Params(format!("gadget `{kind}` needs parameter `{k}`"))))?;
        v.parse::<u64>().map_err(|_| anyhow!(Error::Params(format!("bad value `{v}` for `{k}`"))))
    };
    let positive = |k: &str| -> anyhow::Result<usize> {
        match get(k)? {
            0 => Err(Error::Params(format!("`{k}` must be positive")).into()),
            v => Ok(v as usize),
        }
    };
    Ok(match kind {
        "eq" => build_eq(positive("width")?),
        "gt" => build_gt(positive("width")?),
        "lt" => build_lt(positive("width")?),
        "inc" => build_inc(positive("width")?),
        "mon" => build_mon(positive("n")?, positive("delta")?),
        "check" => build_check(positive("n")?, positive("delta")?, get("d")?),
        "pow" => build_pow(positive("L")?, &BigInt::from(get("alpha")?), get("delta")?, positive("m")?),
        "universal" => build_universal(positive("n")?, positive("d")?, positive("s")?).circuit,
        other => return Err(Error::Params(format!("unknown gadget kind `{other}` (eq|gt|lt|inc|mon|check|pow|universal)")).into()),
    })
}

fn selftest() -> Res {
    let checks: Vec<(&str, fn() -> anyhow::Result<bool>)> = vec![
        ("poly_text_round_trip", || {
            let t = "vars 2\n1 : 2 0\n-1/2 : 0 1\n3 : 0 0\n";
            let p = SparsePoly::parse(t)?;
            Ok(SparsePoly::parse(&p.to_text())? == p)
        }),
        ("annihilate_z_z2", || {
            let z = SparsePoly::var(1, 0);
            let map = ExplicitMap::from_components(1, &[z.clone(), z.pow(2)])?;
            let res = annihilate(&map, &AnnihilateOptions::default())?;
            let want = SparsePoly::parse("vars 2\n1 : 2 0\n-1 : 0 1\n")?;
            Ok(res.a.proportional_to(&want))
        }),
        ("det_2x2", || {
            let enc = vpspace_core::detc::encode_int_matrix(&[vec![1, 2], vec![3, 4]])?;
            let c = det_circuit(&enc)?;
            Ok(eval(&c, &Rationals, &[])?[0] == Rationals.from_i64(-2))
        }),
        ("coeff_of_negated_variable", || {
            let c = parse_circuit("vars 1\ng0 = input x1\ng1 = minusone\ng2 = mul g1 g0\noutputs g2\n")?;
            let cf = coeff_fn_of_circuit(&c, CoeffOptions::default())?;
            Ok(cf.bit(&[1], 0, &mut WorkspaceMeter::new())?)
        }),
        ("qbf_tautology", || {
            let q = Qbf::parse("vars 1\nforall x1\nmatrix or x1 not x1\n")?;
            Ok(eval(&arithmetize_qbf(&q), &Rationals, &[Rationals.zero()])?[0] == Rationals.one())
        }),
    ];
    let mut failed = 0;
    for (name, f) in checks {
        let ok = matches!(f(), Ok(true));
        println!("{name}: {}", if ok { "pass" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        return Err(verification(format!("{failed} self-test checks failed")));
    }
    Ok(())
}
