//! Line-oriented circuit text format.

use std::fmt::Write;

use super::ir::{Circuit, Gate, GateId, Var};
use crate::algebra::{fmt_rational, parse_rational};
use crate::error::{Error, Result};

pub fn print_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    writeln!(s, "vars {}", c.num_vars()).unwrap();
    for (i, g) in c.gates().iter().enumerate() {
        write!(s, "g{i} = ").unwrap();
        match g {
            Gate::Input(v) => write!(s, "input x{}", v.0 + 1),
            Gate::One => write!(s, "one"),
            Gate::MinusOne => write!(s, "minusone"),
            Gate::Const(q) => write!(s, "const {}", fmt_rational(q)),
            Gate::ConstDiv(a, b) => write!(s, "cdiv g{} g{}", a.0, b.0),
            Gate::Add(a, b) => write!(s, "add g{} g{}", a.0, b.0),
            Gate::Mul(a, b) => write!(s, "mul g{} g{}", a.0, b.0),
            Gate::Proj { var, bit, child } => write!(s, "proj x{} {} g{}", var.0 + 1, *bit as u8, child.0),
            Gate::Sum { var, child } => write!(s, "sum x{} g{}", var.0 + 1, child.0),
            Gate::Prod { var, child } => write!(s, "prod x{} g{}", var.0 + 1, child.0),
        }
        .unwrap();
        s.push('\n');
    }
    s.push_str("outputs");
    for o in c.outputs() {
        write!(s, " g{}", o.0).unwrap();
    }
    s.push('\n');
    s
}

fn parse_gate_ref(tok: Option<&str>, line: usize) -> Result<GateId> {
    let t = tok.ok_or_else(|| Error::parse(line, "missing gate reference"))?;
    t.strip_prefix('g')
        .and_then(|n| n.parse::<u32>().ok())
        .map(GateId)
        .ok_or_else(|| Error::parse(line, format!("bad gate reference `{t}`")))
}

fn parse_var(tok: Option<&str>, line: usize) -> Result<Var> {
    let t = tok.ok_or_else(|| Error::parse(line, "missing variable"))?;
    match t.strip_prefix('x').and_then(|n| n.parse::<u32>().ok()) {
        Some(k) if k >= 1 => Ok(Var(k - 1)),
        _ => Err(Error::parse(line, format!("bad variable `{t}` (variables are x1, x2, ...)"))),
    }
}

/// Parse a circuit; the result is validated. `line_offset` shifts reported
/// line numbers when the circuit is embedded in a larger file.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    parse_circuit_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)))
}

pub(crate) fn parse_circuit_lines<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Circuit> {
    let mut lines = lines.map(|(n, l)| (n, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `vars n` header"))?;
    let nvars: usize = header
        .strip_prefix("vars")
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| Error::parse(ln, "expected `vars n`"))?;
    let mut gates = Vec::new();
    let mut outputs = None;
    let mut last_line = ln;
    for (ln, line) in lines {
        last_line = ln;
        if outputs.is_some() {
            return Err(Error::parse(ln, "content after `outputs` line"));
        }
        if let Some(rest) = line.strip_prefix("outputs") {
            let mut outs = Vec::new();
            for t in rest.split_whitespace() {
                let g = parse_gate_ref(Some(t), ln)?;
                if g.index() >= gates.len() {
                    return Err(Error::parse(ln, format!("output g{} does not exist", g.0)));
                }
                outs.push(g);
            }
            outputs = Some(outs);
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| Error::parse(ln, "expected `g<i> = <gate>`"))?;
        let id = parse_gate_ref(Some(lhs.trim()), ln)?;
        if id.index() != gates.len() {
            return Err(Error::parse(ln, format!("expected g{}, found g{}", gates.len(), id.0)));
        }
        let mut toks = rhs.split_whitespace();
        let op = toks.next().ok_or_else(|| Error::parse(ln, "missing gate kind"))?;
        let gate = match op {
            "input" => Gate::Input(parse_var(toks.next(), ln)?),
            "one" => Gate::One,
            "minusone" => Gate::MinusOne,
            "const" => {
                let t = toks.next().ok_or_else(|| Error::parse(ln, "missing constant"))?;
                Gate::Const(parse_rational(t).ok_or_else(|| Error::parse(ln, format!("bad constant `{t}`")))?)
            }
            "cdiv" | "add" | "mul" => {
                let a = parse_gate_ref(toks.next(), ln)?;
                let b = parse_gate_ref(toks.next(), ln)?;
                match op {
                    "cdiv" => Gate::ConstDiv(a, b),
                    "add" => Gate::Add(a, b),
                    _ => Gate::Mul(a, b),
                }
            }
            "proj" => {
                let var = parse_var(toks.next(), ln)?;
                let bit = match toks.next() {
                    Some("0") => false,
                    Some("1") => true,
                    other => return Err(Error::parse(ln, format!("projection bit must be 0 or 1, found {other:?}"))),
                };
                let child = parse_gate_ref(toks.next(), ln)?;
                Gate::Proj { var, bit, child }
            }
            "sum" | "prod" => {
                let var = parse_var(toks.next(), ln)?;
                let child = parse_gate_ref(toks.next(), ln)?;
                if op == "sum" {
                    Gate::Sum { var, child }
                } else {
                    Gate::Prod { var, child }
                }
            }
            other => return Err(Error::parse(ln, format!("unknown gate kind `{other}`"))),
        };
        if let Some(extra) = toks.next() {
            return Err(Error::parse(ln, format!("unexpected token `{extra}`")));
        }
        for ch in gate.children() {
            if ch.index() >= gates.len() {
                return Err(Error::parse(ln, format!("g{} references g{} which is not defined before it", id.0, ch.0)));
            }
        }
        let var = match &gate {
            Gate::Input(v) => Some(*v),
            g => g.binder(),
        };
        if let Some(v) = var {
            if v.index() >= nvars {
                return Err(Error::parse(ln, format!("variable x{} exceeds `vars {nvars}`", v.0 + 1)));
            }
        }
        gates.push(gate);
    }
    let outputs = outputs.ok_or_else(|| Error::parse(last_line, "missing `outputs` line"))?;
    let c = Circuit::from_parts(nvars, gates, outputs);
    c.validate().map_err(|e| match e {
        Error::InvalidCircuit { gate, msg } => Error::parse(0, format!("g{gate}: {msg}")),
        e => e,
    })?;
    Ok(c)
}
