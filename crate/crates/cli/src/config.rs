//! Command-line configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Annihilators of explicit polynomial maps, determinant compilation and
/// circuits with projection gates.
///
/// Exit codes: 0 success, 1 verification failure, 2 input or format error,
/// 3 resource ceiling exceeded.
#[derive(Parser, Debug)]
#[command(name = "vpspace", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Resource ceilings; each can also be set from the environment.
#[derive(Args, Debug, Clone)]
pub struct Ceilings {
    /// Maximum rows of the product matrix (Delta^m).
    #[arg(long, env = "VPSPACE_MAX_ROWS", default_value_t = 1_000_000)]
    pub max_rows: u64,
    /// Maximum columns scanned for the first dependency.
    #[arg(long, env = "VPSPACE_MAX_COLUMNS", default_value_t = 1_000_000)]
    pub max_columns: usize,
    /// Maximum terms of any intermediate polynomial.
    #[arg(long, env = "VPSPACE_MAX_TERMS", default_value_t = 1_000_000)]
    pub max_terms: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Annihilator of an explicit map, as a polynomial and a projection circuit.
    Annihilate {
        /// Map file: circuit for C_G(z, y) followed by `assign i : v..` lines.
        #[arg(long)]
        map: PathBuf,
        /// Override the degree bound D.
        #[arg(long = "D")]
        big_d: Option<u32>,
        /// Use all outputs with D = 2 (multilinear annihilator).
        #[arg(long)]
        multilinear: bool,
        /// Verification of A(G) = 0: symbolic, random or both.
        #[arg(long, default_value = "both")]
        verify: String,
        /// Seed for random verification points.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Skip building the determinant circuit C_A.
        #[arg(long)]
        no_circuit: bool,
        /// Output polynomial file (standard output when absent).
        #[arg(long)]
        out_poly: Option<PathBuf>,
        /// Output file for C_A.
        #[arg(long)]
        out_circuit: Option<PathBuf>,
        /// Report file (key=value lines).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Add wall-clock timings to the report.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        ceilings: Ceilings,
    },
    /// Compile a matrix encoder into a projection circuit for the determinant.
    DetCompile {
        /// Encoder circuit C(x, row bits, col bits) = M[row, col].
        #[arg(long)]
        matrix: PathBuf,
        /// Matrix dimension N.
        #[arg(long)]
        n: usize,
        /// Output circuit file (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a circuit at a point.
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        /// Comma-separated values (integers or a/b) for x1, x2, ...
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        point: String,
        /// Evaluate modulo this prime instead of over the rationals.
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Expand a circuit output into a sparse polynomial.
    Expand {
        #[arg(long)]
        circuit: PathBuf,
        /// Output index.
        #[arg(long, default_value_t = 0)]
        output: usize,
        /// Abort when an intermediate polynomial exceeds this many terms.
        #[arg(long, env = "VPSPACE_MAX_TERMS", default_value_t = 1_000_000)]
        max_terms: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Query the coefficient function of a circuit.
    Coeff {
        #[arg(long)]
        circuit: PathBuf,
        /// Exponent vector e1,...,en over all circuit variables.
        #[arg(long)]
        exponent: String,
        /// Bit index (0 = sign, 1 = most significant); prints the whole
        /// coefficient when absent.
        #[arg(long)]
        bit: Option<usize>,
        /// Recompute on every query instead of caching (reports workspace).
        #[arg(long)]
        strict: bool,
    },
    /// Build a projection circuit from a coefficient-function circuit.
    FromCoeff {
        /// Circuit CF(y, i) over n*dbits exponent bits then cbits index bits.
        #[arg(long)]
        cf_circuit: PathBuf,
        #[arg(long)]
        n: usize,
        /// Bits per exponent coordinate.
        #[arg(long)]
        dbits: usize,
        /// Bits of the coefficient bit index.
        #[arg(long)]
        cbits: usize,
        /// Mask out exponents above this total degree.
        #[arg(long)]
        max_degree: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Arithmetize a quantified boolean formula.
    Qbf {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Compare with brute-force evaluation on all free assignments.
        #[arg(long)]
        check: bool,
    },
    /// Emit a gadget circuit.
    Gadget {
        /// eq | gt | lt | inc | mon | check | pow | universal
        #[arg(long)]
        kind: String,
        /// Comma-separated key=value parameters, e.g. `width=3` or `n=2,d=2,s=3`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Multilinear equation for evaluation vectors of a universal template.
    Equation {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: u32,
        /// Template size.
        #[arg(long, default_value_t = 3)]
        s: usize,
        /// Free parameters.
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_poly: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate a layered ABP (sum over source-sink paths).
    AbpEval {
        #[arg(long)]
        abp: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        point: String,
        #[arg(long)]
        prime: Option<u64>,
    },
    /// Run the built-in example checks.
    Selftest,
}
