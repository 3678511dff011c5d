//! Circuits with projection gates: IR, text format, evaluation, passes.

pub mod eval;
pub mod ir;
pub mod passes;
pub mod text;

pub use eval::{eval, eval_env, expand, EvalLimits};
pub use ir::{splice, Builder, Circuit, Gate, GateId, Instance, Var, Wire};
pub use text::{parse_circuit, print_circuit};
