//! Coefficient functions: streaming bit arithmetic, extraction from
//! projection circuits, and the reverse construction.

pub mod function;
pub mod qbf;
pub mod reverse;
pub mod split;
pub mod stream;

pub use stream::{
    bounded, read_int, stream_add, stream_list_sum, stream_mul, stream_nonneg_sum, stream_sub, BitOracle, IntOracle,
    Oracle, WorkspaceMeter,
};
pub use split::{is_monotone, monotone_split, MonotoneSplit};
pub use function::{coeff_fn_of_circuit, CoeffFunction, CoeffOptions};
pub use reverse::{circuit_from_coeff_fn, coeff_table_circuit};
pub use qbf::{arithmetize_qbf, random_qbf, Formula, Qbf, Quantifier};
