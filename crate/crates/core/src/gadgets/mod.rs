//! Constant-free gadget circuits.

pub mod bits;
pub mod mon;
pub mod pow;
pub mod universal;

pub use bits::{build_eq, build_gt, build_inc, build_lt, Bit};
pub use mon::{build_check, build_mon};
pub use pow::build_pow;
pub use universal::{build_universal, Slot, Universal};
