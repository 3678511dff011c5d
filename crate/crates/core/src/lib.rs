//! Exact computer algebra for annihilators of explicit polynomial maps,
//! determinant compilation into circuits with projection gates, and
//! coefficient functions of such circuits.

pub mod algebra;
pub mod annihilator;
pub mod circuit;
pub mod coeff;
pub mod corpus;
pub mod detc;
pub mod error;
pub mod gadgets;

pub use error::{Error, ErrorClass, Result};
