//! Annihilators of explicit polynomial maps, as polynomials and as
//! determinants of explicit matrices.

pub mod alpha;
pub mod equation;
pub mod map;
pub mod mtilde;
pub mod params;
pub mod pipeline;
pub mod product;

pub use alpha::{find_alpha, find_alpha_exact, rank_extractor};
pub use equation::{build_equation, grid, Equation};
pub use map::ExplicitMap;
pub use mtilde::{annihilator_direct, build_mtilde, encode_mtilde, Mtilde};
pub use params::{degree_bound, AnnihilatorParams, Limits};
pub use pipeline::{annihilate, annihilates, AnnihilateOptions, Annihilation, Report, VerifyMode};
pub use product::{build_product_matrix, first_dependency, first_dependency_of_matrix, in_product_nullspace, DependencyCertificate};
