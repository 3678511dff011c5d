//! Determinant compilation: matrix encoder, MV ABP, repeated squaring.

pub mod abp;
pub mod compile;
pub mod encoder;
pub mod explicit;

pub use abp::{abp_path_sum, calibrate_mv_sign, mv_abp, LayeredABP, Vertex};
pub use compile::{compile_to_projection_circuit, det_circuit, squaring_chain, Layout};
pub use encoder::{encode_int_matrix, encode_matrix, identity_encoder, symbolic_matrix, MatrixEncoder};
pub use explicit::{encode_mv_abp, pad_to_power_of_two, ExplicitABP};
