//! Exact multilinear algebra for tensor network states: contraction of
//! vertex tensors along a graph, Lie-algebra stabilizers, degenerations of
//! matrix multiplication, and dimension counts of the resulting sets.

pub mod degeneration;
pub mod error;
pub mod geometry;
pub mod json;
pub mod lie_stab;
pub mod matrix;
pub mod network;
pub mod scalar;
pub mod tensor;
pub mod zoo;

pub use error::{Error, Result};
pub use matrix::{random_matrix, Matrix};
pub use network::{NetworkGraph, TnsInstance};
pub use scalar::{Field, Scalar};
pub use tensor::{random_tensor, Tensor};
