//! Exact field arithmetic and finite chain-complex algebra.

pub mod complex;
pub mod matrix;
pub mod scalar;
pub mod simplicial;

pub use complex::{BasisElem, ChainComplex, ChainError, ChainMap};
pub use matrix::{SVec, SparseMatrix};
pub use scalar::{Field, FieldError, Scalar};
pub use simplicial::{CosimplicialComplexObject, SimplicialComplexObject};
