//! Symmetric sequences, the composition product and equivariant mapping complexes.

pub mod composite;
pub mod equivariant;
pub mod mapping;
pub mod partition;
pub mod perm;
pub mod seq;

pub use composite::{compose, compose_many, Levelled, Tower};
pub use equivariant::{EquivariantComplex, KeyedBuilder};
pub use mapping::map_sigma;
pub use seq::{SeqError, SymSeq};

/// The unit symmetric sequence.
pub fn unit_seq(field: crate::chaincore::Field, n: usize) -> SymSeq {
    SymSeq::unit(field, n)
}
