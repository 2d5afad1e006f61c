use std::sync::Arc;

use super::structure::{Operad, ShapeFn};
use crate::chaincore::{ChainComplex, Field};
use crate::symseq::{EquivariantComplex, SymSeq};

/// A line in degree 0 with trivial action in every arity.
pub fn com_seq(field: Field, n: usize) -> SymSeq {
    SymSeq::from_fn(field, n, |k| EquivariantComplex::trivial(k, Arc::new(ChainComplex::point(field, &format!("c{k}"), 0))))
}

/// The commutative operad: every composite of generators is the generator.
pub fn com_operad(field: Field, n: usize) -> Operad {
    let f: ShapeFn = Arc::new(move |_, _| vec![(0, field.one())]);
    Operad::new("Com", com_seq(field, n), f).expect("Com is reduced")
}
