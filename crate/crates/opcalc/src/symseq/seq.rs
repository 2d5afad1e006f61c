use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::equivariant::EquivariantComplex;
use crate::chaincore::{ChainComplex, ChainError, Field, FieldError};

#[derive(Debug, Error)]
pub enum SeqError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("arity bounds differ: {0} vs {1}")]
    Bound(usize, usize),
    #[error("component {key} has arity {found}")]
    ArityMismatch { key: usize, found: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Arity-indexed family of equivariant complexes, truncated at `arity_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymSeq {
    pub field: Field,
    pub arity_max: usize,
    comps: Vec<Arc<EquivariantComplex>>,
}

impl SymSeq {
    pub fn new(field: Field, arity_max: usize, comps: Vec<Arc<EquivariantComplex>>) -> Result<Self, SeqError> {
        if comps.len() != arity_max {
            return Err(SeqError::Invalid(format!("expected {arity_max} components, got {}", comps.len())));
        }
        for (k, c) in comps.iter().enumerate() {
            if c.arity != k + 1 {
                return Err(SeqError::ArityMismatch { key: k + 1, found: c.arity });
            }
            field.check_same(c.field())?;
        }
        Ok(SymSeq { field, arity_max, comps })
    }

    pub fn from_fn(field: Field, arity_max: usize, f: impl Fn(usize) -> EquivariantComplex) -> Self {
        let comps = (1..=arity_max).map(|n| Arc::new(f(n))).collect();
        SymSeq::new(field, arity_max, comps).expect("component arities")
    }

    pub fn zero(field: Field, arity_max: usize) -> Self {
        Self::from_fn(field, arity_max, |n| EquivariantComplex::zero(field, n))
    }

    /// 1(1) is a line in degree 0, all other arities vanish.
    pub fn unit(field: Field, arity_max: usize) -> Self {
        Self::from_fn(field, arity_max, |n| {
            if n == 1 {
                EquivariantComplex::trivial(1, Arc::new(ChainComplex::point(field, "1", 0)))
            } else {
                EquivariantComplex::zero(field, n)
            }
        })
    }

    pub fn comp(&self, n: usize) -> &Arc<EquivariantComplex> {
        &self.comps[n - 1]
    }

    /// Dimension of the component of arity n; 0 outside 1..=N.
    pub fn dim(&self, n: usize) -> usize {
        if n == 0 || n > self.arity_max {
            0
        } else {
            self.comps[n - 1].dim()
        }
    }

    pub fn components(&self) -> &[Arc<EquivariantComplex>] {
        &self.comps
    }

    pub fn check_compatible(&self, o: &SymSeq) -> Result<(), SeqError> {
        self.field.check_same(o.field)?;
        if self.arity_max != o.arity_max {
            return Err(SeqError::Bound(self.arity_max, o.arity_max));
        }
        Ok(())
    }

    /// Validates every component's action.
    pub fn check(&self) -> Result<(), SeqError> {
        for c in &self.comps {
            c.complex.check_square_zero()?;
            c.check()?;
        }
        Ok(())
    }

    /// Components above n replaced by zero.
    pub fn truncate(&self, n: usize) -> SymSeq {
        Self::from_fn(self.field, self.arity_max, |k| if k <= n { (*self.comps[k - 1]).clone() } else { EquivariantComplex::zero(self.field, k) })
    }

    /// Only the component of arity n survives.
    pub fn concentrate(&self, n: usize) -> SymSeq {
        Self::from_fn(self.field, self.arity_max, |k| if k == n { (*self.comps[k - 1]).clone() } else { EquivariantComplex::zero(self.field, k) })
    }

    pub fn levelwise_dual(&self) -> SymSeq {
        Self::from_fn(self.field, self.arity_max, |k| self.comps[k - 1].dual())
    }

    /// Same components with a smaller arity bound.
    pub fn restrict_bound(&self, n: usize) -> SymSeq {
        SymSeq::new(self.field, n, self.comps[..n].to_vec()).expect("restriction")
    }

    /// χ_n for n = 1..N.
    pub fn direct_sum(&self, o: &SymSeq) -> Result<SymSeq, SeqError> {
        self.check_compatible(o)?;
        let comps = self.comps.iter().zip(&o.comps).map(|(a, b)| a.direct_sum(b).map(Arc::new)).collect::<Result<Vec<_>, _>>()?;
        SymSeq::new(self.field, self.arity_max, comps)
    }

    pub fn euler(&self) -> Vec<i64> {
        self.comps.iter().map(|c| c.complex.euler()).collect()
    }

    pub fn dims(&self) -> Vec<BTreeMap<i32, usize>> {
        self.comps.iter().map(|c| c.complex.dims()).collect()
    }

    pub fn total_dims(&self) -> Vec<usize> {
        self.comps.iter().map(|c| c.dim()).collect()
    }

    pub fn homology(&self) -> Vec<BTreeMap<i32, usize>> {
        self.comps.iter().map(|c| c.complex.homology()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_dims() {
        let u = SymSeq::unit(Field::Q, 3);
        assert_eq!(u.total_dims(), vec![1, 0, 0]);
        assert_eq!(u.euler(), vec![1, 0, 0]);
    }

    #[test]
    fn truncation_and_concentration() {
        let u = SymSeq::from_fn(Field::Q, 3, |n| EquivariantComplex::trivial(n, Arc::new(ChainComplex::point(Field::Q, "c", 0))));
        assert_eq!(u.truncate(2).total_dims(), vec![1, 1, 0]);
        assert_eq!(u.concentrate(2).total_dims(), vec![0, 1, 0]);
        let d = u.levelwise_dual();
        assert_eq!(d.dims(), u.dims());
        assert!(d.components().iter().all(|c| c.gens.iter().all(|g| g == &crate::chaincore::SparseMatrix::identity(Field::Q, 1))));
    }
}
