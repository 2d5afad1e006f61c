use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use super::perm::{self, Perm};
use crate::chaincore::matrix::{normalize, SVec};
use crate::chaincore::{BasisElem, ChainComplex, ChainError, Field, Scalar, SparseMatrix};

/// Chain complex with a Σ_n-action given on the adjacent transpositions.
#[derive(Debug)]
pub struct EquivariantComplex {
    pub arity: usize,
    pub complex: Arc<ChainComplex>,
    /// Matrices of s_1, …, s_{n−1}.
    pub gens: Vec<SparseMatrix>,
    cache: Mutex<HashMap<Perm, Arc<SparseMatrix>>>,
}

impl Clone for EquivariantComplex {
    fn clone(&self) -> Self {
        Self::new_unchecked(self.arity, self.complex.clone(), self.gens.clone())
    }
}

impl PartialEq for EquivariantComplex {
    fn eq(&self, o: &Self) -> bool {
        self.arity == o.arity && *self.complex == *o.complex && self.gens == o.gens
    }
}

impl EquivariantComplex {
    /// Validates that the generators are chain automorphisms satisfying the Coxeter relations.
    pub fn new(arity: usize, complex: Arc<ChainComplex>, gens: Vec<SparseMatrix>) -> Result<Self, ChainError> {
        let e = Self::new_unchecked(arity, complex, gens);
        e.check()?;
        Ok(e)
    }

    pub fn new_unchecked(arity: usize, complex: Arc<ChainComplex>, gens: Vec<SparseMatrix>) -> Self {
        assert_eq!(gens.len(), arity.saturating_sub(1), "one generator per adjacent transposition");
        EquivariantComplex { arity, complex, gens, cache: Mutex::new(HashMap::new()) }
    }

    /// Trivial action.
    pub fn trivial(arity: usize, complex: Arc<ChainComplex>) -> Self {
        let id = SparseMatrix::identity(complex.field(), complex.dim());
        Self::new_unchecked(arity, complex, vec![id; arity.saturating_sub(1)])
    }

    pub fn zero(field: Field, arity: usize) -> Self {
        Self::trivial(arity, Arc::new(ChainComplex::zero(field)))
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.complex.degree(i)
    }

    pub fn check(&self) -> Result<(), ChainError> {
        let c = &self.complex;
        let n = c.dim();
        let f = c.field();
        let id = SparseMatrix::identity(f, n);
        let bad = |m: String| Err(ChainError::Other(m));
        for (i, s) in self.gens.iter().enumerate() {
            if s.nrows != n || s.ncols != n {
                return bad(format!("s{} has the wrong shape", i + 1));
            }
            for (r, col, _) in s.triplets() {
                if c.degree(r) != c.degree(col) {
                    return bad(format!("s{} does not preserve degree", i + 1));
                }
            }
            if s.mul(c.differential()) != c.differential().mul(s) {
                return bad(format!("s{} is not a chain map", i + 1));
            }
            if s.mul(s) != id {
                return bad(format!("s{}² ≠ id", i + 1));
            }
        }
        for i in 0..self.gens.len() {
            for j in i + 1..self.gens.len() {
                let (a, b) = (&self.gens[i], &self.gens[j]);
                let ok = if j == i + 1 { a.mul(b).mul(a) == b.mul(a).mul(b) } else { a.mul(b) == b.mul(a) };
                if !ok {
                    return bad(format!("Coxeter relation fails for s{} and s{}", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Matrix of an arbitrary permutation, via a reduced word.
    pub fn perm_matrix(&self, sigma: &[usize]) -> Arc<SparseMatrix> {
        if let Some(m) = self.cache.lock().unwrap().get(sigma) {
            return m.clone();
        }
        let mut m = SparseMatrix::identity(self.field(), self.dim());
        for i in perm::reduced_word(sigma) {
            m = m.mul(&self.gens[i - 1]);
        }
        let m = Arc::new(m);
        self.cache.lock().unwrap().insert(sigma.to_vec(), m.clone());
        m
    }

    /// σ applied to a basis vector.
    pub fn act(&self, sigma: &[usize], i: usize) -> SVec {
        if sigma.iter().enumerate().all(|(a, b)| a == *b) {
            return vec![(i, self.field().one())];
        }
        self.perm_matrix(sigma).cols[i].clone()
    }

    /// Dual complex with the inverse-transpose action.
    pub fn dual(&self) -> EquivariantComplex {
        let d = Arc::new(self.complex.dual());
        EquivariantComplex::new_unchecked(self.arity, d, self.gens.iter().map(|s| s.transpose()).collect())
    }

    /// Block sum; the second summand's basis follows the first.
    pub fn direct_sum(&self, o: &EquivariantComplex) -> Result<EquivariantComplex, ChainError> {
        if self.arity != o.arity {
            return Err(ChainError::Other(format!("arities {} and {} differ", self.arity, o.arity)));
        }
        let c = Arc::new(self.complex.direct_sum(&o.complex)?);
        Ok(Self::new_unchecked(self.arity, c, self.gens.iter().zip(&o.gens).map(|(a, b)| a.block_diag(b)).collect()))
    }

    pub fn homology_character(&self) -> Vec<(i32, usize, Vec<Scalar>)> {
        self.complex
            .homology()
            .into_iter()
            .map(|(q, h)| (q, h, self.gens.iter().map(|s| self.complex.homology_trace(s, q)).collect()))
            .collect()
    }
}

/// Cartesian expansion of a tensor of sparse vectors.
pub fn tensor_expand(factors: &[SVec], field: Field) -> Vec<(Vec<usize>, Scalar)> {
    let mut acc: Vec<(Vec<usize>, Scalar)> = vec![(Vec::with_capacity(factors.len()), field.one())];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for (idx, c) in &acc {
            for (i, x) in f {
                let mut v = idx.clone();
                v.push(*i);
                next.push((v, c.mul(x)));
            }
        }
        acc = next;
    }
    acc
}

/// Assembles an equivariant complex on a keyed basis from differential and action rules.
pub struct KeyedBuilder<K> {
    pub keys: Vec<K>,
    pub index: HashMap<K, usize>,
}

impl<K: Clone + Eq + Hash + Send + Sync> KeyedBuilder<K> {
    pub fn new(keys: Vec<K>) -> Self {
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        KeyedBuilder { keys, index }
    }

    pub fn idx(&self, k: &K) -> usize {
        *self.index.get(k).expect("element outside the basis")
    }

    pub fn try_idx(&self, k: &K) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn column(&self, terms: Vec<(K, Scalar)>) -> SVec {
        normalize(terms.into_iter().map(|(k, x)| (self.idx(&k), x)).collect())
    }

    /// Matrix of a rule on this basis, computed in parallel.
    pub fn matrix<F>(&self, field: Field, rule: F) -> SparseMatrix
    where
        F: Fn(&K) -> Vec<(K, Scalar)> + Sync,
    {
        let cols: Vec<SVec> = self.keys.par_iter().map(|k| self.column(rule(k))).collect();
        SparseMatrix::from_cols(field, self.keys.len(), cols)
    }

    /// Matrix of a rule from this basis into another keyed basis.
    pub fn matrix_into<L, F>(&self, target: &KeyedBuilder<L>, field: Field, rule: F) -> SparseMatrix
    where
        L: Clone + Eq + Hash + Send + Sync,
        F: Fn(&K) -> Vec<(L, Scalar)> + Sync,
    {
        let cols: Vec<SVec> = self.keys.par_iter().map(|k| target.column(rule(k))).collect();
        SparseMatrix::from_cols(field, target.keys.len(), cols)
    }

    /// Builds the complex and transposition matrices.
    pub fn build<L, G, D, A>(&self, field: Field, arity: usize, label: L, degree: G, d: D, act: A) -> EquivariantComplex
    where
        L: Fn(&K) -> String,
        G: Fn(&K) -> i32,
        D: Fn(&K) -> Vec<(K, Scalar)> + Sync,
        A: Fn(&[usize], &K) -> Vec<(K, Scalar)> + Sync,
    {
        let basis = self.keys.iter().map(|k| BasisElem::new(label(k), degree(k))).collect();
        let dm = self.matrix(field, d);
        let complex = ChainComplex::new_unchecked(field, basis, dm).expect("keyed complex");
        let gens = (1..arity)
            .map(|i| {
                let t = perm::transposition(arity, i);
                self.matrix(field, |k| act(&t, k))
            })
            .collect();
        EquivariantComplex::new_unchecked(arity, Arc::new(complex), gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_representation() {
        let f = Field::Q;
        let c = Arc::new(ChainComplex::point(f, "e", 0));
        let minus = SparseMatrix::identity(f, 1).scale(&f.int(-1));
        let e = EquivariantComplex::new(3, c, vec![minus.clone(), minus]).unwrap();
        assert_eq!(e.perm_matrix(&[1, 2, 0]).get(0, 0), f.one());
        assert_eq!(e.perm_matrix(&[1, 0, 2]).get(0, 0), f.int(-1));
    }

    #[test]
    fn bad_relations_are_caught() {
        let f = Field::Q;
        let c = Arc::new(ChainComplex::discrete(f, vec![BasisElem::new("a", 0), BasisElem::new("b", 0)]).unwrap());
        let swap = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 1, f.one()), (1, 0, f.one())]);
        let diag = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 0, f.one()), (1, 1, f.int(-1))]);
        assert!(EquivariantComplex::new(3, c, vec![swap, diag]).is_err());
    }
}
