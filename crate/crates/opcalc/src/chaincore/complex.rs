use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use super::matrix::{Echelon, SVec, SparseMatrix};
use super::scalar::{Field, FieldError, Scalar};

#[derive(Debug, Error)]
pub enum ChainError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("differential has shape {0}x{1}, expected square of size {2}")]
    Shape(usize, usize, usize),
    #[error("differential entry ({row},{col}) maps degree {from} to degree {to}")]
    Degree { row: usize, col: usize, from: i32, to: i32 },
    #[error("d∘d ≠ 0 in degree {0}")]
    NotSquareZero(i32),
    #[error("map does not commute with differentials")]
    NotChainMap,
    #[error("map entry ({row},{col}) has the wrong degree")]
    MapDegree { row: usize, col: usize },
    #[error("{0}")]
    Other(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElem {
    pub label: String,
    pub degree: i32,
}

impl BasisElem {
    pub fn new(label: impl Into<String>, degree: i32) -> Self {
        BasisElem { label: label.into(), degree }
    }
}

/// Finite chain complex with a global basis and a degree −1 differential.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: Field,
    basis: Vec<BasisElem>,
    d: SparseMatrix,
    by_degree: BTreeMap<i32, Vec<usize>>,
}

impl PartialEq for ChainComplex {
    fn eq(&self, o: &Self) -> bool {
        self.field == o.field && self.basis == o.basis && self.d == o.d
    }
}

fn sign(field: Field, odd: bool) -> Scalar {
    field.sign(odd)
}

impl ChainComplex {
    /// Validates labels, degrees and d² = 0.
    pub fn new(field: Field, basis: Vec<BasisElem>, d: SparseMatrix) -> Result<Self, ChainError> {
        let c = Self::new_unchecked(field, basis, d)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Validates shape, labels and degrees but not d² = 0.
    pub fn new_unchecked(field: Field, basis: Vec<BasisElem>, d: SparseMatrix) -> Result<Self, ChainError> {
        field.check_same(d.field)?;
        let n = basis.len();
        if d.nrows != n || d.ncols != n {
            return Err(ChainError::Shape(d.nrows, d.ncols, n));
        }
        let mut seen = HashSet::with_capacity(n);
        for b in &basis {
            if !seen.insert(b.label.as_str()) {
                return Err(ChainError::DuplicateLabel(b.label.clone()));
            }
        }
        for (r, c, _) in d.triplets() {
            if basis[r].degree != basis[c].degree - 1 {
                return Err(ChainError::Degree { row: r, col: c, from: basis[c].degree, to: basis[r].degree });
            }
        }
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, b) in basis.iter().enumerate() {
            by_degree.entry(b.degree).or_default().push(i);
        }
        Ok(ChainComplex { field, basis, d, by_degree })
    }

    pub fn zero(field: Field) -> Self {
        Self::new_unchecked(field, Vec::new(), SparseMatrix::zeros(field, 0, 0)).unwrap()
    }

    /// One generator in the given degree.
    pub fn point(field: Field, label: &str, degree: i32) -> Self {
        Self::new_unchecked(field, vec![BasisElem::new(label, degree)], SparseMatrix::zeros(field, 1, 1)).unwrap()
    }

    /// Zero differential on the given basis.
    pub fn discrete(field: Field, basis: Vec<BasisElem>) -> Result<Self, ChainError> {
        let n = basis.len();
        Self::new_unchecked(field, basis, SparseMatrix::zeros(field, n, n))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn basis(&self) -> &[BasisElem] {
        &self.basis
    }

    pub fn differential(&self) -> &SparseMatrix {
        &self.d
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.basis[i].degree
    }

    pub fn indices_in_degree(&self, q: i32) -> &[usize] {
        self.by_degree.get(&q).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn degrees(&self) -> impl Iterator<Item = i32> + '_ {
        self.by_degree.keys().copied()
    }

    pub fn dims(&self) -> BTreeMap<i32, usize> {
        self.by_degree.iter().map(|(q, v)| (*q, v.len())).collect()
    }

    pub fn check_square_zero(&self) -> Result<(), ChainError> {
        let dd = self.d.mul(&self.d);
        for (_, c, _) in dd.triplets() {
            return Err(ChainError::NotSquareZero(self.basis[c].degree));
        }
        Ok(())
    }

    /// The block d_q: degree q → degree q−1.
    pub fn block(&self, q: i32) -> SparseMatrix {
        self.d.submatrix(self.indices_in_degree(q - 1), self.indices_in_degree(q))
    }

    pub fn rank_d(&self, q: i32) -> usize {
        if self.indices_in_degree(q).is_empty() || self.indices_in_degree(q - 1).is_empty() {
            return 0;
        }
        self.block(q).rank()
    }

    /// Graded dimensions of homology, omitting zeros.
    pub fn homology(&self) -> BTreeMap<i32, usize> {
        let qs: Vec<i32> = self.by_degree.keys().copied().collect();
        let ranks: BTreeMap<i32, usize> = qs.par_iter().map(|q| (*q, self.rank_d(*q))).collect();
        let mut out = BTreeMap::new();
        for q in qs {
            let h = self.indices_in_degree(q).len() - ranks[&q] - ranks.get(&(q + 1)).copied().unwrap_or(0);
            if h > 0 {
                out.insert(q, h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_empty()
    }

    pub fn euler(&self) -> i64 {
        self.by_degree.iter().map(|(q, v)| if q.rem_euclid(2) == 0 { v.len() as i64 } else { -(v.len() as i64) }).sum()
    }

    /// Koszul-signed tensor product; basis pairs are ordered with the first factor slowest.
    pub fn tensor(&self, other: &ChainComplex) -> Result<ChainComplex, ChainError> {
        self.field.check_same(other.field)?;
        let f = self.field;
        let m = other.dim();
        let mut basis = Vec::with_capacity(self.dim() * m);
        for a in &self.basis {
            for b in &other.basis {
                basis.push(BasisElem::new(format!("{}⊗{}", a.label, b.label), a.degree + b.degree));
            }
        }
        let mut trips = Vec::new();
        for i in 0..self.dim() {
            for j in 0..m {
                for (r, x) in &self.d.cols[i] {
                    trips.push((r * m + j, i * m + j, x.clone()));
                }
                let s = sign(f, self.basis[i].degree.rem_euclid(2) == 1);
                for (r, x) in &other.d.cols[j] {
                    trips.push((i * m + r, i * m + j, x.mul(&s)));
                }
            }
        }
        let d = SparseMatrix::from_triplets(f, basis.len(), basis.len(), trips);
        ChainComplex::new_unchecked(f, basis, d)
    }

    /// Linear dual: degree −q dual to degree q, differential (−1)^q·d_qᵀ.
    pub fn dual(&self) -> ChainComplex {
        let f = self.field;
        let basis = self.basis.iter().map(|b| BasisElem::new(dual_label(&b.label), -b.degree)).collect();
        let t = self.d.transpose();
        let cols = t
            .cols
            .iter()
            .map(|col| col.iter().map(|(r, x)| (*r, x.clone().negate_if(self.basis[*r].degree.rem_euclid(2) == 1))).collect())
            .collect();
        let d = SparseMatrix::from_cols(f, self.dim(), cols);
        ChainComplex::new_unchecked(f, basis, d).expect("dual of a valid complex")
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> Result<ChainComplex, ChainError> {
        self.field.check_same(other.field)?;
        let mut basis = self.basis.clone();
        let mut seen: HashSet<String> = basis.iter().map(|b| b.label.clone()).collect();
        for b in &other.basis {
            // clashing labels of the second summand get primes
            let mut label = b.label.clone();
            while seen.contains(&label) {
                label.push('′');
            }
            seen.insert(label.clone());
            basis.push(BasisElem::new(label, b.degree));
        }
        ChainComplex::new_unchecked(self.field, basis, self.d.block_diag(&other.d))
    }

    /// Trace of a degree-0 chain endomorphism on H_q.
    pub fn homology_trace(&self, action: &SparseMatrix, q: i32) -> Scalar {
        let f = self.field;
        let idx = self.indices_in_degree(q);
        let mut tr = f.zero();
        if idx.is_empty() {
            return tr;
        }
        let lower = self.indices_in_degree(q - 1);
        let a = action.submatrix(idx, idx);
        let z = if lower.is_empty() {
            SparseMatrix::zeros(f, 0, idx.len()).kernel()
        } else {
            self.block(q).kernel()
        };
        for (k, v) in z.basis.iter().enumerate() {
            let img = z.coords(&a.apply(v));
            if let Ok(p) = img.binary_search_by_key(&k, |e| e.0) {
                tr = tr.add(&img[p].1);
            }
        }
        let upper = self.indices_in_degree(q + 1);
        if !upper.is_empty() {
            let b = self.d.submatrix(idx, upper);
            let mut e = Echelon::from_vectors(f, idx.len(), b.cols);
            e.fully_reduce();
            for (p, v) in e.rows() {
                let img: SVec = a.apply(v);
                if let Ok(k) = img.binary_search_by_key(&p, |x| x.0) {
                    tr = tr.sub(&img[k].1);
                }
            }
        }
        tr
    }
}

pub fn dual_label(l: &str) -> String {
    match l.strip_prefix("D(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) if balanced(inner) => inner.to_string(),
        _ => format!("D({l})"),
    }
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

/// Degree-0 (or fixed-degree) linear map between complexes.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<ChainComplex>,
    pub target: Arc<ChainComplex>,
    pub degree: i32,
    pub matrix: SparseMatrix,
}

impl ChainMap {
    pub fn new(source: Arc<ChainComplex>, target: Arc<ChainComplex>, matrix: SparseMatrix) -> Result<Self, ChainError> {
        let m = Self::new_unchecked(source, target, 0, matrix)?;
        if !m.commutes() {
            return Err(ChainError::NotChainMap);
        }
        Ok(m)
    }

    /// Checks shape and degrees only.
    pub fn new_unchecked(source: Arc<ChainComplex>, target: Arc<ChainComplex>, degree: i32, matrix: SparseMatrix) -> Result<Self, ChainError> {
        source.field.check_same(target.field)?;
        if matrix.nrows != target.dim() || matrix.ncols != source.dim() {
            return Err(ChainError::Shape(matrix.nrows, matrix.ncols, source.dim()));
        }
        for (r, c, _) in matrix.triplets() {
            if target.degree(r) != source.degree(c) + degree {
                return Err(ChainError::MapDegree { row: r, col: c });
            }
        }
        Ok(ChainMap { source, target, degree, matrix })
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let m = SparseMatrix::identity(c.field, c.dim());
        ChainMap { source: c.clone(), target: c, degree: 0, matrix: m }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>) -> Self {
        let m = SparseMatrix::zeros(source.field, target.dim(), source.dim());
        ChainMap { source, target, degree: 0, matrix: m }
    }

    /// f∘d = (−1)^{deg f} d∘f.
    pub fn commutes(&self) -> bool {
        let lhs = self.matrix.mul(&self.source.d);
        let rhs = self.target.d.mul(&self.matrix);
        if self.degree.rem_euclid(2) == 0 {
            lhs == rhs
        } else {
            lhs.add(&rhs).is_zero()
        }
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        ChainMap {
            source: first.source.clone(),
            target: self.target.clone(),
            degree: self.degree + first.degree,
            matrix: self.matrix.mul(&first.matrix),
        }
    }

    /// Mapping cone of a degree-0 map: target ⊕ source[1].
    pub fn cone(&self) -> ChainComplex {
        assert_eq!(self.degree, 0, "cone of a degree-0 map");
        let f = self.source.field;
        let nt = self.target.dim();
        let mut basis: Vec<BasisElem> = self.target.basis.iter().map(|b| BasisElem::new(format!("t:{}", b.label), b.degree)).collect();
        basis.extend(self.source.basis.iter().map(|b| BasisElem::new(format!("s:{}", b.label), b.degree + 1)));
        let mut cols = self.target.d.cols.clone();
        let minus = f.int(-1);
        for j in 0..self.source.dim() {
            let mut col: SVec = self.matrix.cols[j].clone();
            col.extend(self.source.d.cols[j].iter().map(|(r, x)| (r + nt, x.mul(&minus))));
            cols.push(col);
        }
        let d = SparseMatrix::from_cols(f, basis.len(), cols);
        ChainComplex::new_unchecked(f, basis, d).expect("cone")
    }

    pub fn is_quasi_iso(&self) -> Result<bool, ChainError> {
        if !self.commutes() {
            return Err(ChainError::NotChainMap);
        }
        Ok(self.cone().is_acyclic())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn arrow(field: Field, top: i32) -> ChainComplex {
        let basis = vec![BasisElem::new("x", top), BasisElem::new("y", top - 1)];
        let d = SparseMatrix::from_triplets(field, 2, 2, vec![(1, 0, field.one())]);
        ChainComplex::new(field, basis, d).unwrap()
    }

    #[test]
    fn exact_pair_is_acyclic() {
        assert!(arrow(Field::Q, 1).is_acyclic());
    }

    #[test]
    fn zero_differential_homology_is_basis() {
        let c = ChainComplex::discrete(Field::Q, vec![BasisElem::new("a", 0), BasisElem::new("b", 2), BasisElem::new("c", 2)]).unwrap();
        assert_eq!(c.homology(), BTreeMap::from([(0, 1), (2, 2)]));
    }

    #[test]
    fn tensor_units_and_degrees() {
        let p = ChainComplex::point(Field::Q, "p", 0);
        let t = p.tensor(&p).unwrap();
        assert_eq!(t.dims(), BTreeMap::from([(0, 1)]));
        let s = ChainComplex::point(Field::Q, "s", 1);
        assert_eq!(s.tensor(&s).unwrap().dims(), BTreeMap::from([(2, 1)]));
    }

    #[test]
    fn acyclic_tensor_anything_is_acyclic() {
        let a = arrow(Field::Q, 1);
        let d = ChainComplex::discrete(Field::Q, vec![BasisElem::new("u", 0), BasisElem::new("v", 3)]).unwrap();
        let t = a.tensor(&d).unwrap();
        t.check_square_zero().unwrap();
        assert!(t.is_acyclic());
    }

    #[test]
    fn dual_reflects_degrees_and_squares_to_zero() {
        let c = ChainComplex::discrete(Field::Q, vec![BasisElem::new("a", 2)]).unwrap();
        assert_eq!(c.dual().homology(), BTreeMap::from([(-2, 1)]));
        let a = arrow(Field::Q, 3).direct_sum(&c).unwrap();
        let dd = a.dual();
        dd.check_square_zero().unwrap();
        assert!(dd.dual().basis().iter().zip(a.basis()).all(|(x, y)| x == y));
    }

    #[test]
    fn degree_violation_is_rejected() {
        let basis = vec![BasisElem::new("x", 1), BasisElem::new("y", 1)];
        let d = SparseMatrix::from_triplets(Field::Q, 2, 2, vec![(1, 0, Field::Q.one())]);
        assert!(matches!(ChainComplex::new(Field::Q, basis, d), Err(ChainError::Degree { .. })));
    }

    #[test]
    fn quasi_iso_by_cone() {
        let a = Arc::new(arrow(Field::Q, 1));
        let b = Arc::new(arrow(Field::Q, 4));
        assert!(ChainMap::identity(a.clone()).is_quasi_iso().unwrap());
        assert!(ChainMap::zero(a.clone(), b).is_quasi_iso().unwrap());
        let p = Arc::new(ChainComplex::point(Field::Q, "p", 0));
        let zero = Arc::new(ChainComplex::zero(Field::Q));
        assert!(!ChainMap::zero(p, zero).is_quasi_iso().unwrap());
    }

    #[test]
    fn trace_on_homology() {
        let f = Field::Q;
        let c = ChainComplex::discrete(f, vec![BasisElem::new("a", 0), BasisElem::new("b", 0)]).unwrap();
        let swap = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 1, f.one()), (1, 0, f.one())]);
        assert!(c.homology_trace(&swap, 0).is_zero());
        let id = SparseMatrix::identity(f, 2);
        assert_eq!(c.homology_trace(&id, 0), f.int(2));
    }
}
