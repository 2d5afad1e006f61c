use std::sync::Arc;

use super::complex::{BasisElem, ChainComplex, ChainError};
use super::matrix::{normalize, Echelon, Kernel, SVec, SparseMatrix};

/// Simplicial object in chain complexes, truncated at `levels.len() - 1`.
///
/// `faces[k][i]` is d_i: level k → k−1 (k ≥ 1, 0 ≤ i ≤ k) and
/// `degens[k][j]` is s_j: level k → k+1 (0 ≤ j ≤ k, k+1 within range).
#[derive(Clone, Debug)]
pub struct SimplicialComplexObject {
    pub levels: Vec<Arc<ChainComplex>>,
    pub faces: Vec<Vec<SparseMatrix>>,
    pub degens: Vec<Vec<SparseMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityFailure {
    FaceFace { level: usize, i: usize, j: usize },
    DegenDegen { level: usize, i: usize, j: usize },
    FaceDegen { level: usize, i: usize, j: usize },
    NotChainMap { level: usize, which: String },
}

impl std::fmt::Display for IdentityFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

impl SimplicialComplexObject {
    /// Constant simplicial object on C up to level `top`.
    pub fn constant(c: Arc<ChainComplex>, top: usize) -> Self {
        let id = SparseMatrix::identity(c.field(), c.dim());
        let levels = vec![c; top + 1];
        let faces = (0..=top).map(|k| if k == 0 { vec![] } else { vec![id.clone(); k + 1] }).collect();
        let degens = (0..=top).map(|k| if k == top { vec![] } else { vec![id.clone(); k + 1] }).collect();
        SimplicialComplexObject { levels, faces, degens }
    }

    fn d(&self, k: usize, i: usize) -> &SparseMatrix {
        &self.faces[k][i]
    }

    fn s(&self, k: usize, j: usize) -> &SparseMatrix {
        &self.degens[k][j]
    }

    /// Verifies chain-map property and all simplicial identities in range.
    pub fn check_identities(&self) -> Result<(), IdentityFailure> {
        let top = self.levels.len() - 1;
        for k in 1..=top {
            for i in 0..=k {
                if self.d(k, i).mul(self.levels[k].differential()) != self.levels[k - 1].differential().mul(self.d(k, i)) {
                    return Err(IdentityFailure::NotChainMap { level: k, which: format!("d{i}") });
                }
            }
        }
        for k in 0..top {
            for j in 0..=k {
                if self.s(k, j).mul(self.levels[k].differential()) != self.levels[k + 1].differential().mul(self.s(k, j)) {
                    return Err(IdentityFailure::NotChainMap { level: k, which: format!("s{j}") });
                }
            }
        }
        // d_i d_j = d_{j-1} d_i for i < j
        for k in 2..=top {
            for j in 0..=k {
                for i in 0..j {
                    if self.d(k - 1, i).mul(self.d(k, j)) != self.d(k - 1, j - 1).mul(self.d(k, i)) {
                        return Err(IdentityFailure::FaceFace { level: k, i, j });
                    }
                }
            }
        }
        // s_i s_j = s_{j+1} s_i for i ≤ j
        for k in 0..top.saturating_sub(1) {
            for j in 0..=k {
                for i in 0..=j {
                    if self.s(k + 1, i).mul(self.s(k, j)) != self.s(k + 1, j + 1).mul(self.s(k, i)) {
                        return Err(IdentityFailure::DegenDegen { level: k, i, j });
                    }
                }
            }
        }
        // mixed identities, s_j: k → k+1 followed by d_i: k+1 → k
        for k in 0..top {
            let id = SparseMatrix::identity(self.levels[k].field(), self.levels[k].dim());
            for j in 0..=k {
                for i in 0..=k + 1 {
                    let lhs = self.d(k + 1, i).mul(self.s(k, j));
                    let rhs = if i < j {
                        self.s(k - 1, j - 1).mul(self.d(k, i))
                    } else if i == j || i == j + 1 {
                        id.clone()
                    } else {
                        self.s(k - 1, j).mul(self.d(k, i - 1))
                    };
                    if lhs != rhs {
                        return Err(IdentityFailure::FaceDegen { level: k, i, j });
                    }
                }
            }
        }
        Ok(())
    }

    /// Normalized Moore complex with d = d_int + (−1)^{int}·Σ(−1)^i d_i.
    pub fn totalize(&self) -> Result<ChainComplex, ChainError> {
        self.check_identities().map_err(|e| ChainError::Other(format!("simplicial identity violated: {e}")))?;
        Ok(self.totalize_unchecked())
    }

    pub fn totalize_unchecked(&self) -> ChainComplex {
        let field = self.levels[0].field();
        let echelons: Vec<Echelon> = (0..self.levels.len())
            .map(|k| {
                let n = self.levels[k].dim();
                let vs = if k == 0 { vec![] } else { self.degens[k - 1].iter().flat_map(|s| s.cols.clone()).collect::<Vec<_>>() };
                let mut e = Echelon::from_vectors(field, n, vs);
                e.fully_reduce();
                e
            })
            .collect();
        let comps: Vec<Vec<usize>> = echelons.iter().map(|e| e.complement()).collect();
        let mut offsets = vec![0usize; self.levels.len() + 1];
        let mut basis = Vec::new();
        let mut pos: Vec<Vec<usize>> = Vec::new();
        for (k, comp) in comps.iter().enumerate() {
            offsets[k + 1] = offsets[k] + comp.len();
            let mut p = vec![usize::MAX; self.levels[k].dim()];
            for (t, i) in comp.iter().enumerate() {
                p[*i] = offsets[k] + t;
                let b = &self.levels[k].basis()[*i];
                basis.push(BasisElem::new(format!("{k}:{}", b.label), b.degree + k as i32));
            }
            pos.push(p);
        }
        let project = |k: usize, v: SVec| -> SVec { echelons[k].reduce(v).into_iter().map(|(i, x)| (pos[k][i], x)).collect() };
        let mut cols = Vec::with_capacity(basis.len());
        for (k, comp) in comps.iter().enumerate() {
            let lvl = &self.levels[k];
            for i in comp {
                let mut col = project(k, lvl.differential().cols[*i].clone());
                if k > 0 {
                    let q = lvl.degree(*i);
                    let mut acc: SVec = Vec::new();
                    for (fi, d) in self.faces[k].iter().enumerate() {
                        let s = field.sign((fi as i32 + q).rem_euclid(2) == 1);
                        acc.extend(d.cols[*i].iter().map(|(r, x)| (*r, x.mul(&s))));
                    }
                    col.extend(project(k - 1, normalize(acc)));
                }
                cols.push(normalize(col));
            }
        }
        let d = SparseMatrix::from_cols(field, basis.len(), cols);
        ChainComplex::new_unchecked(field, basis, d).expect("totalization")
    }
}

/// Cosimplicial object: `cofaces[k][i]` is δ^i: level k−1 → k, `codegens[k][j]` is σ^j: level k+1 → k.
#[derive(Clone, Debug)]
pub struct CosimplicialComplexObject {
    pub levels: Vec<Arc<ChainComplex>>,
    pub cofaces: Vec<Vec<SparseMatrix>>,
    pub codegens: Vec<Vec<SparseMatrix>>,
}

impl CosimplicialComplexObject {
    pub fn constant(c: Arc<ChainComplex>, top: usize) -> Self {
        let id = SparseMatrix::identity(c.field(), c.dim());
        let levels = vec![c; top + 1];
        let cofaces = (0..=top).map(|k| if k == 0 { vec![] } else { vec![id.clone(); k + 1] }).collect();
        let codegens = (0..=top).map(|k| if k == top { vec![] } else { vec![id.clone(); k + 1] }).collect();
        CosimplicialComplexObject { levels, cofaces, codegens }
    }

    /// Cosimplicial identities are the transposes of the simplicial ones.
    pub fn check_identities(&self) -> Result<(), IdentityFailure> {
        let t = SimplicialComplexObject {
            levels: self.levels.iter().map(|c| Arc::new(c.dual())).collect(),
            faces: self.cofaces.iter().map(|v| v.iter().map(|m| m.transpose()).collect()).collect(),
            degens: self.codegens.iter().map(|v| v.iter().map(|m| m.transpose()).collect()).collect(),
        };
        // the dual differential carries signs; compare transposed structure maps against plain transposes
        let plain = SimplicialComplexObject {
            levels: self
                .levels
                .iter()
                .map(|c| {
                    let basis = c.basis().iter().map(|b| BasisElem::new(b.label.clone(), -b.degree)).collect();
                    Arc::new(ChainComplex::new_unchecked(c.field(), basis, c.differential().transpose()).unwrap())
                })
                .collect(),
            ..t
        };
        plain.check_identities()
    }

    /// Conormalized total complex: degree = internal − k, d = d_int + (−1)^{int}·Σ(−1)^i δ^i.
    pub fn cototalize(&self) -> Result<ChainComplex, ChainError> {
        self.check_identities().map_err(|e| ChainError::Other(format!("cosimplicial identity violated: {e}")))?;
        Ok(self.cototalize_unchecked())
    }

    pub fn cototalize_unchecked(&self) -> ChainComplex {
        let field = self.levels[0].field();
        let kernels: Vec<Kernel> = (0..self.levels.len())
            .map(|k| {
                let n = self.levels[k].dim();
                if k == 0 {
                    return SparseMatrix::zeros(field, 0, n).kernel();
                }
                let mut rows: Vec<SVec> = Vec::new();
                for s in &self.codegens[k - 1] {
                    rows.extend(s.transpose().cols);
                }
                let stacked = SparseMatrix::from_cols(field, n, rows).transpose();
                stacked.kernel()
            })
            .collect();
        let mut offsets = vec![0usize];
        let mut basis = Vec::new();
        for (k, ker) in kernels.iter().enumerate() {
            offsets.push(offsets[k] + ker.dim());
            for (t, v) in ker.basis.iter().enumerate() {
                let q = self.levels[k].degree(v[0].0);
                basis.push(BasisElem::new(format!("{k}:n{t}"), q - k as i32));
            }
        }
        let mut cols = Vec::new();
        for (k, ker) in kernels.iter().enumerate() {
            let lvl = &self.levels[k];
            for v in &ker.basis {
                let q = lvl.degree(v[0].0);
                let mut col: SVec = ker.coords(&lvl.differential().apply(v)).into_iter().map(|(i, x)| (i + offsets[k], x)).collect();
                if k + 1 < self.levels.len() {
                    let mut acc: SVec = Vec::new();
                    for (i, dlt) in self.cofaces[k + 1].iter().enumerate() {
                        let s = field.sign((i as i32 + q).rem_euclid(2) == 1);
                        acc.extend(dlt.apply(v).into_iter().map(|(r, x)| (r, x.mul(&s))));
                    }
                    let img = normalize(acc);
                    col.extend(kernels[k + 1].coords(&img).into_iter().map(|(i, x)| (i + offsets[k + 1], x)));
                }
                cols.push(normalize(col));
            }
        }
        let d = SparseMatrix::from_cols(field, basis.len(), cols);
        ChainComplex::new_unchecked(field, basis, d).expect("cototalization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincore::scalar::Field;
    use std::collections::BTreeMap;

    fn sample() -> Arc<ChainComplex> {
        let f = Field::Q;
        let basis = vec![BasisElem::new("a", 1), BasisElem::new("b", 0), BasisElem::new("c", 0)];
        let d = SparseMatrix::from_triplets(f, 3, 3, vec![(1, 0, f.one())]);
        Arc::new(ChainComplex::new(f, basis, d).unwrap())
    }

    #[test]
    fn constant_totalizes_to_itself() {
        let c = sample();
        let s = SimplicialComplexObject::constant(c.clone(), 3);
        let t = s.totalize().unwrap();
        assert_eq!(t.dims(), c.dims());
        assert_eq!(t.homology(), c.homology());
    }

    #[test]
    fn constant_cototalizes_to_itself() {
        let c = sample();
        let s = CosimplicialComplexObject::constant(c.clone(), 3);
        let t = s.cototalize().unwrap();
        assert_eq!(t.dims(), c.dims());
        assert_eq!(t.homology(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn broken_identity_is_reported() {
        let c = sample();
        let mut s = SimplicialComplexObject::constant(c, 2);
        s.faces[2][1] = SparseMatrix::zeros(Field::Q, 3, 3);
        assert!(s.check_identities().is_err());
    }
}
