use std::collections::HashMap;

use super::scalar::{Field, Scalar};

/// Sparse vector: entries sorted by index, no explicit zeros.
pub type SVec = Vec<(usize, Scalar)>;

/// `a + c·b` for sorted sparse vectors.
pub fn axpy(a: &[(usize, Scalar)], c: &Scalar, b: &[(usize, Scalar)]) -> SVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c.mul(&b[j].1)));
            j += 1;
        } else {
            let s = a[i].1.add(&c.mul(&b[j].1));
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Collects unsorted (index, value) pairs into a sorted sparse vector, summing duplicates.
pub fn normalize(mut v: Vec<(usize, Scalar)>) -> SVec {
    v.sort_by_key(|e| e.0);
    let mut out: SVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y = y.add(&x),
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

pub fn scale(v: &[(usize, Scalar)], c: &Scalar) -> SVec {
    if c.is_zero() {
        return Vec::new();
    }
    v.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

/// Column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub field: Field,
    pub nrows: usize,
    pub ncols: usize,
    pub cols: Vec<SVec>,
}

impl SparseMatrix {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Self {
        SparseMatrix { field, nrows, ncols, cols: vec![Vec::new(); ncols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let cols = (0..n).map(|i| vec![(i, field.one())]).collect();
        SparseMatrix { field, nrows: n, ncols: n, cols }
    }

    pub fn from_cols(field: Field, nrows: usize, cols: Vec<SVec>) -> Self {
        debug_assert!(cols.iter().all(|c| c.iter().all(|e| e.0 < nrows)));
        SparseMatrix { field, nrows, ncols: cols.len(), cols }
    }

    pub fn from_triplets(
        field: Field,
        nrows: usize,
        ncols: usize,
        trips: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); ncols];
        for (r, c, x) in trips {
            assert!(r < nrows && c < ncols, "triplet ({r},{c}) out of range");
            cols[c].push((r, x));
        }
        let cols = cols.into_iter().map(normalize).collect();
        SparseMatrix { field, nrows, ncols, cols }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, x)| (*r, c, x)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.cols[c].binary_search_by_key(&r, |e| e.0) {
            Ok(k) => self.cols[c][k].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SVec> = vec![Vec::new(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            for (r, x) in col {
                cols[*r].push((c, x.clone()));
            }
        }
        SparseMatrix { field: self.field, nrows: self.ncols, ncols: self.nrows, cols }
    }

    /// Image of a sparse vector.
    pub fn apply(&self, v: &[(usize, Scalar)]) -> SVec {
        let mut acc: Vec<(usize, Scalar)> = Vec::new();
        for (j, x) in v {
            for (i, y) in &self.cols[*j] {
                acc.push((*i, x.mul(y)));
            }
        }
        normalize(acc)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let cols = other.cols.iter().map(|c| self.apply(c)).collect();
        SparseMatrix { field: self.field, nrows: self.nrows, ncols: other.ncols, cols }
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let one = self.field.one();
        let cols = self.cols.iter().zip(&other.cols).map(|(a, b)| axpy(a, &one, b)).collect();
        SparseMatrix { field: self.field, nrows: self.nrows, ncols: self.ncols, cols }
    }

    pub fn scale(&self, c: &Scalar) -> SparseMatrix {
        let cols = self.cols.iter().map(|v| scale(v, c)).collect();
        SparseMatrix { field: self.field, nrows: self.nrows, ncols: self.ncols, cols }
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scale(&self.field.int(-1)))
    }

    /// Rows and columns picked by index lists.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut rmap = vec![usize::MAX; self.nrows];
        for (k, r) in rows.iter().enumerate() {
            rmap[*r] = k;
        }
        let cs = cols
            .iter()
            .map(|c| {
                let mut v: SVec = self.cols[*c]
                    .iter()
                    .filter(|(r, _)| rmap[*r] != usize::MAX)
                    .map(|(r, x)| (rmap[*r], x.clone()))
                    .collect();
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        SparseMatrix { field: self.field, nrows: rows.len(), ncols: cols.len(), cols: cs }
    }

    pub fn block_diag(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut cols = self.cols.clone();
        for c in &other.cols {
            cols.push(c.iter().map(|(r, x)| (r + self.nrows, x.clone())).collect());
        }
        SparseMatrix { field: self.field, nrows: self.nrows + other.nrows, ncols: cols.len(), cols }
    }

    pub fn rank(&self) -> usize {
        // Reduce along the shorter side.
        if self.nrows < self.ncols {
            Echelon::from_vectors(self.field, self.nrows, self.transpose().cols).rank()
        } else {
            Echelon::from_vectors(self.field, self.nrows, self.cols.clone()).rank()
        }
    }

    /// Basis of the null space; the i-th vector is 1 at the i-th free column.
    pub fn kernel(&self) -> Kernel {
        let mut e = Echelon::from_vectors(self.field, self.ncols, self.transpose().cols);
        e.fully_reduce();
        let pivots: HashMap<usize, usize> = e.pivot_cols().into_iter().enumerate().map(|(k, c)| (c, k)).collect();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains_key(c)).collect();
        let fpos: HashMap<usize, usize> = free.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let mut basis: Vec<Vec<(usize, Scalar)>> = free.iter().map(|f| vec![(*f, self.field.one())]).collect();
        for (p, row) in e.rows() {
            for (c, x) in row {
                if let Some(k) = fpos.get(c) {
                    basis[*k].push((p, x.neg()));
                }
            }
        }
        let basis = basis.into_iter().map(normalize).collect();
        Kernel { ambient: self.ncols, free, basis }
    }
}

/// Null-space basis in reduced form.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub ambient: usize,
    pub free: Vec<usize>,
    pub basis: Vec<SVec>,
}

impl Kernel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a vector assumed to lie in the kernel.
    pub fn coords(&self, v: &[(usize, Scalar)]) -> SVec {
        let pos: HashMap<usize, usize> = self.free.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let mut out: SVec = v.iter().filter_map(|(i, x)| pos.get(i).map(|k| (*k, x.clone()))).collect();
        out.sort_by_key(|e| e.0);
        out
    }

    /// Matrix whose columns are the basis vectors.
    pub fn inclusion(&self, field: Field) -> SparseMatrix {
        SparseMatrix::from_cols(field, self.ambient, self.basis.clone())
    }
}

/// Incremental echelon form of a set of vectors; each stored vector is normalized
/// to 1 at its pivot, which is its smallest index.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub field: Field,
    pub ambient: usize,
    pivots: HashMap<usize, SVec>,
}

impl Echelon {
    pub fn new(field: Field, ambient: usize) -> Self {
        Echelon { field, ambient, pivots: HashMap::new() }
    }

    pub fn from_vectors(field: Field, ambient: usize, vs: impl IntoIterator<Item = SVec>) -> Self {
        let mut e = Echelon::new(field, ambient);
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Remainder of `v` after eliminating every pivot coordinate that occurs in it.
    pub fn reduce(&self, mut v: SVec) -> SVec {
        let mut k = 0;
        while k < v.len() {
            let i = v[k].0;
            if let Some(p) = self.pivots.get(&i) {
                let c = v[k].1.neg();
                v = axpy(&v, &c, p);
                // entries before position k are untouched by the update
            } else {
                k += 1;
            }
        }
        v
    }

    /// Returns true if `v` was independent of the stored vectors.
    pub fn insert(&mut self, v: SVec) -> bool {
        let v = self.reduce(v);
        if v.is_empty() {
            return false;
        }
        let p = v[0].0;
        let inv = v[0].1.inv();
        self.pivots.insert(p, scale(&v, &inv));
        true
    }

    pub fn contains(&self, v: SVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Back-substitutes so that every stored vector vanishes at all other pivots.
    pub fn fully_reduce(&mut self) {
        let mut keys: Vec<usize> = self.pivots.keys().copied().collect();
        keys.sort_unstable_by(|a, b| b.cmp(a));
        for p in keys {
            let v = self.pivots.remove(&p).unwrap();
            let head = v[0].clone();
            let tail = self.reduce(v[1..].to_vec());
            let mut w = vec![head];
            w.extend(tail);
            self.pivots.insert(p, w);
        }
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        let mut k: Vec<usize> = self.pivots.keys().copied().collect();
        k.sort_unstable();
        k
    }

    /// Stored vectors sorted by pivot.
    pub fn rows(&self) -> Vec<(usize, &SVec)> {
        self.pivot_cols().into_iter().map(|p| (p, &self.pivots[&p])).collect()
    }

    /// Coordinates not hit by a pivot: a basis of a complement.
    pub fn complement(&self) -> Vec<usize> {
        (0..self.ambient).filter(|i| !self.pivots.contains_key(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Scalar {
        Field::Q.int(v)
    }

    fn dense(rows: &[&[i64]]) -> SparseMatrix {
        let n = rows.len();
        let m = rows[0].len();
        let trips = (0..n).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|(i, j)| rows[*i][*j] != 0).map(|(i, j)| (i, j, q(rows[i][j])));
        SparseMatrix::from_triplets(Field::Q, n, m, trips)
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(dense(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(dense(&[&[1, 0, 1], &[0, 1, 1], &[1, 1, 2]]).rank(), 2);
        assert_eq!(dense(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(SparseMatrix::identity(Field::Q, 5).rank(), 5);
    }

    #[test]
    fn rank_mod_p_differs() {
        let f = Field::fp(3).unwrap();
        let m = SparseMatrix::from_triplets(f, 2, 2, vec![(0, 0, f.int(1)), (0, 1, f.int(1)), (1, 0, f.int(1)), (1, 1, f.int(-2))]);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let m = dense(&[&[1, 1, 0, 2], &[0, 1, 1, 1]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 2);
        for v in &k.basis {
            assert!(m.apply(v).is_empty());
        }
        let v = axpy(&k.basis[0], &q(3), &k.basis[1]);
        assert_eq!(k.coords(&v), vec![(0, q(1)), (1, q(3))]);
    }

    #[test]
    fn product_and_transpose() {
        let a = dense(&[&[1, 2], &[3, 4]]);
        let b = dense(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), dense(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.transpose(), dense(&[&[1, 3], &[2, 4]]));
        assert_eq!(a.sub(&a), SparseMatrix::zeros(Field::Q, 2, 2));
    }

    #[test]
    fn echelon_complement() {
        let e = Echelon::from_vectors(Field::Q, 3, vec![vec![(1, q(2)), (2, q(1))]]);
        assert_eq!(e.complement(), vec![0, 2]);
        assert!(e.contains(vec![(1, q(4)), (2, q(2))]));
        assert_eq!(e.reduce(vec![(1, q(1))]), vec![(2, Field::Q.ratio(-1, 2))]);
    }
}
