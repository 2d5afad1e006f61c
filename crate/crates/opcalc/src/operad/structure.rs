//! Operads, modules and cooperads with structure maps evaluated per composition shape.
//!
//! A structure map is given on the standard shape, where the i-th inner input receives
//! the consecutive block of positions following the earlier ones. Every other partition
//! is reached by the unshuffle permutation, which is what equivariance forces.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::chaincore::matrix::{normalize, SVec};
use crate::chaincore::{Field, Scalar, SparseMatrix};
use crate::symseq::composite::{StructureMap, Tower};
use crate::symseq::partition as pt;
use crate::symseq::{SeqError, SymSeq};

/// Standard-shape evaluation: outer label, inner (arity, label) pairs.
pub type ShapeFn = Arc<dyn Fn(usize, &[(usize, usize)]) -> SVec + Send + Sync>;

/// A map A(k)⊗B(n₁)⊗…⊗B(n_k) → T(Σnᵢ).
#[derive(Clone)]
pub struct Action {
    pub outer: SymSeq,
    pub inner: SymSeq,
    pub target: SymSeq,
    f: ShapeFn,
}

impl fmt::Debug for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Action(N={})", self.target.arity_max)
    }
}

/// Key of a standard composition shape "k;n1,...,nk".
pub fn shape_key(k: usize, ns: &[usize]) -> String {
    let s: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    format!("{k};{}", s.join(","))
}

pub fn parse_shape_key(s: &str) -> Option<(usize, Vec<usize>)> {
    let (k, rest) = s.split_once(';')?;
    let k: usize = k.trim().parse().ok()?;
    let ns: Vec<usize> = if rest.trim().is_empty() { vec![] } else { rest.split(',').map(|x| x.trim().parse().ok()).collect::<Option<_>>()? };
    (ns.len() == k).then_some((k, ns))
}

/// Row-major multi-indices of a tensor product of the given dimensions.
pub fn tensor_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut acc = vec![vec![]];
    for &d in dims {
        let mut next = Vec::with_capacity(acc.len() * d);
        for a in &acc {
            for i in 0..d {
                let mut v = a.clone();
                v.push(i);
                next.push(v);
            }
        }
        acc = next;
    }
    acc
}

impl Action {
    pub fn new(outer: SymSeq, inner: SymSeq, target: SymSeq, f: ShapeFn) -> Self {
        Action { outer, inner, target, f }
    }

    pub fn field(&self) -> Field {
        self.target.field
    }

    pub fn standard(&self, x: usize, ys: &[(usize, usize)]) -> SVec {
        (self.f)(x, ys)
    }

    /// All shapes (k; n₁..n_k) with Σnᵢ ≤ N on which both sides are non-zero.
    pub fn shapes(&self) -> Vec<(usize, Vec<usize>)> {
        let nmax = self.target.arity_max;
        let mut out = Vec::new();
        for k in 1..=nmax {
            if self.outer.dim(k) == 0 {
                continue;
            }
            let mut stack = vec![(vec![], 0usize)];
            while let Some((ns, tot)) = stack.pop() {
                if ns.len() == k {
                    out.push((k, ns));
                    continue;
                }
                for m in 1..=nmax - tot {
                    if tot + m + (k - ns.len() - 1) > nmax || self.inner.dim(m) == 0 {
                        continue;
                    }
                    let mut v: Vec<usize> = ns.clone();
                    v.push(m);
                    stack.push((v, tot + m));
                }
            }
        }
        out.sort();
        out
    }

    /// Matrix of a standard shape on the row-major tensor basis of A(k)⊗B(n₁)⊗….
    pub fn shape_matrix(&self, k: usize, ns: &[usize]) -> SparseMatrix {
        let mut dims = vec![self.outer.dim(k)];
        dims.extend(ns.iter().map(|n| self.inner.dim(*n)));
        let n: usize = ns.iter().sum();
        let cols = tensor_indices(&dims)
            .into_iter()
            .map(|idx| {
                let ys: Vec<(usize, usize)> = ns.iter().zip(&idx[1..]).map(|(a, b)| (*a, *b)).collect();
                self.standard(idx[0], &ys)
            })
            .collect();
        SparseMatrix::from_cols(self.field(), self.target.dim(n), cols)
    }

    /// Structure maps from a table of shape matrices (absent shapes act as zero).
    pub fn from_matrices(outer: SymSeq, inner: SymSeq, target: SymSeq, table: HashMap<(usize, Vec<usize>), SparseMatrix>) -> Self {
        let inner2 = inner.clone();
        let f: ShapeFn = Arc::new(move |x, ys| {
            let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
            let Some(m) = table.get(&(ys.len(), ns)) else { return vec![] };
            let mut col = x;
            for (a, b) in ys {
                col = col * inner2.dim(*a) + b;
            }
            m.cols[col].clone()
        });
        Action::new(outer, inner, target, f)
    }

    /// Same map with the sign of one standard shape reversed.
    pub fn with_flipped_shape(&self, k: usize, ns: Vec<usize>) -> Self {
        let g = self.f.clone();
        let field = self.field();
        let f: ShapeFn = Arc::new(move |x, ys| {
            let v = g(x, ys);
            if ys.len() == k && ys.iter().map(|y| y.0).eq(ns.iter().copied()) {
                v.into_iter().map(|(i, c)| (i, c.mul(&field.int(-1)))).collect()
            } else {
                v
            }
        });
        Action::new(self.outer.clone(), self.inner.clone(), self.target.clone(), f)
    }
}

impl StructureMap for Action {
    fn relative(&self, lambda: &[u32], outer: usize, inner: &[(usize, usize)]) -> SVec {
        let v = self.standard(outer, inner);
        let sigma = pt::unshuffle(lambda);
        if sigma.iter().enumerate().all(|(a, b)| a == *b) || v.is_empty() {
            return v;
        }
        let comp = self.target.comp(sigma.len());
        let mut out = Vec::new();
        for (i, x) in &v {
            out.extend(comp.act(&sigma, *i).into_iter().map(|(j, y)| (j, y.mul(x))));
        }
        normalize(out)
    }
}

/// A reduced operad; the unit is basis element 0 of P(1).
#[derive(Clone, Debug)]
pub struct Operad {
    pub name: String,
    pub seq: SymSeq,
    pub comp: Action,
}

impl Operad {
    pub fn new(name: impl Into<String>, seq: SymSeq, f: ShapeFn) -> Result<Self, SeqError> {
        let c = seq.comp(1);
        if c.dim() != 1 || c.degree(0) != 0 {
            return Err(SeqError::Invalid("operad is not reduced: P(1) must be a line in degree 0".into()));
        }
        let comp = Action::new(seq.clone(), seq.clone(), seq.clone(), f);
        Ok(Operad { name: name.into(), seq, comp })
    }

    pub fn field(&self) -> Field {
        self.seq.field
    }

    pub fn arity_max(&self) -> usize {
        self.seq.arity_max
    }

    /// γ(a; 1,…,b,…,1) with b in input slot `i` of a ∈ P(k), on the standard shape.
    pub fn partial(&self, k: usize, a: usize, i: usize, m: usize, b: usize) -> SVec {
        let ys: Vec<(usize, usize)> = (0..k).map(|j| if j == i { (m, b) } else { (1, 0) }).collect();
        self.comp.standard(a, &ys)
    }

    pub fn with_comp(&self, comp: Action) -> Operad {
        Operad { name: self.name.clone(), seq: self.seq.clone(), comp }
    }
}

/// Right module R with action R(k)⊗P(n₁)⊗…⊗P(n_k) → R(n).
#[derive(Clone, Debug)]
pub struct RightModule {
    pub name: String,
    pub seq: SymSeq,
    pub operad: Arc<Operad>,
    pub act: Action,
}

/// Left module L with action P(k)⊗L(n₁)⊗…⊗L(n_k) → L(n).
#[derive(Clone, Debug)]
pub struct LeftModule {
    pub name: String,
    pub seq: SymSeq,
    pub operad: Arc<Operad>,
    pub act: Action,
}

/// A (P, Q)-bimodule: left P-action and right Q-action.
#[derive(Clone, Debug)]
pub struct Bimodule {
    pub name: String,
    pub seq: SymSeq,
    pub left: LeftModule,
    pub right: RightModule,
}

impl RightModule {
    pub fn new(name: impl Into<String>, seq: SymSeq, operad: Arc<Operad>, f: ShapeFn) -> Result<Self, SeqError> {
        seq.check_compatible(&operad.seq)?;
        let act = Action::new(seq.clone(), operad.seq.clone(), seq.clone(), f);
        Ok(RightModule { name: name.into(), seq, operad, act })
    }

    /// The unit sequence with its unique right action.
    pub fn unit(p: &Arc<Operad>) -> Self {
        let field = p.field();
        let f: ShapeFn = Arc::new(move |_, ys| if ys.len() == 1 && ys[0].0 == 1 { vec![(0, field.one())] } else { vec![] });
        RightModule::new("1", SymSeq::unit(field, p.arity_max()), p.clone(), f).expect("unit module")
    }

    pub fn from_operad(p: &Arc<Operad>) -> Self {
        RightModule { name: p.name.clone(), seq: p.seq.clone(), operad: p.clone(), act: p.comp.clone() }
    }
}

impl LeftModule {
    pub fn new(name: impl Into<String>, seq: SymSeq, operad: Arc<Operad>, f: ShapeFn) -> Result<Self, SeqError> {
        seq.check_compatible(&operad.seq)?;
        let act = Action::new(operad.seq.clone(), seq.clone(), seq.clone(), f);
        Ok(LeftModule { name: name.into(), seq, operad, act })
    }

    pub fn unit(p: &Arc<Operad>) -> Self {
        let field = p.field();
        let f: ShapeFn = Arc::new(move |x, ys| if ys.len() == 1 && x == 0 { vec![(0, field.one())] } else { vec![] });
        LeftModule::new("1", SymSeq::unit(field, p.arity_max()), p.clone(), f).expect("unit module")
    }

    pub fn from_operad(p: &Arc<Operad>) -> Self {
        LeftModule { name: p.name.clone(), seq: p.seq.clone(), operad: p.clone(), act: p.comp.clone() }
    }
}

impl Bimodule {
    pub fn new(name: impl Into<String>, left: LeftModule, right: RightModule) -> Result<Self, SeqError> {
        if left.seq != right.seq {
            return Err(SeqError::Invalid("left and right structures live on different sequences".into()));
        }
        Ok(Bimodule { name: name.into(), seq: left.seq.clone(), left, right })
    }

    pub fn from_operad(p: &Arc<Operad>) -> Self {
        Bimodule { name: p.name.clone(), seq: p.seq.clone(), left: LeftModule::from_operad(p), right: RightModule::from_operad(p) }
    }
}

/// Full cocomposition Q(n) → (Q∘Q)(n) on tower bases.
pub type DecompFn = Arc<dyn Fn(usize, usize) -> Vec<(Tower, Scalar)> + Send + Sync>;

/// A reduced cooperad; the counit pairs with basis element 0 of Q(1).
#[derive(Clone)]
pub struct Cooperad {
    pub name: String,
    pub seq: SymSeq,
    pub decomp: DecompFn,
}

impl fmt::Debug for Cooperad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cooperad({})", self.name)
    }
}

impl Cooperad {
    pub fn field(&self) -> Field {
        self.seq.field
    }
}
