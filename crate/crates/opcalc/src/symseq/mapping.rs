//! Equivariant Hom-complexes and their Σ-fixed points.

use std::sync::Arc;

use super::equivariant::EquivariantComplex;
use super::seq::{SeqError, SymSeq};
use crate::chaincore::matrix::{normalize, Kernel, SVec};
use crate::chaincore::{BasisElem, ChainComplex, SparseMatrix};

/// Hom(M, N) with d f = d∘f − (−1)^{|f|} f∘d and action f ↦ σ f σ⁻¹.
///
/// The basis element (i, j) sends the j-th basis vector of M to the i-th of N; index i·dim M + j.
pub fn hom_complex(m: &EquivariantComplex, n: &EquivariantComplex) -> EquivariantComplex {
    assert_eq!(m.arity, n.arity);
    let field = m.field();
    let (dm, dn) = (m.dim(), n.dim());
    let mut basis = Vec::with_capacity(dm * dn);
    for i in 0..dn {
        for j in 0..dm {
            let l = format!("{}<-{}", n.complex.basis()[i].label, m.complex.basis()[j].label);
            basis.push(BasisElem::new(l, n.degree(i) - m.degree(j)));
        }
    }
    let mt = m.complex.differential().transpose();
    let mut cols = Vec::with_capacity(dm * dn);
    for i in 0..dn {
        for j in 0..dm {
            let deg = n.degree(i) - m.degree(j);
            let mut col: SVec = n.complex.differential().cols[i].iter().map(|(a, x)| (a * dm + j, x.clone())).collect();
            let s = field.sign(deg.rem_euclid(2) == 0);
            col.extend(mt.cols[j].iter().map(|(b, x)| (i * dm + b, x.mul(&s))));
            cols.push(normalize(col));
        }
    }
    let d = SparseMatrix::from_cols(field, dm * dn, cols);
    let complex = ChainComplex::new_unchecked(field, basis, d).expect("hom complex");
    let gens = m
        .gens
        .iter()
        .zip(&n.gens)
        .map(|(sm, sn)| {
            let smt = sm.transpose();
            let mut cols = Vec::with_capacity(dm * dn);
            for i in 0..dn {
                for j in 0..dm {
                    let mut col = Vec::new();
                    for (a, x) in &sn.cols[i] {
                        for (b, y) in &smt.cols[j] {
                            col.push((a * dm + b, x.mul(y)));
                        }
                    }
                    cols.push(normalize(col));
                }
            }
            SparseMatrix::from_cols(field, dm * dn, cols)
        })
        .collect();
    EquivariantComplex::new_unchecked(m.arity, Arc::new(complex), gens)
}

/// Subcomplex of Σ-invariant vectors of an equivariant complex.
#[derive(Clone, Debug)]
pub struct Invariants {
    pub complex: ChainComplex,
    pub kernel: Kernel,
}

pub fn invariants(e: &EquivariantComplex) -> Invariants {
    let field = e.field();
    let n = e.dim();
    let id = SparseMatrix::identity(field, n);
    let mut rows: Vec<SVec> = Vec::new();
    for s in &e.gens {
        rows.extend(s.sub(&id).transpose().cols);
    }
    let stacked = SparseMatrix::from_cols(field, n, rows).transpose();
    let kernel = stacked.kernel();
    restrict(e.complex.as_ref(), kernel, "inv")
}

/// Restriction of a complex to a subcomplex given by a kernel basis.
pub fn restrict(c: &ChainComplex, kernel: Kernel, tag: &str) -> Invariants {
    let field = c.field();
    let basis: Vec<BasisElem> = kernel.basis.iter().enumerate().map(|(t, v)| BasisElem::new(format!("{tag}{t}"), c.degree(v[0].0))).collect();
    let cols = kernel.basis.iter().map(|v| kernel.coords(&c.differential().apply(v))).collect();
    let d = SparseMatrix::from_cols(field, basis.len(), cols);
    let complex = ChainComplex::new_unchecked(field, basis, d).expect("subcomplex");
    Invariants { complex, kernel }
}

/// Σ-invariant Hom in one arity.
pub fn map_sigma_component(m: &EquivariantComplex, n: &EquivariantComplex) -> Invariants {
    invariants(&hom_complex(m, n))
}

/// Π_{r ≤ N} Hom(M(r), N(r))^{Σ_r}.
pub fn map_sigma(m: &SymSeq, n: &SymSeq) -> Result<ChainComplex, SeqError> {
    m.check_compatible(n)?;
    m.field.check_char(m.arity_max)?;
    let mut out = ChainComplex::zero(m.field);
    for r in 1..=m.arity_max {
        let inv = map_sigma_component(m.comp(r), n.comp(r));
        let relabeled: Vec<BasisElem> = inv.complex.basis().iter().map(|b| BasisElem::new(format!("{r}:{}", b.label), b.degree)).collect();
        let c = ChainComplex::new_unchecked(m.field, relabeled, inv.complex.differential().clone())?;
        out = out.direct_sum(&c)?;
    }
    Ok(out)
}
