//! Finite pointed simplicial sets and the Com-modules of their smash powers.
//!
//! A simplex is a nondegenerate simplex precomposed with a monotone surjection, so
//! faces of degenerate simplices and of products are computed exactly. Reduced chains
//! are normalized chains modulo the basepoint.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::chaincore::matrix::normalize;
use crate::chaincore::{BasisElem, ChainComplex, Field, SVec, Scalar, SparseMatrix};
use crate::operad::{LeftModule, Operad, RightModule, ShapeFn};
use crate::symseq::equivariant::KeyedBuilder;
use crate::symseq::perm::{inverse, koszul_odd};
use crate::symseq::{EquivariantComplex, SeqError, SymSeq};

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("simplicial set {0}: {1}")]
    Invalid(String, String),
    #[error("the reduced diagonal of {0} is not cocommutative")]
    NotCocommutative(String),
    #[error("unknown simplicial set {0:?}; expected s0, s1-minimal or s1-square")]
    Unknown(String),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// σ∘s for a nondegenerate σ and a monotone surjection s: [m] → [dim σ].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    pub nd: usize,
    pub surj: Vec<usize>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.surj.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.surj.windows(2).any(|w| w[0] == w[1])
    }
}

#[derive(Clone, Debug)]
pub struct NdSimplex {
    pub name: String,
    pub dim: usize,
    /// d_i for i = 0..=dim.
    pub faces: Vec<Simplex>,
}

#[derive(Clone, Debug)]
pub struct SimplicialSet {
    pub name: String,
    pub simplices: Vec<NdSimplex>,
    pub base: usize,
}

fn vertex(nd: usize) -> Simplex {
    Simplex { nd, surj: vec![0] }
}

fn nd_edge(name: &str, d0: usize, d1: usize) -> NdSimplex {
    NdSimplex { name: name.into(), dim: 1, faces: vec![vertex(d0), vertex(d1)] }
}

fn nd_vertex(name: &str) -> NdSimplex {
    NdSimplex { name: name.into(), dim: 0, faces: vec![] }
}

impl SimplicialSet {
    pub fn new(name: impl Into<String>, simplices: Vec<NdSimplex>, base: usize) -> Result<Self, SpaceError> {
        let k = SimplicialSet { name: name.into(), simplices, base };
        k.validate()?;
        Ok(k)
    }

    /// The named inputs: s0, s1-minimal, s1-square.
    pub fn named(name: &str) -> Result<Self, SpaceError> {
        match name {
            "s0" => Self::new("s0", vec![nd_vertex("*"), nd_vertex("a")], 0),
            "s1-minimal" => Self::new("s1-minimal", vec![nd_vertex("*"), nd_edge("e", 0, 0)], 0),
            "s1-square" => {
                let mut s: Vec<NdSimplex> = (0..4).map(|i| nd_vertex(&format!("v{i}"))).collect();
                for i in 0..4 {
                    s.push(nd_edge(&format!("e{i}"), (i + 1) % 4, i));
                }
                Self::new("s1-square", s, 0)
            }
            _ => Err(SpaceError::Unknown(name.into())),
        }
    }

    fn bad(&self, msg: String) -> SpaceError {
        SpaceError::Invalid(self.name.clone(), msg)
    }

    fn validate(&self) -> Result<(), SpaceError> {
        let base = self.simplices.get(self.base).ok_or_else(|| self.bad("no basepoint".into()))?;
        if base.dim != 0 {
            return Err(self.bad("basepoint is not a vertex".into()));
        }
        for (i, s) in self.simplices.iter().enumerate() {
            if s.faces.len() != if s.dim == 0 { 0 } else { s.dim + 1 } {
                return Err(self.bad(format!("{} has {} faces", s.name, s.faces.len())));
            }
            for f in &s.faces {
                let ok = f.nd < self.simplices.len()
                    && f.dim() + 1 == s.dim
                    && f.surj[0] == 0
                    && f.surj.last() == Some(&self.simplices[f.nd].dim)
                    && f.surj.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1);
                if !ok {
                    return Err(self.bad(format!("malformed face of {}", s.name)));
                }
            }
            let me = Simplex { nd: i, surj: (0..=s.dim).collect() };
            for a in 0..=s.dim {
                for b in a + 1..=s.dim {
                    if s.dim >= 2 && self.face(&self.face(&me, b), a) != self.face(&self.face(&me, a), b - 1) {
                        return Err(self.bad(format!("simplicial identity fails on {}", s.name)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn nd_simplex(&self, i: usize) -> Simplex {
        Simplex { nd: i, surj: (0..=self.simplices[i].dim).collect() }
    }

    /// d_i x.
    pub fn face(&self, x: &Simplex, i: usize) -> Simplex {
        let s = &x.surj;
        let comp: Vec<usize> = (0..s.len()).filter(|&a| a != i).map(|a| s[a]).collect();
        let j = s[i];
        if comp.contains(&j) {
            return Simplex { nd: x.nd, surj: comp };
        }
        let f = &self.simplices[x.nd].faces[j];
        Simplex { nd: f.nd, surj: comp.iter().map(|&v| f.surj[if v > j { v - 1 } else { v }]).collect() }
    }

    /// The face spanned by vertices a..=b.
    pub fn sub(&self, x: &Simplex, a: usize, b: usize) -> Simplex {
        let mut y = x.clone();
        while y.dim() > b {
            y = self.face(&y, y.dim());
        }
        for _ in 0..a {
            y = self.face(&y, 0);
        }
        y
    }

    pub fn label(&self, x: &Simplex) -> String {
        let n = &self.simplices[x.nd].name;
        if x.is_degenerate() {
            let s: Vec<String> = x.surj.iter().map(|v| v.to_string()).collect();
            format!("{n}[{}]", s.join(""))
        } else {
            n.clone()
        }
    }

    /// Every simplex of dimension m (degenerate ones included).
    pub fn simplices_of_dim(&self, m: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (i, s) in self.simplices.iter().enumerate() {
            if s.dim > m {
                continue;
            }
            // monotone surjections [m] → [dim]: choose which of the m steps increase
            let mut stack = vec![vec![0usize]];
            while let Some(v) = stack.pop() {
                let last = *v.last().unwrap();
                if v.len() == m + 1 {
                    if last == s.dim {
                        out.push(Simplex { nd: i, surj: v });
                    }
                    continue;
                }
                let left = m + 1 - v.len();
                for next in [last, last + 1] {
                    if next <= s.dim && s.dim - next <= left - 1 {
                        let mut w = v.clone();
                        w.push(next);
                        stack.push(w);
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn max_dim(&self) -> usize {
        self.simplices.iter().map(|s| s.dim).max().unwrap_or(0)
    }
}

/// Reduced normalized chains with their diagonal.
pub struct ReducedChains {
    pub space: SimplicialSet,
    /// nondegenerate simplices other than the basepoint, in order
    pub cells: Vec<usize>,
    pub complex: ChainComplex,
}

impl ReducedChains {
    pub fn new(k: &SimplicialSet, field: Field) -> Self {
        let cells: Vec<usize> = (0..k.simplices.len()).filter(|&i| i != k.base).collect();
        let pos: HashMap<usize, usize> = cells.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let basis = cells.iter().map(|&i| BasisElem::new(k.simplices[i].name.clone(), k.simplices[i].dim as i32)).collect();
        let cols = cells
            .iter()
            .map(|&i| {
                let me = k.nd_simplex(i);
                let mut col = Vec::new();
                if k.simplices[i].dim > 0 {
                    for a in 0..=me.dim() {
                        let f = k.face(&me, a);
                        if !f.is_degenerate() && f.nd != k.base {
                            col.push((pos[&f.nd], field.sign(a % 2 == 1)));
                        }
                    }
                }
                normalize(col)
            })
            .collect();
        let d = SparseMatrix::from_cols(field, cells.len(), cols);
        let complex = ChainComplex::new(field, basis, d).expect("reduced chains");
        ReducedChains { space: k.clone(), cells, complex }
    }

    pub fn degree(&self, c: usize) -> i32 {
        self.complex.degree(c)
    }

    /// Iterated Alexander–Whitney diagonal C̃ → C̃^{⊗m} on a basis cell.
    pub fn diagonal(&self, c: usize, m: usize) -> Vec<(Vec<usize>, Scalar)> {
        let k = &self.space;
        let field = self.complex.field();
        let x = k.nd_simplex(self.cells[c]);
        let d = x.dim();
        let pos: HashMap<usize, usize> = self.cells.iter().enumerate().map(|(a, b)| (*b, a)).collect();
        let mut out = Vec::new();
        let mut cuts = vec![vec![0usize]];
        for _ in 1..m {
            cuts = cuts.into_iter().flat_map(|v| { let last = *v.last().unwrap(); (last..=d).map(move |p| { let mut w = v.clone(); w.push(p); w }) }).collect();
        }
        'cut: for mut v in cuts {
            v.push(d);
            let mut word = Vec::with_capacity(m);
            for w in v.windows(2) {
                let y = k.sub(&x, w[0], w[1]);
                if y.is_degenerate() || y.nd == k.base {
                    continue 'cut;
                }
                word.push(pos[&y.nd]);
            }
            out.push((word, field.one()));
        }
        out
    }

    /// Whether the reduced diagonal is cocommutative with Koszul signs.
    pub fn is_cocommutative(&self) -> bool {
        (0..self.cells.len()).all(|c| {
            let terms = self.diagonal(c, 2);
            let mut swapped: Vec<(Vec<usize>, Scalar)> = terms
                .iter()
                .map(|(w, x)| {
                    let odd = (self.degree(w[0]) * self.degree(w[1])).rem_euclid(2) == 1;
                    (vec![w[1], w[0]], x.clone().negate_if(odd))
                })
                .collect();
            let mut a = terms.clone();
            a.sort_by(|p, q| p.0.cmp(&q.0));
            swapped.sort_by(|p, q| p.0.cmp(&q.0));
            a == swapped
        })
    }
}

/// Position i moves to σ(i): the tuple read in the new order.
fn permuted<T: Clone>(sigma: &[usize], xs: &[T]) -> (Vec<T>, Vec<usize>) {
    let inv = inverse(sigma);
    (inv.iter().map(|&i| xs[i].clone()).collect(), inv)
}

fn tensor_power(ch: &ReducedChains, n: usize) -> (KeyedBuilder<Vec<usize>>, EquivariantComplex) {
    let field = ch.complex.field();
    let c = ch.cells.len();
    let mut keys = vec![vec![]];
    for _ in 0..n {
        keys = keys.into_iter().flat_map(|v: Vec<usize>| (0..c).map(move |i| { let mut w = v.clone(); w.push(i); w })).collect();
    }
    let b = KeyedBuilder::new(keys);
    let d = ch.complex.differential();
    let e = b.build(
        field,
        n,
        |w| w.iter().map(|i| ch.complex.basis()[*i].label.clone()).collect::<Vec<_>>().join("⊗"),
        |w| w.iter().map(|i| ch.degree(*i)).sum(),
        |w| {
            let mut out = Vec::new();
            let mut before = 0;
            for (p, i) in w.iter().enumerate() {
                let s = field.sign(before % 2 == 1);
                for (r, x) in &d.cols[*i] {
                    let mut v = w.clone();
                    v[p] = *r;
                    out.push((v, x.mul(&s)));
                }
                before += ch.degree(*i);
            }
            out
        },
        |sigma, w| {
            let degs: Vec<i32> = w.iter().map(|i| ch.degree(*i)).collect();
            let (v, order) = permuted(sigma, w);
            vec![(v, field.sign(koszul_odd(&degs, &order)))]
        },
    );
    (b, e)
}

/// Nondegenerate simplices of Kⁿ off the wedge locus.
fn smash_cells(k: &SimplicialSet, n: usize) -> Vec<Vec<Simplex>> {
    let mut out = Vec::new();
    for m in 0..=n * k.max_dim() {
        let simp: Vec<Simplex> = k.simplices_of_dim(m).into_iter().filter(|s| s.nd != k.base).collect();
        let mut tuples: Vec<Vec<Simplex>> = vec![vec![]];
        for _ in 0..n {
            tuples = tuples.into_iter().flat_map(|t| simp.iter().map(move |s| { let mut u = t.clone(); u.push(s.clone()); u })).collect();
        }
        out.extend(tuples.into_iter().filter(|t| !product_degenerate(t)));
    }
    out
}

fn product_degenerate(t: &[Simplex]) -> bool {
    let m = t[0].dim();
    (0..m).any(|j| t.iter().all(|s| s.surj[j] == s.surj[j + 1]))
}

fn smash_power(k: &SimplicialSet, field: Field, n: usize) -> (KeyedBuilder<Vec<Simplex>>, EquivariantComplex) {
    let b = KeyedBuilder::new(smash_cells(k, n));
    let e = b.build(
        field,
        n,
        |t| format!("({})", t.iter().map(|s| k.label(s)).collect::<Vec<_>>().join(",")),
        |t| t[0].dim() as i32,
        |t| {
            let m = t[0].dim();
            let mut out = Vec::new();
            if m == 0 {
                return out;
            }
            for i in 0..=m {
                let f: Vec<Simplex> = t.iter().map(|s| k.face(s, i)).collect();
                if f.iter().any(|s| s.nd == k.base) || product_degenerate(&f) {
                    continue;
                }
                out.push((f, field.sign(i % 2 == 1)));
            }
            out
        },
        |sigma, t| vec![(permuted(sigma, t).0, field.one())],
    );
    (b, e)
}

/// Σ^∞K^{∧*} at chain level as a right Com-module.
///
/// With a cocommutative reduced diagonal the arity-n term is C̃(K)^{⊗n} and the action
/// is the iterated Alexander–Whitney map. Otherwise the tensor model is not strictly
/// equivariant, and the arity-n term is C̃(K^{∧n}) with the action induced by diagonals.
pub fn module_from_simplicial_set(k: &SimplicialSet, com: &Arc<Operad>) -> Result<RightModule, SpaceError> {
    let field = com.field();
    let nmax = com.arity_max();
    let ch = Arc::new(ReducedChains::new(k, field));
    if ch.is_cocommutative() {
        let parts: Vec<(KeyedBuilder<Vec<usize>>, EquivariantComplex)> = (1..=nmax).map(|n| tensor_power(&ch, n)).collect();
        let mut bases = Vec::new();
        let mut comps = Vec::new();
        for (b, e) in parts {
            bases.push(b);
            comps.push(Arc::new(e));
        }
        let seq = SymSeq::new(field, nmax, comps)?;
        let f: ShapeFn = Arc::new(move |x, ys| {
            let k = ys.len();
            let n: usize = ys.iter().map(|y| y.0).sum();
            let w = &bases[k - 1].keys[x];
            let factors: Vec<Vec<(Vec<usize>, Scalar)>> = w.iter().zip(ys).map(|(c, (m, _))| ch.diagonal(*c, *m)).collect();
            let mut out = Vec::new();
            let mut acc: Vec<(Vec<usize>, Scalar)> = vec![(vec![], field.one())];
            for fs in &factors {
                acc = acc.iter().flat_map(|(v, a)| fs.iter().map(move |(u, b)| { let mut z = v.clone(); z.extend(u); (z, a.mul(b)) })).collect();
            }
            for (v, a) in acc {
                out.push((bases[n - 1].idx(&v), a));
            }
            normalize(out)
        });
        return Ok(RightModule::new(format!("Σ∞{}", k.name), seq, com.clone(), f)?);
    }
    let parts: Vec<(KeyedBuilder<Vec<Simplex>>, EquivariantComplex)> = (1..=nmax).map(|n| smash_power(k, field, n)).collect();
    let mut bases = Vec::new();
    let mut comps = Vec::new();
    for (b, e) in parts {
        bases.push(b);
        comps.push(Arc::new(e));
    }
    let seq = SymSeq::new(field, nmax, comps)?;
    let f: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let n: usize = ys.iter().map(|y| y.0).sum();
        let t = &bases[k - 1].keys[x];
        let mut v = Vec::with_capacity(n);
        for (s, (m, _)) in t.iter().zip(ys) {
            v.extend(std::iter::repeat(s.clone()).take(*m));
        }
        vec![(bases[n - 1].idx(&v), field.one())]
    });
    Ok(RightModule::new(format!("Σ∞{}", k.name), seq, com.clone(), f)?)
}

/// D C̃(K) in every arity, with the left Com-action dual to the iterated diagonal.
pub fn smash_comodule(k: &SimplicialSet, com: &Arc<Operad>) -> Result<LeftModule, SpaceError> {
    let field = com.field();
    let ch = Arc::new(ReducedChains::new(k, field));
    if !ch.is_cocommutative() {
        return Err(SpaceError::NotCocommutative(k.name.clone()));
    }
    let dual = Arc::new(ch.complex.dual());
    let seq = SymSeq::from_fn(field, com.arity_max(), |n| EquivariantComplex::trivial(n, dual.clone()));
    let nc = ch.cells.len();
    let mut table: HashMap<Vec<usize>, SVec> = HashMap::new();
    for c in 0..nc {
        for kk in 1..=com.arity_max() {
            for (w, x) in ch.diagonal(c, kk) {
                let degs: Vec<i32> = w.iter().map(|i| ch.degree(*i)).collect();
                let mut odd = false;
                let mut acc = 0;
                for d in &degs {
                    odd ^= (acc * d) % 2 != 0;
                    acc += d;
                }
                table.entry(w).or_default().push((c, x.negate_if(odd)));
            }
        }
    }
    let f: ShapeFn = Arc::new(move |_, ys| {
        let w: Vec<usize> = ys.iter().map(|y| y.1).collect();
        table.get(&w).map(|v| normalize(v.clone())).unwrap_or_default()
    });
    Ok(LeftModule::new(format!("D{}", k.name), seq, com.clone(), f)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operad::{check_left_module_axioms, check_right_module_axioms, com_operad};

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    #[test]
    fn named_sets_have_the_homology_of_spheres() {
        let s0 = ReducedChains::new(&SimplicialSet::named("s0").unwrap(), Field::Q);
        assert_eq!(s0.complex.homology(), [(0, 1)].into());
        for name in ["s1-minimal", "s1-square"] {
            let c = ReducedChains::new(&SimplicialSet::named(name).unwrap(), Field::Q);
            assert_eq!(c.complex.homology(), [(1, 1)].into(), "{name}");
        }
        assert!(SimplicialSet::named("s7").is_err());
    }

    #[test]
    fn degenerate_faces() {
        let k = SimplicialSet::named("s1-minimal").unwrap();
        let x = Simplex { nd: 1, surj: vec![0, 0, 1] };
        assert_eq!(k.face(&x, 0), Simplex { nd: 1, surj: vec![0, 1] });
        assert_eq!(k.face(&x, 1), Simplex { nd: 1, surj: vec![0, 1] });
        assert_eq!(k.face(&x, 2), Simplex { nd: 0, surj: vec![0, 0] });
        assert_eq!(k.simplices_of_dim(2).len(), 1 + 2);
    }

    #[test]
    fn cocommutativity() {
        for (name, expect) in [("s0", true), ("s1-minimal", true), ("s1-square", false)] {
            let c = ReducedChains::new(&SimplicialSet::named(name).unwrap(), Field::Q);
            assert_eq!(c.is_cocommutative(), expect, "{name}");
        }
    }

    #[test]
    fn minimal_circle_module() {
        let k = SimplicialSet::named("s1-minimal").unwrap();
        let r = module_from_simplicial_set(&k, &com(3)).unwrap();
        let c2 = r.seq.comp(2);
        assert_eq!(c2.dim(), 1);
        assert_eq!(c2.degree(0), 2);
        assert_eq!(c2.act(&[1, 0], 0), vec![(0, Field::Q.int(-1))]);
        assert!(check_right_module_axioms(&r).passed());
    }

    #[test]
    fn zero_sphere_module() {
        let k = SimplicialSet::named("s0").unwrap();
        let r = module_from_simplicial_set(&k, &com(4)).unwrap();
        for n in 1..=4 {
            assert_eq!(r.seq.dims()[n - 1], [(0, 1)].into());
            assert_eq!(r.act.standard(0, &vec![(1, 0); n]), vec![(0, Field::Q.one())]);
        }
        assert!(check_right_module_axioms(&r).passed());
    }

    #[test]
    fn square_circle_uses_smash_powers() {
        let k = SimplicialSet::named("s1-square").unwrap();
        let r = module_from_simplicial_set(&k, &com(3)).unwrap();
        assert!(check_right_module_axioms(&r).passed());
        // S¹∧S¹ ≃ S², S¹∧S¹∧S¹ ≃ S³
        for n in 1..=3 {
            assert_eq!(r.seq.homology()[n - 1], [(n as i32, 1)].into(), "arity {n}");
        }
        let twist = r.seq.comp(2).homology_character();
        assert_eq!(twist[0].2[0], Field::Q.int(-1));
    }

    #[test]
    fn smash_comodules() {
        let k = SimplicialSet::named("s1-minimal").unwrap();
        let l = smash_comodule(&k, &com(3)).unwrap();
        assert!(check_left_module_axioms(&l).passed());
        assert_eq!(l.seq.dims()[2], [(-1, 1)].into());
        assert!(l.act.standard(0, &[(1, 0), (1, 0)]).is_empty());
        let s0 = smash_comodule(&SimplicialSet::named("s0").unwrap(), &com(3)).unwrap();
        assert!(check_left_module_axioms(&s0).passed());
        assert_eq!(s0.act.standard(0, &[(1, 0), (2, 0)]), vec![(0, Field::Q.one())]);
        assert!(matches!(smash_comodule(&SimplicialSet::named("s1-square").unwrap(), &com(3)), Err(SpaceError::NotCocommutative(_))));
    }
}
