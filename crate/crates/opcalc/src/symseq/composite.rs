//! Iterated composition products S₀∘S₁∘…∘S_m on a basis of partition towers.
//!
//! An element of arity n is a tower top = P₀ ⪰ P₁ ⪰ … ⪰ P_m ⪰ P_{m+1} = discrete
//! together with one label of S_j on each block of P_j, whose inputs are the
//! blocks of P_{j+1} it contains (ordered by minimal element). Labels are stored
//! level by level, blocks in order; this is also the tensor order used for signs.

use std::sync::Arc;

use rayon::prelude::*;

use super::equivariant::{tensor_expand, EquivariantComplex, KeyedBuilder};
use super::partition::{self as pt, Partition};
use super::perm::koszul_odd;
use super::seq::{SeqError, SymSeq};
use crate::chaincore::matrix::SVec;
use crate::chaincore::Scalar;

/// A structure map A(k)⊗B(n₁)⊗…⊗B(n_k) → T(n) evaluated on a relative partition λ of
/// {0..n−1} whose i-th block (by minimum) receives the i-th inner label.
pub trait StructureMap: Sync {
    fn relative(&self, lambda: &[u32], outer: usize, inner: &[(usize, usize)]) -> SVec;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tower {
    /// P₁ … P_m (the top and discrete ends are implicit).
    pub chain: Vec<Partition>,
    pub labels: Vec<usize>,
}

/// Position of one label in a tower.
#[derive(Clone, Debug)]
pub struct Slot {
    pub level: usize,
    pub block: u32,
    pub children: Vec<u32>,
}

/// Composite S₀∘…∘S_m; `strict[j]` demands P_j ≠ P_{j+1}.
#[derive(Clone)]
pub struct Levelled {
    pub seqs: Vec<SymSeq>,
    pub strict: Vec<bool>,
}

impl Levelled {
    pub fn new(seqs: Vec<SymSeq>, strict: Vec<bool>) -> Self {
        assert_eq!(seqs.len(), strict.len());
        Levelled { seqs, strict }
    }

    pub fn plain(seqs: Vec<SymSeq>) -> Self {
        let k = seqs.len();
        Levelled::new(seqs, vec![false; k])
    }

    fn depth(&self) -> usize {
        self.seqs.len() - 1
    }

    /// Whether every strict level actually refines.
    pub fn is_strict(&self, t: &Tower, n: usize) -> bool {
        (0..self.seqs.len()).all(|j| !self.strict[j] || self.partition(t, n, j) != self.partition(t, n, j + 1))
    }

    pub fn partition(&self, t: &Tower, n: usize, j: usize) -> Partition {
        if j == 0 {
            pt::top(n)
        } else if j <= self.depth() {
            t.chain[j - 1].clone()
        } else {
            pt::discrete(n)
        }
    }

    pub fn slots(&self, t: &Tower, n: usize) -> Vec<Slot> {
        let mut out = Vec::with_capacity(t.labels.len());
        for j in 0..self.seqs.len() {
            let p = self.partition(t, n, j);
            let q = self.partition(t, n, j + 1);
            for b in p {
                out.push(Slot { level: j, block: b, children: pt::children(b, &q) });
            }
        }
        out
    }

    pub fn label_comp(&self, s: &Slot) -> &Arc<EquivariantComplex> {
        self.seqs[s.level].comp(s.children.len())
    }

    pub fn degrees(&self, t: &Tower, slots: &[Slot]) -> Vec<i32> {
        slots.iter().zip(&t.labels).map(|(s, l)| self.label_comp(s).degree(*l)).collect()
    }

    pub fn degree(&self, t: &Tower, n: usize) -> i32 {
        let slots = self.slots(t, n);
        self.degrees(t, &slots).iter().sum()
    }

    /// All towers of arity n, deterministic order.
    pub fn enumerate(&self, n: usize) -> Vec<Tower> {
        let mut chains: Vec<Vec<Partition>> = vec![vec![]];
        let m = self.depth();
        for j in 0..=m {
            let mut next = Vec::new();
            for c in &chains {
                let p = if j == 0 { pt::top(n) } else { c[j - 1].clone() };
                let cands = if j == m { vec![pt::discrete(n)] } else { pt::refinements(&p) };
                for q in cands {
                    if self.strict[j] && q == p {
                        continue;
                    }
                    if p.iter().any(|b| self.seqs[j].dim(pt::children(*b, &q).len()) == 0) {
                        continue;
                    }
                    let mut c2 = c.clone();
                    if j < m {
                        c2.push(q);
                    }
                    next.push(c2);
                }
            }
            chains = next;
        }
        let mut out = Vec::new();
        for chain in chains {
            let t = Tower { chain, labels: vec![] };
            let dims: Vec<usize> = self.slots(&t, n).iter().map(|s| self.label_comp(s).dim()).collect();
            let mut labels = vec![0usize; dims.len()];
            'outer: loop {
                out.push(Tower { chain: t.chain.clone(), labels: labels.clone() });
                for k in (0..labels.len()).rev() {
                    labels[k] += 1;
                    if labels[k] < dims[k] {
                        continue 'outer;
                    }
                    labels[k] = 0;
                }
                break;
            }
        }
        out
    }

    pub fn label(&self, t: &Tower, n: usize) -> String {
        let parts: Vec<String> = t.chain.iter().map(|p| pt::fmt_partition(p)).collect();
        let slots = self.slots(t, n);
        let mut levels: Vec<Vec<String>> = vec![Vec::new(); self.seqs.len()];
        for (s, l) in slots.iter().zip(&t.labels) {
            levels[s.level].push(self.label_comp(s).complex.basis()[*l].label.clone());
        }
        let ls: Vec<String> = levels.iter().map(|v| v.join(",")).collect();
        format!("{}|{}", parts.join(">"), ls.join(";"))
    }

    /// Leibniz rule over the labels.
    pub fn differential(&self, t: &Tower, n: usize) -> Vec<(Tower, Scalar)> {
        let field = self.seqs[0].field;
        let slots = self.slots(t, n);
        let degs = self.degrees(t, &slots);
        let mut out = Vec::new();
        let mut before = 0;
        for (k, s) in slots.iter().enumerate() {
            let c = self.label_comp(s);
            let sign = field.sign(before % 2 != 0);
            for (r, x) in &c.complex.differential().cols[t.labels[k]] {
                let mut t2 = t.clone();
                t2.labels[k] = *r;
                out.push((t2, x.mul(&sign)));
            }
            before += degs[k];
        }
        out
    }

    /// σ acting on a tower.
    pub fn act(&self, sigma: &[usize], t: &Tower, n: usize) -> Vec<(Tower, Scalar)> {
        let field = self.seqs[0].field;
        let slots = self.slots(t, n);
        let degs = self.degrees(t, &slots);
        let chain: Vec<Partition> = t.chain.iter().map(|p| pt::permute_partition(sigma, p).0).collect();
        let mut order = vec![0usize; slots.len()];
        let mut images: Vec<SVec> = vec![Vec::new(); slots.len()];
        let mut start = 0;
        for j in 0..self.seqs.len() {
            let p = self.partition(t, n, j);
            let pi = pt::permute_partition(sigma, &p).1;
            for (i, _) in p.iter().enumerate() {
                let old = start + i;
                let new = start + pi[i];
                order[new] = old;
                let rho = pt::relabel(&slots[old].children, sigma);
                images[new] = self.label_comp(&slots[old]).act(&rho, t.labels[old]);
            }
            start += p.len();
        }
        let sign = field.sign(koszul_odd(&degs, &order));
        tensor_expand(&images, field)
            .into_iter()
            .map(|(labels, x)| (Tower { chain: chain.clone(), labels }, x.mul(&sign)))
            .collect()
    }

    /// Range of label positions occupied by level j.
    pub fn level_range(&self, t: &Tower, n: usize, j: usize) -> std::ops::Range<usize> {
        let start: usize = (0..j).map(|i| self.partition(t, n, i).len()).sum();
        start..start + self.partition(t, n, j).len()
    }

    /// Fuses levels j and j+1 through a structure map; the result drops P_{j+1}.
    pub fn merge(&self, t: &Tower, n: usize, j: usize, map: &dyn StructureMap) -> Vec<(Tower, Scalar)> {
        let field = self.seqs[0].field;
        let slots = self.slots(t, n);
        let degs = self.degrees(t, &slots);
        let outer = self.level_range(t, n, j);
        let inner = self.level_range(t, n, j + 1);
        let below = self.partition(t, n, j + 2);
        let mut order = Vec::with_capacity(outer.len() + inner.len());
        let mut images: Vec<SVec> = Vec::with_capacity(outer.len());
        for o in outer.clone() {
            order.push(o);
            let grand = pt::children(slots[o].block, &below);
            let mut lambda = Vec::new();
            let mut ins = Vec::new();
            for c in inner.clone() {
                if slots[c].block & slots[o].block == slots[c].block {
                    order.push(c);
                    lambda.push(pt::children(slots[c].block, &grand).iter().fold(0u32, |m, g| m | 1 << grand.iter().position(|x| x == g).unwrap()));
                    ins.push((slots[c].children.len(), t.labels[c]));
                }
            }
            images.push(map.relative(&lambda, t.labels[o], &ins));
        }
        let local: Vec<i32> = degs[outer.start..inner.end].to_vec();
        let ord: Vec<usize> = order.iter().map(|i| i - outer.start).collect();
        let sign = field.sign(koszul_odd(&local, &ord));
        let mut chain = t.chain.clone();
        chain.remove(j);
        tensor_expand(&images, field)
            .into_iter()
            .map(|(mid, x)| {
                let mut labels = t.labels[..outer.start].to_vec();
                labels.extend(mid);
                labels.extend_from_slice(&t.labels[inner.end..]);
                (Tower { chain: chain.clone(), labels }, x.mul(&sign))
            })
            .collect()
    }

    /// Inserts a level of unit labels (index `unit`) right after level j, duplicating P_{j+1}.
    pub fn insert_unit(&self, t: &Tower, n: usize, j: usize, unit: usize) -> Tower {
        let p = self.partition(t, n, j + 1);
        let r = self.level_range(t, n, j + 1);
        let mut chain = t.chain.clone();
        chain.insert(j, p.clone());
        let mut labels = t.labels[..r.start].to_vec();
        labels.extend(std::iter::repeat(unit).take(p.len()));
        labels.extend_from_slice(&t.labels[r.start..]);
        Tower { chain, labels }
    }

    /// Splits off the levels above j: the outer tower lives on the blocks of P_{j+1}
    /// (levels 0..=j), the inner towers on each block (levels j+1..). Returns the sign
    /// of the label reordering.
    pub fn split(&self, t: &Tower, n: usize, j: usize) -> (Partition, Tower, Vec<Tower>, bool) {
        let slots = self.slots(t, n);
        let degs = self.degrees(t, &slots);
        let cut = self.partition(t, n, j + 1);
        let index = |b: u32| -> u32 { cut.iter().enumerate().filter(|(_, c)| *c & b == **c).fold(0, |m, (i, _)| m | 1 << i) };
        let outer_chain = t.chain[..j].iter().map(|p| p.iter().map(|b| index(*b)).collect()).collect();
        let split_at = self.level_range(t, n, j).end;
        let outer = Tower { chain: outer_chain, labels: t.labels[..split_at].to_vec() };
        let mut order: Vec<usize> = (0..split_at).collect();
        let mut inners = Vec::with_capacity(cut.len());
        for &b in &cut {
            let compress = |m: u32| -> u32 { pt::elements(b).enumerate().filter(|(_, e)| m >> e & 1 == 1).fold(0, |acc, (i, _)| acc | 1 << i) };
            let chain = t.chain[j + 1..].iter().map(|p| pt::children(b, p).into_iter().map(compress).collect()).collect();
            let mut labels = Vec::new();
            for (k, s) in slots.iter().enumerate().skip(split_at) {
                if s.block & b == s.block {
                    order.push(k);
                    labels.push(t.labels[k]);
                }
            }
            inners.push(Tower { chain, labels });
        }
        (cut, outer, inners, koszul_odd(&degs, &order))
    }

    /// Inverse of `split`: hangs inner towers (levels j+1..) below the blocks λ of an outer
    /// tower with levels 0..=j on #λ inputs. Returns the tower and the reordering parity.
    pub fn join(&self, outer: &Tower, lambda: &Partition, inners: &[Tower]) -> (Tower, bool) {
        let n: usize = lambda.iter().map(|b| pt::size(*b)).sum();
        let j = outer.chain.len();
        let lift = |p: &Partition| -> Partition { pt::canonical(p.iter().map(|b| pt::elements(*b).fold(0u32, |m, i| m | lambda[i])).collect()) };
        let mut chain: Vec<Partition> = outer.chain.iter().map(lift).collect();
        chain.push(lambda.clone());
        let depth = self.depth();
        for l in j + 1..depth {
            let mut blocks = Vec::new();
            for (b, t) in lambda.iter().zip(inners) {
                let elts: Vec<usize> = pt::elements(*b).collect();
                blocks.extend(t.chain[l - j - 1].iter().map(|m| pt::elements(*m).fold(0u32, |acc, e| acc | 1 << elts[e])));
            }
            chain.push(pt::canonical(blocks));
        }
        let mut src = outer.labels.len();
        let mut out_labels = outer.labels.clone();
        let mut tail: Vec<(usize, u32, usize, usize)> = Vec::new();
        for (b, t) in lambda.iter().zip(inners) {
            let elts: Vec<usize> = pt::elements(*b).collect();
            let mut k = 0;
            for l in 0..(depth - j) {
                let sub = if l == 0 { vec![pt::full(elts.len())] } else { t.chain[l - 1].clone() };
                for blk in sub {
                    let lifted = pt::elements(blk).fold(0u32, |acc, e| acc | 1 << elts[e]);
                    tail.push((l, pt::min_elt(lifted), src, t.labels[k]));
                    k += 1;
                    src += 1;
                }
            }
        }
        tail.sort_by_key(|e| (e.0, e.1));
        let mut order: Vec<usize> = (0..outer.labels.len()).collect();
        for e in &tail {
            order.push(e.2);
            out_labels.push(e.3);
        }
        let t = Tower { chain, labels: out_labels };
        let slots = self.slots(&t, n);
        let degs_final = self.degrees(&t, &slots);
        let mut degs = vec![0; degs_final.len()];
        for (pos, &s) in order.iter().enumerate() {
            degs[s] = degs_final[pos];
        }
        let odd = koszul_odd(&degs, &order);
        (t, odd)
    }

    pub fn component(&self, n: usize) -> EquivariantComplex {
        let field = self.seqs[0].field;
        let b = KeyedBuilder::new(self.enumerate(n));
        b.build(field, n, |t| self.label(t, n), |t| self.degree(t, n), |t| self.differential(t, n), |s, t| self.act(s, t, n))
    }

    pub fn builder(&self, n: usize) -> KeyedBuilder<Tower> {
        KeyedBuilder::new(self.enumerate(n))
    }

    pub fn to_symseq(&self) -> SymSeq {
        let s0 = &self.seqs[0];
        let comps: Vec<Arc<EquivariantComplex>> = (1..=s0.arity_max).into_par_iter().map(|n| Arc::new(self.component(n))).collect();
        SymSeq::new(s0.field, s0.arity_max, comps).expect("composite")
    }
}

/// A levelled composite together with its keyed bases.
#[derive(Clone)]
pub struct LevelledSeq {
    pub lv: Levelled,
    pub bases: Vec<Arc<KeyedBuilder<Tower>>>,
    pub seq: SymSeq,
}

impl LevelledSeq {
    pub fn build(lv: Levelled) -> LevelledSeq {
        let nmax = lv.seqs[0].arity_max;
        let field = lv.seqs[0].field;
        let parts: Vec<(KeyedBuilder<Tower>, EquivariantComplex)> = (1..=nmax)
            .into_par_iter()
            .map(|n| {
                let b = lv.builder(n);
                let e = b.build(field, n, |t| lv.label(t, n), |t| lv.degree(t, n), |t| lv.differential(t, n), |s, t| lv.act(s, t, n));
                (b, e)
            })
            .collect();
        let mut bases = Vec::new();
        let mut comps = Vec::new();
        for (b, e) in parts {
            bases.push(Arc::new(b));
            comps.push(Arc::new(e));
        }
        let seq = SymSeq::new(field, nmax, comps).expect("composite");
        LevelledSeq { lv, bases, seq }
    }

    pub fn basis(&self, n: usize) -> &KeyedBuilder<Tower> {
        &self.bases[n - 1]
    }

    pub fn tower(&self, n: usize, i: usize) -> &Tower {
        &self.basis(n).keys[i]
    }
}

/// Converts tower terms into a vector on a keyed basis.
pub fn to_vector(b: &KeyedBuilder<Tower>, terms: Vec<(Tower, Scalar)>) -> SVec {
    b.column(terms)
}

/// Sums equal towers and drops zeros.
pub fn collect_terms(terms: Vec<(Tower, Scalar)>) -> Vec<(Tower, Scalar)> {
    let mut m: std::collections::BTreeMap<Tower, Scalar> = std::collections::BTreeMap::new();
    for (t, x) in terms {
        match m.get_mut(&t) {
            Some(y) => *y = y.add(&x),
            None => {
                m.insert(t, x);
            }
        }
    }
    m.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

/// The composition product A∘B.
pub fn compose(a: &SymSeq, b: &SymSeq) -> Result<SymSeq, SeqError> {
    a.check_compatible(b)?;
    Ok(Levelled::plain(vec![a.clone(), b.clone()]).to_symseq())
}

/// S₀∘S₁∘…∘S_m on the flattened tower basis.
pub fn compose_many(seqs: &[SymSeq]) -> Result<SymSeq, SeqError> {
    for s in &seqs[1..] {
        seqs[0].check_compatible(s)?;
    }
    Ok(Levelled::plain(seqs.to_vec()).to_symseq())
}

/// Independent count: Σ_λ dim A(#λ)·Π dim B(|b|).
pub fn composite_dim(a: &SymSeq, b: &SymSeq, n: usize) -> usize {
    pt::all_partitions(n).iter().map(|l| a.dim(l.len()) * l.iter().map(|blk| b.dim(pt::size(*blk))).product::<usize>()).sum()
}
