//! Leaf-labelled rooted trees stored as laminar families of vertex sets.
//!
//! A vertex is its set of leaves plus a kind: an optional root vertex (module label),
//! inner vertices with at least two inputs, and optional bottom vertices (module
//! labels whose inputs are single leaves). Vertices are kept in canonical order by
//! (minimal leaf, decreasing size, kind); this order is the tensor order for signs.

use std::cmp::Reverse;
use std::sync::Arc;

use crate::chaincore::matrix::SVec;
use crate::chaincore::{Field, Scalar};
use crate::symseq::equivariant::{tensor_expand, EquivariantComplex, KeyedBuilder};
use crate::symseq::partition::{self as pt, Partition};
use crate::symseq::perm::koszul_odd;
use crate::symseq::SymSeq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Root,
    Inner,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub set: u32,
    pub kind: Kind,
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tree {
    pub verts: Vec<Vertex>,
}

fn order_key(v: &Vertex) -> (u32, Reverse<u32>, Kind) {
    (pt::min_elt(v.set), Reverse(v.set.count_ones()), v.kind)
}

/// w sits strictly below v.
fn below(w: &Vertex, v: &Vertex) -> bool {
    (w.set & v.set == w.set && w.set != v.set) || (w.set == v.set && w.kind > v.kind)
}

/// Which sequences decorate which vertices.
#[derive(Clone, Debug)]
pub struct TreeFamily {
    pub field: Field,
    pub arity_max: usize,
    pub root: Option<SymSeq>,
    pub inner: SymSeq,
    pub leaf: Option<SymSeq>,
    /// Degree shift of inner labels (1 for the bar construction).
    pub shift: i32,
}

impl TreeFamily {
    pub fn seq(&self, k: Kind) -> &SymSeq {
        match k {
            Kind::Root => self.root.as_ref().expect("no root sequence"),
            Kind::Inner => &self.inner,
            Kind::Leaf => self.leaf.as_ref().expect("no bottom sequence"),
        }
    }

    /// Child sets of vertex i, by minimal element.
    pub fn children(&self, t: &Tree, i: usize) -> Vec<u32> {
        let v = &t.verts[i];
        if v.kind == Kind::Leaf {
            return pt::elements(v.set).map(|e| 1u32 << e).collect();
        }
        let cands: Vec<&Vertex> = t.verts.iter().filter(|w| below(w, v)).collect();
        let mut out: Vec<u32> = cands.iter().filter(|w| !cands.iter().any(|u| below(w, u))).map(|w| w.set).collect();
        let covered = out.iter().fold(0u32, |m, s| m | s);
        out.extend(pt::elements(v.set & !covered).map(|e| 1u32 << e));
        out.sort_by_key(|s| pt::min_elt(*s));
        out
    }

    pub fn vertex_degree(&self, v: &Vertex, arity: usize) -> i32 {
        let d = self.seq(v.kind).comp(arity).degree(v.label);
        if v.kind == Kind::Inner {
            d + self.shift
        } else {
            d
        }
    }

    pub fn degrees(&self, t: &Tree) -> Vec<i32> {
        (0..t.verts.len()).map(|i| self.vertex_degree(&t.verts[i], self.children(t, i).len())).collect()
    }

    pub fn degree(&self, t: &Tree) -> i32 {
        self.degrees(t).iter().sum()
    }

    /// Sorts vertices canonically; returns the Koszul parity of the reordering.
    pub fn canonicalize(&self, verts: Vec<Vertex>, degs: &[i32]) -> (Tree, bool) {
        let mut order: Vec<usize> = (0..verts.len()).collect();
        order.sort_by_key(|&i| order_key(&verts[i]));
        let odd = koszul_odd(degs, &order);
        (Tree { verts: order.iter().map(|&i| verts[i].clone()).collect() }, odd)
    }

    /// Vertex shapes (set, kind) of all trees on `set` hanging below a vertex.
    fn subtrees(&self, set: u32) -> Vec<Vec<(u32, Kind)>> {
        let mut out = Vec::new();
        if self.leaf.is_some() {
            out.push(vec![(set, Kind::Leaf)]);
        } else if set.count_ones() == 1 {
            out.push(vec![]);
        }
        if set.count_ones() >= 2 {
            for p in pt::set_partitions(set) {
                if p.len() < 2 {
                    continue;
                }
                for rest in self.forests(&p) {
                    let mut v = vec![(set, Kind::Inner)];
                    v.extend(rest);
                    out.push(v);
                }
            }
        }
        out
    }

    fn forests(&self, blocks: &[u32]) -> Vec<Vec<(u32, Kind)>> {
        let mut acc: Vec<Vec<(u32, Kind)>> = vec![vec![]];
        for b in blocks {
            let subs = self.subtrees(*b);
            let mut next = Vec::new();
            for a in &acc {
                for s in &subs {
                    let mut v = a.clone();
                    v.extend(s.iter().copied());
                    next.push(v);
                }
            }
            acc = next;
        }
        acc
    }

    /// Every decorated tree with n leaves, ordered by vertex count then encoding.
    pub fn enumerate(&self, n: usize) -> Vec<Tree> {
        let full = pt::full(n);
        let shapes: Vec<Vec<(u32, Kind)>> = if self.root.is_some() {
            pt::set_partitions(full)
                .iter()
                .flat_map(|p| {
                    self.forests(p).into_iter().map(|f| {
                        let mut v = vec![(full, Kind::Root)];
                        v.extend(f);
                        v
                    })
                })
                .collect()
        } else {
            self.subtrees(full)
        };
        let mut out = Vec::new();
        for shape in shapes {
            let mut verts: Vec<Vertex> = shape.iter().map(|&(set, kind)| Vertex { set, kind, label: 0 }).collect();
            verts.sort_by_key(order_key);
            let t = Tree { verts };
            let dims: Vec<usize> = (0..t.verts.len()).map(|i| self.seq(t.verts[i].kind).dim(self.children(&t, i).len())).collect();
            if dims.contains(&0) {
                continue;
            }
            for labels in crate::operad::structure::tensor_indices(&dims) {
                let mut t2 = t.clone();
                for (v, l) in t2.verts.iter_mut().zip(labels) {
                    v.label = l;
                }
                out.push(t2);
            }
        }
        out.sort_by(|a, b| (a.verts.len(), &a.verts).cmp(&(b.verts.len(), &b.verts)));
        out
    }

    pub fn label(&self, t: &Tree) -> String {
        if t.verts.is_empty() {
            return "|".into();
        }
        let parts: Vec<String> = (0..t.verts.len())
            .map(|i| {
                let v = &t.verts[i];
                let k = match v.kind {
                    Kind::Root => "R",
                    Kind::Inner => "P",
                    Kind::Leaf => "L",
                };
                let lab = &self.seq(v.kind).comp(self.children(t, i).len()).complex.basis()[v.label].label;
                format!("{k}{}:{lab}", pt::fmt_partition(&[v.set]))
            })
            .collect();
        format!("[{}]", parts.join(" "))
    }

    /// Leibniz differential on vertex labels (with d(sp) = (−1)^shift s(dp)).
    pub fn internal_differential(&self, t: &Tree) -> Vec<(Tree, Scalar)> {
        let degs = self.degrees(t);
        let mut out = Vec::new();
        let mut before: i32 = 0;
        for i in 0..t.verts.len() {
            let v = &t.verts[i];
            let ar = self.children(t, i).len();
            let odd = (before.rem_euclid(2) == 1) != (v.kind == Kind::Inner && self.shift.rem_euclid(2) == 1);
            let s = self.field.sign(odd);
            for (r, x) in &self.seq(v.kind).comp(ar).complex.differential().cols[v.label] {
                let mut t2 = t.clone();
                t2.verts[i].label = *r;
                out.push((t2, x.mul(&s)));
            }
            before += degs[i];
        }
        out
    }

    /// σ acting by relabelling leaves.
    pub fn act(&self, sigma: &[usize], t: &Tree) -> Vec<(Tree, Scalar)> {
        let degs = self.degrees(t);
        let mut verts = Vec::with_capacity(t.verts.len());
        let mut images: Vec<SVec> = Vec::with_capacity(t.verts.len());
        for i in 0..t.verts.len() {
            let v = &t.verts[i];
            let ch = self.children(t, i);
            let rho = pt::relabel(&ch, sigma);
            images.push(self.seq(v.kind).comp(ch.len()).act(&rho, v.label));
            verts.push(Vertex { set: pt::apply_perm(sigma, v.set), kind: v.kind, label: v.label });
        }
        let mut order: Vec<usize> = (0..verts.len()).collect();
        order.sort_by_key(|&i| order_key(&verts[i]));
        let sign = self.field.sign(koszul_odd(&degs, &order));
        let sorted: Vec<Vertex> = order.iter().map(|&i| verts[i].clone()).collect();
        let imgs: Vec<SVec> = order.iter().map(|&i| images[i].clone()).collect();
        tensor_expand(&imgs, self.field)
            .into_iter()
            .map(|(labels, x)| {
                let mut vs = sorted.clone();
                for (v, l) in vs.iter_mut().zip(labels) {
                    v.label = l;
                }
                (Tree { verts: vs }, x.mul(&sign))
            })
            .collect()
    }

    /// Grafts bottom trees onto the leaves of `top` along λ; returns the tree and the
    /// parity of moving (top, bottom₁, bottom₂, …) into canonical order.
    pub fn graft(&self, top: &Tree, top_family: &TreeFamily, lambda: &Partition, bottoms: &[Tree], bottom_family: &TreeFamily) -> (Tree, bool) {
        let mut verts = Vec::new();
        let mut degs = Vec::new();
        for (i, v) in top.verts.iter().enumerate() {
            degs.push(top_family.vertex_degree(v, top_family.children(top, i).len()));
            let set = pt::elements(v.set).fold(0u32, |m, b| m | lambda[b]);
            verts.push(Vertex { set, kind: v.kind, label: v.label });
        }
        for (b, t) in lambda.iter().zip(bottoms) {
            let elts: Vec<usize> = pt::elements(*b).collect();
            for (i, v) in t.verts.iter().enumerate() {
                degs.push(bottom_family.vertex_degree(v, bottom_family.children(t, i).len()));
                let set = pt::elements(v.set).fold(0u32, |m, e| m | 1 << elts[e]);
                verts.push(Vertex { set, kind: v.kind, label: v.label });
            }
        }
        self.canonicalize(verts, &degs)
    }

    /// Partitions λ along which the tree can be cut: every block is a non-root vertex set
    /// (or a bare leaf).
    pub fn cuts(&self, t: &Tree, n: usize) -> Vec<Partition> {
        let mut cands: Vec<u32> = t.verts.iter().filter(|v| v.kind != Kind::Root).map(|v| v.set).collect();
        if self.leaf.is_none() {
            cands.extend((0..n).map(|e| 1u32 << e));
        }
        cands.sort();
        cands.dedup();
        let mut out = Vec::new();
        fn rec(rest: u32, cands: &[u32], cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(pt::canonical(cur.clone()));
                return;
            }
            let m = 1u32 << pt::min_elt(rest);
            for &c in cands {
                if c & m != 0 && c & rest == c {
                    cur.push(c);
                    rec(rest & !c, cands, cur, out);
                    cur.pop();
                }
            }
        }
        rec(pt::full(n), &cands, &mut vec![], &mut out);
        out.sort();
        out
    }

    /// Cuts t along λ into a top tree (with leaves the blocks) and bottom trees (one per
    /// block), with the parity of reordering t's vertices into (top, bottoms…).
    pub fn cut(&self, t: &Tree, lambda: &Partition) -> (Tree, Vec<Tree>, bool) {
        let degs = self.degrees(t);
        let mut top = Vec::new();
        let mut top_idx = Vec::new();
        let mut bottoms: Vec<(Vec<Vertex>, Vec<usize>)> = vec![(vec![], vec![]); lambda.len()];
        for (i, v) in t.verts.iter().enumerate() {
            let inside = if v.kind == Kind::Root { None } else { lambda.iter().position(|b| v.set & b == v.set) };
            match inside {
                Some(j) => {
                    let elts: Vec<usize> = pt::elements(lambda[j]).collect();
                    let set = pt::elements(v.set).fold(0u32, |m, e| m | 1 << elts.iter().position(|x| *x == e).unwrap());
                    bottoms[j].0.push(Vertex { set, kind: v.kind, label: v.label });
                    bottoms[j].1.push(i);
                }
                None => {
                    let set = lambda.iter().enumerate().filter(|(_, b)| *b & v.set == **b).fold(0u32, |m, (j, _)| m | 1 << j);
                    top.push(Vertex { set, kind: v.kind, label: v.label });
                    top_idx.push(i);
                }
            }
        }
        let mut order = top_idx;
        let mut bts = Vec::new();
        for (vs, idx) in bottoms {
            order.extend(idx);
            bts.push(Tree { verts: vs });
        }
        (Tree { verts: top }, bts, koszul_odd(&degs, &order))
    }

    /// Keyed basis and equivariant complex of arity n with a given differential.
    pub fn component<D>(&self, n: usize, d: D) -> (KeyedBuilder<Tree>, EquivariantComplex)
    where
        D: Fn(&Tree) -> Vec<(Tree, Scalar)> + Sync,
    {
        let b = KeyedBuilder::new(self.enumerate(n));
        let e = b.build(self.field, n, |t| self.label(t), |t| self.degree(t), d, |s, t| self.act(s, t));
        (b, e)
    }
}

/// A symmetric sequence whose arity-n basis is a list of trees.
#[derive(Clone)]
pub struct TreeSeq {
    pub family: TreeFamily,
    pub bases: Vec<Arc<KeyedBuilder<Tree>>>,
    pub seq: SymSeq,
}

impl TreeSeq {
    pub fn build<D>(family: TreeFamily, d: D) -> TreeSeq
    where
        D: Fn(&Tree, usize) -> Vec<(Tree, Scalar)> + Sync,
    {
        use rayon::prelude::*;
        let parts: Vec<(KeyedBuilder<Tree>, EquivariantComplex)> = (1..=family.arity_max).into_par_iter().map(|n| family.component(n, |t| d(t, n))).collect();
        let mut bases = Vec::new();
        let mut comps = Vec::new();
        for (b, e) in parts {
            bases.push(Arc::new(b));
            comps.push(Arc::new(e));
        }
        let seq = SymSeq::new(family.field, family.arity_max, comps).expect("tree sequence");
        TreeSeq { family, bases, seq }
    }

    pub fn basis(&self, n: usize) -> &KeyedBuilder<Tree> {
        &self.bases[n - 1]
    }

    pub fn tree(&self, n: usize, i: usize) -> &Tree {
        &self.basis(n).keys[i]
    }

    pub fn index(&self, n: usize, t: &Tree) -> usize {
        self.basis(n).idx(t)
    }
}
