//! The tree form B^t(R,P,L) of the bar construction.
//!
//! A basis element is a rooted tree: an optional R-vertex at the root, inner vertices
//! decorated by sP̄ with at least two inputs, and (when L is present) an L-vertex closing
//! every branch. The differential contracts internal edges: P–P by composition, R–P by
//! the right action, and an inner vertex whose inputs are all L-vertices by the left
//! action. Cutting trees along a partition gives the cooperad and comodule structures.

use std::sync::Arc;

use super::levelled::BarError;
use crate::chaincore::{Scalar, SVec};
use crate::operad::structure::Action;
use crate::operad::tree::{Kind, Tree, TreeFamily, TreeSeq, Vertex};
use crate::operad::{Cooperad, LeftModule, Operad, RightModule};
use crate::symseq::composite::{StructureMap, Tower};
use crate::symseq::partition::{self as pt, Partition};
use crate::symseq::perm::koszul_odd;
use crate::symseq::SymSeq;

/// A tree bar with its inputs.
pub struct TreeBar {
    pub name: String,
    pub p: Arc<Operad>,
    pub r: Option<RightModule>,
    pub l: Option<LeftModule>,
    pub trees: TreeSeq,
}

impl TreeBar {
    pub fn seq(&self) -> &SymSeq {
        &self.trees.seq
    }

    pub fn family(&self) -> &TreeFamily {
        &self.trees.family
    }
}

/// Index of the vertex directly below vertex i with leaf set `c`.
fn child_vertex(t: &Tree, i: usize, c: u32) -> Option<usize> {
    let v = &t.verts[i];
    (0..t.verts.len())
        .filter(|&j| j != i && t.verts[j].set == c && (c != v.set || t.verts[j].kind > v.kind))
        .min_by_key(|&j| t.verts[j].kind)
}

/// Position masks of `groups` inside the sorted list `items`.
fn blocks_in(items: &[u32], groups: &[Vec<u32>]) -> Partition {
    groups.iter().map(|g| g.iter().fold(0u32, |m, s| m | 1 << items.iter().position(|x| x == s).expect("child set"))).collect()
}

struct Contraction<'a> {
    fam: &'a TreeFamily,
    p: &'a Action,
    r: Option<&'a Action>,
    l: Option<&'a Action>,
}

impl Contraction<'_> {
    fn apply(&self, t: &Tree) -> Vec<(Tree, Scalar)> {
        let fam = self.fam;
        let field = fam.field;
        let degs = fam.degrees(t);
        let mut out = Vec::new();
        let mut before = 0i32;
        for i in 0..t.verts.len() {
            let v = &t.verts[i];
            let ch = fam.children(t, i);
            let kids: Vec<Option<usize>> = ch.iter().map(|c| child_vertex(t, i, *c)).collect();
            let act = match v.kind {
                Kind::Root => self.r,
                Kind::Inner => Some(self.p),
                Kind::Leaf => None,
            };
            let pre = before.rem_euclid(2) == 1;
            if let Some(act) = act {
                // contract with an inner child; the sign makes s⁻¹ a twisting morphism
                for (s, kid) in kids.iter().enumerate() {
                    let Some(j) = *kid else { continue };
                    if t.verts[j].kind != Kind::Inner {
                        continue;
                    }
                    let gch = fam.children(t, j);
                    let mut merged: Vec<u32> = ch.iter().enumerate().filter(|(u, _)| *u != s).map(|(_, c)| *c).collect();
                    merged.extend(gch.iter().copied());
                    merged.sort_by_key(|c| pt::min_elt(*c));
                    let groups: Vec<Vec<u32>> = ch.iter().enumerate().map(|(u, c)| if u == s { gch.clone() } else { vec![*c] }).collect();
                    let lambda = blocks_in(&merged, &groups);
                    let ys: Vec<(usize, usize)> = (0..ch.len()).map(|u| if u == s { (gch.len(), t.verts[j].label) } else { (1, 0) }).collect();
                    let between: i32 = degs[i + 1..j].iter().sum();
                    let odd = pre ^ ((degs[j] * between).rem_euclid(2) == 1) ^ (degs[i].rem_euclid(2) == 0);
                    let sign = field.sign(odd);
                    for (lab, x) in act.relative(&lambda, v.label, &ys) {
                        let mut verts = t.verts.clone();
                        verts[i].label = lab;
                        verts.remove(j);
                        out.push((Tree { verts }, x.mul(&sign)));
                    }
                }
            }
            if let (Kind::Inner, Some(l)) = (v.kind, self.l) {
                let leaves: Option<Vec<usize>> = kids.iter().map(|k| k.filter(|&j| t.verts[j].kind == Kind::Leaf)).collect();
                if let Some(leaves) = leaves {
                    let mut order: Vec<usize> = (0..=i).collect();
                    order.extend(leaves.iter().copied());
                    order.extend((i + 1..t.verts.len()).filter(|j| !leaves.contains(j)));
                    let odd = pre ^ koszul_odd(&degs, &order);
                    let sign = field.sign(odd);
                    let elts: Vec<u32> = pt::elements(v.set).map(|e| 1u32 << e).collect();
                    let groups: Vec<Vec<u32>> = ch.iter().map(|c| pt::elements(*c).map(|e| 1u32 << e).collect()).collect();
                    let lambda = blocks_in(&elts, &groups);
                    let ys: Vec<(usize, usize)> = leaves.iter().zip(&ch).map(|(j, c)| (c.count_ones() as usize, t.verts[*j].label)).collect();
                    for (lab, x) in l.relative(&lambda, v.label, &ys) {
                        let mut verts: Vec<Vertex> = Vec::with_capacity(t.verts.len() - leaves.len());
                        for (k, w) in t.verts.iter().enumerate() {
                            if k == i {
                                verts.push(Vertex { set: v.set, kind: Kind::Leaf, label: lab });
                            } else if !leaves.contains(&k) {
                                verts.push(w.clone());
                            }
                        }
                        out.push((Tree { verts }, x.mul(&sign)));
                    }
                }
            }
            before += degs[i];
        }
        out
    }
}

fn build(name: String, r: Option<&RightModule>, p: &Arc<Operad>, l: Option<&LeftModule>) -> Result<TreeBar, BarError> {
    for op in r.map(|m| &m.operad).into_iter().chain(l.map(|m| &m.operad)) {
        if op.seq != p.seq {
            return Err(BarError::Invalid("module is over a different operad".into()));
        }
    }
    let fam = TreeFamily { field: p.field(), arity_max: p.arity_max(), root: r.map(|m| m.seq.clone()), inner: p.seq.clone(), leaf: l.map(|m| m.seq.clone()), shift: 1 };
    let c = Contraction { fam: &fam, p: &p.comp, r: r.map(|m| &m.act), l: l.map(|m| &m.act) };
    let trees = TreeSeq::build(fam.clone(), |t, _| {
        let mut v = fam.internal_differential(t);
        v.extend(c.apply(t));
        v
    });
    Ok(TreeBar { name, p: p.clone(), r: r.cloned(), l: l.cloned(), trees })
}

/// B^t(R,P,L); a missing module stands for the unit, with no vertex at all.
pub fn tree_bar(r: Option<&RightModule>, p: &Arc<Operad>, l: Option<&LeftModule>) -> Result<TreeBar, BarError> {
    let name = format!("Bt({},{},{})", r.map_or("1", |m| &m.name), p.name, l.map_or("1", |m| &m.name));
    build(name, r, p, l)
}

/// B^t(P) = B^t(1,P,1).
pub fn tree_bar_operad(p: &Arc<Operad>) -> Result<TreeBar, BarError> {
    build(format!("Bt({})", p.name), None, p, None)
}

/// A decomposition T(n) → (A∘B)(n): each term is a tower [λ] labelled (a, b₁, …).
pub type CoactFn = Arc<dyn Fn(usize, usize) -> Vec<(Tower, Scalar)> + Send + Sync>;

/// A coaction T → A∘B on tower bases.
#[derive(Clone)]
pub struct Coaction {
    pub outer: SymSeq,
    pub inner: SymSeq,
    pub target: SymSeq,
    pub coact: CoactFn,
}

/// Δ(z) = Σ_λ ± top ⊗ bottoms over the cuts of z, with top in `top` and bottoms in `bottom`.
pub fn cut_coaction(bar: &Arc<TreeBar>, top: &Arc<TreeBar>, bottom: &Arc<TreeBar>) -> Coaction {
    let (b, tp, bt) = (bar.clone(), top.clone(), bottom.clone());
    let field = bar.p.field();
    let coact: CoactFn = Arc::new(move |n, i| {
        let z = b.trees.tree(n, i);
        let mut out = Vec::new();
        for lambda in b.family().cuts(z, n) {
            let (x, ys, odd) = b.family().cut(z, &lambda);
            let Some(xi) = tp.trees.basis(lambda.len()).try_idx(&x) else { continue };
            let mut labels = vec![xi];
            for (blk, y) in lambda.iter().zip(&ys) {
                match bt.trees.basis(blk.count_ones() as usize).try_idx(y) {
                    Some(yi) => labels.push(yi),
                    None => break,
                }
            }
            if labels.len() == lambda.len() + 1 {
                out.push((Tower { chain: vec![lambda], labels }, field.sign(odd)));
            }
        }
        out
    });
    Coaction { outer: top.seq().clone(), inner: bottom.seq().clone(), target: bar.seq().clone(), coact }
}

/// The cooperad B(P) on the tree bar.
pub fn cooperad_on_bar(p: &Arc<Operad>) -> Result<(Arc<TreeBar>, Cooperad), BarError> {
    let b = Arc::new(tree_bar_operad(p)?);
    let c = cut_coaction(&b, &b, &b);
    let decomp = c.coact.clone();
    Ok((b.clone(), Cooperad { name: b.name.clone(), seq: b.seq().clone(), decomp }))
}

/// The right B(P)-comodule B(R,P,1) or the left B(P)-comodule B(1,P,L).
pub fn comodule_on_bar(r: Option<&RightModule>, p: &Arc<Operad>, l: Option<&LeftModule>) -> Result<(Arc<TreeBar>, Coaction), BarError> {
    let bp = Arc::new(tree_bar_operad(p)?);
    match (r, l) {
        (Some(_), None) => {
            let b = Arc::new(tree_bar(r, p, None)?);
            let c = cut_coaction(&b, &b, &bp);
            Ok((b, c))
        }
        (None, Some(_)) => {
            let b = Arc::new(tree_bar(None, p, l)?);
            let c = cut_coaction(&b, &bp, &b);
            Ok((b, c))
        }
        _ => Err(BarError::Invalid("a comodule needs exactly one of R and L".into())),
    }
}

/// Sum of a coaction over the components: Δ applied to a basis vector, collected in
/// a flat list for tests and the dualization.
pub fn coact_vec(c: &Coaction, n: usize, v: &SVec) -> Vec<(Tower, Scalar)> {
    let mut out = Vec::new();
    for (i, x) in v {
        out.extend((c.coact)(n, *i).into_iter().map(|(t, y)| (t, y.mul(x))));
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::bar::{bar, reduced_bar};
    use crate::chaincore::Field;
    use crate::operad::{com_operad, free_left_module, free_operad, free_right_module};
    use crate::random::{random_graded_seq, rng};

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    fn squares_to_zero(b: &TreeBar) {
        for n in 1..=b.p.arity_max() {
            let c = &b.seq().comp(n).complex;
            assert!(c.differential().mul(c.differential()).is_zero(), "{} arity {n}", b.name);
        }
        b.seq().check().unwrap();
    }

    #[test]
    fn tree_bar_of_com_matches_levelled_bar() {
        let p = com(5);
        let bt = tree_bar_operad(&p).unwrap();
        squares_to_zero(&bt);
        let lv = reduced_bar(&p).unwrap();
        assert_eq!(bt.seq().homology(), lv.seq.homology());
        // trees with k inner vertices sit in degree k
        assert_eq!(bt.seq().dims()[2], BTreeMap::from([(1, 1), (2, 3)]));
    }

    #[test]
    fn two_sided_tree_bars_match() {
        let p = com(4);
        let a = random_graded_seq(&mut rng(21), Field::Q, 4, 2, false);
        let r = free_right_module(&a, &p).unwrap();
        let l = free_left_module(&a, &p).unwrap();
        let rc = RightModule::from_operad(&p);
        let lc = LeftModule::from_operad(&p);
        for (rm, lm) in [(&rc, &lc), (&r, &lc), (&rc, &l), (&RightModule::unit(&p), &LeftModule::unit(&p))] {
            let bt = tree_bar(Some(rm), &p, Some(lm)).unwrap();
            squares_to_zero(&bt);
            let lv = bar(rm, &p, lm).unwrap();
            assert_eq!(bt.seq().homology(), lv.seq.homology(), "{}", bt.name);
        }
        let bt = tree_bar(Some(&r), &p, None).unwrap();
        squares_to_zero(&bt);
        assert_eq!(bt.seq().homology(), bar(&r, &p, &LeftModule::unit(&p)).unwrap().seq.homology());
    }

    #[test]
    fn graded_free_operad_bar() {
        let a = random_graded_seq(&mut rng(4), Field::Q, 4, 2, true);
        let p = Arc::new(free_operad(&a).unwrap());
        let bt = tree_bar_operad(&p).unwrap();
        squares_to_zero(&bt);
        assert_eq!(bt.seq().homology(), reduced_bar(&p).unwrap().seq.homology());
    }

    #[test]
    fn cut_coaction_is_coassociative_on_counts() {
        let p = com(4);
        let (b, q) = cooperad_on_bar(&p).unwrap();
        // the cut at the discrete partition returns z itself
        for n in 1..=4 {
            for i in 0..b.seq().dim(n) {
                let terms = (q.decomp)(n, i);
                let disc = pt::discrete(n);
                let hit: Vec<_> = terms.iter().filter(|(t, _)| t.chain[0] == disc).collect();
                assert_eq!(hit.len(), 1);
                assert_eq!(hit[0].0.labels[0], i);
                assert_eq!(hit[0].1, Field::Q.one());
            }
        }
    }
}
