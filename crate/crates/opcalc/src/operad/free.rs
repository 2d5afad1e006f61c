//! Free operads on trees and free modules on composites.

use std::sync::Arc;

use super::structure::{Bimodule, LeftModule, Operad, RightModule, ShapeFn};
use super::tree::{TreeFamily, TreeSeq};
use crate::symseq::composite::{Levelled, LevelledSeq, Tower};
use crate::symseq::partition as pt;
use crate::symseq::{SeqError, SymSeq};

/// F(A) on the basis of decorated trees; composition grafts.
pub fn free_operad(a: &SymSeq) -> Result<Operad, SeqError> {
    Ok(free_operad_trees(a)?.0)
}

pub fn free_operad_trees(a: &SymSeq) -> Result<(Operad, Arc<TreeSeq>), SeqError> {
    if a.dim(1) != 0 {
        return Err(SeqError::Invalid("free operad needs A(1) = 0".into()));
    }
    let family = TreeFamily { field: a.field, arity_max: a.arity_max, root: None, inner: a.clone(), leaf: None, shift: 0 };
    let fam2 = family.clone();
    let ts = Arc::new(TreeSeq::build(family, move |t, _| fam2.internal_differential(t)));
    let t2 = ts.clone();
    let field = a.field;
    let f: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let lambda = pt::std_blocks(&ns);
        let bottoms: Vec<_> = ys.iter().map(|(m, y)| t2.tree(*m, *y).clone()).collect();
        let (t, odd) = t2.family.graft(t2.tree(k, x), &t2.family, &lambda, &bottoms, &t2.family);
        vec![(t2.index(n, &t), field.sign(odd))]
    });
    Ok((Operad::new("F", ts.seq.clone(), f)?, ts))
}

fn single(label: usize) -> Tower {
    Tower { chain: vec![], labels: vec![label] }
}

/// A∘P with P acting by composition on the right.
pub fn free_right_module(a: &SymSeq, p: &Arc<Operad>) -> Result<RightModule, SeqError> {
    let mut m = compose_right_module(a, &RightModule::from_operad(p))?;
    m.name = "A∘P".into();
    Ok(m)
}

/// R₁ ⊕ R₂ with the summand-wise action.
pub fn direct_sum_right(r1: &RightModule, r2: &RightModule) -> Result<RightModule, SeqError> {
    if r1.operad.seq != r2.operad.seq {
        return Err(SeqError::Invalid("summands are over different operads".into()));
    }
    let seq = r1.seq.direct_sum(&r2.seq)?;
    let (a1, a2) = (r1.act.clone(), r2.act.clone());
    let d1: Vec<usize> = (0..=seq.arity_max).map(|n| r1.seq.dim(n)).collect();
    let f: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let n: usize = ys.iter().map(|y| y.0).sum();
        if x < d1[k] {
            a1.standard(x, ys)
        } else {
            a2.standard(x - d1[k], ys).into_iter().map(|(r, c)| (r + d1[n], c)).collect()
        }
    });
    RightModule::new(format!("{}⊕{}", r1.name, r2.name), seq, r1.operad.clone(), f)
}

/// P∘A with P acting by composition on the left.
pub fn free_left_module(a: &SymSeq, p: &Arc<Operad>) -> Result<LeftModule, SeqError> {
    let mut m = compose_left_module(&LeftModule::from_operad(p), a)?;
    m.name = "P∘A".into();
    Ok(m)
}

/// A∘R for a right module R; the action is R's, applied below A.
pub fn compose_right_module(a: &SymSeq, r: &RightModule) -> Result<RightModule, SeqError> {
    a.check_compatible(&r.seq)?;
    let ls = Arc::new(LevelledSeq::build(Levelled::plain(vec![a.clone(), r.seq.clone()])));
    let three = Levelled::plain(vec![a.clone(), r.seq.clone(), r.operad.seq.clone()]);
    let (l2, act) = (ls.clone(), r.act.clone());
    let f: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let inners: Vec<Tower> = ys.iter().map(|y| single(y.1)).collect();
        let (t, odd) = three.join(l2.tower(k, x), &pt::std_blocks(&ns), &inners);
        let terms = three.merge(&t, n, 1, &act);
        l2.basis(n).column(terms).into_iter().map(|(i, c)| (i, c.negate_if(odd))).collect()
    });
    RightModule::new(format!("A∘{}", r.name), ls.seq.clone(), r.operad.clone(), f)
}

/// L∘A for a left module L; the action is L's, applied above A.
pub fn compose_left_module(l: &LeftModule, a: &SymSeq) -> Result<LeftModule, SeqError> {
    a.check_compatible(&l.seq)?;
    let ls = Arc::new(LevelledSeq::build(Levelled::plain(vec![l.seq.clone(), a.clone()])));
    let three = Levelled::plain(vec![l.operad.seq.clone(), l.seq.clone(), a.clone()]);
    let (l2, act) = (ls.clone(), l.act.clone());
    let f: ShapeFn = Arc::new(move |x, ys| {
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let inners: Vec<Tower> = ys.iter().map(|(m, y)| l2.tower(*m, *y).clone()).collect();
        let (t, odd) = three.join(&single(x), &pt::std_blocks(&ns), &inners);
        let terms = three.merge(&t, n, 0, &act);
        l2.basis(n).column(terms).into_iter().map(|(i, c)| (i, c.negate_if(odd))).collect()
    });
    LeftModule::new(format!("{}∘A", l.name), ls.seq.clone(), l.operad.clone(), f)
}

/// P∘A∘P with both actions by composition.
pub fn free_bimodule(a: &SymSeq, p: &Arc<Operad>) -> Result<Bimodule, SeqError> {
    a.check_compatible(&p.seq)?;
    let ls = Arc::new(LevelledSeq::build(Levelled::plain(vec![p.seq.clone(), a.clone(), p.seq.clone()])));
    let left_lv = Levelled::plain(vec![p.seq.clone(), p.seq.clone(), a.clone(), p.seq.clone()]);
    let right_lv = Levelled::plain(vec![p.seq.clone(), a.clone(), p.seq.clone(), p.seq.clone()]);
    let (l2, p2) = (ls.clone(), p.clone());
    let lf: ShapeFn = Arc::new(move |x, ys| {
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let inners: Vec<Tower> = ys.iter().map(|(m, y)| l2.tower(*m, *y).clone()).collect();
        let (t, odd) = left_lv.join(&single(x), &pt::std_blocks(&ns), &inners);
        let terms = left_lv.merge(&t, n, 0, &p2.comp);
        l2.basis(n).column(terms).into_iter().map(|(i, c)| (i, c.negate_if(odd))).collect()
    });
    let (l3, p3) = (ls.clone(), p.clone());
    let rf: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let inners: Vec<Tower> = ys.iter().map(|y| single(y.1)).collect();
        let (t, odd) = right_lv.join(l3.tower(k, x), &pt::std_blocks(&ns), &inners);
        let terms = right_lv.merge(&t, n, 2, &p3.comp);
        l3.basis(n).column(terms).into_iter().map(|(i, c)| (i, c.negate_if(odd))).collect()
    });
    let left = LeftModule::new("P∘A∘P", ls.seq.clone(), p.clone(), lf)?;
    let right = RightModule::new("P∘A∘P", ls.seq.clone(), p.clone(), rf)?;
    Bimodule::new("P∘A∘P", left, right)
}
