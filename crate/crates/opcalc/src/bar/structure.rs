//! Module structures on bar constructions and the comparison maps χ.
//!
//! On the right, B(R,P,L)∘Q ≅ B(R,P,L∘Q) holds basis element by basis element. On the
//! left the blocks of Q∘B(R,P,L) sit in independent simplicial degrees, and the
//! Eilenberg–Zilber shuffle map carries them to a common one.

use std::sync::Arc;

use super::levelled::{BarComplex, BarError, BarKey, BarMap};
use crate::chaincore::matrix::normalize;
use crate::chaincore::{ChainMap, Scalar, SparseMatrix};
use crate::operad::{compose_left_module, compose_right_module, Bimodule, LeftModule, RightModule, ShapeFn};
use crate::symseq::composite::{LevelledSeq, Tower};
use crate::symseq::partition::{self as pt, Partition};
use crate::symseq::{Levelled, SymSeq};

fn single(label: usize) -> Tower {
    Tower { chain: vec![], labels: vec![label] }
}

fn two_sided(bar: &BarComplex) -> Result<(), BarError> {
    if bar.inputs.m.is_some() {
        return Err(BarError::Invalid("module structures are built on two-sided bars".into()));
    }
    Ok(())
}

/// Right Q-module structure on B(R,P,L) from a (P,Q)-bimodule structure on L.
pub fn right_structure(bar: &Arc<BarComplex>, l: &Bimodule) -> Result<RightModule, BarError> {
    two_sided(bar)?;
    if l.seq != bar.inputs.l.seq {
        return Err(BarError::Invalid("bimodule does not match the bar's left input".into()));
    }
    let q = l.right.operad.clone();
    let (b, act, qs) = (bar.clone(), l.right.act.clone(), q.seq.clone());
    let field = q.field();
    let f: ShapeFn = Arc::new(move |x, ys| {
        let k = ys.len();
        let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
        let n: usize = ns.iter().sum();
        let key = b.key(k, x);
        let mut seqs = b.shape(key.a, 0).seqs.clone();
        seqs.push(qs.clone());
        let lv = Levelled::plain(seqs);
        let inners: Vec<Tower> = ys.iter().map(|y| single(y.1)).collect();
        let (t, odd) = lv.join(&key.tower, &pt::std_blocks(&ns), &inners);
        let qdeg: i32 = ys.iter().map(|(m, y)| qs.comp(*m).degree(*y)).sum();
        let s = field.sign(odd != ((key.a as i32 * qdeg).rem_euclid(2) == 1));
        let terms: Vec<(BarKey, Scalar)> = lv.merge(&t, n, key.a + 1, &act).into_iter().map(|(t2, c)| (BarKey { a: key.a, b: 0, tower: t2 }, c.mul(&s))).collect();
        b.basis(n).column(terms)
    });
    Ok(RightModule::new(format!("{}", bar.name()), bar.seq.clone(), q, f)?)
}

/// All words with `counts[i]` copies of i, with the parity of their inversions.
fn shuffles(counts: &[usize]) -> Vec<(Vec<usize>, bool)> {
    let total: usize = counts.iter().sum();
    let mut out = Vec::new();
    fn rec(left: &mut Vec<usize>, cur: &mut Vec<usize>, total: usize, out: &mut Vec<(Vec<usize>, bool)>) {
        if cur.len() == total {
            let mut inv = 0;
            for i in 0..cur.len() {
                for j in i + 1..cur.len() {
                    if cur[i] > cur[j] {
                        inv += 1;
                    }
                }
            }
            out.push((cur.clone(), inv % 2 == 1));
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i);
                rec(left, cur, total, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    rec(&mut counts.to_vec(), &mut vec![], total, &mut out);
    out
}

/// Degenerates a tower of R∘P^a∘L to R∘P^A∘L by unit levels where the word is not `me`.
fn degenerate(base: &[SymSeq], p: &SymSeq, t: &Tower, n: usize, word: &[usize], me: usize) -> Tower {
    let lv_for = |m: usize| {
        let mut seqs = vec![base[0].clone()];
        seqs.extend(std::iter::repeat(p.clone()).take(m));
        seqs.push(base[1].clone());
        Levelled::plain(seqs)
    };
    let mut cur = t.clone();
    let mut depth = cur.chain.len() - 1;
    for (s, w) in word.iter().enumerate() {
        if *w != me {
            cur = lv_for(depth).insert_unit(&cur, n, s, 0);
            depth += 1;
        }
    }
    cur
}

/// Blocks of a Q∘B element combined under one shuffle into a tower of [Q, R, P^A, L],
/// with the sign of moving the simplicial generators and shuffling them.
fn ez_terms(bar: &BarComplex, top: &SymSeq, x: usize, ys: &[(usize, usize)]) -> Vec<(Tower, usize, Scalar)> {
    let field = bar.inputs.p.field();
    let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
    let lambda: Partition = pt::std_blocks(&ns);
    let keys: Vec<&BarKey> = ys.iter().map(|(m, y)| bar.key(*m, *y)).collect();
    let counts: Vec<usize> = keys.iter().map(|k| k.a).collect();
    let total: usize = counts.iter().sum();
    let ints: Vec<i32> = keys.iter().zip(&ns).map(|(k, m)| bar.internal_degree(k, *m)).collect();
    let mut move_odd = false;
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            move_odd ^= (counts[i] as i32 * ints[j]).rem_euclid(2) == 1;
        }
    }
    let base = [bar.inputs.r.seq.clone(), bar.inputs.l.seq.clone()];
    let p = bar.inputs.p.seq.clone();
    let mut seqs = vec![top.clone(), base[0].clone()];
    seqs.extend(std::iter::repeat(p.clone()).take(total));
    seqs.push(base[1].clone());
    let big = Levelled::plain(seqs);
    let mut out = Vec::new();
    for (word, odd) in shuffles(&counts) {
        let inners: Vec<Tower> = keys.iter().zip(&ns).enumerate().map(|(i, (k, m))| degenerate(&base, &p, &k.tower, *m, &word, i)).collect();
        let (t, jodd) = big.join(&single(x), &lambda, &inners);
        out.push((t, total, field.sign(move_odd ^ odd ^ jodd)));
    }
    out
}

/// Left Q-module structure on B(R,P,L) from a (Q,P)-bimodule structure on R.
pub fn left_structure(bar: &Arc<BarComplex>, r: &Bimodule) -> Result<LeftModule, BarError> {
    two_sided(bar)?;
    if r.seq != bar.inputs.r.seq {
        return Err(BarError::Invalid("bimodule does not match the bar's right input".into()));
    }
    let q = r.left.operad.clone();
    let (b, act, qs) = (bar.clone(), r.left.act.clone(), q.seq.clone());
    let f: ShapeFn = Arc::new(move |x, ys| {
        let n: usize = ys.iter().map(|y| y.0).sum();
        let mut terms = Vec::new();
        for (t, total, s) in ez_terms(&b, &qs, x, ys) {
            let mut seqs = vec![qs.clone()];
            seqs.extend(b.shape(total, 0).seqs.iter().cloned());
            let lv = Levelled::plain(seqs);
            for (t2, c) in lv.merge(&t, n, 0, &act) {
                if b.shape(total, 0).is_strict(&t2, n) {
                    terms.push((BarKey { a: total, b: 0, tower: t2 }, c.mul(&s)));
                }
            }
        }
        b.basis(n).column(terms)
    });
    Ok(LeftModule::new(bar.name(), bar.seq.clone(), q, f)?)
}

pub enum Side {
    Left(Bimodule),
    Right(Bimodule),
    Both(Bimodule, Bimodule),
}

pub enum BarModule {
    Left(LeftModule),
    Right(RightModule),
    Bi(Bimodule),
}

/// The module structure a bar inherits from bimodule structures on its ends.
pub fn module_structure_on_bar(bar: &Arc<BarComplex>, side: Side) -> Result<BarModule, BarError> {
    Ok(match side {
        Side::Left(r) => BarModule::Left(left_structure(bar, &r)?),
        Side::Right(l) => BarModule::Right(right_structure(bar, &l)?),
        Side::Both(r, l) => {
            let left = left_structure(bar, &r)?;
            let right = right_structure(bar, &l)?;
            BarModule::Bi(Bimodule::new(bar.name(), left, right)?)
        }
    })
}

/// χ_r: B(R,P,L)∘A → B(R,P,L∘A), an isomorphism; returns the target bar as well.
pub fn chi_right(bar: &Arc<BarComplex>, a: &SymSeq) -> Result<(Arc<BarComplex>, BarMap), BarError> {
    two_sided(bar)?;
    let i = &bar.inputs;
    let la = compose_left_module(&i.l, a)?;
    let la_seq = Arc::new(LevelledSeq::build(Levelled::plain(vec![i.l.seq.clone(), a.clone()])));
    let target = Arc::new(super::bar(&i.r, &i.p, &la)?);
    let source = LevelledSeq::build(Levelled::plain(vec![bar.seq.clone(), a.clone()]));
    let field = i.p.field();
    let mut maps = Vec::new();
    for n in 1..=a.arity_max {
        let cols = source
            .basis(n)
            .keys
            .iter()
            .map(|t| {
                let k = t.chain[0].len();
                let key = bar.key(k, t.labels[0]);
                let mut seqs = bar.shape(key.a, 0).seqs.clone();
                seqs.push(a.clone());
                let lv = Levelled::plain(seqs);
                let inners: Vec<Tower> = t.labels[1..].iter().map(|l| single(*l)).collect();
                let (big, jodd) = lv.join(&key.tower, &t.chain[0], &inners);
                let adeg: i32 = t.chain[0].iter().zip(&t.labels[1..]).map(|(blk, l)| a.comp(pt::size(*blk)).degree(*l)).sum();
                let (cut, outer, bundles, sodd) = lv.split(&big, n, key.a);
                let mut labels = outer.labels.clone();
                for (blk, u) in cut.iter().zip(&bundles) {
                    labels.push(la_seq.basis(pt::size(*blk)).idx(u));
                }
                let mut chain = big.chain[..key.a].to_vec();
                chain.push(cut.clone());
                let s = field.sign(jodd ^ sodd ^ ((key.a as i32 * adeg).rem_euclid(2) == 1));
                target.basis(n).column(vec![(BarKey { a: key.a, b: 0, tower: Tower { chain, labels } }, s)])
            })
            .collect();
        let m = SparseMatrix::from_cols(field, target.seq.dim(n), cols);
        maps.push(ChainMap::new(source.seq.comp(n).complex.clone(), target.complex(n), m)?);
    }
    Ok((target, BarMap { maps }))
}

/// χ_l: A∘B(R,P,L) → B(A∘R,P,L) by the shuffle map; a quasi-isomorphism.
pub fn chi_left(bar: &Arc<BarComplex>, a: &SymSeq) -> Result<(Arc<BarComplex>, BarMap), BarError> {
    two_sided(bar)?;
    let i = &bar.inputs;
    let ar = compose_right_module(a, &i.r)?;
    let ar_seq = Arc::new(LevelledSeq::build(Levelled::plain(vec![a.clone(), i.r.seq.clone()])));
    let target = Arc::new(super::bar(&ar, &i.p, &i.l)?);
    let source = LevelledSeq::build(Levelled::plain(vec![a.clone(), bar.seq.clone()]));
    let field = i.p.field();
    let mut maps = Vec::new();
    for n in 1..=a.arity_max {
        let cols = source
            .basis(n)
            .keys
            .iter()
            .map(|t| {
                let ys: Vec<(usize, usize)> = t.chain[0].iter().zip(&t.labels[1..]).map(|(blk, l)| (pt::size(*blk), *l)).collect();
                let ns: Vec<usize> = ys.iter().map(|y| y.0).collect();
                let sigma = pt::unshuffle(&t.chain[0]);
                let mut terms = Vec::new();
                for (big, total, s) in ez_terms(bar, a, t.labels[0], &ys) {
                    let std = pt::std_blocks(&ns);
                    let r_part = &big.chain[1];
                    let blocks = pt::grouping(r_part, &std);
                    let head = 1 + std.len();
                    let ar_label = ar_seq.basis(r_part.len()).idx(&Tower { chain: vec![blocks], labels: big.labels[..head].to_vec() });
                    let mut labels = vec![ar_label];
                    labels.extend_from_slice(&big.labels[head..]);
                    let tower = Tower { chain: big.chain[1..].to_vec(), labels };
                    terms.push((BarKey { a: total, b: 0, tower }, s));
                }
                // the shuffle was formed on the standard blocks; move it onto λ
                let mut out = Vec::new();
                for (k, s) in terms {
                    out.extend(target.act(&sigma, &k, n).into_iter().map(|(k2, x)| (k2, x.mul(&s))));
                }
                target.basis(n).column(out)
            })
            .map(normalize)
            .collect();
        let m = SparseMatrix::from_cols(field, target.seq.dim(n), cols);
        maps.push(ChainMap::new(source.seq.comp(n).complex.clone(), target.complex(n), m)?);
    }
    Ok((target, BarMap { maps }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bar::{bar, resolution_map};
    use crate::chaincore::Field;
    use crate::operad::{check_left_module_axioms, check_right_module_axioms, check_right_module_map, com_operad, free_right_module, Operad};
    use crate::random::{random_graded_seq, rng};

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    #[test]
    fn resolution_is_a_right_module_map() {
        let p = com(4);
        let a = random_graded_seq(&mut rng(3), Field::Q, 4, 2, false);
        for r in [RightModule::from_operad(&p), free_right_module(&a, &p).unwrap()] {
            let (b, m) = resolution_map(&r).unwrap();
            let rm = right_structure(&b, &Bimodule::from_operad(&p)).unwrap();
            let rep = check_right_module_axioms(&rm);
            assert!(rep.passed(), "{rep}");
            let fs: Vec<SparseMatrix> = m.maps.iter().map(|f| f.matrix.clone()).collect();
            let rep = check_right_module_map(&rm, &r, &fs);
            assert!(rep.passed(), "{rep}");
            if r.seq == p.seq {
                let bent = RightModule { act: r.act.with_flipped_shape(2, vec![1, 2]), ..r.clone() };
                assert!(!check_right_module_map(&rm, &bent, &fs).passed());
            }
        }
    }

    #[test]
    fn left_structure_satisfies_axioms() {
        let p = com(4);
        let b = Arc::new(bar(&RightModule::from_operad(&p), &p, &LeftModule::unit(&p)).unwrap());
        let lm = left_structure(&b, &Bimodule::from_operad(&p)).unwrap();
        let rep = check_left_module_axioms(&lm);
        assert!(rep.passed(), "{rep}");
        let b = Arc::new(bar(&RightModule::from_operad(&p), &p, &LeftModule::from_operad(&p)).unwrap());
        match module_structure_on_bar(&b, Side::Both(Bimodule::from_operad(&p), Bimodule::from_operad(&p))).unwrap() {
            BarModule::Bi(m) => assert!(crate::operad::check_bimodule_axioms(&m).passed()),
            _ => panic!("expected a bimodule"),
        }
    }

    #[test]
    fn chi_right_is_an_isomorphism() {
        let p = com(4);
        let a = random_graded_seq(&mut rng(8), Field::Q, 4, 2, false);
        let b = Arc::new(bar(&RightModule::from_operad(&p), &p, &LeftModule::unit(&p)).unwrap());
        let (_, m) = chi_right(&b, &a).unwrap();
        for f in &m.maps {
            let d = f.matrix.cols.len();
            assert_eq!(f.matrix.nrows, d);
            assert_eq!(f.matrix.rank(), d);
        }
    }

    #[test]
    fn chi_left_is_a_quasi_isomorphism() {
        let p = com(4);
        let a = random_graded_seq(&mut rng(9), Field::Q, 4, 1, false);
        let b = Arc::new(bar(&RightModule::unit(&p), &p, &LeftModule::from_operad(&p)).unwrap());
        let (_, m) = chi_left(&b, &a).unwrap();
        assert!(m.all_quasi_iso().unwrap());
        let b = Arc::new(bar(&RightModule::from_operad(&p), &p, &LeftModule::unit(&p)).unwrap());
        let (_, m) = chi_left(&b, &a).unwrap();
        assert!(m.all_quasi_iso().unwrap());
    }
}
