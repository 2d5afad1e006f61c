//! Normalized two-sided and bimodule bar constructions on partition towers.
//!
//! A basis element of simplicial bidegree (a, b) is a strict tower in
//! R∘P^a∘L (or R∘P^a∘M∘P^b∘L): every P level refines its input partition strictly,
//! which is exactly the complement of the degenerate part because P(1) is the unit.
//! Elements are read as x⊗e_a⊗e_b; the total differential is
//! d_int + (−1)^{int}·(Σ(−1)^i d^h_i + (−1)^a Σ(−1)^j d^v_j).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::chaincore::{ChainComplex, ChainError, ChainMap, Scalar, SimplicialComplexObject, SparseMatrix};
use crate::operad::{Bimodule, LeftModule, Operad, RightModule};
use crate::symseq::composite::{StructureMap, Tower};
use crate::symseq::partition::Partition;
use crate::symseq::{EquivariantComplex, KeyedBuilder, Levelled, SeqError, SymSeq};

#[derive(Debug, Error)]
pub enum BarError {
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{0}")]
    Invalid(String),
}

/// A basis element: simplicial bidegree and tower (b = 0 without a middle bimodule).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BarKey {
    pub a: usize,
    pub b: usize,
    pub tower: Tower,
}

#[derive(Clone, Debug)]
pub struct BarInputs {
    pub r: RightModule,
    pub p: Arc<Operad>,
    pub m: Option<Bimodule>,
    pub l: LeftModule,
}

pub struct BarComplex {
    pub inputs: BarInputs,
    pub seq: SymSeq,
    pub bases: Vec<Arc<KeyedBuilder<BarKey>>>,
    shapes: BTreeMap<(usize, usize), Levelled>,
}

impl fmt::Debug for BarComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

fn same_operad(p: &Operad, q: &Operad) -> bool {
    p.seq == q.seq
}

impl BarInputs {
    fn shape(&self, a: usize, b: usize) -> Levelled {
        let p = &self.p.seq;
        let mut seqs = vec![self.r.seq.clone()];
        let mut strict = vec![false];
        seqs.extend(std::iter::repeat(p.clone()).take(a));
        strict.extend(std::iter::repeat(true).take(a));
        if let Some(m) = &self.m {
            seqs.push(m.seq.clone());
            strict.push(false);
            seqs.extend(std::iter::repeat(p.clone()).take(b));
            strict.extend(std::iter::repeat(true).take(b));
        }
        seqs.push(self.l.seq.clone());
        strict.push(false);
        Levelled::new(seqs, strict)
    }

    fn check(&self) -> Result<(), BarError> {
        let p = &self.p;
        self.r.seq.check_compatible(&p.seq)?;
        self.l.seq.check_compatible(&p.seq)?;
        let mut ok = same_operad(&self.r.operad, p) && same_operad(&self.l.operad, p);
        if let Some(m) = &self.m {
            m.seq.check_compatible(&p.seq)?;
            ok &= same_operad(&m.left.operad, p) && same_operad(&m.right.operad, p);
        }
        if !ok {
            return Err(BarError::Invalid("modules are not over the bar's operad".into()));
        }
        Ok(())
    }

    /// Horizontal faces of bidegree (a, b): (sign parity, level, structure map).
    fn faces(&self, a: usize, b: usize) -> Vec<(bool, usize, &dyn StructureMap, usize, usize)> {
        let mut out: Vec<(bool, usize, &dyn StructureMap, usize, usize)> = Vec::new();
        let bottom_of_h: &dyn StructureMap = match &self.m {
            Some(m) => &m.left.act,
            None => &self.l.act,
        };
        if a >= 1 {
            for i in 0..=a {
                let map: &dyn StructureMap = if i == 0 {
                    &self.r.act
                } else if i == a {
                    bottom_of_h
                } else {
                    &self.p.comp
                };
                out.push((i % 2 == 1, i, map, a - 1, b));
            }
        }
        if let Some(m) = &self.m {
            if b >= 1 {
                for j in 0..=b {
                    let map: &dyn StructureMap = if j == 0 {
                        &m.right.act
                    } else if j == b {
                        &self.l.act
                    } else {
                        &self.p.comp
                    };
                    out.push(((a + j) % 2 == 1, a + 1 + j, map, a, b - 1));
                }
            }
        }
        out
    }
}

impl BarComplex {
    fn build(inputs: BarInputs) -> Result<BarComplex, BarError> {
        inputs.check()?;
        let nmax = inputs.p.arity_max();
        let field = inputs.p.field();
        let two = inputs.m.is_some();
        let mut shapes = BTreeMap::new();
        for a in 0..nmax {
            for b in 0..(if two { nmax - a } else { 1 }) {
                shapes.insert((a, b), inputs.shape(a, b));
            }
        }
        let mut bar = BarComplex { inputs, seq: SymSeq::zero(field, nmax), bases: vec![], shapes };
        let parts: Vec<(KeyedBuilder<BarKey>, EquivariantComplex)> = (1..=nmax)
            .into_par_iter()
            .map(|n| {
                let mut keys = Vec::new();
                for (&(a, b), lv) in &bar.shapes {
                    if a + b < n {
                        keys.extend(lv.enumerate(n).into_iter().map(|tower| BarKey { a, b, tower }));
                    }
                }
                let kb = KeyedBuilder::new(keys);
                let e = kb.build(field, n, |k| bar.label(k, n), |k| bar.degree(k, n), |k| bar.differential(k, n), |s, k| bar.act(s, k, n));
                (kb, e)
            })
            .collect();
        let mut comps = Vec::new();
        for (kb, e) in parts {
            bar.bases.push(Arc::new(kb));
            comps.push(Arc::new(e));
        }
        bar.seq = SymSeq::new(field, nmax, comps)?;
        Ok(bar)
    }

    pub fn name(&self) -> String {
        let i = &self.inputs;
        match &i.m {
            Some(m) => format!("B({},{},{},{},{})", i.r.name, i.p.name, m.name, i.p.name, i.l.name),
            None => format!("B({},{},{})", i.r.name, i.p.name, i.l.name),
        }
    }

    pub fn shape(&self, a: usize, b: usize) -> &Levelled {
        &self.shapes[&(a, b)]
    }

    pub fn basis(&self, n: usize) -> &KeyedBuilder<BarKey> {
        &self.bases[n - 1]
    }

    pub fn key(&self, n: usize, i: usize) -> &BarKey {
        &self.basis(n).keys[i]
    }

    pub fn internal_degree(&self, k: &BarKey, n: usize) -> i32 {
        self.shape(k.a, k.b).degree(&k.tower, n)
    }

    pub fn degree(&self, k: &BarKey, n: usize) -> i32 {
        self.internal_degree(k, n) + (k.a + k.b) as i32
    }

    pub fn label(&self, k: &BarKey, n: usize) -> String {
        let body = self.shape(k.a, k.b).label(&k.tower, n);
        if self.inputs.m.is_some() {
            format!("{},{}:{body}", k.a, k.b)
        } else {
            format!("{}:{body}", k.a)
        }
    }

    /// The chain of partitions λ_out ⪰ … ⪰ λ_in of a basis element.
    pub fn tiers(&self, n: usize, i: usize) -> (usize, usize, Vec<Partition>) {
        let k = self.key(n, i);
        (k.a, k.b, k.tower.chain.clone())
    }

    /// Dimension of each normalized simplicial level (total simplicial degree).
    pub fn level_dims(&self, n: usize) -> Vec<usize> {
        let mut out = vec![0; n.max(1)];
        for k in &self.basis(n).keys {
            let s = k.a + k.b;
            if s >= out.len() {
                out.resize(s + 1, 0);
            }
            out[s] += 1;
        }
        out
    }

    pub fn differential(&self, k: &BarKey, n: usize) -> Vec<(BarKey, Scalar)> {
        let field = self.inputs.p.field();
        let lv = self.shape(k.a, k.b);
        let mut out: Vec<(BarKey, Scalar)> = lv.differential(&k.tower, n).into_iter().map(|(t, x)| (BarKey { a: k.a, b: k.b, tower: t }, x)).collect();
        let int_odd = lv.degree(&k.tower, n).rem_euclid(2) == 1;
        for (odd, level, map, a2, b2) in self.inputs.faces(k.a, k.b) {
            let target = self.shape(a2, b2);
            let s = field.sign(odd != int_odd);
            for (t, x) in lv.merge(&k.tower, n, level, map) {
                if target.is_strict(&t, n) {
                    out.push((BarKey { a: a2, b: b2, tower: t }, x.mul(&s)));
                }
            }
        }
        out
    }

    pub fn act(&self, sigma: &[usize], k: &BarKey, n: usize) -> Vec<(BarKey, Scalar)> {
        self.shape(k.a, k.b).act(sigma, &k.tower, n).into_iter().map(|(t, x)| (BarKey { a: k.a, b: k.b, tower: t }, x)).collect()
    }

    pub fn complex(&self, n: usize) -> Arc<ChainComplex> {
        self.seq.comp(n).complex.clone()
    }
}

/// B(R,P,L).
pub fn bar(r: &RightModule, p: &Arc<Operad>, l: &LeftModule) -> Result<BarComplex, BarError> {
    BarComplex::build(BarInputs { r: r.clone(), p: p.clone(), m: None, l: l.clone() })
}

/// B(R,P,M,P,L), the total complex of the normalized bisimplicial bar.
pub fn bar_bimodule(r: &RightModule, p: &Arc<Operad>, m: &Bimodule, l: &LeftModule) -> Result<BarComplex, BarError> {
    BarComplex::build(BarInputs { r: r.clone(), p: p.clone(), m: Some(m.clone()), l: l.clone() })
}

/// B(P) = B(1,P,1).
pub fn reduced_bar(p: &Arc<Operad>) -> Result<BarComplex, BarError> {
    bar(&RightModule::unit(p), p, &LeftModule::unit(p))
}

/// The un-normalized simplicial object R∘P^k∘L in arity n, levels 0..=max(n−1, 0).
pub fn simplicial_object(r: &RightModule, p: &Arc<Operad>, l: &LeftModule, n: usize) -> SimplicialComplexObject {
    let field = p.field();
    let top = n.saturating_sub(1);
    let inputs = BarInputs { r: r.clone(), p: p.clone(), m: None, l: l.clone() };
    let plain = |k: usize| {
        let mut seqs = vec![r.seq.clone()];
        seqs.extend(std::iter::repeat(p.seq.clone()).take(k));
        seqs.push(l.seq.clone());
        Levelled::plain(seqs)
    };
    let lvs: Vec<Levelled> = (0..=top).map(plain).collect();
    let bases: Vec<KeyedBuilder<Tower>> = lvs.iter().map(|lv| lv.builder(n)).collect();
    let levels = lvs
        .iter()
        .zip(&bases)
        .map(|(lv, kb)| Arc::new(kb.build(field, n, |t| lv.label(t, n), |t| lv.degree(t, n), |t| lv.differential(t, n), |s, t| lv.act(s, t, n)).complex.as_ref().clone()))
        .collect();
    let faces = (0..=top)
        .map(|k| {
            if k == 0 {
                return vec![];
            }
            inputs
                .faces(k, 0)
                .into_iter()
                .map(|(_, level, map, _, _)| bases[k].matrix_into(&bases[k - 1], field, |t| lvs[k].merge(t, n, level, map)))
                .collect()
        })
        .collect();
    let unit = 0;
    let degens = (0..=top)
        .map(|k| {
            if k == top {
                return vec![];
            }
            (0..=k).map(|j| bases[k].matrix_into(&bases[k + 1], field, |t| vec![(lvs[k].insert_unit(t, n, j, unit), field.one())])).collect()
        })
        .collect();
    SimplicialComplexObject { levels, faces, degens }
}

/// Per-arity chain maps out of a bar.
#[derive(Clone, Debug)]
pub struct BarMap {
    pub maps: Vec<ChainMap>,
}

impl BarMap {
    pub fn arity(&self, n: usize) -> &ChainMap {
        &self.maps[n - 1]
    }

    pub fn is_quasi_iso(&self) -> Result<Vec<bool>, ChainError> {
        self.maps.iter().map(|m| m.is_quasi_iso()).collect()
    }

    pub fn all_quasi_iso(&self) -> Result<bool, ChainError> {
        Ok(self.is_quasi_iso()?.into_iter().all(|b| b))
    }
}

/// B(f,P,L): B(R,P,L) → B(R′,P,L) for a right-module map f given per arity.
pub fn bar_map_right(src: &Arc<BarComplex>, dst: &Arc<BarComplex>, f: &[SparseMatrix]) -> Result<BarMap, BarError> {
    let field = src.seq.field;
    if src.inputs.m.is_some() || dst.inputs.m.is_some() || src.inputs.p.seq != dst.inputs.p.seq || src.inputs.l.seq != dst.inputs.l.seq {
        return Err(BarError::Invalid("bar_map_right needs bars that differ only in the right module".into()));
    }
    let mut maps = Vec::new();
    for n in 1..=src.seq.arity_max {
        let cols: Result<Vec<_>, BarError> = src
            .basis(n)
            .keys
            .par_iter()
            .map(|key| {
                let k = src.shape(key.a, key.b).slots(&key.tower, n)[0].children.len();
                let mut col = Vec::new();
                for (r, x) in &f[k - 1].cols[key.tower.labels[0]] {
                    let mut t = key.tower.clone();
                    t.labels[0] = *r;
                    let img = BarKey { a: key.a, b: key.b, tower: t };
                    let i = dst.basis(n).try_idx(&img).ok_or_else(|| BarError::Invalid("image outside the target bar".into()))?;
                    col.push((i, x.clone()));
                }
                Ok(crate::chaincore::matrix::normalize(col))
            })
            .collect();
        let m = SparseMatrix::from_cols(field, dst.seq.dim(n), cols?);
        maps.push(ChainMap::new(src.complex(n), dst.complex(n), m)?);
    }
    Ok(BarMap { maps })
}

fn collapse(bar: &BarComplex, target: &SymSeq, rule: impl Fn(&BarKey, usize) -> Vec<(usize, Scalar)> + Sync) -> Result<BarMap, BarError> {
    let field = target.field;
    let mut maps = Vec::new();
    for n in 1..=target.arity_max {
        let cols: Vec<_> = bar.basis(n).keys.par_iter().map(|k| crate::chaincore::matrix::normalize(rule(k, n))).collect();
        let m = crate::chaincore::SparseMatrix::from_cols(field, target.dim(n), cols);
        maps.push(ChainMap::new(bar.complex(n), target.comp(n).complex.clone(), m)?);
    }
    Ok(BarMap { maps })
}

/// B(R,P,P) → R by the action on level 0.
pub fn resolution_map(r: &RightModule) -> Result<(Arc<BarComplex>, BarMap), BarError> {
    let p = r.operad.clone();
    let b = Arc::new(bar(r, &p, &LeftModule::from_operad(&p))?);
    let act = r.act.clone();
    let map = collapse(&b, &r.seq, |k, n| {
        if k.a != 0 {
            return vec![];
        }
        b.shape(0, 0).merge(&k.tower, n, 0, &act).into_iter().map(|(t, x)| (t.labels[0], x)).collect()
    })?;
    Ok((b, map))
}

/// B(P,P,L) → L by the action on level 0.
pub fn resolution_map_left(l: &LeftModule) -> Result<(Arc<BarComplex>, BarMap), BarError> {
    let p = l.operad.clone();
    let b = Arc::new(bar(&RightModule::from_operad(&p), &p, l)?);
    let act = l.act.clone();
    let map = collapse(&b, &l.seq, |k, n| {
        if k.a != 0 {
            return vec![];
        }
        b.shape(0, 0).merge(&k.tower, n, 0, &act).into_iter().map(|(t, x)| (t.labels[0], x)).collect()
    })?;
    Ok((b, map))
}

/// B(P,P,M,P,P) → M by both actions on bidegree (0, 0).
pub fn resolution_map_bi(m: &Bimodule) -> Result<(Arc<BarComplex>, BarMap), BarError> {
    let p = m.left.operad.clone();
    if !same_operad(&p, &m.right.operad) {
        return Err(BarError::Invalid("two-sided resolution needs one operad on both sides".into()));
    }
    let b = Arc::new(bar_bimodule(&RightModule::from_operad(&p), &p, m, &LeftModule::from_operad(&p))?);
    let mid = Levelled::plain(vec![m.seq.clone(), p.seq.clone()]);
    let (left, right) = (m.left.act.clone(), m.right.act.clone());
    let map = collapse(&b, &m.seq, |k, n| {
        if k.a != 0 || k.b != 0 {
            return vec![];
        }
        let mut out = Vec::new();
        for (t, x) in b.shape(0, 0).merge(&k.tower, n, 0, &left) {
            for (u, y) in mid.merge(&t, n, 0, &right) {
                out.push((u.labels[0], x.mul(&y)));
            }
        }
        out
    })?;
    Ok((b, map))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::chaincore::Field;
    use crate::operad::{com_operad, free_bimodule, free_right_module};
    use crate::random::{random_graded_seq, rng};

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    /// Restricted growth strings of length n, as block lists.
    fn partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for b in 0..cur.len() {
                cur[b].push(i);
                rec(i + 1, n, cur, out);
                cur[b].pop();
            }
            cur.push(vec![i]);
            rec(i + 1, n, cur, out);
            cur.pop();
        }
        rec(0, n, &mut vec![], &mut out);
        out
    }

    fn finer(a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
        a != b && a.iter().all(|x| b.iter().any(|y| x.iter().all(|e| y.contains(e))))
    }

    /// Strict chains from the one-block to the discrete partition, counted by length.
    fn chain_counts(n: usize) -> BTreeMap<usize, usize> {
        let ps = partitions(n);
        let top = ps.iter().position(|p| p.len() == 1).unwrap();
        let bottom = ps.iter().position(|p| p.len() == n).unwrap();
        let mut out = BTreeMap::new();
        fn walk(ps: &[Vec<Vec<usize>>], cur: usize, bottom: usize, len: usize, out: &mut BTreeMap<usize, usize>) {
            if cur == bottom {
                *out.entry(len).or_insert(0) += 1;
                return;
            }
            for (j, q) in ps.iter().enumerate() {
                if finer(q, &ps[cur]) {
                    walk(ps, j, bottom, len + 1, out);
                }
            }
        }
        if n == 1 {
            out.insert(0, 1);
        } else {
            walk(&ps, top, bottom, 0, &mut out);
        }
        out
    }

    #[test]
    fn bar_of_com_is_the_partition_complex() {
        let p = com(5);
        let b = reduced_bar(&p).unwrap();
        for n in 1..=5 {
            let dims = b.seq.comp(n).complex.dims();
            let want: BTreeMap<i32, usize> = chain_counts(n).into_iter().map(|(k, c)| (k as i32, c)).collect();
            assert_eq!(dims, want, "arity {n}");
        }
        let c3 = b.seq.comp(3);
        assert_eq!(c3.complex.dims(), BTreeMap::from([(1, 1), (2, 3)]));
        assert_eq!(c3.complex.homology(), BTreeMap::from([(2, 2)]));
        for n in 2..=5 {
            let fact: usize = (1..n).product();
            assert_eq!(b.seq.comp(n).complex.homology(), BTreeMap::from([(n as i32 - 1, fact)]));
        }
        assert!(b.seq.check().is_ok());
    }

    #[test]
    fn two_sided_bar_on_com_is_contractible() {
        let p = com(4);
        let b = bar(&RightModule::from_operad(&p), &p, &LeftModule::from_operad(&p)).unwrap();
        for n in 1..=4 {
            assert_eq!(b.seq.comp(n).complex.homology(), BTreeMap::from([(0, 1)]));
            assert!(b.level_dims(n).len() <= n);
        }
    }

    #[test]
    fn normalized_matches_totalization() {
        let p = com(4);
        let a = random_graded_seq(&mut rng(11), Field::Q, 4, 2, false);
        let r = free_right_module(&a, &p).unwrap();
        let l = LeftModule::from_operad(&p);
        let b = bar(&r, &p, &l).unwrap();
        for n in 1..=4 {
            let s = simplicial_object(&r, &p, &l, n);
            s.check_identities().unwrap();
            let t = s.totalize().unwrap();
            assert_eq!(t.homology(), b.seq.comp(n).complex.homology(), "arity {n}");
            assert_eq!(t.euler(), b.seq.comp(n).complex.euler());
            assert_eq!(t.dims(), b.seq.comp(n).complex.dims());
        }
    }

    #[test]
    fn resolutions_are_quasi_isomorphisms() {
        let p = com(4);
        let (_, m) = resolution_map(&RightModule::from_operad(&p)).unwrap();
        assert!(m.all_quasi_iso().unwrap());
        let (_, m) = resolution_map(&RightModule::unit(&p)).unwrap();
        assert!(m.all_quasi_iso().unwrap());
        let (_, m) = resolution_map_left(&LeftModule::from_operad(&p)).unwrap();
        assert!(m.all_quasi_iso().unwrap());
        let a = random_graded_seq(&mut rng(5), Field::Q, 4, 2, false);
        let (_, m) = resolution_map(&free_right_module(&a, &p).unwrap()).unwrap();
        assert!(m.all_quasi_iso().unwrap());
    }

    #[test]
    fn bimodule_bar() {
        let p = com(4);
        let m = Bimodule::from_operad(&p);
        let b = bar_bimodule(&RightModule::unit(&p), &p, &m, &LeftModule::unit(&p)).unwrap();
        for n in 2..=4 {
            let fact: usize = (1..n).product();
            assert_eq!(b.seq.comp(n).complex.homology(), BTreeMap::from([(n as i32 - 1, fact)]));
        }
        let p3 = com(3);
        let a = random_graded_seq(&mut rng(2), Field::Q, 3, 1, false);
        let fb = free_bimodule(&a, &p3).unwrap();
        let (_, r) = resolution_map_bi(&fb).unwrap();
        assert!(r.all_quasi_iso().unwrap());
    }

    #[test]
    fn acyclic_summands_do_not_change_the_bar() {
        use crate::operad::{check_right_module_map, direct_sum_right};
        use crate::random::random_acyclic_seq;
        let p = com(3);
        let mut g = rng(5);
        let a = random_graded_seq(&mut g, Field::Q, 3, 2, false);
        let r = free_right_module(&a, &p).unwrap();
        let c = free_right_module(&random_acyclic_seq(&mut g, Field::Q, 3, 1), &p).unwrap();
        let r2 = direct_sum_right(&r, &c).unwrap();
        let incl: Vec<SparseMatrix> = (1..=3)
            .map(|n| {
                let cols = (0..r.seq.dim(n)).map(|i| vec![(i, Field::Q.one())]).collect();
                SparseMatrix::from_cols(Field::Q, r2.seq.dim(n), cols)
            })
            .collect();
        assert!(check_right_module_map(&r, &r2, &incl).passed());
        let l = LeftModule::unit(&p);
        let b1 = Arc::new(bar(&r, &p, &l).unwrap());
        let b2 = Arc::new(bar(&r2, &p, &l).unwrap());
        assert!(bar_map_right(&b1, &b2, &incl).unwrap().all_quasi_iso().unwrap());
        // the zero map is a chain map but not a quasi-isomorphism
        let zero: Vec<SparseMatrix> = (1..=3).map(|n| SparseMatrix::zeros(Field::Q, r2.seq.dim(n), r.seq.dim(n))).collect();
        assert!(!bar_map_right(&b1, &b2, &zero).unwrap().all_quasi_iso().unwrap());
    }
}
