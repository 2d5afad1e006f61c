//! Mapping complexes of right modules and their derived version through the cobar
//! cosimplicial object k ↦ Map_Σ(R∘P^k, N).

use std::sync::Arc;

use super::KoszulError;
use crate::chaincore::matrix::{normalize, Kernel};
use crate::chaincore::{BasisElem, ChainComplex, CosimplicialComplexObject, SVec, Scalar, SparseMatrix};
use crate::operad::RightModule;
use crate::symseq::composite::{LevelledSeq, Tower};
use crate::symseq::mapping::{map_sigma_component, Invariants};
use crate::symseq::{Levelled, SymSeq};

/// ⊕_n Hom(M(n), N(n))^Σ with the position of each arity.
struct HomSum {
    comps: Vec<Invariants>,
    offsets: Vec<usize>,
    complex: ChainComplex,
}

impl HomSum {
    fn new(m: &SymSeq, n: &SymSeq) -> Result<Self, KoszulError> {
        m.check_compatible(n)?;
        m.field.check_char(m.arity_max).map_err(crate::symseq::SeqError::from)?;
        let mut comps = Vec::new();
        let mut offsets = vec![0];
        let mut complex = ChainComplex::zero(m.field);
        for r in 1..=m.arity_max {
            let inv = map_sigma_component(m.comp(r), n.comp(r));
            let basis: Vec<BasisElem> = inv.complex.basis().iter().map(|b| BasisElem::new(format!("{r}:{}", b.label), b.degree)).collect();
            complex = complex.direct_sum(&ChainComplex::new_unchecked(m.field, basis, inv.complex.differential().clone())?)?;
            offsets.push(offsets[r - 1] + inv.kernel.dim());
            comps.push(inv);
        }
        Ok(HomSum { comps, offsets, complex })
    }

    fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// (arity, Hom-coordinate vector) of basis element b.
    fn element(&self, b: usize) -> (usize, &SVec) {
        let r = self.offsets.iter().rposition(|o| *o <= b).unwrap();
        (r + 1, &self.comps[r].kernel.basis[b - self.offsets[r]])
    }

    /// Coordinates of a family of invariant maps, one Hom vector per arity.
    fn coords(&self, parts: &[(usize, SVec)]) -> SVec {
        let mut out = Vec::new();
        for (r, v) in parts {
            let k: &Kernel = &self.comps[r - 1].kernel;
            out.extend(k.coords(v).into_iter().map(|(i, x)| (i + self.offsets[r - 1], x)));
        }
        normalize(out)
    }
}

/// The map f: M(n) → N(n) as columns (image of each source basis vector).
fn columns(v: &SVec, dm: usize) -> Vec<SVec> {
    let mut cols: Vec<SVec> = vec![Vec::new(); dm];
    for (idx, x) in v {
        cols[idx % dm].push((idx / dm, x.clone()));
    }
    cols.into_iter().map(normalize).collect()
}

/// Hom vector of the map sending source basis vector j to `images[j]`.
fn hom_vector(images: &[SVec]) -> SVec {
    let dm = images.len();
    let mut out = Vec::new();
    for (j, col) in images.iter().enumerate() {
        out.extend(col.iter().map(|(i, x)| (i * dm + j, x.clone())));
    }
    normalize(out)
}

fn apply_cols(cols: &[SVec], v: &[(usize, Scalar)]) -> SVec {
    let mut out = Vec::new();
    for (j, x) in v {
        out.extend(cols[*j].iter().map(|(i, y)| (*i, y.mul(x))));
    }
    normalize(out)
}

fn flat(terms: Vec<(Tower, Scalar)>) -> SVec {
    normalize(terms.into_iter().map(|(t, x)| (t.labels[0], x)).collect())
}

/// f ↦ ν∘(f∘id) on the towers of `lv` (levels [M…, P]) split above the last level;
/// `f` is a map out of the arity-`n` part of the upper levels.
fn post_act(src: &LevelledSeq, upper: &LevelledSeq, target: &RightModule, n: usize, f: &[SVec]) -> Vec<(usize, SVec)> {
    let depth = src.lv.seqs.len() - 1;
    let act_lv = Levelled::plain(vec![target.seq.clone(), target.operad.seq.clone()]);
    let mut out = Vec::new();
    for m in n..=src.seq.arity_max {
        let mut images = Vec::with_capacity(src.basis(m).keys.len());
        let mut any = false;
        for t in &src.basis(m).keys {
            let (cut, outer, inners, odd) = src.lv.split(t, m, depth - 1);
            if cut.len() != n {
                images.push(Vec::new());
                continue;
            }
            let x = upper.basis(n).idx(&outer);
            let s = target.seq.field.sign(odd);
            let mut img = Vec::new();
            for (i, c) in &f[x] {
                let mut labels = vec![*i];
                labels.extend(inners.iter().map(|u| u.labels[0]));
                let tw = Tower { chain: vec![cut.clone()], labels };
                img.extend(flat(act_lv.merge(&tw, m, 0, &target.act)).into_iter().map(|(k, y)| (k, y.mul(c).mul(&s))));
            }
            let img = normalize(img);
            any |= !img.is_empty();
            images.push(img);
        }
        if any {
            out.push((m, hom_vector(&images)));
        }
    }
    out
}

/// Map_P(R, R′): Σ-maps f with f∘ρ = ρ′∘(f∘id), as a subcomplex of Map_Σ(R, R′).
pub fn map_right_modules(r: &RightModule, r2: &RightModule) -> Result<ChainComplex, KoszulError> {
    if r.operad.seq != r2.operad.seq {
        return Err(KoszulError::Unsupported("modules over different operads".into()));
    }
    let hs = HomSum::new(&r.seq, &r2.seq)?;
    let rp = LevelledSeq::build(Levelled::plain(vec![r.seq.clone(), r.operad.seq.clone()]));
    let single = LevelledSeq::build(Levelled::plain(vec![r.seq.clone()]));
    let field = r.seq.field;
    // Φ(f) lives in ⊕_m Hom((R∘P)(m), R′(m)), flattened with these offsets
    let mut offs = vec![0usize];
    for m in 1..=r.seq.arity_max {
        offs.push(offs[m - 1] + rp.seq.dim(m) * r2.seq.dim(m));
    }
    let phi_cols: Vec<SVec> = (0..hs.dim())
        .map(|b| {
            let (n, v) = hs.element(b);
            let f = columns(v, r.seq.dim(n));
            let mut parts: Vec<(usize, SVec)> = Vec::new();
            let lhs: Vec<SVec> = rp.basis(n).keys.iter().map(|t| apply_cols(&f, &flat(rp.lv.merge(t, n, 0, &r.act)))).collect();
            parts.push((n, hom_vector(&lhs)));
            for (m, w) in post_act(&rp, &single, r2, n, &f) {
                parts.push((m, w.into_iter().map(|(i, x)| (i, x.negate_if(true))).collect()));
            }
            let mut col = Vec::new();
            for (m, w) in parts {
                col.extend(w.into_iter().map(|(i, x)| (i + offs[m - 1], x)));
            }
            normalize(col)
        })
        .collect();
    let phi = SparseMatrix::from_cols(field, offs[r.seq.arity_max], phi_cols);
    let kernel = phi.kernel();
    for v in &kernel.basis {
        if !phi.apply(&hs.complex.differential().apply(v)).is_empty() {
            return Err(KoszulError::Unsupported("module maps do not form a subcomplex".into()));
        }
    }
    Ok(crate::symseq::mapping::restrict(&hs.complex, kernel, "f").complex)
}

/// Ext of right modules: the conormalized cototalization of k ↦ Map_Σ(R∘P^k, N′).
///
/// Levels k ≥ N vanish after conormalization at arity bound N; this is checked.
pub fn ext_right(r: &RightModule, n2: &RightModule) -> Result<ChainComplex, KoszulError> {
    let p = &r.operad;
    if p.seq != n2.operad.seq {
        return Err(KoszulError::Unsupported("modules over different operads".into()));
    }
    let nmax = p.arity_max();
    let field = p.field();
    let unit = |k: usize| -> LevelledSeq {
        let mut seqs = vec![r.seq.clone()];
        seqs.extend(std::iter::repeat(p.seq.clone()).take(k));
        LevelledSeq::build(Levelled::plain(seqs))
    };
    let us: Vec<Arc<LevelledSeq>> = (0..=nmax).map(|k| Arc::new(unit(k))).collect();
    let hs: Vec<HomSum> = us.iter().map(|u| HomSum::new(&u.seq, &n2.seq)).collect::<Result<_, _>>()?;
    // precomposition with a degree-zero map U_k → U_j given per arity as columns
    let pre = |from: usize, to: usize, rule: &dyn Fn(&Tower, usize) -> SVec| -> SparseMatrix {
        let (src, dom, from, to) = (&us[to], &us[from], &hs[from], &hs[to]);
        let cols = (0..from.dim())
            .map(|b| {
                let (n, v) = from.element(b);
                let f = columns(v, dom.seq.dim(n));
                let images: Vec<SVec> = src.basis(n).keys.iter().map(|t| apply_cols(&f, &rule(t, n))).collect();
                to.coords(&[(n, hom_vector(&images))])
            })
            .collect();
        SparseMatrix::from_cols(field, to.dim(), cols)
    };
    let mut cofaces = vec![vec![]];
    for k in 1..=nmax {
        let (lo, hi) = (&us[k - 1], &us[k]);
        let mut ds = Vec::new();
        for i in 0..k {
            let rule = |t: &Tower, n: usize| -> SVec {
                let map: &dyn crate::symseq::composite::StructureMap = if i == 0 { &r.act } else { &p.comp };
                lo.basis(n).column(hi.lv.merge(t, n, i, map))
            };
            ds.push(pre(k - 1, k, &rule));
        }
        let cols = (0..hs[k - 1].dim())
            .map(|b| {
                let (n, v) = hs[k - 1].element(b);
                let f = columns(v, lo.seq.dim(n));
                hs[k].coords(&post_act(hi, lo, n2, n, &f))
            })
            .collect();
        ds.push(SparseMatrix::from_cols(field, hs[k].dim(), cols));
        cofaces.push(ds);
    }
    let mut codegens = Vec::new();
    for k in 0..=nmax {
        if k == nmax {
            codegens.push(vec![]);
            continue;
        }
        let (lo, hi) = (&us[k], &us[k + 1]);
        let ss = (0..=k)
            .map(|j| {
                let rule = |t: &Tower, n: usize| -> SVec { vec![(hi.basis(n).idx(&lo.lv.insert_unit(t, n, j, 0)), field.one())] };
                pre(k + 1, k, &rule)
            })
            .collect();
        codegens.push(ss);
    }
    let obj = CosimplicialComplexObject { levels: hs.iter().map(|h| Arc::new(h.complex.clone())).collect(), cofaces, codegens };
    // the top level must be fully degenerate
    let top = &obj.codegens[nmax - 1];
    let mut rows: Vec<SVec> = Vec::new();
    for s in top {
        rows.extend(s.transpose().cols);
    }
    let stacked = SparseMatrix::from_cols(field, hs[nmax].dim(), rows).transpose();
    if stacked.kernel().dim() != 0 {
        return Err(KoszulError::Unsupported(format!("conormalized level {nmax} does not vanish")));
    }
    Ok(obj.cototalize()?)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::bar::{bar, right_structure};
    use crate::chaincore::Field;
    use crate::operad::{com_operad, free_right_module, Bimodule, LeftModule, Operad};
    use crate::random::{random_graded_seq, rng};
    use crate::symseq::map_sigma;

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    #[test]
    fn maps_out_of_the_free_module_on_one_generator() {
        let p = com(3);
        let a = random_graded_seq(&mut rng(1), Field::Q, 3, 2, false);
        let r2 = free_right_module(&a, &p).unwrap();
        let m = map_right_modules(&RightModule::from_operad(&p), &r2).unwrap();
        assert_eq!(m.homology(), r2.seq.comp(1).complex.homology());
        assert_eq!(m.dim(), r2.seq.comp(1).complex.dim());
    }

    #[test]
    fn free_forgetful_adjunction() {
        let p = com(3);
        for seed in 0..3 {
            let mut g = rng(100 + seed);
            let a = random_graded_seq(&mut g, Field::Q, 3, 2, false);
            let b = random_graded_seq(&mut g, Field::Q, 3, 2, false);
            let n2 = free_right_module(&b, &p).unwrap();
            let free = free_right_module(&a, &p).unwrap();
            let want = map_sigma(&a, &n2.seq).unwrap();
            let m = map_right_modules(&free, &n2).unwrap();
            assert_eq!(m.dims(), want.dims());
            let e = ext_right(&free, &n2).unwrap();
            assert_eq!(e.homology(), want.homology());
        }
    }

    #[test]
    fn ext_of_unit_into_com_vanishes() {
        // generators e (arity 1) and sμ (arity 2) with f(e) ↦ f(e)∘μ an isomorphism
        let p = com(2);
        let e = ext_right(&RightModule::unit(&p), &RightModule::from_operad(&p)).unwrap();
        assert_eq!(e.homology(), BTreeMap::new());
        let p = com(3);
        let e = ext_right(&RightModule::unit(&p), &RightModule::from_operad(&p)).unwrap();
        assert_eq!(e.homology(), BTreeMap::new());
        let e = ext_right(&RightModule::from_operad(&p), &RightModule::from_operad(&p)).unwrap();
        assert_eq!(e.homology(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn ext_agrees_with_maps_out_of_the_bar() {
        let p = com(3);
        let a = random_graded_seq(&mut rng(7), Field::Q, 3, 1, false);
        for (r, n2) in [
            (RightModule::unit(&p), free_right_module(&a, &p).unwrap()),
            (RightModule::from_operad(&p), free_right_module(&a, &p).unwrap()),
            (RightModule::unit(&p), RightModule::from_operad(&p)),
        ] {
            let b = Arc::new(bar(&r, &p, &LeftModule::from_operad(&p)).unwrap());
            let rb = right_structure(&b, &Bimodule::from_operad(&p)).unwrap();
            let m = map_right_modules(&rb, &n2).unwrap();
            let e = ext_right(&r, &n2).unwrap();
            assert_eq!(e.euler(), m.euler());
            assert_eq!(e.homology(), m.homology(), "{}", r.name);
        }
    }
}
