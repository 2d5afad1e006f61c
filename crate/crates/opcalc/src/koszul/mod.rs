//! Koszul duality: linear duals of the tree bar with the operad and module structures
//! dual to cutting, the comparison map Γ, and derived mapping complexes of right modules.

pub mod ext;

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::bar::{bar, comodule_on_bar, cooperad_on_bar, cut_coaction, tree_bar, tree_bar_operad, BarComplex, BarError, BarMap, Coaction, TreeBar};
use crate::chaincore::matrix::normalize;
use crate::chaincore::{ChainError, ChainMap, SVec, SparseMatrix};
use crate::operad::{check_operad_axioms, AxiomReport, Bimodule, Cooperad, LeftModule, Operad, RightModule, ShapeFn};
use crate::symseq::partition as pt;
use crate::symseq::{SeqError, SymSeq};

pub use ext::{ext_right, map_right_modules};

#[derive(Debug, Error)]
pub enum KoszulError {
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Seq(#[from] SeqError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("{0}")]
    Unsupported(String),
}

/// Standard-shape table of the dual of a coaction: γ(x*; y*) = Σ ⟨x*⊗y*, Δz⟩ z*.
///
/// D(A)⊗D(B) pairs with A⊗B with the sign (−1)^{|a||b|}, extended over several factors.
pub fn dual_shape_fn(c: &Coaction) -> ShapeFn {
    let field = c.target.field;
    let mut table: HashMap<(usize, Vec<(usize, usize)>), SVec> = HashMap::new();
    for n in 1..=c.target.arity_max {
        for z in 0..c.target.dim(n) {
            for (tw, coef) in (c.coact)(n, z) {
                let lambda = &tw.chain[0];
                let sizes: Vec<usize> = lambda.iter().map(|b| pt::size(*b)).collect();
                if *lambda != pt::std_blocks(&sizes) {
                    continue;
                }
                let x = tw.labels[0];
                let ys: Vec<(usize, usize)> = sizes.iter().copied().zip(tw.labels[1..].iter().copied()).collect();
                let mut degs = vec![c.outer.comp(lambda.len()).degree(x)];
                degs.extend(ys.iter().map(|(m, y)| c.inner.comp(*m).degree(*y)));
                let mut odd = false;
                let mut acc = 0i32;
                for d in &degs {
                    odd ^= (acc * d).rem_euclid(2) == 1;
                    acc += d;
                }
                table.entry((x, ys)).or_default().push((z, coef.mul(&field.sign(odd))));
            }
        }
    }
    let table: HashMap<_, SVec> = table.into_iter().map(|(k, v)| (k, normalize(v))).collect();
    Arc::new(move |x, ys| table.get(&(x, ys.to_vec())).cloned().unwrap_or_default())
}

fn as_coaction(q: &Cooperad) -> Coaction {
    Coaction { outer: q.seq.clone(), inner: q.seq.clone(), target: q.seq.clone(), coact: q.decomp.clone() }
}

/// The operad structure on the levelwise dual of a reduced cooperad.
pub fn dual_cooperad_to_operad(q: &Cooperad) -> Result<Operad, SeqError> {
    Operad::new(format!("D({})", q.name), q.seq.levelwise_dual(), dual_shape_fn(&as_coaction(q)))
}

/// Cooperad axioms, checked on the dual operad (equivalent for finite types).
pub fn check_cooperad_axioms(q: &Cooperad) -> AxiomReport {
    match dual_cooperad_to_operad(q) {
        Ok(p) => check_operad_axioms(&p),
        Err(e) => {
            let mut rep = AxiomReport::default();
            rep.fail(format!("dual is not a reduced operad: {e}"));
            rep
        }
    }
}

/// K(P) = D B(P).
pub fn koszul_dual_operad(p: &Arc<Operad>) -> Result<Arc<Operad>, KoszulError> {
    let (_, q) = cooperad_on_bar(p)?;
    let mut k = dual_cooperad_to_operad(&q)?;
    k.name = format!("K({})", p.name);
    Ok(Arc::new(k))
}

fn check_kp(p: &Arc<Operad>, kp: &Arc<Operad>) -> Result<Arc<TreeBar>, KoszulError> {
    let bp = Arc::new(tree_bar_operad(p)?);
    if bp.seq().levelwise_dual() != kp.seq {
        return Err(KoszulError::Unsupported(format!("{} is not the Koszul dual of {}", kp.name, p.name)));
    }
    Ok(bp)
}

/// D B(R,P,1) as a right K(P)-module.
pub fn koszul_dual_right(r: &RightModule, kp: &Arc<Operad>) -> Result<RightModule, KoszulError> {
    check_kp(&r.operad, kp)?;
    let (_, c) = comodule_on_bar(Some(r), &r.operad, None)?;
    Ok(RightModule::new(format!("K({})", r.name), c.target.levelwise_dual(), kp.clone(), dual_shape_fn(&c))?)
}

/// D B(1,P,L) as a left K(P)-module.
pub fn koszul_dual_left(l: &LeftModule, kp: &Arc<Operad>) -> Result<LeftModule, KoszulError> {
    check_kp(&l.operad, kp)?;
    let (_, c) = comodule_on_bar(None, &l.operad, Some(l))?;
    Ok(LeftModule::new(format!("K({})", l.name), c.target.levelwise_dual(), kp.clone(), dual_shape_fn(&c))?)
}

pub enum ModuleInput<'a> {
    Right(&'a RightModule),
    Left(&'a LeftModule),
    Bi(&'a Bimodule),
}

pub enum KoszulModule {
    Right(RightModule),
    Left(LeftModule),
}

/// Koszul dual of a module over P, as a module over `kp` = K(P).
pub fn koszul_dual_module(m: ModuleInput<'_>, kp: &Arc<Operad>) -> Result<KoszulModule, KoszulError> {
    match m {
        ModuleInput::Right(r) => Ok(KoszulModule::Right(koszul_dual_right(r, kp)?)),
        ModuleInput::Left(l) => Ok(KoszulModule::Left(koszul_dual_left(l, kp)?)),
        ModuleInput::Bi(_) => Err(KoszulError::Unsupported("Koszul duals of bimodules are not implemented".into())),
    }
}

/// Γ with its source bar and target D B(R,P,L).
pub struct GammaMap {
    pub source: Arc<BarComplex>,
    pub target: SymSeq,
    pub maps: BarMap,
}

/// Γ: B(KR, KP, KL) → D B(R,P,L), dual to cutting a tree of B(R,P,L) into its
/// B(R,P,1) part above and B(1,P,L) parts below. Higher bar levels map to zero.
pub fn gamma_map(r: &RightModule, p: &Arc<Operad>, l: &LeftModule) -> Result<GammaMap, KoszulError> {
    let kp = koszul_dual_operad(p)?;
    let kr = koszul_dual_right(r, &kp)?;
    let kl = koszul_dual_left(l, &kp)?;
    let src = Arc::new(bar(&kr, &kp, &kl)?);
    let br = Arc::new(tree_bar(Some(r), p, None)?);
    let bl = Arc::new(tree_bar(None, p, Some(l))?);
    let full = Arc::new(tree_bar(Some(r), p, Some(l))?);
    let c = cut_coaction(&full, &br, &bl);
    let target = full.seq().levelwise_dual();
    let field = p.field();
    let mut maps = Vec::new();
    for n in 1..=p.arity_max() {
        // transpose of the cut coaction, restricted to level 0
        let mut cols: Vec<SVec> = vec![Vec::new(); src.seq.dim(n)];
        for z in 0..full.seq().dim(n) {
            for (tw, coef) in (c.coact)(n, z) {
                let lambda = &tw.chain[0];
                let mut degs = vec![br.seq().comp(lambda.len()).degree(tw.labels[0])];
                degs.extend(lambda.iter().zip(&tw.labels[1..]).map(|(b, y)| bl.seq().comp(pt::size(*b)).degree(*y)));
                let mut odd = false;
                let mut acc = 0i32;
                for d in &degs {
                    odd ^= (acc * d).rem_euclid(2) == 1;
                    acc += d;
                }
                let key = crate::bar::BarKey { a: 0, b: 0, tower: tw };
                if let Some(i) = src.basis(n).try_idx(&key) {
                    cols[i].push((z, coef.mul(&field.sign(odd))));
                }
            }
        }
        let m = SparseMatrix::from_cols(field, target.dim(n), cols.into_iter().map(normalize).collect());
        maps.push(ChainMap::new(src.complex(n), Arc::new(target.comp(n).complex.as_ref().clone()), m)?);
    }
    Ok(GammaMap { source: src, target, maps: BarMap { maps } })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::chaincore::Field;
    use crate::operad::{check_left_module_axioms, check_right_module_axioms, com_operad, free_left_module, free_operad, free_right_module};
    use crate::random::{random_graded_seq, rng};

    fn com(n: usize) -> Arc<Operad> {
        Arc::new(com_operad(Field::Q, n))
    }

    #[test]
    fn koszul_dual_of_com() {
        let p = com(4);
        let (_, q) = cooperad_on_bar(&p).unwrap();
        let rep = check_cooperad_axioms(&q);
        assert!(rep.passed(), "{rep}");
        let kp = koszul_dual_operad(&p).unwrap();
        let rep = check_operad_axioms(&kp);
        assert!(rep.passed(), "{rep}");
        for n in 2..=4 {
            let fact: usize = (1..n).product();
            assert_eq!(kp.seq.comp(n).complex.homology(), BTreeMap::from([(1 - n as i32, fact)]));
        }
    }

    #[test]
    fn double_dual_of_com() {
        let p = com(4);
        let kkp = koszul_dual_operad(&koszul_dual_operad(&p).unwrap()).unwrap();
        for n in 1..=4 {
            let e = kkp.seq.comp(n);
            let ch = e.homology_character();
            assert_eq!(ch.len(), 1);
            let (q, h, traces) = &ch[0];
            assert_eq!((*q, *h), (0, 1));
            assert!(traces.iter().all(|t| *t == Field::Q.one()));
        }
    }

    #[test]
    fn dual_of_graded_free_operad() {
        let a = random_graded_seq(&mut rng(17), Field::Q, 4, 2, true);
        let p = Arc::new(free_operad(&a).unwrap());
        let kp = koszul_dual_operad(&p).unwrap();
        let rep = check_operad_axioms(&kp);
        assert!(rep.passed(), "{rep}");
        let kkp = koszul_dual_operad(&kp).unwrap();
        assert_eq!(kkp.seq.homology(), p.seq.homology());
    }

    #[test]
    fn dual_modules_satisfy_axioms() {
        let p = com(4);
        let kp = koszul_dual_operad(&p).unwrap();
        let a = random_graded_seq(&mut rng(6), Field::Q, 4, 2, false);
        for r in [RightModule::from_operad(&p), RightModule::unit(&p), free_right_module(&a, &p).unwrap()] {
            let kr = koszul_dual_right(&r, &kp).unwrap();
            let rep = check_right_module_axioms(&kr);
            assert!(rep.passed(), "{}: {rep}", r.name);
        }
        for l in [LeftModule::from_operad(&p), LeftModule::unit(&p), free_left_module(&a, &p).unwrap()] {
            let kl = koszul_dual_left(&l, &kp).unwrap();
            let rep = check_left_module_axioms(&kl);
            assert!(rep.passed(), "{}: {rep}", l.name);
        }
        let kc = koszul_dual_right(&RightModule::from_operad(&p), &kp).unwrap();
        for n in 1..=4 {
            let want = if n == 1 { BTreeMap::from([(0, 1)]) } else { BTreeMap::new() };
            assert_eq!(kc.seq.comp(n).complex.homology(), want);
        }
        let k1 = koszul_dual_right(&RightModule::unit(&p), &kp).unwrap();
        assert_eq!(k1.seq.homology(), kp.seq.homology());
        assert!(koszul_dual_module(ModuleInput::Bi(&Bimodule::from_operad(&p)), &kp).is_err());
    }

    #[test]
    fn gamma_is_a_quasi_isomorphism() {
        let p = com(3);
        let a = random_graded_seq(&mut rng(12), Field::Q, 3, 1, false);
        let cases = [
            (RightModule::from_operad(&p), LeftModule::from_operad(&p)),
            (RightModule::unit(&p), LeftModule::unit(&p)),
            (free_right_module(&a, &p).unwrap(), LeftModule::unit(&p)),
            (RightModule::unit(&p), free_left_module(&a, &p).unwrap()),
        ];
        for (r, l) in cases {
            let g = gamma_map(&r, &p, &l).unwrap();
            assert!(g.maps.all_quasi_iso().unwrap(), "{} {}", r.name, l.name);
            for (n, f) in g.maps.maps.iter().enumerate() {
                let (s, t) = (g.source.seq.comp(n + 1), g.target.comp(n + 1));
                for (gs, gt) in s.gens.iter().zip(&t.gens) {
                    assert_eq!(f.matrix.mul(gs), gt.mul(&f.matrix), "Γ is not equivariant");
                }
            }
        }
    }
}
