//! Derivatives of the identity, of stable mapping spaces and of smash functors, and
//! the chain rule for functors of spaces, all as explicit chain-level objects.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::bar::{bar, bar_bimodule, BarError};
use crate::chaincore::matrix::normalize;
use crate::chaincore::{BasisElem, ChainComplex, Field, SparseMatrix};
use crate::koszul::{koszul_dual_left, koszul_dual_operad, koszul_dual_right, KoszulError};
use crate::operad::spaces::Simplex;
use crate::operad::{com_operad, module_from_simplicial_set, smash_comodule, Bimodule, LeftModule, Operad, RightModule, SimplicialSet, SpaceError};

#[derive(Debug, Error)]
pub enum CalculusError {
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error(transparent)]
    Bar(#[from] BarError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("{0}")]
    Invalid(String),
}

pub type Homology = BTreeMap<i32, usize>;

/// ∂_*I = K(Com).
pub fn derivatives_of_identity(field: Field, n: usize) -> Result<Arc<Operad>, CalculusError> {
    Ok(koszul_dual_operad(&Arc::new(com_operad(field, n)))?)
}

fn com_for(di: &Arc<Operad>) -> Arc<Operad> {
    Arc::new(com_operad(di.field(), di.arity_max()))
}

/// ∂_*(Σ^∞Map(K,−)) = D B(Σ^∞K^{∧*}, Com, 1) as a right module over `di` = ∂_*I.
pub fn mapping_space_derivatives(k: &SimplicialSet, di: &Arc<Operad>) -> Result<RightModule, CalculusError> {
    let r = module_from_simplicial_set(k, &com_for(di))?;
    let mut m = koszul_dual_right(&r, di)?;
    m.name = format!("∂Map({},−)", k.name);
    Ok(m)
}

/// ∂_*(K∧Ω^∞(−)) = D B(1, Com, DK) as a left module over `di` = ∂_*I.
pub fn smash_functor_derivatives(k: &SimplicialSet, di: &Arc<Operad>) -> Result<LeftModule, CalculusError> {
    let l = smash_comodule(k, &com_for(di))?;
    let mut m = koszul_dual_left(&l, di)?;
    m.name = format!("∂({}∧−)", k.name);
    Ok(m)
}

/// Reduced chains of K^{∧n}/ΔⁿK: nondegenerate simplices of Kⁿ off the fat diagonal
/// and the wedge locus, with the simplicial boundary.
pub fn fat_diagonal_quotient(k: &SimplicialSet, n: usize, field: Field) -> ChainComplex {
    let collapsed = |t: &[Simplex]| {
        t.iter().any(|s| s.nd == k.base) || (0..t.len()).any(|i| (i + 1..t.len()).any(|j| t[i] == t[j]))
    };
    let degenerate = |t: &[Simplex]| {
        let m = t[0].dim();
        (0..m).any(|j| t.iter().all(|s| s.surj[j] == s.surj[j + 1]))
    };
    let mut cells: Vec<Vec<Simplex>> = Vec::new();
    for m in 0..=n * k.max_dim() {
        let simp = k.simplices_of_dim(m);
        let mut tuples: Vec<Vec<Simplex>> = vec![vec![]];
        for _ in 0..n {
            tuples = tuples.into_iter().flat_map(|t| simp.iter().map(move |s| { let mut u = t.clone(); u.push(s.clone()); u })).collect();
        }
        cells.extend(tuples.into_iter().filter(|t| !collapsed(t) && !degenerate(t)));
    }
    let index: HashMap<&Vec<Simplex>, usize> = cells.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let cols = cells
        .iter()
        .map(|t| {
            let m = t[0].dim();
            let mut col = Vec::new();
            if m > 0 {
                for i in 0..=m {
                    let f: Vec<Simplex> = t.iter().map(|s| k.face(s, i)).collect();
                    if let Some(&r) = index.get(&f) {
                        col.push((r, field.sign(i % 2 == 1)));
                    }
                }
            }
            normalize(col)
        })
        .collect();
    let basis = cells
        .iter()
        .map(|t| BasisElem::new(format!("({})", t.iter().map(|s| k.label(s)).collect::<Vec<_>>().join(",")), t[0].dim() as i32))
        .collect();
    let d = SparseMatrix::from_cols(field, cells.len(), cols);
    ChainComplex::new(field, basis, d).expect("quotient chains")
}

/// Homology of D(K^{∧n}/ΔⁿK): the oracle homology with degrees negated.
pub fn fat_diagonal_oracle(k: &SimplicialSet, n: usize, field: Field) -> Homology {
    fat_diagonal_quotient(k, n, field).homology().into_iter().map(|(q, d)| (-q, d)).collect()
}

#[derive(Clone, Debug)]
pub struct ArityCheck {
    pub arity: usize,
    pub computed: Homology,
    pub reference: Option<Homology>,
}

impl ArityCheck {
    pub fn passed(&self) -> bool {
        self.reference.as_ref().map_or(true, |r| *r == self.computed)
    }
}

#[derive(Clone, Debug)]
pub struct ChainRuleReport {
    pub rows: Vec<ArityCheck>,
}

impl ChainRuleReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(ArityCheck::passed)
    }

    pub fn has_reference(&self) -> bool {
        self.rows.iter().any(|r| r.reference.is_some())
    }
}

/// H(B(∂F, ∂I, ∂G)) per arity. When one side is ∂I itself the bar resolution
/// contracts onto the other side, whose homology is then the reference.
pub fn chain_rule_spaces_check(df: &RightModule, dg: &LeftModule) -> Result<ChainRuleReport, CalculusError> {
    if df.operad.seq != dg.operad.seq || df.operad.name != dg.operad.name {
        return Err(CalculusError::Invalid(format!("{} and {} are over different operads", df.name, dg.name)));
    }
    let di = &df.operad;
    let b = bar(df, di, dg)?;
    let h = b.seq.homology();
    let reference = if df.seq == di.seq {
        Some(dg.seq.homology())
    } else if dg.seq == di.seq {
        Some(df.seq.homology())
    } else {
        None
    };
    let rows = h.into_iter().enumerate().map(|(i, c)| ArityCheck { arity: i + 1, computed: c, reference: reference.as_ref().map(|r| r[i].clone()) }).collect();
    Ok(ChainRuleReport { rows })
}

/// Both sides of B(1,Com,K^{∧*},Com,1) ≃ Map(K, ∂_*I) for K = S⁰, where K^{∧*} is Com.
/// Returns the dual homology of the bar and the homology of ∂_*I; they are reported, not asserted.
pub fn spaces_spaces_s0(field: Field, n: usize) -> Result<(Vec<Homology>, Vec<Homology>), CalculusError> {
    let com = Arc::new(com_operad(field, n));
    let one_r = RightModule::unit(&com);
    let one_l = LeftModule::unit(&com);
    let b = bar_bimodule(&one_r, &com, &Bimodule::from_operad(&com), &one_l)?;
    let lhs = b.seq.levelwise_dual().homology();
    let rhs = derivatives_of_identity(field, n)?.seq.homology();
    Ok((lhs, rhs))
}

/// Names of the packaged examples.
pub const EXAMPLES: [&str; 5] = ["derivatives-of-identity", "mapping-space", "smash-functor", "chain-rule", "spaces-spaces"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genfun::{compose_series, egf, PowerSeries};
    use crate::operad::{check_left_module_axioms, check_operad_axioms, check_right_module_axioms};

    fn di(n: usize) -> Arc<Operad> {
        derivatives_of_identity(Field::Q, n).unwrap()
    }

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn identity_derivatives_have_lie_dimensions() {
        let p = di(5);
        assert!(check_operad_axioms(&p).passed());
        let h = p.seq.homology();
        assert_eq!(h[0], [(0, 1)].into());
        for n in 2..=5 {
            assert_eq!(h[n - 1], [(1 - n as i32, factorial(n - 1))].into(), "arity {n}");
            // the order complex has dimension n − 3 and homology in its top degree
            assert_eq!(crate::oracles::partition_lattice_homology(n, Field::Q), [(n as i32 - 3, factorial(n - 1))].into(), "lattice {n}");
        }
    }

    #[test]
    fn euler_characteristics_invert_com() {
        let p = di(6);
        let log = egf(&p.seq);
        let com = egf(&com_operad(Field::Q, 6).seq);
        assert_eq!(compose_series(&log, &com), PowerSeries::x(6));
        assert_eq!(compose_series(&com, &log), PowerSeries::x(6));
    }

    #[test]
    fn mapping_space_matches_fat_diagonal_oracle() {
        let d = di(3);
        for name in ["s0", "s1-minimal"] {
            let k = SimplicialSet::named(name).unwrap();
            let m = mapping_space_derivatives(&k, &d).unwrap();
            assert!(check_right_module_axioms(&m).passed(), "{name}");
            let h = m.seq.homology();
            for n in 1..=3 {
                assert_eq!(h[n - 1], fat_diagonal_oracle(&k, n, Field::Q), "{name} arity {n}");
            }
        }
    }

    #[test]
    fn fat_diagonal_quotients() {
        let q = Field::Q;
        let s0 = SimplicialSet::named("s0").unwrap();
        assert_eq!(fat_diagonal_oracle(&s0, 1, q), [(0, 1)].into());
        assert!(fat_diagonal_quotient(&s0, 2, q).dim() == 0);
        // S²/S¹ ≃ S² ∨ S²
        let s1 = SimplicialSet::named("s1-minimal").unwrap();
        assert_eq!(fat_diagonal_oracle(&s1, 2, q), [(-2, 2)].into());
        let sq = SimplicialSet::named("s1-square").unwrap();
        assert_eq!(fat_diagonal_oracle(&sq, 2, q), [(-2, 2)].into());
    }

    #[test]
    fn mapping_space_euler_follows_from_its_bar() {
        let d = di(4);
        let com = egf(&com_operad(Field::Q, 4).seq);
        let log = egf(&d.seq);
        assert_eq!(compose_series(&com, &log), PowerSeries::x(4));
        for name in ["s0", "s1-minimal"] {
            let k = SimplicialSet::named(name).unwrap();
            let r = module_from_simplicial_set(&k, &com_for(&d)).unwrap();
            let m = mapping_space_derivatives(&k, &d).unwrap();
            assert_eq!(egf(&m.seq), compose_series(&egf(&r.seq), &log), "{name}");
        }
    }

    #[test]
    fn smash_functor_modules() {
        let d = di(3);
        let s1 = SimplicialSet::named("s1-minimal").unwrap();
        let l = smash_functor_derivatives(&s1, &d).unwrap();
        assert!(check_left_module_axioms(&l).passed());
        assert_eq!(l.seq.dims()[0], [(1, 1)].into());
        let s0 = smash_functor_derivatives(&SimplicialSet::named("s0").unwrap(), &d).unwrap();
        assert!(check_left_module_axioms(&s0).passed());
        // S⁰∧Ω^∞X = Ω^∞X, whose derivatives are the unit module
        let h = s0.seq.homology();
        assert_eq!(h[0], [(0, 1)].into());
        assert!(h[1..].iter().all(|x| x.is_empty()));
        let one = egf(&crate::symseq::SymSeq::unit(Field::Q, 3));
        let dl = egf(&smash_comodule(&SimplicialSet::named("s0").unwrap(), &com_for(&d)).unwrap().seq);
        assert_eq!(compose_series(&egf(&d.seq), &dl), one);
        assert!(smash_functor_derivatives(&SimplicialSet::named("s1-square").unwrap(), &d).is_err());
    }

    #[test]
    fn chain_rule_for_spaces() {
        let d = di(3);
        let r = RightModule::from_operad(&d);
        let l = LeftModule::from_operad(&d);
        let rep = chain_rule_spaces_check(&r, &l).unwrap();
        assert!(rep.passed() && rep.has_reference());
        let s0 = SimplicialSet::named("s0").unwrap();
        let g = smash_functor_derivatives(&s0, &d).unwrap();
        let rep = chain_rule_spaces_check(&r, &g).unwrap();
        assert!(rep.passed() && rep.has_reference());
        let f = mapping_space_derivatives(&s0, &d).unwrap();
        let rep = chain_rule_spaces_check(&f, &l).unwrap();
        assert!(rep.passed() && rep.has_reference());
        // Σ^∞Map(S⁰, S⁰∧Ω^∞X) = Σ^∞Ω^∞X, whose derivatives are Com
        let rep = chain_rule_spaces_check(&f, &g).unwrap();
        assert!(!rep.has_reference());
        assert!(rep.rows.iter().all(|x| x.computed == [(0, 1)].into()));
    }

    #[test]
    fn spaces_spaces_for_s0() {
        let (lhs, rhs) = spaces_spaces_s0(Field::Q, 3).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_derivatives_character_in_arity_three() {
        // Lie(3) and its sign twist both have character 0 on transpositions
        let ch = di(3).seq.comp(3).homology_character();
        assert_eq!(ch.len(), 1);
        assert_eq!(ch[0].1, 2);
        assert!(ch[0].2.iter().all(|t| t.is_zero()));
    }
}
