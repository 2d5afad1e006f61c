//! The acceptance suite: nine exact checks, each returning a verdict with details.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use crate::bar::{bar, bar_bimodule, bar_map_right, reduced_bar, resolution_map, simplicial_object, tree_bar, BarComplex};
use crate::calculus_examples::{chain_rule_spaces_check, derivatives_of_identity, fat_diagonal_oracle, mapping_space_derivatives, smash_functor_derivatives};
use crate::chaincore::{Field, SparseMatrix};
use crate::genfun::verify_fa_di_bruno;
use crate::koszul::{ext_right, gamma_map, koszul_dual_operad};
use crate::operad::com::com_seq;
use crate::operad::{
    check_left_module_axioms, check_operad_axioms, check_right_module_axioms, check_right_module_map, com_operad, direct_sum_right, free_right_module, module_from_simplicial_set,
    smash_comodule, AxiomReport, Bimodule, LeftModule, Operad, RightModule, SimplicialSet,
};
use crate::oracles::{bell, composite_euler, partition_lattice_homology};
use crate::random::{random_acyclic_seq, random_graded_seq, random_seq, rng};
use crate::symseq::mapping::map_sigma;
use crate::symseq::{Levelled, SymSeq};

pub const CRITERIA: [(usize, &str, &str); 9] = [
    (1, "fa-di-bruno", "Euler characteristics of composites follow Faà di Bruno"),
    (2, "lie", "B(Com) and ∂I have (n−1)! dimensional homology"),
    (3, "resolutions", "bar resolutions are quasi-isomorphisms"),
    (4, "double-dual", "K(K(Com)) has the homology of Com"),
    (5, "gamma", "Γ is a quasi-isomorphism"),
    (6, "fat-diagonal", "mapping-space derivatives match the fat-diagonal quotients"),
    (7, "ext-adjunction", "Ext out of free modules matches Σ-equivariant maps"),
    (8, "structure", "structural property suite"),
    (9, "chain-rule", "chain rule for functors of spaces"),
];

#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: usize,
    pub name: &'static str,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Outcome = Result<Vec<String>, String>;

/// Failures collected while a check keeps going.
#[derive(Default)]
struct Log {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Log {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn axioms(&mut self, what: &str, r: AxiomReport) {
        if !r.passed() {
            self.failures.push(format!("{what}: {r}"));
        }
    }

    fn done(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes)
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn com(n: usize) -> Arc<Operad> {
    Arc::new(com_operad(Field::Q, n))
}

fn fact(n: usize) -> usize {
    (1..=n).product()
}

fn one_class(q: i32, d: usize) -> BTreeMap<i32, usize> {
    [(q, d)].into()
}

fn fa_di_bruno() -> Outcome {
    let mut log = Log::default();
    let c = com_seq(Field::Q, 5);
    let r = verify_fa_di_bruno(&c, &c).map_err(e)?;
    let got: Vec<i64> = r.rows.iter().map(|x| x.composite).collect();
    let want: Vec<i64> = (1..=5).map(|n| bell(n) as i64).collect();
    log.expect(r.passed() && got == want, format!("Com∘Com: χ = {got:?}, Bell = {want:?}"));
    for seed in 0..20 {
        let mut g = rng(1000 + seed);
        let a = random_seq(&mut g, Field::Q, 5, 2, false);
        let b = random_seq(&mut g, Field::Q, 5, 2, seed % 2 == 0);
        let r = verify_fa_di_bruno(&a, &b).map_err(e)?;
        let (ca, cb) = (a.euler(), b.euler());
        let oracle = r.rows.iter().all(|x| x.composite == composite_euler(&ca, &cb, x.n));
        log.expect(r.passed() && oracle, format!("random pair {seed}"));
    }
    log.notes.push(format!("Bell numbers {got:?}; 20 random pairs"));
    log.done()
}

fn lie() -> Outcome {
    let mut log = Log::default();
    let b = reduced_bar(&com(5)).map_err(e)?;
    let h = b.seq.homology();
    let di = derivatives_of_identity(Field::Q, 5).map_err(e)?;
    let hd = di.seq.homology();
    for n in 2..=5 {
        let want = one_class(n as i32 - 1, fact(n - 1));
        log.expect(h[n - 1] == want, format!("H(B(Com)({n})) = {:?}", h[n - 1]));
        let lattice: BTreeMap<i32, usize> = partition_lattice_homology(n, Field::Q).into_iter().map(|(q, d)| (q + 2, d)).collect();
        log.expect(lattice == want, format!("order complex of Π{n}: {lattice:?}"));
        log.expect(hd[n - 1] == one_class(1 - n as i32, fact(n - 1)), format!("H(∂{n}I) = {:?}", hd[n - 1]));
    }
    log.done()
}

fn resolutions() -> Outcome {
    let mut log = Log::default();
    let p = com(4);
    let s1 = SimplicialSet::named("s1-minimal").map_err(e)?;
    for r in [RightModule::from_operad(&p), RightModule::unit(&p), module_from_simplicial_set(&s1, &p).map_err(e)?] {
        let (_, m) = resolution_map(&r).map_err(e)?;
        log.expect(m.all_quasi_iso().map_err(e)?, format!("B({},Com,Com) → {}", r.name, r.name));
    }
    log.done()
}

fn double_dual() -> Outcome {
    let mut log = Log::default();
    let k = koszul_dual_operad(&com(4)).map_err(e)?;
    let kk = koszul_dual_operad(&k).map_err(e)?;
    for n in 1..=4 {
        let ch = kk.seq.comp(n).homology_character();
        let ok = ch.len() == 1 && ch[0].0 == 0 && ch[0].1 == 1 && ch[0].2.iter().all(|t| t.is_one());
        log.expect(ok, format!("arity {n}: {ch:?}"));
    }
    log.done()
}

fn gamma() -> Outcome {
    let mut log = Log::default();
    let p = com(3);
    let sq = SimplicialSet::named("s1-square").map_err(e)?;
    let cases = [
        (RightModule::from_operad(&p), LeftModule::from_operad(&p)),
        (RightModule::unit(&p), LeftModule::unit(&p)),
        (module_from_simplicial_set(&sq, &p).map_err(e)?, LeftModule::unit(&p)),
    ];
    for (r, l) in cases {
        let g = gamma_map(&r, &p, &l).map_err(e)?;
        log.expect(g.maps.all_quasi_iso().map_err(e)?, format!("Γ for ({}, Com, {})", r.name, l.name));
    }
    log.done()
}

fn fat_diagonal() -> Outcome {
    let mut log = Log::default();
    let di = derivatives_of_identity(Field::Q, 3).map_err(e)?;
    for name in ["s0", "s1-minimal"] {
        let k = SimplicialSet::named(name).map_err(e)?;
        let h = mapping_space_derivatives(&k, &di).map_err(e)?.seq.homology();
        for n in 1..=3 {
            let oracle = fat_diagonal_oracle(&k, n, Field::Q);
            log.expect(h[n - 1] == oracle, format!("{name} arity {n}: {:?} vs {oracle:?}", h[n - 1]));
        }
    }
    log.done()
}

fn ext_adjunction() -> Outcome {
    let mut log = Log::default();
    let p = com(3);
    for seed in 0..10 {
        let mut g = rng(2000 + seed);
        let a = random_seq(&mut g, Field::Q, 3, 2, false);
        let n2 = if seed % 3 == 2 { RightModule::from_operad(&p) } else { free_right_module(&random_graded_seq(&mut g, Field::Q, 3, 2, false), &p).map_err(e)? };
        let free = free_right_module(&a, &p).map_err(e)?;
        let ext = ext_right(&free, &n2).map_err(e)?.homology();
        let maps = map_sigma(&a, &n2.seq).map_err(e)?.homology();
        log.expect(ext == maps, format!("instance {seed}: {ext:?} vs {maps:?}"));
    }
    log.done()
}

fn check_seq(log: &mut Log, what: &str, s: &SymSeq) {
    for n in 1..=s.arity_max {
        let c = s.comp(n);
        if let Err(err) = c.complex.check_square_zero() {
            log.failures.push(format!("{what}({n}): {err}"));
        }
        if let Err(err) = c.check() {
            log.failures.push(format!("{what}({n}) action: {err}"));
        }
    }
}

fn check_bar(log: &mut Log, b: &BarComplex) {
    let name = b.name();
    check_seq(log, &name, &b.seq);
    let nmax = b.seq.arity_max;
    for n in 1..=nmax {
        log.expect(b.level_dims(n).iter().skip(n).all(|d| *d == 0), format!("{name}({n}) has levels ≥ {n}"));
        if b.inputs.m.is_none() {
            if let Err(err) = simplicial_object(&b.inputs.r, &b.inputs.p, &b.inputs.l, n).check_identities() {
                log.failures.push(format!("{name}({n}) simplicial identities: {err}"));
            }
            // a strict chain of n refinements of an n-element set does not exist
            let mut seqs = vec![b.inputs.r.seq.clone()];
            seqs.extend(std::iter::repeat(b.inputs.p.seq.clone()).take(n));
            seqs.push(b.inputs.l.seq.clone());
            let mut strict = vec![false];
            strict.extend(std::iter::repeat(true).take(n));
            strict.push(false);
            let lv = Levelled::new(seqs, strict);
            log.expect(lv.enumerate(n).iter().all(|t| !lv.is_strict(t, n)), format!("{name}({n}) has nondegenerate level {n}"));
        }
    }
}

fn inclusion(r: &RightModule, r2: &RightModule) -> Vec<SparseMatrix> {
    (1..=r.seq.arity_max)
        .map(|n| SparseMatrix::from_cols(Field::Q, r2.seq.dim(n), (0..r.seq.dim(n)).map(|i| vec![(i, Field::Q.one())]).collect()))
        .collect()
}

fn structure() -> Outcome {
    let mut log = Log::default();
    let p = com(3);
    let kp = koszul_dual_operad(&p).map_err(e)?;
    let kkp = koszul_dual_operad(&kp).map_err(e)?;
    for o in [&p, &kp, &kkp] {
        log.axioms(&o.name, check_operad_axioms(o));
        check_seq(&mut log, &o.name, &o.seq);
    }
    let mut rights = vec![RightModule::from_operad(&p), RightModule::unit(&p)];
    let mut lefts = vec![LeftModule::from_operad(&p), LeftModule::unit(&p)];
    for name in ["s0", "s1-minimal", "s1-square"] {
        let k = SimplicialSet::named(name).map_err(e)?;
        rights.push(module_from_simplicial_set(&k, &p).map_err(e)?);
        if name != "s1-square" {
            lefts.push(smash_comodule(&k, &p).map_err(e)?);
        }
    }
    for r in &rights {
        log.axioms(&r.name, check_right_module_axioms(r));
        check_seq(&mut log, &r.name, &r.seq);
    }
    for l in &lefts {
        log.axioms(&l.name, check_left_module_axioms(l));
        check_seq(&mut log, &l.name, &l.seq);
    }
    for name in ["s0", "s1-minimal"] {
        let k = SimplicialSet::named(name).map_err(e)?;
        let m = mapping_space_derivatives(&k, &kp).map_err(e)?;
        log.axioms(&m.name, check_right_module_axioms(&m));
        check_seq(&mut log, &m.name, &m.seq);
        let s = smash_functor_derivatives(&k, &kp).map_err(e)?;
        log.axioms(&s.name, check_left_module_axioms(&s));
        check_seq(&mut log, &s.name, &s.seq);
    }
    for r in &rights {
        for l in &lefts[..2] {
            check_bar(&mut log, &bar(r, &p, l).map_err(e)?);
        }
    }
    check_bar(&mut log, &bar_bimodule(&RightModule::unit(&p), &p, &Bimodule::from_operad(&p), &LeftModule::unit(&p)).map_err(e)?);
    check_bar(&mut log, &bar(&RightModule::from_operad(&kp), &kp, &LeftModule::from_operad(&kp)).map_err(e)?);
    let t = tree_bar(Some(&rights[0]), &p, Some(&lefts[0])).map_err(e)?;
    check_seq(&mut log, &t.name, t.seq());

    let mut perturbed = 0;
    for seed in 0..10 {
        let mut g = rng(3000 + seed);
        let r = free_right_module(&random_graded_seq(&mut g, Field::Q, 3, 2, false), &p).map_err(e)?;
        let c = free_right_module(&random_acyclic_seq(&mut g, Field::Q, 3, 1), &p).map_err(e)?;
        let r2 = direct_sum_right(&r, &c).map_err(e)?;
        let f = inclusion(&r, &r2);
        log.axioms("perturbation map", check_right_module_map(&r, &r2, &f));
        let l = if seed % 2 == 0 { LeftModule::unit(&p) } else { LeftModule::from_operad(&p) };
        let b1 = Arc::new(bar(&r, &p, &l).map_err(e)?);
        let b2 = Arc::new(bar(&r2, &p, &l).map_err(e)?);
        let ok = bar_map_right(&b1, &b2, &f).map_err(e)?.all_quasi_iso().map_err(e)?;
        log.expect(ok, format!("perturbation {seed}: B(f,Com,{}) is not a quasi-isomorphism", l.name));
        perturbed += ok as usize;
    }
    log.notes.push(format!("{perturbed}/10 perturbations invariant"));
    log.done()
}

fn chain_rule() -> Outcome {
    let mut log = Log::default();
    let di = derivatives_of_identity(Field::Q, 3).map_err(e)?;
    let s0 = SimplicialSet::named("s0").map_err(e)?;
    let r = RightModule::from_operad(&di);
    for g in [LeftModule::from_operad(&di), smash_functor_derivatives(&s0, &di).map_err(e)?] {
        let rep = chain_rule_spaces_check(&r, &g).map_err(e)?;
        log.expect(rep.passed() && rep.has_reference(), format!("B(∂I,∂I,{}) vs {}", g.name, g.name));
    }
    log.done()
}

/// Runs one criterion by number or name.
pub fn run(which: &str) -> Option<Verdict> {
    let &(id, name, title) = CRITERIA.iter().find(|c| c.0.to_string() == which || c.1 == which)?;
    let start = Instant::now();
    let out = match id {
        1 => fa_di_bruno(),
        2 => lie(),
        3 => resolutions(),
        4 => double_dual(),
        5 => gamma(),
        6 => fat_diagonal(),
        7 => ext_adjunction(),
        8 => structure(),
        _ => chain_rule(),
    };
    let (passed, detail) = match out {
        Ok(notes) => (true, notes.join("; ")),
        Err(msg) => (false, msg),
    };
    Some(Verdict { id, name, title, passed, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(progress: impl Fn(&Verdict)) -> Vec<Verdict> {
    CRITERIA
        .iter()
        .map(|c| {
            let v = run(c.1).expect("listed criterion");
            progress(&v);
            v
        })
        .collect()
}
