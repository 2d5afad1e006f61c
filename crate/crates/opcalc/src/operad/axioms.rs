//! Exhaustive verification of operad and module axioms on the truncated range.

use std::fmt;

use super::structure::{Action, Bimodule, LeftModule, Operad, RightModule};
use crate::chaincore::matrix::{normalize, SVec};
use crate::chaincore::Scalar;
use crate::symseq::composite::{collect_terms, Levelled, Tower};
use crate::symseq::partition as pt;
use crate::symseq::perm;
use crate::symseq::SymSeq;

/// Failing checks, one line each; empty means every axiom holds.
#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn fail(&mut self, s: String) {
        self.failures.push(s);
    }

    pub fn extend(&mut self, prefix: &str, o: AxiomReport) {
        self.failures.extend(o.failures.into_iter().map(|f| format!("{prefix}{f}")));
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "all axioms hold")
        } else {
            write!(f, "{}", self.failures.join("\n"))
        }
    }
}

fn shape_of(t: &Tower) -> String {
    let lambda = &t.chain[0];
    let sizes: Vec<String> = lambda.iter().map(|b| pt::size(*b).to_string()).collect();
    format!("{};{} at {}", lambda.len(), sizes.join(","), pt::fmt_partition(lambda))
}

/// Terms of a one-level tower as a vector.
fn flat(terms: Vec<(Tower, Scalar)>) -> SVec {
    normalize(terms.into_iter().map(|(t, x)| (t.labels[0], x)).collect())
}

fn after_merge(lv: &Levelled, j: usize, target: &SymSeq) -> Levelled {
    let mut seqs = lv.seqs.clone();
    let mut strict = lv.strict.clone();
    seqs[j] = target.clone();
    seqs.remove(j + 1);
    strict.remove(j + 1);
    Levelled::new(seqs, strict)
}

/// Applies successive merges (level, map) to a tower.
fn run(lv: &Levelled, t: &Tower, n: usize, path: &[(usize, &Action)]) -> SVec {
    let mut cur = lv.clone();
    let mut terms = vec![(t.clone(), cur.seqs[0].field.one())];
    for (j, a) in path {
        let mut next = Vec::new();
        for (s, x) in &terms {
            next.extend(cur.merge(s, n, *j, *a).into_iter().map(|(u, y)| (u, y.mul(x))));
        }
        terms = collect_terms(next);
        cur = after_merge(&cur, *j, &a.target);
    }
    flat(terms)
}

/// Chain-map property and equivariance of a structure map on the full composite.
pub fn check_action(name: &str, a: &Action) -> AxiomReport {
    let mut rep = AxiomReport::default();
    let lv = Levelled::plain(vec![a.outer.clone(), a.inner.clone()]);
    for n in 1..=a.target.arity_max {
        let target = a.target.comp(n);
        for t in lv.enumerate(n) {
            let mu_t = run(&lv, &t, n, &[(0, a)]);
            let lhs = target.complex.differential().apply(&mu_t);
            let mut rhs = Vec::new();
            for (s, x) in lv.differential(&t, n) {
                rhs.extend(run(&lv, &s, n, &[(0, a)]).into_iter().map(|(i, y)| (i, y.mul(&x))));
            }
            if normalize(rhs) != lhs {
                rep.fail(format!("{name}: not a chain map on shape {}", shape_of(&t)));
            }
            for i in 1..n {
                let s = perm::transposition(n, i);
                let mut lhs = Vec::new();
                for (u, x) in lv.act(&s, &t, n) {
                    lhs.extend(run(&lv, &u, n, &[(0, a)]).into_iter().map(|(j, y)| (j, y.mul(&x))));
                }
                let rhs = target.gens[i - 1].apply(&mu_t);
                if normalize(lhs) != rhs {
                    rep.fail(format!("{name}: not equivariant under s{i} on shape {}", shape_of(&t)));
                }
            }
        }
    }
    rep
}

fn compare_paths(rep: &mut AxiomReport, name: &str, lv: &Levelled, a: &[(usize, &Action)], b: &[(usize, &Action)]) {
    let nmax = lv.seqs[0].arity_max;
    for n in 1..=nmax {
        for t in lv.enumerate(n) {
            if run(lv, &t, n, a) != run(lv, &t, n, b) {
                let chain: Vec<String> = t.chain.iter().map(|p| pt::fmt_partition(p)).collect();
                rep.fail(format!("{name} fails at n={n} on {}", chain.join(">")));
            }
        }
    }
}

pub fn check_operad_axioms(p: &Operad) -> AxiomReport {
    let mut rep = AxiomReport::default();
    let one = p.seq.comp(1);
    if one.dim() != 1 || one.degree(0) != 0 {
        rep.fail("not reduced: P(1) is not a line in degree 0".into());
        return rep;
    }
    rep.extend("", check_action("composition", &p.comp));
    let field = p.field();
    for n in 1..=p.arity_max() {
        for x in 0..p.seq.dim(n) {
            if p.comp.standard(0, &[(n, x)]) != vec![(x, field.one())] {
                rep.fail(format!("left unit fails in arity {n} on basis element {x}"));
            }
            if p.comp.standard(x, &vec![(1, 0); n]) != vec![(x, field.one())] {
                rep.fail(format!("right unit fails in arity {n} on basis element {x}"));
            }
        }
    }
    let lv = Levelled::plain(vec![p.seq.clone(), p.seq.clone(), p.seq.clone()]);
    compare_paths(&mut rep, "associativity", &lv, &[(0, &p.comp), (0, &p.comp)], &[(1, &p.comp), (0, &p.comp)]);
    rep
}

pub fn check_right_module_axioms(r: &RightModule) -> AxiomReport {
    let mut rep = check_action("right action", &r.act);
    let field = r.seq.field;
    for n in 1..=r.seq.arity_max {
        for x in 0..r.seq.dim(n) {
            if r.act.standard(x, &vec![(1, 0); n]) != vec![(x, field.one())] {
                rep.fail(format!("unit fails in arity {n} on basis element {x}"));
            }
        }
    }
    let p = &r.operad;
    let lv = Levelled::plain(vec![r.seq.clone(), p.seq.clone(), p.seq.clone()]);
    compare_paths(&mut rep, "associativity", &lv, &[(0, &r.act), (0, &r.act)], &[(1, &p.comp), (0, &r.act)]);
    rep
}

pub fn check_left_module_axioms(l: &LeftModule) -> AxiomReport {
    let mut rep = check_action("left action", &l.act);
    let field = l.seq.field;
    for n in 1..=l.seq.arity_max {
        for x in 0..l.seq.dim(n) {
            if l.act.standard(0, &[(n, x)]) != vec![(x, field.one())] {
                rep.fail(format!("unit fails in arity {n} on basis element {x}"));
            }
        }
    }
    let p = &l.operad;
    let lv = Levelled::plain(vec![p.seq.clone(), p.seq.clone(), l.seq.clone()]);
    compare_paths(&mut rep, "associativity", &lv, &[(0, &p.comp), (0, &l.act)], &[(1, &l.act), (0, &l.act)]);
    rep
}

pub fn check_bimodule_axioms(m: &Bimodule) -> AxiomReport {
    let mut rep = AxiomReport::default();
    rep.extend("left: ", check_left_module_axioms(&m.left));
    rep.extend("right: ", check_right_module_axioms(&m.right));
    let lv = Levelled::plain(vec![m.left.operad.seq.clone(), m.seq.clone(), m.right.operad.seq.clone()]);
    compare_paths(&mut rep, "commutation of actions", &lv, &[(0, &m.left.act), (0, &m.right.act)], &[(1, &m.right.act), (0, &m.left.act)]);
    rep
}

pub fn check_module_axioms(m: &ModuleRef) -> AxiomReport {
    match m {
        ModuleRef::Right(r) => check_right_module_axioms(r),
        ModuleRef::Left(l) => check_left_module_axioms(l),
        ModuleRef::Bi(b) => check_bimodule_axioms(b),
    }
}

/// Any of the three module kinds.
pub enum ModuleRef<'a> {
    Right(&'a RightModule),
    Left(&'a LeftModule),
    Bi(&'a Bimodule),
}

fn check_map_on(lv_src: &Levelled, lv_dst: &Levelled, src: &Action, dst: &Action, f: &[crate::chaincore::SparseMatrix], outer_is_module: bool) -> AxiomReport {
    use crate::symseq::equivariant::tensor_expand;
    let mut rep = AxiomReport::default();
    let field = src.field();
    for n in 1..=src.target.arity_max {
        for t in lv_src.enumerate(n) {
            let lhs = f[n - 1].apply(&flat(lv_src.merge(&t, n, 0, src)));
            let mut rhs = Vec::new();
            let slots = lv_src.slots(&t, n);
            let images: Vec<SVec> = slots
                .iter()
                .zip(&t.labels)
                .map(|(s, l)| {
                    let module_slot = (s.level == 0) == outer_is_module;
                    if module_slot {
                        f[s.children.len() - 1].cols[*l].clone()
                    } else {
                        vec![(*l, field.one())]
                    }
                })
                .collect();
            for (labels, x) in tensor_expand(&images, field) {
                let t2 = Tower { chain: t.chain.clone(), labels };
                rhs.extend(lv_dst.merge(&t2, n, 0, dst).into_iter().map(|(u, y)| (u.labels[0], y.mul(&x))));
            }
            if lhs != normalize(rhs) {
                rep.fail(format!("not a module map on {}", shape_of(&t)));
            }
        }
    }
    rep
}

/// f∘ρ = ρ′∘(f∘id) for per-arity matrices f: M → N of right modules.
pub fn check_right_module_map(src: &RightModule, dst: &RightModule, f: &[crate::chaincore::SparseMatrix]) -> AxiomReport {
    let lv_src = Levelled::plain(vec![src.seq.clone(), src.operad.seq.clone()]);
    let lv_dst = Levelled::plain(vec![dst.seq.clone(), dst.operad.seq.clone()]);
    check_map_on(&lv_src, &lv_dst, &src.act, &dst.act, f, true)
}

/// f∘λ = λ′∘(id∘f) for per-arity matrices f: M → N of left modules.
pub fn check_left_module_map(src: &LeftModule, dst: &LeftModule, f: &[crate::chaincore::SparseMatrix]) -> AxiomReport {
    let lv_src = Levelled::plain(vec![src.operad.seq.clone(), src.seq.clone()]);
    let lv_dst = Levelled::plain(vec![dst.operad.seq.clone(), dst.seq.clone()]);
    check_map_on(&lv_src, &lv_dst, &src.act, &dst.act, f, false)
}
