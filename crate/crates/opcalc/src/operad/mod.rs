//! Operads, modules, cooperads, trees and the module of a simplicial set.

pub mod axioms;
pub mod com;
pub mod free;
pub mod structure;
pub mod spaces;
pub mod tree;

pub use axioms::{check_bimodule_axioms, check_left_module_axioms, check_left_module_map, check_module_axioms, check_operad_axioms, check_right_module_axioms, check_right_module_map, AxiomReport, ModuleRef};
pub use com::com_operad;
pub use free::{compose_left_module, compose_right_module, direct_sum_right, free_bimodule, free_left_module, free_operad, free_operad_trees, free_right_module};
pub use spaces::{module_from_simplicial_set, smash_comodule, SimplicialSet, SpaceError};
pub use structure::{Action, Bimodule, Cooperad, LeftModule, Operad, RightModule, ShapeFn};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::chaincore::{ChainComplex, Field};
    use crate::random::{random_graded_seq, rng};
    use crate::symseq::{EquivariantComplex, SymSeq};

    fn binary(field: Field, n: usize) -> SymSeq {
        SymSeq::from_fn(field, n, |k| {
            if k == 2 {
                EquivariantComplex::trivial(2, Arc::new(ChainComplex::point(field, "m", 0)))
            } else {
                EquivariantComplex::zero(field, k)
            }
        })
    }

    /// Σ over leaf-labelled trees of Π dim A(inputs), by recursion on the root's partition.
    fn tree_count(a: &SymSeq, n: usize) -> usize {
        use crate::symseq::partition as pt;
        fn sub(a: &SymSeq, size: usize) -> usize {
            if size == 1 {
                return 1;
            }
            pt::all_partitions(size).iter().filter(|p| p.len() >= 2).map(|p| a.dim(p.len()) * p.iter().map(|b| sub(a, pt::size(*b))).product::<usize>()).sum()
        }
        sub(a, n)
    }

    #[test]
    fn com_passes() {
        let c = com_operad(Field::Q, 4);
        assert_eq!(c.seq.total_dims(), vec![1, 1, 1, 1]);
        assert_eq!(c.seq.euler(), vec![1, 1, 1, 1]);
        assert!(check_operad_axioms(&c).passed());
    }

    #[test]
    fn free_binary_trees() {
        let f = free_operad(&binary(Field::Q, 4)).unwrap();
        assert_eq!(f.seq.total_dims(), vec![1, 1, 3, 15]);
        let r = check_operad_axioms(&f);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn free_operad_random_generators() {
        for seed in 0..3 {
            let a = random_graded_seq(&mut rng(seed), Field::Q, 4, 2, true);
            let f = free_operad(&a).unwrap();
            for n in 1..=4 {
                assert_eq!(f.seq.dim(n), tree_count(&a, n));
            }
            let r = check_operad_axioms(&f);
            assert!(r.passed(), "seed {seed}: {r}");
        }
    }

    #[test]
    fn sign_flip_is_caught() {
        let f = free_operad(&binary(Field::Q, 3)).unwrap();
        let bad = f.with_comp(f.comp.with_flipped_shape(2, vec![2, 1]));
        let r = check_operad_axioms(&bad);
        assert!(!r.passed());
        assert!(r.failures.iter().any(|s| s.contains("2;2,1")), "{r}");
    }

    #[test]
    fn free_modules() {
        let com = Arc::new(com_operad(Field::Q, 4));
        let unit = SymSeq::unit(Field::Q, 4);
        let r = free_right_module(&unit, &com).unwrap();
        assert_eq!(r.seq.total_dims(), vec![1, 1, 1, 1]);
        assert!(check_right_module_axioms(&r).passed());
        let r2 = free_right_module(&binary(Field::Q, 4), &com).unwrap();
        assert_eq!(r2.seq.dim(3), 3);
        assert!(check_right_module_axioms(&r2).passed());
        let a = random_graded_seq(&mut rng(7), Field::Q, 3, 2, false);
        let com3 = Arc::new(com_operad(Field::Q, 3));
        let l = free_left_module(&a, &com3).unwrap();
        assert!(check_left_module_axioms(&l).passed());
        let b = free_bimodule(&a, &com3).unwrap();
        let rep = check_bimodule_axioms(&b);
        assert!(rep.passed(), "{rep}");
        let f = Arc::new(free_operad(&random_graded_seq(&mut rng(3), Field::Q, 3, 2, true)).unwrap());
        let r3 = free_right_module(&a, &f).unwrap();
        let rep = check_right_module_axioms(&r3);
        assert!(rep.passed(), "{rep}");
        let l3 = free_left_module(&a, &f).unwrap();
        let rep = check_left_module_axioms(&l3);
        assert!(rep.passed(), "{rep}");
    }
}
