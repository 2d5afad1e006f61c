use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use opcalc::bar::bar;
use opcalc::chaincore::Field;
use opcalc::genfun::{compose_series, egf, verify_fa_di_bruno, PowerSeries};
use opcalc::operad::{check_operad_axioms, check_right_module_axioms, com_operad, direct_sum_right, free_operad, free_right_module, LeftModule, RightModule};
use opcalc::oracles::composite_euler;
use opcalc::random::{random_acyclic_seq, random_graded_seq, random_seq, rng};
use opcalc::symseq::{compose, SymSeq};
use proptest::prelude::*;

const N: usize = 5;

fn series(v: &[i64]) -> PowerSeries {
    PowerSeries::new(v.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..5, N)
}

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Q), Just(Field::fp(2).unwrap()), Just(Field::fp(3).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn series_composition_is_associative(f in coeffs(), g in coeffs(), h in coeffs()) {
        let (f, g, h) = (series(&f), series(&g), series(&h));
        prop_assert_eq!(compose_series(&compose_series(&f, &g), &h), compose_series(&f, &compose_series(&g, &h)));
    }

    #[test]
    fn x_is_a_two_sided_unit(f in coeffs()) {
        let f = series(&f);
        prop_assert_eq!(compose_series(&f, &PowerSeries::x(N)), f.clone());
        prop_assert_eq!(compose_series(&PowerSeries::x(N), &f), f);
    }

    #[test]
    fn composite_counts_follow_fa_di_bruno(seed in any::<u64>(), field in fields()) {
        let mut r = rng(seed);
        let a = random_seq(&mut r, field, 4, 2, false);
        let b = random_seq(&mut r, field, 4, 2, true);
        let report = verify_fa_di_bruno(&a, &b).unwrap();
        prop_assert!(report.passed(), "{:?}", report.mismatches());
    }

    #[test]
    fn composite_euler_characteristic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_graded_seq(&mut r, Field::Q, 4, 2, false);
        let b = random_graded_seq(&mut r, Field::Q, 4, 2, true);
        let c = compose(&a, &b).unwrap();
        for n in 1..=4 {
            prop_assert_eq!(c.euler()[n - 1], composite_euler(&a.euler(), &b.euler(), n));
        }
    }

    #[test]
    fn unit_is_neutral_for_composition(seed in any::<u64>()) {
        let a = random_graded_seq(&mut rng(seed), Field::Q, 4, 2, false);
        let i = SymSeq::unit(Field::Q, 4);
        prop_assert_eq!(compose(&a, &i).unwrap().homology(), a.homology());
        prop_assert_eq!(compose(&i, &a).unwrap().homology(), a.homology());
    }

    #[test]
    fn homology_is_additive(seed in any::<u64>(), field in fields()) {
        let mut r = rng(seed);
        let a = random_graded_seq(&mut r, field, 4, 2, false);
        let b = random_graded_seq(&mut r, field, 4, 2, false);
        let s = a.direct_sum(&b).unwrap();
        prop_assert!(s.check().is_ok());
        for (n, h) in s.homology().iter().enumerate() {
            let mut want = a.homology()[n].clone();
            for (q, d) in &b.homology()[n] {
                *want.entry(*q).or_default() += d;
            }
            want.retain(|_, d| *d > 0);
            let mut got = h.clone();
            got.retain(|_, d| *d > 0);
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn double_dual_preserves_homology(seed in any::<u64>()) {
        let a = random_graded_seq(&mut rng(seed), Field::Q, 4, 2, false);
        let dd = a.levelwise_dual().levelwise_dual();
        prop_assert_eq!(dd.homology(), a.homology());
        prop_assert_eq!(egf(&dd), egf(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn free_operads_satisfy_the_axioms(seed in any::<u64>()) {
        let a = random_seq(&mut rng(seed), Field::Q, 3, 1, true);
        let report = check_operad_axioms(&free_operad(&a).unwrap());
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn bars_of_free_modules_are_complexes(seed in any::<u64>()) {
        let p = Arc::new(com_operad(Field::Q, 3));
        let a = random_graded_seq(&mut rng(seed), Field::Q, 3, 2, false);
        let r = free_right_module(&a, &p).unwrap();
        prop_assert!(check_right_module_axioms(&r).passed());
        let b = bar(&r, &p, &LeftModule::unit(&p)).unwrap();
        for n in 1..=3 {
            prop_assert!(b.complex(n).check_square_zero().is_ok());
        }
        // B(A∘P, P, 1) ≃ A
        let h = b.seq.homology();
        for n in 1..=3 {
            let mut want = a.homology()[n - 1].clone();
            want.retain(|_, d| *d > 0);
            let mut got = h[n - 1].clone();
            got.retain(|_, d| *d > 0);
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn acyclic_summands_leave_the_bar_alone(seed in any::<u64>()) {
        let p = Arc::new(com_operad(Field::Q, 3));
        let z = free_right_module(&random_acyclic_seq(&mut rng(seed), Field::Q, 3, 2), &p).unwrap();
        let r = RightModule::from_operad(&p);
        let s = direct_sum_right(&r, &z).unwrap();
        let h0 = bar(&r, &p, &LeftModule::unit(&p)).unwrap().seq.homology();
        let h1 = bar(&s, &p, &LeftModule::unit(&p)).unwrap().seq.homology();
        for n in 1..=3 {
            let mut a = h0[n - 1].clone();
            let mut b = h1[n - 1].clone();
            a.retain(|_, d| *d > 0);
            b.retain(|_, d| *d > 0);
            prop_assert_eq!(a, b);
        }
    }
}
