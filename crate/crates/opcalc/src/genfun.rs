//! Exponential generating functions of Euler characteristics.
//!
//! For sequences A, B the composite satisfies χ_n(A∘B) = n!·[xⁿ](f_A∘f_B), the
//! numerical shadow of the chain rule.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::symseq::composite::compose;
use crate::symseq::{SeqError, SymSeq};

#[derive(Debug, Error)]
pub enum GenfunError {
    #[error("series has a non-zero constant term {0}")]
    ConstantTerm(BigRational),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A truncated series a₁x + … + a_N x^N over ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerSeries {
    /// a₁..a_N
    coeffs: Vec<BigRational>,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

impl PowerSeries {
    /// From a₁..a_N.
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        PowerSeries { coeffs }
    }

    /// From a₀..a_N; a₀ must vanish.
    pub fn with_constant(mut coeffs: Vec<BigRational>) -> Result<Self, GenfunError> {
        if coeffs.is_empty() {
            return Ok(PowerSeries { coeffs });
        }
        let a0 = coeffs.remove(0);
        if !a0.is_zero() {
            return Err(GenfunError::ConstantTerm(a0));
        }
        Ok(PowerSeries { coeffs })
    }

    /// x truncated at N.
    pub fn x(n: usize) -> Self {
        let mut c = vec![BigRational::zero(); n];
        if n > 0 {
            c[0] = BigRational::one();
        }
        PowerSeries { coeffs: c }
    }

    /// Series with aₙ = cₙ/n!.
    pub fn from_counts(counts: &[i64]) -> Self {
        let coeffs = counts.iter().enumerate().map(|(i, c)| BigRational::new(BigInt::from(*c), factorial(i + 1))).collect();
        PowerSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// aₙ for n ≥ 1; zero past the truncation.
    pub fn coeff(&self, n: usize) -> BigRational {
        if n == 0 || n > self.coeffs.len() {
            BigRational::zero()
        } else {
            self.coeffs[n - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// n!·aₙ for n = 1..N.
    pub fn counts(&self) -> Vec<BigRational> {
        self.coeffs.iter().enumerate().map(|(i, a)| a * BigRational::from_integer(factorial(i + 1))).collect()
    }

    fn mul_trunc(&self, o: &PowerSeries, n: usize) -> PowerSeries {
        let mut c = vec![BigRational::zero(); n];
        for i in 1..=self.order().min(n) {
            if self.coeffs[i - 1].is_zero() {
                continue;
            }
            for j in 1..=o.order().min(n - i) {
                if i + j > n {
                    break;
                }
                c[i + j - 1] += &self.coeffs[i - 1] * &o.coeffs[j - 1];
            }
        }
        PowerSeries { coeffs: c }
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, a)| format!("({a})x^{}", i + 1)).collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// aₙ = χₙ(A)/n!.
pub fn egf(a: &SymSeq) -> PowerSeries {
    PowerSeries::from_counts(&a.euler())
}

/// f∘g truncated at the smaller order.
pub fn compose_series(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let n = f.order().min(g.order());
    let mut out = PowerSeries { coeffs: vec![BigRational::zero(); n] };
    let mut pow = PowerSeries { coeffs: g.coeffs[..n].to_vec() };
    for k in 1..=n {
        let a = f.coeff(k);
        if !a.is_zero() {
            for (o, p) in out.coeffs.iter_mut().zip(&pow.coeffs) {
                *o += &a * p;
            }
        }
        pow = pow.mul_trunc(g, n);
    }
    out
}

/// Composition with a series given with its constant term.
pub fn compose_with_constant(f: &PowerSeries, g: Vec<BigRational>) -> Result<PowerSeries, GenfunError> {
    Ok(compose_series(f, &PowerSeries::with_constant(g)?))
}

#[derive(Clone, Debug)]
pub struct FaDiBrunoRow {
    pub n: usize,
    pub composite: i64,
    pub predicted: BigRational,
}

#[derive(Clone, Debug)]
pub struct FaDiBrunoReport {
    pub rows: Vec<FaDiBrunoRow>,
}

impl FaDiBrunoReport {
    pub fn mismatches(&self) -> Vec<&FaDiBrunoRow> {
        self.rows.iter().filter(|r| BigRational::from_integer(r.composite.into()) != r.predicted).collect()
    }

    pub fn passed(&self) -> bool {
        self.mismatches().is_empty()
    }
}

/// Compares χ(A∘B) against the composed generating functions in every arity.
pub fn verify_fa_di_bruno(a: &SymSeq, b: &SymSeq) -> Result<FaDiBrunoReport, GenfunError> {
    let ab = compose(a, b)?;
    let predicted = compose_series(&egf(a), &egf(b)).counts();
    let rows = ab.euler().into_iter().zip(predicted).enumerate().map(|(i, (c, p))| FaDiBrunoRow { n: i + 1, composite: c, predicted: p }).collect();
    Ok(FaDiBrunoReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincore::Field;
    use crate::operad::com::com_seq;
    use crate::oracles::{composite_euler, set_partitions};
    use crate::random::{random_seq, rng};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn simple_series() {
        let com = com_seq(Field::Q, 5);
        assert_eq!(egf(&com).coeffs(), &[q(1, 1), q(1, 2), q(1, 6), q(1, 24), q(1, 120)]);
        assert_eq!(egf(&SymSeq::unit(Field::Q, 5)), PowerSeries::x(5));
        let e = egf(&com);
        assert_eq!(compose_series(&e, &PowerSeries::x(5)), e);
        assert_eq!(compose_series(&PowerSeries::x(5), &e), e);
    }

    #[test]
    fn bell_numbers() {
        let e = PowerSeries::from_counts(&[1; 5]);
        let bell: Vec<BigRational> = (1..=5).map(|n| q(set_partitions(n).len() as i64, 1)).collect();
        assert_eq!(bell, [1, 2, 5, 15, 52].map(|b| q(b, 1)));
        assert_eq!(compose_series(&e, &e).counts(), bell);
    }

    #[test]
    fn log_inverts_exp() {
        let log = PowerSeries::new((1..=6).map(|n| q(if n % 2 == 1 { 1 } else { -1 }, n)).collect());
        let exp = PowerSeries::from_counts(&[1; 6]);
        assert_eq!(compose_series(&log, &exp), PowerSeries::x(6));
    }

    #[test]
    fn constant_term_is_rejected() {
        let f = PowerSeries::x(3);
        assert!(compose_with_constant(&f, vec![q(1, 1), q(1, 1), q(0, 1), q(0, 1)]).is_err());
        assert_eq!(compose_with_constant(&f, vec![q(0, 1), q(2, 1), q(0, 1), q(0, 1)]).unwrap().coeff(1), q(2, 1));
    }

    #[test]
    fn associativity() {
        let f = PowerSeries::new(vec![q(1, 1), q(-1, 3), q(2, 5), q(0, 1)]);
        let g = PowerSeries::new(vec![q(2, 1), q(1, 1), q(0, 1), q(7, 2)]);
        let h = PowerSeries::new(vec![q(-1, 1), q(0, 1), q(1, 4), q(1, 1)]);
        assert_eq!(compose_series(&compose_series(&f, &g), &h), compose_series(&f, &compose_series(&g, &h)));
    }

    #[test]
    fn fa_di_bruno_for_com_and_unit() {
        let com = com_seq(Field::Q, 5);
        let r = verify_fa_di_bruno(&com, &com).unwrap();
        assert!(r.passed());
        assert_eq!(r.rows.iter().map(|x| x.composite).collect::<Vec<_>>(), vec![1, 2, 5, 15, 52]);
        assert!(verify_fa_di_bruno(&SymSeq::unit(Field::Q, 5), &com).unwrap().passed());
    }

    #[test]
    fn fa_di_bruno_random_against_partition_sums() {
        for seed in 0..6 {
            let mut g = rng(seed);
            let a = random_seq(&mut g, Field::Q, 5, 2, false);
            let b = random_seq(&mut g, Field::Q, 5, 2, true);
            let r = verify_fa_di_bruno(&a, &b).unwrap();
            assert!(r.passed(), "seed {seed}");
            let (ca, cb) = (a.euler(), b.euler());
            for row in &r.rows {
                assert_eq!(row.composite, composite_euler(&ca, &cb, row.n), "seed {seed} n {}", row.n);
            }
        }
    }
}
