use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Q,
    Fp(u64),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("field mismatch: {0} vs {1}")]
    Mismatch(Field, Field),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {p} must exceed the arity bound {bound}")]
    BadCharacteristic { p: u64, bound: usize },
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

impl Field {
    pub fn fp(p: u64) -> Result<Field, FieldError> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return Err(FieldError::NotPrime(p));
        }
        if p >= 1 << 31 {
            return Err(FieldError::Parse(format!("prime {p} too large")));
        }
        Ok(Field::Fp(p))
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Q => Scalar::Q(Rat::Small(0, 1)),
            Field::Fp(p) => Scalar::Fp(0, p),
        }
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, v: i64) -> Scalar {
        match self {
            Field::Q => Scalar::Q(Rat::Small(v, 1)),
            Field::Fp(p) => Scalar::Fp(v.rem_euclid(p as i64) as u64, p),
        }
    }

    pub fn sign(self, negative: bool) -> Scalar {
        self.int(if negative { -1 } else { 1 })
    }

    pub fn ratio(self, num: i64, den: i64) -> Scalar {
        self.int(num).div(&self.int(den))
    }

    pub fn check_same(self, other: Field) -> Result<(), FieldError> {
        if self == other {
            Ok(())
        } else {
            Err(FieldError::Mismatch(self, other))
        }
    }

    /// Fixed-point computations need invertible group orders.
    pub fn check_char(self, bound: usize) -> Result<(), FieldError> {
        match self {
            Field::Q => Ok(()),
            Field::Fp(p) if p as usize > bound => Ok(()),
            Field::Fp(p) => Err(FieldError::BadCharacteristic { p, bound }),
        }
    }

    pub fn parse_scalar(self, s: &str) -> Result<Scalar, FieldError> {
        let err = || FieldError::Parse(s.to_string());
        match self {
            Field::Q => {
                let (n, d) = match s.split_once('/') {
                    Some((n, d)) => (n.trim(), d.trim()),
                    None => (s.trim(), "1"),
                };
                let n: BigInt = n.parse().map_err(|_| err())?;
                let d: BigInt = d.parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Scalar::Q(Rat::from_big(BigRational::new(n, d))))
            }
            Field::Fp(_) => {
                let v: i64 = s.trim().parse().map_err(|_| err())?;
                Ok(self.int(v))
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::Fp(p) => write!(f, "F{p}"),
        }
    }
}

impl std::str::FromStr for Field {
    type Err = FieldError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "Q" {
            return Ok(Field::Q);
        }
        let p = s
            .strip_prefix('F')
            .and_then(|t| t.parse::<u64>().ok())
            .ok_or_else(|| FieldError::Parse(s.to_string()))?;
        Field::fp(p)
    }
}

/// Exact rational with an allocation-free fast path.
#[derive(Clone, Debug)]
pub enum Rat {
    Small(i64, i64),
    Big(BigRational),
}

impl Rat {
    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n > i64::MIN && d > 0 => Rat::Small(n, d),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(r) => r.clone(),
        }
    }

    fn small(n: i128, d: i128) -> Rat {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) if a > i64::MIN => Rat::Small(a, b),
            _ => Rat::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn add(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            if b == d {
                return Rat::small(*a as i128 + *c as i128, *b as i128);
            }
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            return Rat::small(a * d + c * b, b * d);
        }
        Rat::from_big(self.to_big() + o.to_big())
    }

    fn mul(&self, o: &Rat) -> Rat {
        if let (Rat::Small(a, b), Rat::Small(c, d)) = (self, o) {
            return Rat::small(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rat::from_big(self.to_big() * o.to_big())
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(a, b) => Rat::Small(-a, *b),
            Rat::Big(r) => Rat::from_big(-r),
        }
    }

    fn inv(&self) -> Rat {
        match self {
            Rat::Small(a, b) => Rat::small(*b as i128, *a as i128),
            Rat::Big(r) => Rat::from_big(r.recip()),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Rat::Small(a, _) => *a == 0,
            Rat::Big(r) => r.is_zero(),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, o: &Rat) -> bool {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            _ => self.to_big() == o.to_big(),
        }
    }
}
impl Eq for Rat {}

/// An element of ℚ or 𝔽_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Scalar {
    Q(Rat),
    Fp(u64, u64),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Q,
            Scalar::Fp(_, p) => Field::Fp(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Fp(v, _) => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(Rat::Small(1, 1)) => true,
            Scalar::Q(Rat::Small(_, _)) => false,
            Scalar::Q(Rat::Big(r)) => r.is_one(),
            Scalar::Fp(v, _) => *v == 1,
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.add(b)),
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => Scalar::Fp((a + b) % p, *p),
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.mul(b)),
            (Scalar::Fp(a, p), Scalar::Fp(b, _)) => Scalar::Fp(a * b % p, *p),
            _ => panic!("scalar field mismatch"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.neg()),
            Scalar::Fp(a, p) => Scalar::Fp((p - a) % p, *p),
        }
    }

    /// Panics on zero.
    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        match self {
            Scalar::Q(a) => Scalar::Q(a.inv()),
            Scalar::Fp(a, p) => {
                let (mut e, mut b, mut r) = (p - 2, *a, 1u64);
                while e > 0 {
                    if e & 1 == 1 {
                        r = r * b % p;
                    }
                    b = b * b % p;
                    e >>= 1;
                }
                Scalar::Fp(r, *p)
            }
        }
    }

    pub fn div(&self, o: &Scalar) -> Scalar {
        self.mul(&o.inv())
    }

    pub fn negate_if(self, negative: bool) -> Scalar {
        if negative {
            self.neg()
        } else {
            self
        }
    }

    /// Integer value if the scalar is an integer in ℚ.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(Rat::Small(n, 1)) => Some(*n),
            Scalar::Q(Rat::Small(_, _)) => None,
            Scalar::Q(Rat::Big(r)) if r.is_integer() => r.numer().to_i64(),
            Scalar::Q(Rat::Big(_)) => None,
            Scalar::Fp(v, _) => Some(*v as i64),
        }
    }

    /// Canonical rendering: "num/den" over ℚ, a residue over 𝔽_p.
    pub fn render(&self) -> String {
        match self {
            Scalar::Q(r) => {
                let b = r.to_big();
                format!("{}/{}", b.numer(), b.denom())
            }
            Scalar::Fp(v, _) => v.to_string(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Q(Rat::Small(n, _)) => *n < 0,
            Scalar::Q(Rat::Big(r)) => r.is_negative(),
            Scalar::Fp(..) => false,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_arithmetic_is_exact() {
        let q = Field::Q;
        let third = q.ratio(1, 3);
        let s = third.add(&third).add(&third);
        assert!(s.is_one());
        assert_eq!(q.ratio(2, 4).render(), "1/2");
        assert_eq!(q.int(-3).render(), "-3/1");
    }

    #[test]
    fn overflow_promotes_to_big() {
        let q = Field::Q;
        let big = q.int(i64::MAX);
        let sq = big.mul(&big);
        assert_eq!(sq.div(&big), big);
        assert_eq!(sq.sub(&sq), q.zero());
    }

    #[test]
    fn prime_field() {
        let f = Field::fp(7).unwrap();
        let x = f.int(3);
        assert!(x.mul(&x.inv()).is_one());
        assert_eq!(f.int(-1).render(), "6");
        assert!(Field::fp(9).is_err());
        assert_eq!("F7".parse::<Field>().unwrap(), f);
        assert_eq!(Field::Q.parse_scalar("-6/4").unwrap(), Field::Q.ratio(-3, 2));
    }

    #[test]
    fn characteristic_guard() {
        let f = Field::fp(5).unwrap();
        assert!(f.check_char(4).is_ok());
        assert!(f.check_char(5).is_err());
        assert!(Field::Q.check_char(100).is_ok());
    }
}
