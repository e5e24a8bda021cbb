//! Exact rational scalars.
//!
//! Every set element in this crate is an [`ExactScalar`]: an arbitrary
//! precision rational kept in canonical reduced form (positive denominator,
//! gcd(|num|, den) = 1). All identities checked elsewhere (mass identity,
//! moment identity, dedup) rely on this exactness; there is deliberately no
//! floating-point construction path.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in canonical reduced form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        ExactScalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_u64(v: u64) -> Self {
        ExactScalar(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        ExactScalar(BigRational::from_integer(v))
    }

    /// Builds `num/den`, reducing to canonical form. `den` must be nonzero.
    pub fn from_ratio(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisorZero);
        }
        Ok(ExactScalar(BigRational::new(num, den)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, when this scalar is an integer that fits in i64.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    /// Approximate value for diagnostics and fitting; never used for set math.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            // Fall back to a quotient of approximations for very large parts.
            let n = self.0.numer().to_f64().unwrap_or(f64::MAX);
            let d = self.0.denom().to_f64().unwrap_or(f64::MAX);
            n / d
        })
    }

    pub fn abs(&self) -> Self {
        ExactScalar(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisorZero);
        }
        Ok(ExactScalar(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DivisorZero);
        }
        Ok(ExactScalar(&self.0 / &rhs.0))
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

}

impl Hash for ExactScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.numer().hash(state);
        self.0.denom().hash(state);
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Parses "p", "-p" or "p/q" with q > 0. This is the element syntax of
    /// the set file format.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::InputFormat {
            line: 0,
            msg: format!("{msg}: {s:?}"),
        };
        let s = s.trim();
        if s.is_empty() {
            return Err(bad("empty element"));
        }
        match s.split_once('/') {
            None => {
                let n = BigInt::from_str(s).map_err(|_| bad("not an integer"))?;
                Ok(ExactScalar(BigRational::from_integer(n)))
            }
            Some((num, den)) => {
                let n = BigInt::from_str(num.trim()).map_err(|_| bad("bad numerator"))?;
                let d = BigInt::from_str(den.trim()).map_err(|_| bad("bad denominator"))?;
                if d.sign() != Sign::Plus {
                    return Err(bad("denominator must be positive"));
                }
                Ok(ExactScalar(BigRational::new(n, d)))
            }
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                ExactScalar(&self.0 $op &rhs.0)
            }
        }
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op rhs.0)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);

impl Div for &ExactScalar {
    type Output = ExactScalar;
    /// Panics on zero divisor; use [`ExactScalar::checked_div`] on user input.
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar(&self.0 / &rhs.0)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-&self.0)
    }
}

/// Total order consistent with rational order; `Ord` comes from `BigRational`.
pub fn cmp_scalars(a: &ExactScalar, b: &ExactScalar) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_ratio(BigInt::from(n), BigInt::from(d)).unwrap()
    }

    #[test]
    fn canonical_form() {
        let x = q(4, 6);
        assert_eq!(x.numer(), &BigInt::from(2));
        assert_eq!(x.denom(), &BigInt::from(3));
        let y = q(3, -6);
        assert_eq!(y.numer(), &BigInt::from(-1));
        assert_eq!(y.denom(), &BigInt::from(2));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(ExactScalar::from_ratio(BigInt::from(1), BigInt::from(0)).is_err());
    }

    #[test]
    fn ordering_is_rational_order() {
        assert!(q(1, 3) < q(1, 2));
        assert!(q(-1, 2) < q(1, 3));
        assert_eq!(q(2, 4), q(1, 2));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["5", "-12", "7/3", "-7/3", "0"] {
            let v: ExactScalar = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        assert_eq!("4/6".parse::<ExactScalar>().unwrap().to_string(), "2/3");
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("1/-2".parse::<ExactScalar>().is_err());
        assert!("x".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(&q(1, 2) + &q(1, 3), q(5, 6));
        assert_eq!(&q(1, 2) * &q(2, 3), q(1, 3));
        assert_eq!(&q(1, 2) - &q(1, 2), ExactScalar::zero());
        assert_eq!(q(3, 4).checked_div(&q(3, 2)).unwrap(), q(1, 2));
        assert!(q(1, 1).checked_div(&ExactScalar::zero()).is_err());
    }
}
