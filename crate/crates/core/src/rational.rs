//! Exact rationals and integer square-root bracketing.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseRationalError;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "rational with zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    /// The value as an `i64` if it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Lossy conversion for display and diagnostics only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

/// `⌊√n⌋` for a non-negative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "square root of a negative integer");
    n.sqrt()
}

/// `⌊√x⌋` for a non-negative rational, exactly.
pub fn floor_sqrt(x: &Rational) -> BigInt {
    assert!(!x.is_negative(), "square root of a negative rational");
    // ⌊√(p/q)⌋ = ⌊√(pq) / q⌋ and nested floors collapse.
    let pq = x.numer() * x.denom();
    num_integer::Integer::div_floor(&isqrt(&pq), x.denom())
}

/// `⌈√x⌉` for a non-negative rational, exactly.
pub fn ceil_sqrt(x: &Rational) -> BigInt {
    let f = floor_sqrt(x);
    if Rational::from_integer(&f * &f) == *x {
        f
    } else {
        f + 1
    }
}

/// Whether `a > √x`, decided by squaring.
pub fn exceeds_sqrt(a: &Rational, x: &Rational) -> bool {
    assert!(!x.is_negative(), "square root of a negative rational");
    a.is_positive() && a * a > *x
}

/// `⌊a + √x⌋` for rational `a` and non-negative rational `x`, exactly.
pub fn floor_add_sqrt(a: &Rational, x: &Rational) -> BigInt {
    // n ≤ a + √x  ⇔  n − a < 0  or  (n − a)² ≤ x.
    let fits = |n: &BigInt| {
        let d = &Rational::from_integer(n.clone()) - a;
        d.is_negative() || &d * &d <= *x
    };
    let mut n = a.floor() + floor_sqrt(x);
    debug_assert!(fits(&n));
    while fits(&(&n + 1)) {
        n += 1;
    }
    n
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseRationalError(s.to_string());
        match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Ok(Rational::new(p, q))
            }
            None => {
                let p: BigInt = t.parse().map_err(|_| bad())?;
                Ok(Rational::from_integer(p))
            }
        }
    }
}

macro_rules! from_int {
    ($($t:ty),*) => {$(
        impl From<$t> for Rational {
            fn from(n: $t) -> Self {
                Rational::from_integer(BigInt::from(n))
            }
        }
    )*};
}
from_int!(i32, i64, u32, u64, usize);

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$m(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                Rational((&self.0).$m(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$m(&rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rational::from(*other)))
    }
}

/// Shorthand for `Rational::new(p, q)` with machine integers.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(p, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_lowest_terms() {
        assert_eq!(ratio(6, 4).to_string(), "3/2");
        assert_eq!(ratio(-6, -4).to_string(), "3/2");
        assert_eq!(ratio(2, -4).to_string(), "-1/2");
        assert_eq!(ratio(8, 4).to_string(), "2");
        assert_eq!(Rational::zero().to_string(), "0");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["0", "-3", "17/112", "-1/15", "403/20"] {
            assert_eq!(s.parse::<Rational>().unwrap().to_string(), s);
        }
        assert_eq!("4/6".parse::<Rational>().unwrap(), ratio(2, 3));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(ratio(7, 2).floor(), BigInt::from(3));
        assert_eq!(ratio(-7, 2).floor(), BigInt::from(-4));
        assert_eq!(ratio(7, 2).ceil(), BigInt::from(4));
        assert_eq!(ratio(8, 2).ceil(), BigInt::from(4));
    }

    #[test]
    fn sqrt_brackets() {
        assert_eq!(floor_sqrt(&ratio(9, 4)), BigInt::from(1));
        assert_eq!(floor_sqrt(&ratio(4, 1)), BigInt::from(2));
        assert_eq!(floor_sqrt(&ratio(399, 100)), BigInt::from(1));
        assert_eq!(ceil_sqrt(&ratio(4, 1)), BigInt::from(2));
        assert_eq!(ceil_sqrt(&ratio(5, 1)), BigInt::from(3));
        assert_eq!(floor_add_sqrt(&ratio(1, 2), &Rational::from(2640)), BigInt::from(51));
        assert_eq!(floor_add_sqrt(&ratio(24, 15), &Rational::from(2640)), BigInt::from(52));
        assert_eq!(floor_add_sqrt(&ratio(1, 2), &ratio(9, 4)), BigInt::from(2));
        assert_eq!(floor_add_sqrt(&ratio(-5, 2), &Rational::from(1)), BigInt::from(-2));
        assert!(exceeds_sqrt(&ratio(3, 1), &Rational::from(8)));
        assert!(!exceeds_sqrt(&ratio(3, 1), &Rational::from(9)));
        assert!(!exceeds_sqrt(&ratio(-4, 1), &Rational::from(9)));
    }
}
