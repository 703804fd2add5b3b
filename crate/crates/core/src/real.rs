//! Arbitrary-precision reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

pub const MIN_PRECISION: u32 = 128;
pub const DEFAULT_PRECISION: u32 = 320;

/// Correctly rounded binary floating point at a caller-chosen precision.
///
/// Binary operations run at the larger of the two operand precisions.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigReal(Float);

impl BigReal {
    pub fn from_float(f: Float) -> Self {
        Self(f)
    }

    pub fn zero(prec: u32) -> Self {
        Self(Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Self(Float::with_val(prec, 1))
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self(Float::with_val(prec, n))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        Self(Float::with_val(prec, x))
    }

    pub fn from_rational(r: &Rational, prec: u32) -> Self {
        Self(Float::with_val(prec, r))
    }

    /// Parses a decimal string at the given precision (exact to rounding, unlike going through f64).
    pub fn parse(s: &str, prec: u32) -> Result<Self, Error> {
        let p = Float::parse(s.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        Ok(Self(Float::with_val(prec, p)))
    }

    pub fn pi(prec: u32) -> Self {
        Self(Float::with_val(prec, Constant::Pi))
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Self(Float::with_val(prec, &self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Self {
        Self(self.0.clone().abs())
    }

    pub fn exp(&self) -> Self {
        Self(self.0.clone().exp())
    }

    pub fn ln(&self) -> Self {
        Self(self.0.clone().ln())
    }

    pub fn sqrt(&self) -> Self {
        Self(self.0.clone().sqrt())
    }

    pub fn cbrt(&self) -> Self {
        Self(self.0.clone().cbrt())
    }

    pub fn sin(&self) -> Self {
        Self(self.0.clone().sin())
    }

    pub fn cos(&self) -> Self {
        Self(self.0.clone().cos())
    }

    pub fn atan2(&self, x: &BigReal) -> Self {
        Self(self.0.clone().atan2(&x.0))
    }

    pub fn pow(&self, e: &BigReal) -> Self {
        let p = self.prec().max(e.prec());
        Self(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    pub fn powi(&self, e: i32) -> Self {
        Self(Float::with_val(self.prec(), (&self.0).pow(e)))
    }

    pub fn powf(&self, e: f64) -> Self {
        self.pow(&BigReal::from_f64(e, self.prec()))
    }

    pub fn recip(&self) -> Self {
        Self(self.0.clone().recip())
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

    /// Decimal rendering with `digits` significant figures.
    pub fn to_sig_string(&self, digits: usize) -> String {
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        self.0.to_string_radix(10, Some(digits))
    }
}

impl fmt::Display for BigReal {
    /// Enough digits to reproduce the value at its precision.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = f.precision() {
            write!(f, "{:.*}", p, self.0.to_f64())
        } else {
            let digits = (self.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
            f.write_str(&self.0.to_string_radix(10, Some(digits)))
        }
    }
}

impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BigReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BigReal::parse(&s, DEFAULT_PRECISION).map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                let p = self.prec().max(rhs.prec());
                BigReal(Float::with_val(p, (&self.0).$m(&rhs.0)))
            }
        }
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigReal> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal {
                self.$m(&rhs)
            }
        }
        impl $tr<f64> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                BigReal(Float::with_val(self.prec(), (&self.0).$m(rhs)))
            }
        }
        impl $tr<f64> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: f64) -> BigReal {
                BigReal(self.0.$m(rhs))
            }
        }
        impl $tr<i64> for &BigReal {
            type Output = BigReal;
            fn $m(self, rhs: i64) -> BigReal {
                BigReal(Float::with_val(self.prec(), (&self.0).$m(rhs)))
            }
        }
        impl $tr<i64> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: i64) -> BigReal {
                BigReal(self.0.$m(rhs))
            }
        }
        impl $atr<&BigReal> for BigReal {
            fn $am(&mut self, rhs: &BigReal) {
                self.0.$am(&rhs.0);
            }
        }
        impl $atr<BigReal> for BigReal {
            fn $am(&mut self, rhs: BigReal) {
                self.0.$am(rhs.0);
            }
        }
        impl $atr<f64> for BigReal {
            fn $am(&mut self, rhs: f64) {
                self.0.$am(rhs);
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);
binop!(Div, div, DivAssign, div_assign);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(self.0.clone().neg())
    }
}

impl PartialEq<f64> for BigReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for BigReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_kept() {
        let a = BigReal::from_int(1, 320);
        let b = BigReal::from_int(3, 320);
        let c = &a / &b;
        assert_eq!(c.prec(), 320);
        let back = &c * 3i64;
        assert_eq!(back, a);
    }

    #[test]
    fn parse_beats_f64() {
        let x = BigReal::parse("0.1", 320).unwrap();
        let y = BigReal::from_f64(0.1, 320);
        assert!(x != y);
        assert!((&x - &y).abs() < 1e-17);
    }

    #[test]
    fn display_roundtrip() {
        let x = BigReal::from_int(2, 320).sqrt();
        let y = BigReal::parse(&x.to_string(), 320).unwrap();
        assert_eq!(x, y);
    }
}
