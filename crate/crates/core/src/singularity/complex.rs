use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::real::BigReal;

/// Minimal complex number over [`BigReal`]; serialized as `{"re": .., "im": ..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigReal) -> Self {
        let im = BigReal::zero(re.prec());
        Self { re, im }
    }

    pub fn from_polar(r: &BigReal, theta: &BigReal) -> Self {
        Self { re: r * theta.cos(), im: r * theta.sin() }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> BigReal {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> BigReal {
        self.norm_sqr().sqrt()
    }

    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn exp(&self) -> Self {
        Self::from_polar(&self.re.exp(), &self.im)
    }

    /// Principal branch of z^e for real e.
    pub fn powf(&self, e: &BigReal) -> Self {
        if self.re.is_zero() && self.im.is_zero() {
            return self.clone();
        }
        Self::from_polar(&self.abs().pow(e), &(self.arg() * e))
    }

    pub fn scale(&self, k: &BigReal) -> Self {
        Self { re: &self.re * k, im: &self.im * k }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        BigComplex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        BigComplex {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for &BigComplex {
    type Output = BigComplex;
    fn div(self, o: &BigComplex) -> BigComplex {
        let d = o.norm_sqr();
        BigComplex {
            re: (&self.re * &o.re + &self.im * &o.im) / &d,
            im: (&self.im * &o.re - &self.re * &o.im) / &d,
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex { re: -&self.re, im: -&self.im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::new(BigReal::from_f64(re, 256), BigReal::from_f64(im, 256))
    }

    #[test]
    fn field_ops() {
        let a = c(1.0, 2.0);
        let b = c(-0.5, 3.0);
        let q = &(&a * &b) / &b;
        assert!((&q - &a).abs().to_f64() < 1e-70);
        assert_eq!((&a * &b).to_f64(), (-6.5, 2.0));
    }

    #[test]
    fn powers_roundtrip() {
        let z = c(0.5, 0.3);
        let e = BigReal::from_f64(2.5, 256).recip();
        let w = z.powf(&e).powf(&BigReal::from_f64(2.5, 256));
        assert!((&w - &z).abs().to_f64() < 1e-60);
        let i = c(0.0, std::f64::consts::PI).exp();
        assert!((i.re.to_f64() + 1.0).abs() < 1e-15 && i.im.to_f64().abs() < 1e-15);
    }
}
