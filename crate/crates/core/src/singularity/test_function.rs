use rug::{Integer, Rational};

use super::complex::BigComplex;
use crate::exact::ExactRational;
use crate::gamma::bernoulli;
use crate::real::BigReal;
use crate::resum::{AsymptoticSeries, VariableKind};

/// Exact coefficient of y^{2n} in log cosh y: 2^{2n-1} (2^{2n} - 1) B_{2n} / (n (2n)!).
pub fn log_cosh_coeff(n: usize) -> ExactRational {
    assert!(n >= 1);
    let two = |e: usize| Integer::from(1) << e as u32;
    let mut fact = Integer::from(1);
    for k in 2..=2 * n {
        fact *= k as u32;
    }
    let num = Rational::from(two(2 * n - 1) * (two(2 * n) - 1u32)) * bernoulli(2 * n);
    ExactRational::from_rational(num / Rational::from(fact * n as u32))
}

/// W(x) = log(e^{x^3} + e^{-x^3}) as coefficients of s^{-k}, s = 1/x, through s^{-max_power}.
pub fn test_function_series(max_power: usize, prec: u32) -> AsymptoticSeries {
    let mut c = vec![BigReal::zero(prec); max_power + 1];
    c[0] = BigReal::from_int(2, prec).ln();
    for n in 1..=max_power / 6 {
        c[6 * n] = log_cosh_coeff(n).to_big_real(prec);
    }
    AsymptoticSeries::new(c, VariableKind::InverseS, "log(exp(x^3)+exp(-x^3))")
}

/// Zero of e^{x^3} + e^{-x^3} nearest the positive real s axis: x^3 = i pi / 2, s = (2/pi)^{1/3} e^{-i pi/6}.
pub fn test_function_zero(prec: u32) -> BigComplex {
    let pi = BigReal::pi(prec);
    let r = (BigReal::from_int(2, prec) / &pi).cbrt();
    BigComplex::from_polar(&r, &(-(pi / 6i64)))
}
