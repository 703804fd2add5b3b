//! Real-argument Γ via the Stirling series with argument promotion.

use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::real::BigReal;

const GUARD_BITS: u32 = 64;

fn bernoulli_cache() -> &'static Mutex<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

/// Exact Bernoulli number B_m (B_1 = -1/2 convention).
pub fn bernoulli(m: usize) -> Rational {
    let mut b = bernoulli_cache().lock().expect("bernoulli cache poisoned");
    while b.len() <= m {
        let j = b.len();
        if j > 1 && j % 2 == 1 {
            b.push(Rational::new());
            continue;
        }
        // B_j = -1/(j+1) * sum_{k<j} C(j+1, k) B_k
        let mut acc = Rational::new();
        let mut binom = Integer::from(1);
        for (k, bk) in b.iter().enumerate() {
            if bk.cmp0() != std::cmp::Ordering::Equal {
                acc += Rational::from(bk * &binom);
            }
            binom *= (j + 1 - k) as u32;
            binom /= (k + 1) as u32;
        }
        b.push(-acc / Rational::from(j as u64 + 1));
    }
    b[m].clone()
}

/// Promotion threshold at working precision `wp`: the Stirling tail is about e^{-2πx}.
fn threshold(wp: u32) -> f64 {
    0.12 * wp as f64 + 10.0
}

fn ln_gamma_float(x: &Float, wp: u32) -> Float {
    let mut z = Float::with_val(wp, x);
    let mut shift = Float::with_val(wp, 1);
    let thr = threshold(wp);
    while z < thr {
        shift *= &z;
        z += 1;
    }
    let half_ln_2pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi) * 2).ln() / 2;
    let lnz = Float::with_val(wp, z.ln_ref());
    let mut s = Float::with_val(wp, &z - 0.5) * &lnz - &z + half_ln_2pi;
    let z2 = Float::with_val(wp, z.square_ref());
    let mut zpow = z.clone();
    let eps = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    for k in 1.. {
        let b = bernoulli(2 * k);
        let denom = Integer::from((2 * k) as u64 * (2 * k - 1) as u64);
        let term = Float::with_val(wp, &b) / &zpow / denom;
        let small = Float::with_val(wp, term.abs_ref()) < eps;
        s += term;
        if small || k > 4 * wp as usize {
            break;
        }
        zpow *= &z2;
    }
    if shift != 1 {
        s -= shift.ln();
    }
    s
}

fn integer_value(x: &Float) -> Option<u32> {
    if x.is_integer() && *x >= 1 && *x <= 100_000 {
        x.to_u32_saturating()
    } else {
        None
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: &BigReal) -> Result<BigReal> {
    let prec = x.prec();
    if !(x.as_float().is_finite() && *x.as_float() > 0) {
        return Err(Error::InvalidArgument(format!("ln_gamma needs x > 0, got {x}")));
    }
    let wp = prec + GUARD_BITS;
    Ok(BigReal::from_float(Float::with_val(prec, ln_gamma_float(x.as_float(), wp))))
}

/// Γ(x) for x > 0. Integer arguments are computed exactly before rounding.
pub fn gamma(x: &BigReal) -> Result<BigReal> {
    let prec = x.prec();
    if let Some(n) = integer_value(x.as_float()) {
        let f = Integer::from(Integer::factorial(n - 1));
        return Ok(BigReal::from_float(Float::with_val(prec, f)));
    }
    if !(x.as_float().is_finite() && *x.as_float() > 0) {
        return Err(Error::InvalidArgument(format!("gamma needs x > 0, got {x}")));
    }
    let wp = prec + GUARD_BITS + 16;
    let lg = ln_gamma_float(x.as_float(), wp);
    Ok(BigReal::from_float(Float::with_val(prec, lg.exp())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
        assert_eq!(bernoulli(7), Rational::new());
    }

    #[test]
    fn factorials_exact() {
        for n in 1..60u32 {
            let g = gamma(&BigReal::from_int(n as i64, 320)).unwrap();
            let f = Float::with_val(320, Integer::from(Integer::factorial(n - 1)));
            assert_eq!(g.as_float(), &f);
        }
    }

    #[test]
    fn matches_mpfr() {
        for x in [0.001, 0.3, 0.5, 1.5, 2.8555, 7.25, 33.3, 87.65, 151.0001, 299.9] {
            let b = BigReal::from_f64(x, 320);
            let g = gamma(&b).unwrap();
            let r = Float::with_val(320, b.as_float().gamma_ref());
            let diff = Float::with_val(320, g.as_float() - &r);
            let rel = Float::with_val(320, diff / &r).abs();
            assert!(rel < Float::i_exp(1, -316), "x={x} rel={rel}");
        }
    }

    #[test]
    fn half_integer() {
        let g = gamma(&BigReal::from_f64(0.5, 256)).unwrap();
        let sqrt_pi = BigReal::pi(256).sqrt();
        assert!(((&g - &sqrt_pi) / &sqrt_pi).abs() < 1e-75);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma(&BigReal::from_f64(-0.5, 128)).is_err());
        assert!(ln_gamma(&BigReal::zero(128)).is_err());
    }
}
