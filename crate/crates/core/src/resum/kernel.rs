use std::ops::Neg;

use rug::{Assign, Float, Integer};

use super::AsymptoticSeries;
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::real::BigReal;

/// Precomputed double-sum kernel for one (series, s0, alpha, N, P).
///
/// Stores `inv[n][p]` = s0^{p/alpha} / Gamma(alpha n + p + 1); each evaluation then costs (N+1)(P+1) products.
#[derive(Clone, Debug)]
pub struct BorelKernel {
    coeffs: Vec<BigReal>,
    alpha: BigReal,
    root: BigReal,
    inv: Vec<Vec<BigReal>>,
}

impl BorelKernel {
    pub fn new(series: &AsymptoticSeries, s0: &BigReal, alpha: &BigReal, n: usize, p: usize) -> Result<Self> {
        series.need(n)?;
        if !(*s0 > 0.0) || !(*alpha > 0.0) {
            return Err(Error::InvalidArgument("s0 and alpha must be positive".into()));
        }
        let prec = series.prec();
        let root = s0.with_prec(prec).pow(&alpha.with_prec(prec).recip());
        let mut inv = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let an = alpha * k as i64;
            let mut g = gamma(&(&an + 1i64).with_prec(prec))?;
            let mut sp = BigReal::one(prec);
            let mut row = Vec::with_capacity(p + 1);
            for j in 0..=p {
                if j > 0 {
                    g *= &an + j as i64;
                    sp *= &root;
                }
                let v = &sp / &g;
                if !v.is_finite() {
                    return Err(Error::Overflow { n: k, p: j });
                }
                row.push(v);
            }
            inv.push(row);
        }
        Ok(Self { coeffs: series.coeffs[..=n].to_vec(), alpha: alpha.with_prec(prec), root, inv })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Truncation P of the exponential re-expansion.
    pub fn p(&self) -> usize {
        self.inv[0].len() - 1
    }

    /// s0^{1/alpha}.
    pub fn root(&self) -> &BigReal {
        &self.root
    }

    /// L_0(lambda), ..., L_N(lambda).
    pub fn partial_sums(&self, lambda: &BigReal) -> Result<Vec<BigReal>> {
        let prec = self.root.prec();
        let lam = Float::with_val(prec, lambda.as_float());
        let p = self.inv[0].len() - 1;
        let mut pows = Vec::with_capacity(p + 1);
        let mut x = Float::with_val(prec, 1);
        for _ in 0..=p {
            pows.push(x.clone());
            x *= &lam;
        }
        let step = (Float::with_val(prec, lam.ln_ref()) * self.alpha.as_float()).exp();
        let damp = Float::with_val(prec, &lam * self.root.as_float()).neg().exp();
        let mut lead = Float::with_val(prec, 1);
        let mut total = Float::new(prec);
        let mut inner = Float::new(prec);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, (c, row)) in self.coeffs.iter().zip(&self.inv).enumerate() {
            if k > 0 {
                lead *= &step;
            }
            if !c.is_zero() {
                inner.assign(0);
                for (a, b) in row.iter().zip(&pows) {
                    inner += a.as_float() * b;
                }
                inner *= &lead;
                inner *= c.as_float();
                if !inner.is_finite() {
                    return Err(Error::Overflow { n: k, p });
                }
                total += &inner;
            }
            out.push(BigReal::from_float(Float::with_val(prec, &total * &damp)));
        }
        Ok(out)
    }

    pub fn eval(&self, lambda: &BigReal) -> Result<(BigReal, BigReal)> {
        let mut s = self.partial_sums(lambda)?;
        let last = s.pop().expect("order >= 1");
        let prev = s.pop().unwrap_or_else(|| BigReal::zero(last.prec()));
        Ok((last, prev))
    }

    pub fn top_signs(&self) -> (i32, i32) {
        let n = self.order();
        (self.coeffs[n].signum(), if n >= 1 { self.coeffs[n - 1].signum() } else { 0 })
    }
}

/// L_N(lambda) for the double sum (P-truncated exponential re-expansion).
pub fn l_n(
    series: &AsymptoticSeries,
    s0: &BigReal,
    alpha: &BigReal,
    lambda: &BigReal,
    n: usize,
    p: usize,
) -> Result<BigReal> {
    Ok(BorelKernel::new(series, s0, alpha, n, p)?.eval(lambda)?.0)
}

/// lambda^gamma * sum_n d_n lambda^{e_n} / Gamma(e_n + 1) with fixed exponents e_n.
#[derive(Clone, Debug)]
pub struct PowerKernel {
    exps: Vec<BigReal>,
    inv_gamma: Vec<BigReal>,
    pre_exp: BigReal,
    step: Option<BigReal>,
}

impl PowerKernel {
    pub fn new(exps: Vec<BigReal>, pre_exp: BigReal) -> Result<Self> {
        let mut inv_gamma = Vec::with_capacity(exps.len());
        for e in &exps {
            let g = gamma(&(e + 1i64))?;
            inv_gamma.push(g.recip());
        }
        Ok(Self { exps, inv_gamma, pre_exp, step: None })
    }

    /// Exponents alpha * (offset + step * k) for k = 0..count.
    pub fn linear(alpha: &BigReal, offset: usize, step: usize, count: usize, pre_exp: BigReal) -> Result<Self> {
        let exps = (0..count).map(|k| alpha * ((offset + step * k) as i64)).collect();
        let mut out = Self::new(exps, pre_exp)?;
        out.step = Some(alpha * step as i64);
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Running sums over the first 1, 2, ... terms.
    pub fn partial_sums(&self, coeffs: &[BigReal], lambda: &BigReal) -> Result<Vec<BigReal>> {
        if coeffs.len() > self.exps.len() {
            return Err(Error::SeriesTooShort { available: self.exps.len(), requested: coeffs.len() });
        }
        let prec = lambda.prec().max(coeffs.first().map(|c| c.prec()).unwrap_or(0));
        let ln_lam = lambda.with_prec(prec).ln();
        let pre = (&ln_lam * &self.pre_exp).exp();
        let mut total = BigReal::zero(prec);
        let mut out = Vec::with_capacity(coeffs.len());
        // equally spaced exponents: lambda powers by repeated multiplication
        let ratio = self.step.as_ref().map(|st| (&ln_lam * st).exp());
        let mut pw = self.exps.first().map(|e| (&ln_lam * e).exp());
        for (k, c) in coeffs.iter().enumerate() {
            let lam_pow = match (&ratio, &mut pw) {
                (Some(r), Some(p)) => {
                    let cur = p.clone();
                    *p = &*p * r;
                    cur
                }
                _ => (&ln_lam * &self.exps[k]).exp(),
            };
            if !c.is_zero() {
                let t = c * &lam_pow * &self.inv_gamma[k];
                if !t.is_finite() {
                    return Err(Error::Overflow { n: k, p: 0 });
                }
                total += &t;
            }
            out.push(&total * &pre);
        }
        Ok(out)
    }

    pub fn eval(&self, coeffs: &[BigReal], lambda: &BigReal) -> Result<BigReal> {
        Ok(self
            .partial_sums(coeffs, lambda)?
            .pop()
            .unwrap_or_else(|| BigReal::zero(lambda.prec())))
    }
}

/// Re-expansion of f(s + s0) in inverse powers of s, truncated at order N.
pub fn shift_series(series: &AsymptoticSeries, s0: &BigReal, n: usize) -> Result<AsymptoticSeries> {
    series.need(n)?;
    let prec = series.prec();
    let s0 = s0.with_prec(prec);
    let mut s0pow = vec![BigReal::one(prec)];
    for i in 1..=n {
        let v = &s0pow[i - 1] * &s0;
        s0pow.push(v);
    }
    let mut out = vec![series.coeffs[0].clone()];
    for k in 1..=n {
        let mut acc = BigReal::zero(prec);
        for j in 1..=k {
            let c = &series.coeffs[j];
            if c.is_zero() {
                continue;
            }
            let b = Integer::from(Integer::binomial_u(k as u32 - 1, (k - j) as u32));
            let mut t = c * &s0pow[k - j] * BigReal::from_float(rug::Float::with_val(prec, b));
            if (k - j) % 2 == 1 {
                t = -t;
            }
            acc += &t;
        }
        out.push(acc);
    }
    Ok(AsymptoticSeries::new(out, series.kind, format!("{} shifted", series.source)))
}

/// c~_0 + sum_{n=1}^{N} c~_n lambda^{alpha n} / Gamma(alpha n + 1) for an already shifted series.
#[derive(Clone, Debug)]
pub struct ShiftedKernel {
    coeffs: Vec<BigReal>,
    kernel: PowerKernel,
}

impl ShiftedKernel {
    pub fn new(shifted: &AsymptoticSeries, alpha: &BigReal, n: usize) -> Result<Self> {
        shifted.need(n)?;
        let prec = shifted.prec();
        let kernel = PowerKernel::linear(&alpha.with_prec(prec), 0, 1, n + 1, BigReal::zero(prec))?;
        Ok(Self { coeffs: shifted.coeffs[..=n].to_vec(), kernel })
    }

    pub fn eval(&self, lambda: &BigReal) -> Result<(BigReal, BigReal)> {
        let mut s = self.kernel.partial_sums(&self.coeffs, lambda)?;
        let last = s.pop().expect("order >= 1");
        let prev = s.pop().unwrap_or_else(|| BigReal::zero(last.prec()));
        Ok((last, prev))
    }

    pub fn top_signs(&self) -> (i32, i32) {
        let n = self.coeffs.len() - 1;
        (self.coeffs[n].signum(), if n >= 1 { self.coeffs[n - 1].signum() } else { 0 })
    }
}

pub fn shifted_l_n(shifted: &AsymptoticSeries, alpha: &BigReal, lambda: &BigReal, n: usize) -> Result<BigReal> {
    Ok(ShiftedKernel::new(shifted, alpha, n)?.eval(lambda)?.0)
}

/// lambda^{-3 alpha} sum_{n=1}^{N} a_n lambda^{2 n alpha} / Gamma(2 n alpha + 1).
pub fn t_n(w: &AsymptoticSeries, alpha: &BigReal, lambda: &BigReal, n: usize) -> Result<BigReal> {
    w.need(n - 1)?;
    let prec = w.prec();
    let a = alpha.with_prec(prec);
    let k = PowerKernel::linear(&a, 2, 2, n, -(&a * 3i64))?;
    k.eval(&w.coeffs[..n], lambda)
}

/// sum_{n=0}^{N} c_n lambda^{alpha n} / Gamma(alpha n + 1).
pub fn u_n(prefactor: &AsymptoticSeries, alpha: &BigReal, lambda: &BigReal, n: usize) -> Result<BigReal> {
    prefactor.need(n)?;
    let prec = prefactor.prec();
    let k = PowerKernel::linear(&alpha.with_prec(prec), 0, 1, n + 1, BigReal::zero(prec))?;
    k.eval(&prefactor.coeffs[..=n], lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resum::VariableKind;

    const PREC: u32 = 320;

    fn b(x: f64) -> BigReal {
        BigReal::from_f64(x, PREC)
    }

    fn rel(a: &BigReal, b: &BigReal) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    #[test]
    fn constant_function() {
        let s = AsymptoticSeries::from_f64(&[3.0, 0.0, 0.0], PREC);
        let v = l_n(&s, &b(2.0), &b(1.0), &b(5.0), 2, 80).unwrap();
        assert!(rel(&v, &b(3.0)) < 1e-30);
    }

    #[test]
    fn inverse_s() {
        let s = AsymptoticSeries::from_f64(&[0.0, 1.0], PREC);
        let v = l_n(&s, &b(2.0), &b(1.0), &b(10.0), 1, 60).unwrap();
        assert!(rel(&v, &b(0.5)) < 1e-6);
    }

    #[test]
    fn kernel_identity_p0() {
        let s = AsymptoticSeries::from_f64(&[0.0, 0.0, 0.0, 1.75], PREC);
        let (s0, lam) = (b(1.3), b(2.2));
        let v = l_n(&s, &s0, &b(1.0), &lam, 3, 0).unwrap();
        let want = b(1.75) * (-(&lam * &s0)).exp() * lam.powi(3) / 6i64;
        assert!(rel(&v, &want) < 1e-90);
    }

    #[test]
    fn shift_of_inverse_s() {
        let s = AsymptoticSeries::from_f64(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], PREC);
        let t = shift_series(&s, &b(1.0), 5).unwrap();
        assert!(t.coeffs[0].is_zero());
        for n in 1..=5 {
            let want = if n % 2 == 1 { 1.0 } else { -1.0 };
            assert_eq!(t.coeffs[n].to_f64(), want);
        }
        let s2 = AsymptoticSeries::from_f64(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0], PREC);
        let t2 = shift_series(&s2, &b(1.0), 5).unwrap();
        for n in 2..=5 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(t2.coeffs[n].to_f64(), sign * (n as f64 - 1.0));
        }
    }

    #[test]
    fn shift_by_zero_is_identity() {
        let s = AsymptoticSeries::from_f64(&[1.0, -2.0, 3.5, 0.25], PREC);
        let t = shift_series(&s, &b(0.0), 3).unwrap();
        assert_eq!(s.coeffs, t.coeffs);
    }

    #[test]
    fn shifted_inverse_s() {
        // the single sum is the Taylor series of (1 - e^{-2 lambda}) / 2, so N must exceed ~2e*lambda
        for (lam, n) in [(8.0, 80), (10.0, 100)] {
            let mut c = vec![0.0; n + 1];
            c[1] = 1.0;
            let s = AsymptoticSeries::from_f64(&c, PREC);
            let t = shift_series(&s, &b(2.0), n).unwrap();
            let v = shifted_l_n(&t, &b(1.0), &b(lam), n).unwrap();
            assert!(rel(&v, &b(0.5)) < 1e-6, "lambda={lam}: {v}");
        }
    }

    #[test]
    fn u_n_identities() {
        let one = AsymptoticSeries::from_f64(&[1.0, 0.0, 0.0], PREC);
        assert_eq!(u_n(&one, &b(1.3), &b(4.0), 2).unwrap().to_f64(), 1.0);
        let x = AsymptoticSeries::from_f64(&[0.0, 1.0], PREC);
        assert!(rel(&u_n(&x, &b(1.0), &b(4.0), 1).unwrap(), &b(4.0)) < 1e-90);
    }

    #[test]
    fn harmonic_t_decays() {
        let w = AsymptoticSeries::new(vec![b(-0.5)], VariableKind::WEvenPowers, "harmonic");
        let t1 = t_n(&w, &b(1.0), &b(10.0), 1).unwrap().abs();
        let t2 = t_n(&w, &b(1.0), &b(100.0), 1).unwrap().abs();
        assert!(t2 < t1 && t2 < 1e-2);
    }
}
