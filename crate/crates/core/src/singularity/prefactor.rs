use serde::{Deserialize, Serialize};

use super::pole::inverse_s_form;
use crate::error::{Error, Result};
use crate::par;
use crate::real::{BigReal, DEFAULT_PRECISION};
use crate::resum::{classify_xy, AsymptoticSeries, BorelKernel, CurveClass};

/// Resummation settings for evaluating a power series in x at s0 = 1/x (alpha = 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PrefactorConfig {
    /// Highest coefficient used; `None` takes every stored coefficient.
    pub n: Option<usize>,
    pub p: usize,
    pub precision_bits: u32,
    /// Allowed |L_N - L_{N-1}| / |L_N|.
    pub sigma: f64,
    pub lambda_max: f64,
    pub lambda_points: usize,
    /// lambda s0 is kept below reach * P so the exponential re-expansion stays converged.
    pub reach: f64,
}

impl Default for PrefactorConfig {
    fn default() -> Self {
        Self {
            n: None,
            p: 120,
            precision_bits: DEFAULT_PRECISION,
            sigma: 1e-5,
            lambda_max: 100.0,
            lambda_points: 60,
            reach: 0.3,
        }
    }
}

/// Sum c_n x^n resummed at x > 0: L_N at the last lambda before the sigma rule fails.
pub fn eval_power_series(series: &AsymptoticSeries, x: &BigReal, cfg: &PrefactorConfig) -> Result<BigReal> {
    if !(*x > 0.0) {
        return Err(Error::InvalidArgument("x must be positive".into()));
    }
    let prec = cfg.precision_bits;
    let series = inverse_s_form(series);
    let n = cfg.n.unwrap_or(series.len().saturating_sub(1));
    let s0 = x.with_prec(prec).recip();
    let k = BorelKernel::new(&series, &s0, &BigReal::one(prec), n, cfg.p)?;
    let cap = cfg.lambda_max.min(cfg.reach * cfg.p as f64 / s0.to_f64());
    let lo = cap / 1000.0;
    let ratio = BigReal::from_f64(1000f64, prec).ln() / (cfg.lambda_points as i64 - 1);
    let mut best = None;
    for i in 0..cfg.lambda_points {
        let l = BigReal::from_f64(lo, prec) * (&ratio * i as i64).exp();
        let (a, b) = k.eval(&l)?;
        let diff = (&a - &b).abs();
        if !a.is_finite() || diff > a.abs() * cfg.sigma {
            break;
        }
        best = Some(a);
    }
    best.ok_or(Error::NoPassingLambda { alpha: 1.0 })
}

/// (x, Q) with Q = log|P(x)| - (2/3) sqrt(g) x^3.
pub fn prefactor_q_check(
    prefactor: &AsymptoticSeries,
    g: &BigReal,
    x_samples: &[BigReal],
    cfg: &PrefactorConfig,
) -> Result<Vec<(BigReal, BigReal)>> {
    let k = g.with_prec(cfg.precision_bits).sqrt() * 2i64 / 3i64;
    let vals = par::try_map(x_samples, |x| eval_power_series(prefactor, x, cfg))?;
    Ok(x_samples
        .iter()
        .zip(vals)
        .map(|(x, p)| {
            let q = p.abs().ln() - &k * x.powi(3);
            (x.clone(), q)
        })
        .collect())
}

/// Shape of Q(x) over the samples (flat at large x, or still moving).
pub fn q_flattening(points: &[(BigReal, BigReal)], flat_tol: f64) -> Result<CurveClass> {
    if points.len() < 8 {
        return Err(Error::Indeterminate(format!("{} samples, need at least 8", points.len())));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.to_f64()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.to_f64()).collect();
    classify_xy(&x, &y, flat_tol)
}

fn parity(series: &AsymptoticSeries) -> Option<usize> {
    let vanishes = |r: usize| series.coeffs.iter().skip(r).step_by(2).all(BigReal::is_zero);
    match (vanishes(0), vanishes(1)) {
        (true, false) => Some(1),
        (false, true) => Some(0),
        _ => None,
    }
}

/// Sign changes of P on (a, b]; with a = 0 and definite parity the count covers the whole real axis.
pub fn count_nodes(
    prefactor: &AsymptoticSeries,
    domain: (&BigReal, &BigReal),
    samples: usize,
    cfg: &PrefactorConfig,
) -> Result<usize> {
    let (a, b) = (domain.0.to_f64(), domain.1.to_f64());
    if !(a >= 0.0 && b > a) || samples < 4 {
        return Err(Error::InvalidArgument("domain must satisfy 0 <= a < b with at least 4 samples".into()));
    }
    let xs: Vec<BigReal> = (1..=samples)
        .map(|i| BigReal::from_f64(a + (b - a) * i as f64 / samples as f64, cfg.precision_bits))
        .collect();
    let vals = par::try_map(&xs, |x| eval_power_series(prefactor, x, cfg))?;
    let signs: Vec<i32> = vals.iter().map(BigReal::signum).filter(|s| *s != 0).collect();
    let changes: Vec<usize> = signs.windows(2).enumerate().filter(|(_, w)| w[0] != w[1]).map(|(i, _)| i).collect();
    if changes.windows(2).any(|w| w[1] - w[0] < 2) {
        return Err(Error::SampleTooCoarse);
    }
    let half = changes.len();
    Ok(match (a == 0.0, parity(prefactor)) {
        (true, Some(1)) => 2 * half + 1,
        (true, Some(_)) => 2 * half,
        _ => half,
    })
}

/// Whole-axis node count of a tuned excited level's prefactor, sampled on (0, 3 / sqrt|a1|].
pub fn count_level_nodes(
    level: &crate::spectrum::ExcitedLevel,
    ground: &crate::spectrum::TuneOutcome,
    n_terms: usize,
    samples: usize,
    cfg: &PrefactorConfig,
) -> Result<usize> {
    let prec = cfg.precision_bits;
    let c = crate::spectrum::excited_prefactor(level, ground, n_terms, prec);
    let series = AsymptoticSeries::new(c, crate::resum::VariableKind::InverseS, "prefactor");
    let x_max = BigReal::from_int(3, prec) / ground.a1().with_prec(prec).abs().sqrt();
    count_nodes(&series, (&BigReal::zero(prec), &x_max), samples, cfg)
}
