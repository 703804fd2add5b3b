use serde::{Deserialize, Serialize};

use super::oscillation::linear_fit;
use super::pole::inverse_s_form;
use crate::error::{Error, Result};
use crate::par;
use crate::real::{BigReal, DEFAULT_PRECISION};
use crate::resum::{AsymptoticSeries, BorelKernel, LambdaGrid};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RealZeroConfig {
    pub n: usize,
    pub p: usize,
    pub precision_bits: u32,
    /// Largest s0 of the downward scan.
    pub s_start: f64,
    /// Smallest s0 of the downward scan.
    pub s_min: f64,
    pub scan_points: usize,
    pub lambda_grid: LambdaGrid,
    /// lambda s0 is kept below reach * P so the exponential re-expansion stays converged.
    pub reach: f64,
    /// Allowed |L_N - L_{N-1}| / |L_N|.
    pub sigma: f64,
    /// Allowed change of L between 0.7 lambda_M and lambda_M, relative to max(1, |L|).
    pub plateau_tol: f64,
    /// Breakdown point is bisected to this absolute width.
    pub s_tol: f64,
    /// The linear fit uses s0 in [s_b, s_b (1 + window_fraction)] above the breakdown point s_b.
    pub window_fraction: f64,
    pub window_points: usize,
    /// Largest allowed rms residual of the linear fit, relative to the largest |Psi| in the window.
    pub max_residual: f64,
}

impl Default for RealZeroConfig {
    fn default() -> Self {
        Self {
            n: 60,
            p: 160,
            precision_bits: DEFAULT_PRECISION,
            s_start: 2.0,
            s_min: 0.1,
            scan_points: 40,
            lambda_grid: LambdaGrid { min: 0.5, max: 200.0, points: 60 },
            reach: 0.5,
            sigma: 1e-5,
            plateau_tol: 1e-4,
            s_tol: 1e-3,
            window_fraction: 0.2,
            window_points: 8,
            max_residual: 0.05,
        }
    }
}

impl RealZeroConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n >= 2
            && self.s_start > self.s_min
            && self.s_min > 0.0
            && self.scan_points >= 2
            && self.window_points >= 3
            && self.sigma > 0.0
            && self.plateau_tol > 0.0
            && self.window_fraction > 0.0
            && self.max_residual > 0.0
            && self.reach > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("inconsistent real-zero configuration".into()))
        }
    }
}

/// W(s0) when the double sum settles at alpha = 1, `None` once extraction breaks down.
fn converged_value(series: &AsymptoticSeries, s0: f64, cfg: &RealZeroConfig) -> Option<f64> {
    let top = cfg.lambda_grid.max.min(cfg.reach * cfg.p as f64 / s0);
    let grid = LambdaGrid { max: top, min: cfg.lambda_grid.min.min(top / 10.0), ..cfg.lambda_grid }.values(cfg.precision_bits);
    let s0 = BigReal::from_f64(s0, cfg.precision_bits);
    let one = BigReal::one(cfg.precision_bits);
    let k = BorelKernel::new(series, &s0, &one, cfg.n, cfg.p).ok()?;
    let mut vals: Vec<f64> = Vec::new();
    for l in &grid {
        let (a, b) = k.eval(l).ok()?;
        let diff = (&a - &b).abs().to_f64();
        let a = a.to_f64();
        if !a.is_finite() || diff > cfg.sigma * a.abs() {
            break;
        }
        vals.push(a);
    }
    let m = vals.len();
    if m < 5 {
        return None;
    }
    let top = grid[m - 1].to_f64();
    let j = grid[..m].iter().rposition(|l| l.to_f64() <= 0.7 * top)?;
    let v = vals[m - 1];
    ((v - vals[j]).abs() <= cfg.plateau_tol * v.abs().max(1.0)).then_some(v)
}

/// Real-axis zero of Psi = e^W from where the resummation of W stops converging.
///
/// Returns `None` when W resums down to `s_min`, or when the extrapolated Psi does not vanish at positive s.
pub fn locate_zero_real(w: &AsymptoticSeries, cfg: &RealZeroConfig) -> Result<Option<BigReal>> {
    cfg.validate()?;
    let series = inverse_s_form(w);
    series.need(cfg.n)?;
    let series = AsymptoticSeries::new(
        series.coeffs.iter().map(|c| c.with_prec(cfg.precision_bits)).collect(),
        series.kind,
        series.source.clone(),
    );
    let ratio = (cfg.s_min / cfg.s_start).powf(1.0 / (cfg.scan_points - 1) as f64);
    let scan: Vec<f64> = (0..cfg.scan_points).map(|i| cfg.s_start * ratio.powi(i as i32)).collect();
    let vals = par::map(&scan, |&s| converged_value(&series, s, cfg));
    let Some(fail) = vals.iter().position(Option::is_none) else {
        return Ok(None);
    };
    if fail == 0 {
        return Err(Error::InvalidArgument(format!("no convergence even at s0 = {}", cfg.s_start)));
    }
    let (mut lo, mut hi) = (scan[fail], scan[fail - 1]);
    while hi - lo > cfg.s_tol {
        let mid = 0.5 * (lo + hi);
        if converged_value(&series, mid, cfg).is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s_b = hi;
    let xs: Vec<f64> = (0..cfg.window_points)
        .map(|i| s_b * (1.0 + cfg.window_fraction * i as f64 / (cfg.window_points - 1) as f64))
        .collect();
    let ws = par::map(&xs, |&s| converged_value(&series, s, cfg));
    let (x, psi): (Vec<f64>, Vec<f64>) = xs.iter().zip(ws).filter_map(|(s, w)| w.map(|w| (*s, w.exp()))).unzip();
    if x.len() < 3 {
        return Err(Error::ExtrapolationUnstable { residual: f64::INFINITY });
    }
    let (slope, icpt) = linear_fit(&x, &psi);
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rms = (x.iter().zip(&psi).map(|(s, p)| (p - slope * s - icpt).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    let residual = rms / scale;
    if !(residual <= cfg.max_residual) {
        return Err(Error::ExtrapolationUnstable { residual });
    }
    let root = -icpt / slope;
    if !(slope > 0.0) || !(root > 0.0) {
        return Ok(None);
    }
    Ok(Some(BigReal::from_f64(root, cfg.precision_bits)))
}

