use serde::{Deserialize, Serialize};

use super::curve::{CurveSample, LambdaCurve};
use super::kernel::{shift_series, BorelKernel, ShiftedKernel};
use super::{AsymptoticSeries, ResumConfig};
use crate::error::{Error, Result};
use crate::par;
use crate::real::BigReal;

/// Anything that yields (L_N, L_{N-1}) at a given lambda for a fixed alpha.
pub trait CurveEval: Sync {
    fn eval(&self, lambda: &BigReal) -> Result<(BigReal, BigReal)>;
    /// Signs of the two highest coefficients (c_N, c_{N-1}).
    fn top_signs(&self) -> (i32, i32);
    fn alpha(&self) -> f64;
    /// Relative weight lost to kernel truncation at lambda; steps below it are not resolved.
    fn resolution(&self, _lambda: &BigReal) -> f64 {
        0.0
    }
}

struct Borel {
    k: BorelKernel,
    alpha: f64,
    tail_max: f64,
    tail_floor: bool,
}

/// 1 - e^{-x} sum_{p<=P} x^p / p!: weight the P-truncated re-expansion drops.
pub fn truncation_tail(x: f64, p: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let lx = x.ln();
    let mut log_term = -x;
    let mut kept = log_term.exp();
    for j in 1..=p {
        log_term += lx - (j as f64).ln();
        kept += log_term.exp();
    }
    (1.0 - kept).max(0.0)
}

impl CurveEval for Borel {
    fn eval(&self, lambda: &BigReal) -> Result<(BigReal, BigReal)> {
        let x = (lambda * self.k.root()).to_f64();
        if truncation_tail(x, self.k.p()) > self.tail_max {
            return Err(Error::TruncationExceeded { x, p: self.k.p() });
        }
        self.k.eval(lambda)
    }
    fn top_signs(&self) -> (i32, i32) {
        self.k.top_signs()
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
    fn resolution(&self, lambda: &BigReal) -> f64 {
        if !self.tail_floor {
            return 0.0;
        }
        truncation_tail((lambda * self.k.root()).to_f64(), self.k.p())
    }
}

struct Shifted {
    k: ShiftedKernel,
    alpha: f64,
}

impl CurveEval for Shifted {
    fn eval(&self, lambda: &BigReal) -> Result<(BigReal, BigReal)> {
        self.k.eval(lambda)
    }
    fn top_signs(&self) -> (i32, i32) {
        self.k.top_signs()
    }
    fn alpha(&self) -> f64 {
        self.alpha
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaSelection {
    pub lambda_m: BigReal,
    pub l_n: BigReal,
    pub l_n_minus_1: BigReal,
    /// Every grid point passed; lambda_M is the top of the grid.
    pub hit_top: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResumResult {
    pub value: BigReal,
    pub alpha_used: BigReal,
    pub lambda_used: BigReal,
    pub curve: LambdaCurve,
    pub warnings: Vec<String>,
}

pub const WARN_NO_FLAT: &str = "no flat region before divergence";

fn passes(l: &BigReal, lp: &BigReal, sigma: f64) -> bool {
    if lp.is_zero() || !lp.is_finite() {
        return false;
    }
    ((l - lp) / lp).abs() <= sigma
}

/// lambda_M: the first sigma-rule failure on the grid, bracketed and bisected.
pub fn select_lambda_max_with(
    k: &dyn CurveEval,
    grid: &[BigReal],
    sigma_fraction: f64,
    rel_tol: f64,
) -> Result<LambdaSelection> {
    let check = |l: &BigReal| -> Option<(BigReal, BigReal)> {
        match k.eval(l) {
            Ok((a, b)) if passes(&a, &b, sigma_fraction) => Some((a, b)),
            _ => None,
        }
    };
    let Some(first) = check(&grid[0]) else {
        return Err(Error::NoPassingLambda { alpha: k.alpha() });
    };
    let mut best = (grid[0].clone(), first.0, first.1);
    let mut fail: Option<BigReal> = None;
    let batch = par::batch_size();
    let mut i = 1;
    'scan: while i < grid.len() {
        let chunk = &grid[i..(i + batch).min(grid.len())];
        let res = par::map(chunk, |l| check(l));
        for (l, r) in chunk.iter().zip(res) {
            match r {
                Some((a, b)) => best = (l.clone(), a, b),
                None => {
                    fail = Some(l.clone());
                    break 'scan;
                }
            }
        }
        i += batch;
    }
    let Some(mut hi) = fail else {
        return Ok(LambdaSelection { lambda_m: best.0, l_n: best.1, l_n_minus_1: best.2, hit_top: true });
    };
    while ((&hi - &best.0) / &best.0).to_f64() > rel_tol {
        let mid = (&best.0 + &hi) / 2i64;
        match check(&mid) {
            Some((a, b)) => best = (mid, a, b),
            None => hi = mid,
        }
    }
    Ok(LambdaSelection { lambda_m: best.0, l_n: best.1, l_n_minus_1: best.2, hit_top: false })
}

/// True when the values are monotone, or turn over exactly once and end moving in direction `dir`.
pub fn terminal_turnover_ok(values: &[BigReal], dir: i32) -> bool {
    turnover_ok(values, &vec![0.0; values.len()], dir)
}

/// As `terminal_turnover_ok`, ignoring steps below `resolution[i] * |values[i]|`.
fn turnover_ok(values: &[BigReal], resolution: &[f64], dir: i32) -> bool {
    let Some(first) = values.first() else { return true };
    let noise = 2f64.powi(48 - first.prec() as i32);
    let mut changes = 0;
    let mut last = 0;
    for (i, w) in values.windows(2).enumerate() {
        let d = &w[1] - &w[0];
        let floor = w[0].abs() * noise.max(resolution[i].max(resolution[i + 1]));
        if d.abs() <= floor {
            continue;
        }
        let s = d.signum();
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes == 0 || (changes == 1 && dir != 0 && last == dir)
}

fn mono_samples(k: &dyn CurveEval, lambda_m: &BigReal, count: usize) -> Result<Vec<CurveSample>> {
    let lams: Vec<BigReal> = (1..=count).map(|i| lambda_m * i as i64 / count as i64).collect();
    par::try_map(&lams, |l| {
        let (a, b) = k.eval(l)?;
        Ok(CurveSample { lambda: l.clone(), l_n: a, l_n_minus_1: b })
    })
}

fn monotone(k: &dyn CurveEval, samples: &[CurveSample]) -> bool {
    let (sn, sp) = k.top_signs();
    let ln: Vec<BigReal> = samples.iter().map(|s| s.l_n.clone()).collect();
    let lp: Vec<BigReal> = samples.iter().map(|s| s.l_n_minus_1.clone()).collect();
    let res: Vec<f64> = samples.iter().map(|s| k.resolution(&s.lambda)).collect();
    turnover_ok(&ln, &res, sn) && turnover_ok(&lp, &res, sp)
}

struct Probe {
    sel: LambdaSelection,
    samples: Vec<CurveSample>,
}

fn probe<K: CurveEval>(
    make: &(dyn Fn(f64) -> Result<K> + Sync),
    alpha: f64,
    cfg: &ResumConfig,
    grid: &[BigReal],
    density: usize,
) -> Result<Option<Probe>> {
    let k = make(alpha)?;
    let sel = match select_lambda_max_with(&k, grid, cfg.sigma_fraction(), cfg.lambda_rel_tol) {
        Ok(s) => s,
        Err(Error::NoPassingLambda { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let samples = mono_samples(&k, &sel.lambda_m, density)?;
    Ok(monotone(&k, &samples).then_some(Probe { sel, samples }))
}

/// alpha_M for an arbitrary kernel family; returns (alpha_M, selection, curve samples, warnings).
pub fn select_alpha_max_with<K: CurveEval>(
    make: &(dyn Fn(f64) -> Result<K> + Sync),
    cfg: &ResumConfig,
) -> Result<(f64, LambdaSelection, Vec<CurveSample>, Vec<String>)> {
    cfg.validate()?;
    let grid = cfg.lambda_grid.values(cfg.precision_bits);
    let alphas = cfg.alpha_grid.values();
    let mut warnings = Vec::new();
    // largest valid grid alpha, scanning down in parallel batches
    let mut found: Option<(usize, Probe)> = None;
    let batch = par::batch_size();
    let mut end = alphas.len();
    while end > 0 && found.is_none() {
        let start = end.saturating_sub(batch);
        let probes = par::try_map(&alphas[start..end], |&a| probe(make, a, cfg, &grid, cfg.mono_samples))?;
        for (j, p) in probes.into_iter().enumerate().rev() {
            if let Some(p) = p {
                found = Some((start + j, p));
                break;
            }
        }
        end = start;
    }
    let (idx, first) = found.ok_or(Error::NoMonotonicAlpha { alpha: alphas[0] })?;
    if idx + 1 == alphas.len() {
        return Ok((alphas[idx], first.sel, first.samples, warnings));
    }
    let bad = idx + 1;
    let (mut lo, mut hi) = (alphas[bad - 1], alphas[bad]);
    let mut best = first;
    while hi - lo > cfg.alpha_tol {
        let mid = 0.5 * (lo + hi);
        match probe(make, mid, cfg, &grid, cfg.mono_samples)? {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
    }
    if cfg.density_check {
        let dense = 2 * cfg.mono_samples;
        let lo_ok = probe(make, lo, cfg, &grid, dense)?.is_some();
        let hi_ok = probe(make, hi, cfg, &grid, dense)?.is_some();
        if !lo_ok || hi_ok {
            warnings.push(format!(
                "alpha_M moves by more than {} when the monotonicity sampling density doubles",
                cfg.alpha_tol
            ));
        }
    }
    Ok((lo, best.sel, best.samples, warnings))
}

fn finish(alpha: f64, sel: LambdaSelection, samples: Vec<CurveSample>, mut warnings: Vec<String>, cfg: &ResumConfig) -> ResumResult {
    let prec = cfg.precision_bits;
    let curve = LambdaCurve::new(samples).classified(cfg.flat_tol);
    if !has_flat_top(&curve, cfg.flat_tol) {
        warnings.push(WARN_NO_FLAT.to_string());
    }
    if sel.hit_top {
        warnings.push("lambda_M reached the top of the lambda grid".to_string());
    }
    ResumResult {
        value: sel.l_n,
        alpha_used: BigReal::from_f64(alpha, prec),
        lambda_used: sel.lambda_m,
        curve,
        warnings,
    }
}

/// Relative variation of L_N over the upper half of (0, lambda_M] within `flat_tol`.
fn has_flat_top(curve: &LambdaCurve, flat_tol: f64) -> bool {
    let n = curve.samples.len();
    if n < 2 {
        return false;
    }
    let top: Vec<f64> = curve.samples[n / 2..].iter().map(|s| s.l_n.to_f64()).collect();
    let (lo, hi) = top.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    let scale = lo.abs().max(hi.abs());
    scale == 0.0 || (hi - lo) <= flat_tol * scale
}

/// Full selection and evaluation for an arbitrary kernel family.
pub fn resum_with<K: CurveEval>(make: &(dyn Fn(f64) -> Result<K> + Sync), cfg: &ResumConfig) -> Result<ResumResult> {
    cfg.validate()?;
    match cfg.alpha {
        Some(a) => {
            let grid = cfg.lambda_grid.values(cfg.precision_bits);
            let k = make(a)?;
            let sel = select_lambda_max_with(&k, &grid, cfg.sigma_fraction(), cfg.lambda_rel_tol)?;
            let samples = mono_samples(&k, &sel.lambda_m, cfg.mono_samples)?;
            let mut warnings = Vec::new();
            if !monotone(&k, &samples) {
                warnings.push("curve is not monotonic below lambda_M at the fixed alpha".to_string());
            }
            Ok(finish(a, sel, samples, warnings, cfg))
        }
        None => {
            let (a, sel, samples, warnings) = select_alpha_max_with(make, cfg)?;
            Ok(finish(a, sel, samples, warnings, cfg))
        }
    }
}

fn borel_family<'a>(
    series: &'a AsymptoticSeries,
    s0: &'a BigReal,
    cfg: &'a ResumConfig,
) -> impl Fn(f64) -> Result<Borel> + Sync + 'a {
    move |a| {
        let alpha = BigReal::from_f64(a, cfg.precision_bits);
        Ok(Borel { k: BorelKernel::new(series, s0, &alpha, cfg.n, cfg.p)?, alpha: a, tail_max: cfg.sigma_fraction(), tail_floor: cfg.truncation_floor })
    }
}

/// Resums `series` at s0 with the double-sum kernel.
pub fn resum(series: &AsymptoticSeries, s0: &BigReal, cfg: &ResumConfig) -> Result<ResumResult> {
    resum_with(&borel_family(series, s0, cfg), cfg)
}

/// Resums `series` at s0 through the shifted single-sum kernel.
pub fn resum_shifted(series: &AsymptoticSeries, s0: &BigReal, cfg: &ResumConfig) -> Result<ResumResult> {
    let shifted = shift_series(series, s0, cfg.n)?;
    let make = |a: f64| -> Result<Shifted> {
        let alpha = BigReal::from_f64(a, cfg.precision_bits);
        Ok(Shifted { k: ShiftedKernel::new(&shifted, &alpha, cfg.n)?, alpha: a })
    };
    resum_with(&make, cfg)
}

/// lambda_M for the double-sum kernel at a fixed alpha.
pub fn select_lambda_max(
    series: &AsymptoticSeries,
    s0: &BigReal,
    alpha: &BigReal,
    cfg: &ResumConfig,
) -> Result<BigReal> {
    let k = Borel { k: BorelKernel::new(series, s0, alpha, cfg.n, cfg.p)?, alpha: alpha.to_f64(), tail_max: cfg.sigma_fraction(), tail_floor: cfg.truncation_floor };
    let grid = cfg.lambda_grid.values(cfg.precision_bits);
    Ok(select_lambda_max_with(&k, &grid, cfg.sigma_fraction(), cfg.lambda_rel_tol)?.lambda_m)
}

/// (alpha_M, lambda_M) for the double-sum kernel.
pub fn select_alpha_max(series: &AsymptoticSeries, s0: &BigReal, cfg: &ResumConfig) -> Result<(BigReal, BigReal)> {
    let (a, sel, _, _) = select_alpha_max_with(&borel_family(series, s0, cfg), cfg)?;
    Ok((BigReal::from_f64(a, cfg.precision_bits), sel.lambda_m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vec<BigReal> {
        x.iter().map(|&a| BigReal::from_f64(a, 320)).collect()
    }

    #[test]
    fn turnover_rule() {
        assert!(terminal_turnover_ok(&v(&[1.0, 2.0, 3.0]), 1));
        assert!(terminal_turnover_ok(&v(&[1.0, 2.0, 1.5]), -1));
        assert!(!terminal_turnover_ok(&v(&[1.0, 2.0, 1.5]), 1));
        assert!(!terminal_turnover_ok(&v(&[1.0, 2.0, 1.5, 1.8]), 1));
        assert!(terminal_turnover_ok(&v(&[1.0, 1.0, 1.0]), 0));
    }

    #[test]
    fn constant_series_tops_out() {
        let s = AsymptoticSeries::from_f64(&[2.0, 0.0, 0.0], 320);
        let cfg = ResumConfig {
            n: 2,
            p: 30,
            alpha_grid: super::super::AlphaGrid { min: 0.5, max: 2.0, step: 0.5 },
            lambda_grid: super::super::LambdaGrid { min: 0.1, max: 5.0, points: 20 },
            mono_samples: 20,
            ..Default::default()
        };
        let s0 = BigReal::from_f64(1.0, 320);
        let (a, l) = select_alpha_max(&s, &s0, &cfg).unwrap();
        assert_eq!(a.to_f64(), 2.0);
        assert!((l.to_f64() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tighter_sigma_never_extends_lambda() {
        let s = AsymptoticSeries::from_f64(&[1.0, 0.5, -0.25, 0.4, -0.7, 1.5], 320);
        let s0 = BigReal::from_f64(3.0, 320);
        let alpha = BigReal::from_f64(1.5, 320);
        let mut prev = f64::INFINITY;
        for sigma in [1e-1, 1e-2, 1e-3, 1e-4] {
            let cfg = ResumConfig { n: 5, p: 40, sigma_percent: sigma, ..Default::default() };
            let l = select_lambda_max(&s, &s0, &alpha, &cfg).unwrap().to_f64();
            assert!(l <= prev);
            prev = l;
        }
    }
}
