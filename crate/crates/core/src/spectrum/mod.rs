//! Physical quantities from resummed series: energies, couplings, infinite-coupling limits, tuned eigenvalues.

mod tune;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::BigReal;
use crate::resum::{resum, resum_shifted, AsymptoticSeries, ResumConfig, ResumResult};
use crate::series::{bender_wu_expand, excited_expand, semiclassical_expand, ScalarSeries};

pub use tune::{
    departure_verdict, ground_curve, ground_energy_at, prefactor_coeffs, tune_excited, w_coeffs, excited_prefactor, growth_verdict, tune_ground, tune_ground_rho1, ExcitedLevel,
    GroundSample, Parity, TuneConfig, TuneOutcome, TuneState, Verdict,
};

/// Expansion variable used for the coupling series: t = COUPLING_SCALE / g.
pub const COUPLING_SCALE: i64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub rho: BigReal,
    pub g: BigReal,
    pub hbar: Option<BigReal>,
    /// x -> c x rescaling linking the computed normalization to (rho, g).
    pub scale_c: BigReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    BenderWu,
    Semiclassical,
    SemiclassicalShifted,
    Tuning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub e: BigReal,
    pub q: usize,
    pub method: Method,
    pub resum: Option<ResumResult>,
    pub error_estimate: Option<BigReal>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalPoint {
    pub hbar: BigReal,
    pub b2: BigReal,
    pub e: BigReal,
    pub g: BigReal,
    pub resum: ResumResult,
}

type SeriesCache = Mutex<HashMap<(u8, i64, usize), Arc<ScalarSeries>>>;

fn cached(kind: u8, q: i64, order: usize, build: impl FnOnce() -> Result<ScalarSeries>) -> Result<Arc<ScalarSeries>> {
    static C: OnceLock<SeriesCache> = OnceLock::new();
    let c = C.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(s) = c.lock().expect("series cache poisoned").get(&(kind, q, order)) {
        return Ok(Arc::clone(s));
    }
    let s = Arc::new(build()?);
    c.lock().expect("series cache poisoned").insert((kind, q, order), Arc::clone(&s));
    Ok(s)
}

/// E(g) coefficients through g^order.
pub fn energy_series(order: usize) -> Result<Arc<ScalarSeries>> {
    cached(0, 0, order, || Ok(bender_wu_expand(order.max(1) + 1, order.max(1))?.1.truncated(order)))
}

/// b_2(hbar) coefficients through hbar^order.
pub fn b2_series(order: usize) -> Result<Arc<ScalarSeries>> {
    cached(1, 0, order, || Ok(semiclassical_expand(3, order.max(1))?.1.truncated(order)))
}

/// b_3(hbar) coefficients of level q through hbar^order.
pub fn b3_series(q: usize, order: usize) -> Result<Arc<ScalarSeries>> {
    cached(2, q as i64, order, || Ok(excited_expand(q as i64, q, order)?.1))
}

fn positive(x: &BigReal, what: &str) -> Result<()> {
    if *x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be > 0, got {x}")))
    }
}

/// Ground-state energy at rho = 1 by resumming the coupling series.
///
/// The series is resummed in t = 2/g (coefficients E_n 2^n), which fixes the lambda scale of the
/// reported lambda_M; the resummed value itself does not depend on this choice.
pub fn bender_wu_energy(g: &BigReal, cfg: &ResumConfig) -> Result<SpectrumResult> {
    positive(g, "g")?;
    let prec = cfg.precision_bits;
    let e = energy_series(cfg.n)?;
    let scale = BigReal::from_int(COUPLING_SCALE, prec);
    let series = AsymptoticSeries::from_scalar(&e, prec, "E(g)").scaled(&scale);
    let s0 = &scale / g;
    let r = resum(&series, &s0, cfg)?;
    Ok(SpectrumResult { e: r.value.clone(), q: 0, method: Method::BenderWu, resum: Some(r), error_estimate: None })
}

/// E = 1/sqrt(1 - 3 hbar / 2).
pub fn semiclassical_energy(hbar: &BigReal) -> BigReal {
    (-(hbar * 1.5) + 1i64).sqrt().recip()
}

fn check_hbar(hbar: &BigReal) -> Result<()> {
    positive(hbar, "hbar")?;
    if *hbar >= BigReal::from_int(2, hbar.prec()) / 3i64 {
        return Err(Error::InvalidArgument(format!("hbar must be < 2/3, got {hbar}")));
    }
    Ok(())
}

/// Resummed b_2 at s0 = 1/hbar and the (E, g) point it maps to.
pub fn semiclassical_point(hbar: &BigReal, cfg: &ResumConfig, shifted: bool) -> Result<SemiclassicalPoint> {
    check_hbar(hbar)?;
    let prec = cfg.precision_bits;
    let hbar = hbar.with_prec(prec);
    let b2 = b2_series(cfg.n)?;
    let series = AsymptoticSeries::from_scalar(&b2, prec, "b2(hbar)");
    let s0 = hbar.recip();
    let r = if shifted { resum_shifted(&series, &s0, cfg)? } else { resum(&series, &s0, cfg)? };
    let e = semiclassical_energy(&hbar);
    let g = &hbar * &r.value * e.powi(3);
    Ok(SemiclassicalPoint { hbar, b2: r.value.clone(), e, g, resum: r })
}

/// g(hbar) = hbar b2 E^3 for an already resummed b2.
pub fn coupling_from_b2(hbar: &BigReal, b2: &BigReal) -> BigReal {
    hbar * b2 * semiclassical_energy(hbar).powi(3)
}

/// b_2(2/3) and E_inf = (3 / (2 b_2(2/3)))^{1/3}.
pub fn infinite_coupling_detail(cfg: &ResumConfig) -> Result<(BigReal, ResumResult)> {
    let prec = cfg.precision_bits;
    let b2 = b2_series(cfg.n)?;
    let series = AsymptoticSeries::from_scalar(&b2, prec, "b2(hbar)");
    let s0 = BigReal::from_int(3, prec) / 2i64;
    let r = resum(&series, &s0, cfg)?;
    let e_inf = (BigReal::from_int(3, prec) / (&r.value * 2i64)).cbrt();
    Ok((e_inf, r))
}

pub fn infinite_coupling(cfg: &ResumConfig) -> Result<BigReal> {
    Ok(infinite_coupling_detail(cfg)?.0)
}

/// b_3(2/3) of level q and E_{q,inf} = -(3/2) b_3(2/3) E_inf.
pub fn excited_infinite_detail(q: usize, cfg: &ResumConfig, e_inf: &BigReal) -> Result<(BigReal, BigReal, ResumResult)> {
    if q < 1 {
        return Err(Error::InvalidArgument("excited level q must be >= 1".into()));
    }
    let prec = cfg.precision_bits;
    let b3 = b3_series(q, cfg.n)?;
    let series = AsymptoticSeries::from_scalar(&b3, prec, format!("b3(hbar), q = {q}"));
    let s0 = BigReal::from_int(3, prec) / 2i64;
    let r = resum(&series, &s0, cfg)?;
    let e_q = -(&r.value * e_inf * 3i64 / 2i64);
    Ok((r.value.clone(), e_q, r))
}

pub fn excited_infinite(q: usize, cfg: &ResumConfig) -> Result<(BigReal, BigReal)> {
    let e_inf = infinite_coupling(cfg)?;
    let (b3, e, _) = excited_infinite_detail(q, cfg, &e_inf)?;
    Ok((b3, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_limit() {
        let h = BigReal::from_f64(1e-8, 128);
        let e = semiclassical_energy(&h);
        assert!((e.to_f64() - 1.0).abs() < 1e-7);
        let g = coupling_from_b2(&h, &BigReal::one(128));
        assert!((g.to_f64() / 1e-8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_hbar() {
        let cfg = ResumConfig::default();
        for h in [0.0, -0.1, 0.7] {
            assert!(semiclassical_point(&BigReal::from_f64(h, 320), &cfg, false).is_err());
        }
        assert!(bender_wu_energy(&BigReal::from_f64(-1.0, 320), &cfg).is_err());
    }
}
