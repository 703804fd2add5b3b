use serde::{Deserialize, Serialize};

use super::complex::BigComplex;
use super::oscillation::{fit_oscillation, OscillationFit};
use super::PoleConfig;
use crate::error::{Error, Result};
use crate::par;
use crate::real::BigReal;
use crate::resum::{shift_series, AsymptoticSeries, BorelKernel, ShiftedKernel, VariableKind};

/// Where the contour integral is centred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Double-sum kernel around s0.
    #[default]
    Direct,
    /// Single-sum kernel of the series re-expanded about s0; the evaluation point sits at the origin.
    Shifted,
}

/// A conjugate pole pair fitted from fixed-amplitude oscillations of L_N(lambda).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleEstimate {
    /// Real part of s_p^{1/alpha_T} (the kernel's evaluation point at fixed amplitude).
    pub x_p: BigReal,
    /// Imaginary part; the conjugate partner is implied.
    pub y_p: BigReal,
    pub amplitude_c: BigReal,
    pub phase_nu: BigReal,
    pub alpha_t: BigReal,
    pub residue_t: BigComplex,
    /// Residue in the alpha_M frame; equals `residue_t` until [`PoleEstimate::at_alpha`] is applied.
    pub residue_m: BigComplex,
    /// Pole position in the alpha_M frame.
    pub s_c: BigComplex,
    pub fit: OscillationFit,
}

impl PoleEstimate {
    fn from_fit(x_p: BigReal, alpha_t: BigReal, fit: OscillationFit) -> Self {
        let prec = x_p.prec();
        let y_p = BigReal::from_f64(fit.y, prec);
        let c = BigReal::from_f64(fit.c, prec);
        let nu = BigReal::from_f64(fit.nu, prec);
        // c cos(lambda y + nu) = 2 Re[rho e^{i lambda y} / (i y)]
        let half = BigComplex::new(BigReal::zero(prec), &y_p * &c / 2i64);
        let residue_t = &half * &BigComplex::from_polar(&BigReal::one(prec), &nu);
        let s_c = BigComplex::new(x_p.clone(), y_p.clone());
        Self {
            x_p,
            y_p,
            amplitude_c: c,
            phase_nu: nu,
            alpha_t,
            residue_m: residue_t.clone(),
            residue_t,
            s_c,
            fit,
        }
    }

    /// Position s_T = x_p + i y_p in the alpha_T frame.
    pub fn s_t(&self) -> BigComplex {
        BigComplex::new(self.x_p.clone(), self.y_p.clone())
    }

    /// Carries the pole to the alpha_M frame: s_c = s_T^{alpha_T/alpha_M},
    /// rho_M = rho_T (alpha_T/alpha_M) s_c / s_T.
    pub fn at_alpha(&self, alpha_m: &BigReal) -> Self {
        let ratio = &self.alpha_t / alpha_m;
        let s_t = self.s_t();
        let s_c = s_t.powf(&ratio);
        let residue_m = (&self.residue_t * &(&s_c / &s_t)).scale(&ratio);
        Self { s_c, residue_m, ..self.clone() }
    }

    /// 2 Re[rho_M e^{lambda (s_c - u0)} / (s_c - u0)], with u0 the evaluation point of the alpha_M frame.
    pub fn contribution(&self, u0: &BigReal, lambda: &BigReal) -> BigReal {
        let d = &self.s_c - &BigComplex::real(u0.clone());
        let e = BigComplex::new(&d.re * lambda, &d.im * lambda).exp();
        let t = &(&self.residue_m * &e) / &d;
        t.re * 2i64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub raw_value: BigReal,
    pub correction: BigReal,
    pub corrected_value: BigReal,
    /// The pole carried to alpha_M.
    pub pole: PoleEstimate,
}

/// The series as coefficients of s^{-n}.
pub(crate) fn inverse_s_form(w: &AsymptoticSeries) -> AsymptoticSeries {
    match w.kind {
        VariableKind::InverseS => w.clone(),
        VariableKind::WEvenPowers => {
            let prec = w.prec();
            let mut c = vec![BigReal::zero(prec); 2 * w.coeffs.len() + 1];
            for (k, a) in w.coeffs.iter().enumerate() {
                c[2 * (k + 1)] = a.clone();
            }
            AsymptoticSeries::new(c, VariableKind::InverseS, w.source.clone())
        }
    }
}

enum Kern {
    Direct(BorelKernel),
    Shifted(ShiftedKernel),
}

impl Kern {
    fn eval(&self, l: &BigReal) -> Result<(BigReal, BigReal)> {
        match self {
            Kern::Direct(k) => k.eval(l),
            Kern::Shifted(k) => k.eval(l),
        }
    }
}

/// A series prepared for repeated kernel construction at one evaluation point.
struct Prepared {
    series: AsymptoticSeries,
    s0: BigReal,
    frame: Frame,
}

impl Prepared {
    fn new(series: &AsymptoticSeries, s0: &BigReal, frame: Frame, cfg: &PoleConfig) -> Result<Self> {
        let prec = cfg.precision_bits;
        let series = inverse_s_form(&AsymptoticSeries::new(
            series.coeffs.iter().map(|c| c.with_prec(prec)).collect(),
            series.kind,
            series.source.clone(),
        ));
        let s0 = s0.with_prec(prec);
        let series = match frame {
            Frame::Direct => series,
            Frame::Shifted => shift_series(&series, &s0, cfg.n)?,
        };
        Ok(Self { series, s0, frame })
    }

    fn kernel(&self, alpha: &BigReal, cfg: &PoleConfig) -> Result<Kern> {
        Ok(match self.frame {
            Frame::Direct => Kern::Direct(BorelKernel::new(&self.series, &self.s0, alpha, cfg.n, cfg.p)?),
            Frame::Shifted => Kern::Shifted(ShiftedKernel::new(&self.series, alpha, cfg.n)?),
        })
    }

    /// Evaluation point in the alpha frame.
    fn origin(&self, alpha: &BigReal) -> BigReal {
        match self.frame {
            Frame::Direct => self.s0.pow(&alpha.recip()),
            Frame::Shifted => BigReal::zero(self.s0.prec()),
        }
    }

    /// L_N on the linear lambda grid, cut at the first point where L_N and L_{N-1} disagree.
    fn sample(&self, alpha: &BigReal, cfg: &PoleConfig) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.kernel(alpha, cfg)?;
        let prec = cfg.precision_bits;
        let grid: Vec<BigReal> = (0..cfg.samples)
            .map(|i| {
                let t = i as f64 / (cfg.samples - 1) as f64;
                BigReal::from_f64(cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * t, prec)
            })
            .collect();
        let vals = par::map(&grid, |l| k.eval(l).ok());
        let (mut x, mut y) = (Vec::new(), Vec::new());
        let mut scale = 0.0f64;
        for (l, v) in grid.iter().zip(vals) {
            let Some((a, b)) = v else { break };
            let (a, diff) = (a.to_f64(), (&a - &b).abs().to_f64());
            scale = scale.max(a.abs());
            if !a.is_finite() || diff > cfg.trust * scale {
                break;
            }
            x.push(l.to_f64());
            y.push(a);
        }
        Ok((x, y))
    }

    fn fit(&self, alpha: &BigReal, cfg: &PoleConfig) -> Result<OscillationFit> {
        let (x, y) = self.sample(alpha, cfg)?;
        if x.len() < 8 {
            return Err(Error::InsufficientExtrema { found: 0, needed: cfg.min_extrema });
        }
        fit_oscillation(&x, &y, cfg.min_extrema)
    }
}

/// Finds the sign change of `delta` over a monotone parameter by outward stepping, then bisects.
fn bisect_delta(
    start: f64,
    step0: f64,
    lower: f64,
    tol: f64,
    decreasing: bool,
    mut delta: impl FnMut(f64) -> Result<f64>,
) -> Result<f64> {
    let d0 = delta(start)?;
    // move toward the side where delta changes sign
    let up = (d0 > 0.0) == decreasing;
    let (mut a, mut step) = (start, step0);
    let mut b = start;
    let mut found = false;
    for _ in 0..40 {
        b = if up { a + step } else { (a - step).max(lower + 0.5 * (a - lower)) };
        let db = delta(b)?;
        if (db > 0.0) != (d0 > 0.0) {
            found = true;
            break;
        }
        a = b;
        step *= 1.5;
    }
    if !found {
        return Err(Error::BracketNotFound(format!("no fixed-amplitude point near {start}")));
    }
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let d_lo_pos = (delta(lo)? > 0.0) as i32;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if ((delta(mid)? > 0.0) as i32) == d_lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tunes s0 at alpha = 1 until the oscillations of L_N are fixed in amplitude; then x_p = s0.
pub fn locate_zero_s_plane(w: &AsymptoticSeries, s0_guess: &BigReal, cfg: &PoleConfig) -> Result<PoleEstimate> {
    cfg.validate()?;
    let prec = cfg.precision_bits;
    let one = BigReal::one(prec);
    let guess = s0_guess.to_f64();
    if !(guess > 0.0) {
        return Err(Error::InvalidArgument("s0 guess must be positive".into()));
    }
    let fit_at = |s0: f64| -> Result<OscillationFit> {
        Prepared::new(w, &BigReal::from_f64(s0, prec), Frame::Direct, cfg)?.fit(&one, cfg)
    };
    let s0 = bisect_delta(guess, cfg.bracket_step * guess, 0.0, cfg.s0_tol, true, |s| Ok(fit_at(s)?.delta))?;
    let fit = fit_at(s0)?;
    Ok(PoleEstimate::from_fit(BigReal::from_f64(s0, prec), one, fit))
}

/// Tunes alpha until the oscillations of L_N at s0 are fixed in amplitude (alpha_T).
pub fn fit_pole(series: &AsymptoticSeries, s0: &BigReal, frame: Frame, cfg: &PoleConfig) -> Result<PoleEstimate> {
    cfg.validate()?;
    let prec = cfg.precision_bits;
    let prep = Prepared::new(series, s0, frame, cfg)?;
    let alphas: Vec<f64> = (0..cfg.alpha_points)
        .map(|i| cfg.alpha_min + (cfg.alpha_max - cfg.alpha_min) * i as f64 / (cfg.alpha_points - 1) as f64)
        .collect();
    let fits = par::map(&alphas, |&a| prep.fit(&BigReal::from_f64(a, prec), cfg));
    let mut prev: Option<(f64, f64)> = None;
    let mut bracket = None;
    let mut first_err = None;
    for (&a, f) in alphas.iter().zip(fits) {
        match f {
            Ok(f) => {
                if let Some((pa, pd)) = prev {
                    if (pd > 0.0) != (f.delta > 0.0) {
                        bracket = Some((pa, a, pd > 0.0));
                        break;
                    }
                }
                prev = Some((a, f.delta));
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    let Some((mut lo, mut hi, lo_pos)) = bracket else {
        return Err(match (prev, first_err) {
            (None, Some(e)) => e,
            _ => Error::BracketNotFound("growth rate keeps one sign over the alpha scan".into()),
        });
    };
    while hi - lo > cfg.alpha_tol {
        let mid = 0.5 * (lo + hi);
        let d = prep.fit(&BigReal::from_f64(mid, prec), cfg)?.delta;
        if (d > 0.0) == lo_pos {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha_t = BigReal::from_f64(0.5 * (lo + hi), prec);
    let fit = prep.fit(&alpha_t, cfg)?;
    Ok(PoleEstimate::from_fit(prep.origin(&alpha_t), alpha_t, fit))
}

/// Subtracts the fitted pole pair from L_N(lambda) evaluated at alpha_M.
pub fn pole_correction(
    series: &AsymptoticSeries,
    s0: &BigReal,
    alpha_m: &BigReal,
    lambda: &BigReal,
    pole: &PoleEstimate,
    frame: Frame,
    cfg: &PoleConfig,
) -> Result<CorrectionResult> {
    let prec = cfg.precision_bits;
    let prep = Prepared::new(series, s0, frame, cfg)?;
    let alpha_m = alpha_m.with_prec(prec);
    let raw = prep.kernel(&alpha_m, cfg)?.eval(&lambda.with_prec(prec))?.0;
    let pole = pole.at_alpha(&alpha_m);
    let correction = pole.contribution(&prep.origin(&alpha_m), &lambda.with_prec(prec));
    let ratio = (&correction / &raw).abs().to_f64();
    if !(ratio <= cfg.max_correction) {
        return Err(Error::PoleDominates { ratio });
    }
    let corrected_value = &raw - &correction;
    Ok(CorrectionResult { raw_value: raw, correction, corrected_value, pole })
}
