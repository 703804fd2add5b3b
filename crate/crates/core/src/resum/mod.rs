//! Modified Borel resummation: the truncated contour integral L_N(lambda) and its relatives.
//!
//! A series f(s) = sum c_n s^{-n} is resummed at s0 by evaluating
//! L_N(lambda) = sum_{n<=N} sum_{p<=P} c_n e^{-lambda s0^{1/alpha}} s0^{p/alpha} lambda^{alpha n + p} / Gamma(alpha n + p + 1)
//! at a lambda chosen where successive truncations still agree.

mod curve;
mod kernel;
mod select;

use serde::{Deserialize, Serialize};

use crate::exact::ExactRational;
use crate::real::{BigReal, DEFAULT_PRECISION, MIN_PRECISION};
use crate::series::{ScalarSeries, WSeries};
use crate::error::{Error, Result};

pub use curve::{classify_curve, extrema, CurveClass, CurveSample, Extremum, LambdaCurve};
pub(crate) use curve::classify_xy;
pub use kernel::{l_n, shift_series, shifted_l_n, t_n, u_n, BorelKernel, PowerKernel, ShiftedKernel};
pub use select::{
    resum, resum_shifted, resum_with, select_alpha_max, select_alpha_max_with, select_lambda_max,
    select_lambda_max_with, terminal_turnover_ok, truncation_tail, CurveEval, LambdaSelection, ResumResult, WARN_NO_FLAT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariableKind {
    /// c_n multiplies s^{-n}.
    InverseS,
    /// a_n multiplies x^{2n} (n >= 1); `coeffs[0]` holds a_1.
    WEvenPowers,
}

/// Real coefficients ready for resummation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSeries {
    pub coeffs: Vec<BigReal>,
    pub kind: VariableKind,
    /// Free-form label of the exact series these came from.
    pub source: String,
}

impl AsymptoticSeries {
    pub fn new(coeffs: Vec<BigReal>, kind: VariableKind, source: impl Into<String>) -> Self {
        Self { coeffs, kind, source: source.into() }
    }

    pub fn from_exact(c: &[ExactRational], prec: u32, kind: VariableKind, source: impl Into<String>) -> Self {
        Self::new(c.iter().map(|x| x.to_big_real(prec)).collect(), kind, source)
    }

    pub fn from_scalar(s: &ScalarSeries, prec: u32, source: impl Into<String>) -> Self {
        Self::from_exact(&s.coeffs, prec, VariableKind::InverseS, source)
    }

    pub fn from_w(w: &WSeries, prec: u32, source: impl Into<String>) -> Self {
        Self::from_exact(&w.coeffs, prec, VariableKind::WEvenPowers, source)
    }

    pub fn from_f64(c: &[f64], prec: u32) -> Self {
        Self::new(c.iter().map(|&x| BigReal::from_f64(x, prec)).collect(), VariableKind::InverseS, "literal")
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.first().map(|c| c.prec()).unwrap_or(DEFAULT_PRECISION)
    }

    /// Multiplies c_n by r^n (a rescaling s -> s/r of the expansion variable).
    pub fn scaled(&self, r: &BigReal) -> Self {
        let mut f = BigReal::one(self.prec());
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * &f;
                f *= r;
                v
            })
            .collect();
        Self { coeffs, kind: self.kind, source: format!("{} (scaled)", self.source) }
    }

    pub(crate) fn need(&self, n: usize) -> Result<()> {
        if n >= self.coeffs.len() {
            Err(Error::SeriesTooShort { available: self.coeffs.len(), requested: n })
        } else {
            Ok(())
        }
    }
}

/// Geometric lambda grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { min: 0.1, max: 100.0, points: 400 }
    }
}

impl LambdaGrid {
    pub fn values(&self, prec: u32) -> Vec<BigReal> {
        let lo = BigReal::from_f64(self.min, prec);
        if self.points < 2 {
            return vec![lo];
        }
        let ratio = BigReal::from_f64(self.max / self.min, prec).ln() / (self.points as i64 - 1);
        (0..self.points)
            .map(|i| &lo * (&ratio * i as i64).exp())
            .collect()
    }
}

/// Uniform alpha grid scanned before bisection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self { min: 0.05, max: 4.0, step: 0.05 }
    }
}

impl AlphaGrid {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.min + self.step * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResumConfig {
    /// Highest coefficient index used (c_0..c_N).
    pub n: usize,
    /// Truncation of the exponential re-expansion.
    pub p: usize,
    /// Fixed alpha; `None` selects alpha_M automatically.
    pub alpha: Option<f64>,
    /// Allowed |L_N - L_{N-1}| / |L_{N-1}| in percent.
    pub sigma_percent: f64,
    pub lambda_grid: LambdaGrid,
    pub alpha_grid: AlphaGrid,
    pub precision_bits: u32,
    /// Final bracket width for alpha_M.
    pub alpha_tol: f64,
    /// Final relative bracket width for lambda_M.
    pub lambda_rel_tol: f64,
    /// Uniform samples on (0, lambda_M] used by the monotonicity rule.
    pub mono_samples: usize,
    pub flat_tol: f64,
    /// Re-run the monotonicity rule at doubled density around alpha_M and warn on disagreement.
    pub density_check: bool,
    /// Treat L_N steps smaller than the weight lost to the P truncation as flat in the
    /// monotonicity rule. Off by default; needed for s0^{1/alpha} large compared with P.
    pub truncation_floor: bool,
}

impl Default for ResumConfig {
    fn default() -> Self {
        Self {
            n: 30,
            p: 50,
            alpha: None,
            sigma_percent: 1e-3,
            lambda_grid: LambdaGrid::default(),
            alpha_grid: AlphaGrid::default(),
            precision_bits: DEFAULT_PRECISION,
            alpha_tol: 1e-4,
            lambda_rel_tol: 1e-8,
            mono_samples: 400,
            flat_tol: 1e-3,
            density_check: false,
            truncation_floor: false,
        }
    }
}

impl ResumConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.n < 2 {
            return bad("N must be >= 2");
        }
        if self.alpha.is_some_and(|a| !(a > 0.0)) {
            return bad("alpha must be > 0");
        }
        if !(self.sigma_percent > 0.0) {
            return bad("sigma must be > 0");
        }
        if self.precision_bits < MIN_PRECISION {
            return bad("precision_bits must be >= 128");
        }
        let g = &self.lambda_grid;
        if !(g.min > 0.0 && g.max > g.min && g.points >= 2) {
            return bad("lambda grid must be positive and increasing");
        }
        let a = &self.alpha_grid;
        if !(a.min > 0.0 && a.max >= a.min && a.step > 0.0) {
            return bad("alpha grid must be positive with a positive step");
        }
        if !(self.alpha_tol > 0.0 && self.lambda_rel_tol > 0.0 && self.flat_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.mono_samples < 8 {
            return bad("mono_samples must be >= 8");
        }
        Ok(())
    }

    pub fn sigma_fraction(&self) -> f64 {
        self.sigma_percent / 100.0
    }
}
