//! Zeros and poles of resummed functions, excited-state prefactor checks, and the leading
//! pole-pair correction to a resummed value.
//!
//! All pole corrections are leading-order: one conjugate pair, cuts treated as effective poles.

mod complex;
mod oscillation;
mod pole;
mod prefactor;
mod real_zero;
mod test_function;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::DEFAULT_PRECISION;

pub use complex::BigComplex;
pub use oscillation::{fit_oscillation, OscillationFit};
pub use pole::{fit_pole, locate_zero_s_plane, pole_correction, CorrectionResult, Frame, PoleEstimate};
pub use prefactor::{count_level_nodes, count_nodes, eval_power_series, prefactor_q_check, q_flattening, PrefactorConfig};
pub use real_zero::{locate_zero_real, RealZeroConfig};
pub use test_function::{log_cosh_coeff, test_function_series, test_function_zero};

/// Sampling and fitting settings for oscillation-based pole location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PoleConfig {
    pub n: usize,
    pub p: usize,
    pub precision_bits: u32,
    /// Linear lambda window sampled for the fit.
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub samples: usize,
    /// The window ends where |L_N - L_{N-1}| exceeds trust times the running max of |L_N|.
    pub trust: f64,
    /// Five turning points span two full periods.
    pub min_extrema: usize,
    /// Initial relative step when bracketing s0.
    pub bracket_step: f64,
    pub s0_tol: f64,
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub alpha_points: usize,
    pub alpha_tol: f64,
    /// Largest |correction| / |raw| accepted by the single-pole model.
    pub max_correction: f64,
}

impl Default for PoleConfig {
    fn default() -> Self {
        Self {
            n: 60,
            p: 100,
            precision_bits: DEFAULT_PRECISION,
            lambda_min: 2.0,
            lambda_max: 60.0,
            samples: 300,
            trust: 1e-8,
            min_extrema: 5,
            bracket_step: 0.05,
            s0_tol: 1e-6,
            alpha_min: 0.5,
            alpha_max: 4.0,
            alpha_points: 15,
            alpha_tol: 1e-6,
            max_correction: 0.1,
        }
    }
}

impl PoleConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.n >= 2
            && self.lambda_min > 0.0
            && self.lambda_max > self.lambda_min
            && self.samples >= 16
            && self.trust > 0.0
            && self.bracket_step > 0.0
            && self.s0_tol > 0.0
            && self.alpha_min > 0.0
            && self.alpha_max > self.alpha_min
            && self.alpha_points >= 2
            && self.alpha_tol > 0.0
            && self.max_correction > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument("inconsistent pole configuration".into()))
        }
    }
}

/// One point of a zero locus traced as a3 varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroLocusPoint {
    pub s_real: f64,
    pub s_imag: f64,
    pub a3: f64,
}

pub fn zero_locus_csv(points: &[ZeroLocusPoint]) -> String {
    let mut out = String::from("s_real,s_imag,a3\n");
    for p in points {
        out.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", p.s_real, p.s_imag, p.a3));
    }
    out
}

/// Optional plotting transform s^3 -> sqrt(16 a1 a2 + 30 a3) s^3 / 3 (principal cube root).
pub fn scaled_frame(p: &ZeroLocusPoint, a1: f64, a2: f64) -> Option<ZeroLocusPoint> {
    let g = 16.0 * a1 * a2 + 30.0 * p.a3;
    if !(g > 0.0) {
        return None;
    }
    let k = (g.sqrt() / 3.0).cbrt();
    Some(ZeroLocusPoint { s_real: p.s_real * k, s_imag: p.s_imag * k, a3: p.a3 })
}
