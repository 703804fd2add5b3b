use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resum::{extrema, Extremum};

/// c cos(lambda y + nu) e^{delta lambda} fitted to the turning points of a sampled curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscillationFit {
    /// Angular frequency; the period is 2 pi / y.
    pub y: f64,
    /// Amplitude at lambda = 0.
    pub c: f64,
    pub nu: f64,
    /// Exponential growth rate of the swings; zero at fixed amplitude.
    pub delta: f64,
    pub extrema: usize,
    /// Largest |r - 1| over ratios of successive swings.
    pub amplitude_spread: f64,
}

impl OscillationFit {
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.y
    }

    /// Value of the fitted oscillation at lambda.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.c * (lambda * self.y + self.nu).cos() * (self.delta * lambda).exp()
    }
}

/// Slope and intercept of the least-squares line through (x, y).
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

fn wrap(phase: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let r = phase.rem_euclid(tau);
    if r > std::f64::consts::PI {
        r - tau
    } else {
        r
    }
}

/// Fits the dominant oscillation of y(x); needs at least `min_extrema` turning points.
pub fn fit_oscillation(x: &[f64], y: &[f64], min_extrema: usize) -> Result<OscillationFit> {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ext: Vec<Extremum> = extrema(x, y, scale * 1e-15);
    if ext.is_empty() {
        return Err(Error::NoOscillation);
    }
    if ext.len() < min_extrema.max(3) {
        return Err(Error::InsufficientExtrema { found: ext.len(), needed: min_extrema.max(3) });
    }
    let k: Vec<f64> = (0..ext.len()).map(|i| i as f64).collect();
    let pos: Vec<f64> = ext.iter().map(|e| e.x).collect();
    let (half, start) = linear_fit(&k, &pos);
    let freq = std::f64::consts::PI / half;
    let mids: Vec<f64> = ext.windows(2).map(|w| 0.5 * (w[0].x + w[1].x)).collect();
    let swings: Vec<f64> = ext.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect();
    let logs: Vec<f64> = swings.iter().map(|s| s.ln()).collect();
    let (delta, ln2c) = linear_fit(&mids, &logs);
    let spread = swings.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    // damping moves the turning points to phase k pi + atan(delta / y) and shrinks them by cos of that
    let shift = (delta / freq).atan();
    let nu = wrap(-freq * start + shift + if ext[0].is_max { 0.0 } else { std::f64::consts::PI });
    Ok(OscillationFit {
        y: freq,
        c: 0.5 * ln2c.exp() / shift.cos(),
        nu,
        delta,
        extrema: ext.len(),
        amplitude_spread: spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let x: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let y = x.iter().map(|&t| f(t)).collect();
        (x, y)
    }

    #[test]
    fn recovers_damped_cosine() {
        let (x, y) = sample(|t| 0.7 + 2.0 * (1.3 * t + 0.4).cos() * (-0.05 * t).exp(), 0.0, 30.0, 3000);
        let f = fit_oscillation(&x, &y, 5).unwrap();
        assert!((f.y - 1.3).abs() < 1e-3, "{f:?}");
        assert!((f.delta + 0.05).abs() < 1e-3, "{f:?}");
        assert!((f.c - 2.0).abs() < 1e-2, "{f:?}");
        assert!((f.nu - 0.4).abs() < 1e-2, "{f:?}");
    }

    #[test]
    fn negative_amplitude_is_a_phase() {
        let (x, y) = sample(|t| -(0.9 * t).cos(), 0.5, 40.0, 4000);
        let f = fit_oscillation(&x, &y, 5).unwrap();
        assert!(f.delta.abs() < 1e-4 && f.amplitude_spread < 1e-3);
        assert!((wrap(f.nu - std::f64::consts::PI)).abs() < 1e-2, "{f:?}");
    }

    #[test]
    fn monotone_is_no_oscillation() {
        let (x, y) = sample(|t| t.exp(), 0.0, 5.0, 100);
        assert_eq!(fit_oscillation(&x, &y, 5), Err(Error::NoOscillation));
        let (x, y) = sample(|t| t.sin(), 0.0, 5.0, 100);
        assert_eq!(fit_oscillation(&x, &y, 5), Err(Error::InsufficientExtrema { found: 2, needed: 5 }));
    }
}
