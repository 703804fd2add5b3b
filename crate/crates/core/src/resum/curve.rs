use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::BigReal;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub lambda: BigReal,
    pub l_n: BigReal,
    pub l_n_minus_1: BigReal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveClass {
    Flat,
    Increasing,
    Decreasing,
    OscillatingGrowing,
    OscillatingDamped,
    OscillatingFixed,
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CurveClass::Flat => "flat",
            CurveClass::Increasing => "increasing",
            CurveClass::Decreasing => "decreasing",
            CurveClass::OscillatingGrowing => "oscillating-growing",
            CurveClass::OscillatingDamped => "oscillating-damped",
            CurveClass::OscillatingFixed => "oscillating-fixed",
        })
    }
}

/// Sampled L_N / L_{N-1} against lambda, with an optional classification.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LambdaCurve {
    pub samples: Vec<CurveSample>,
    pub classification: Option<CurveClass>,
}

impl LambdaCurve {
    pub fn new(samples: Vec<CurveSample>) -> Self {
        Self { samples, classification: None }
    }

    pub fn classified(mut self, flat_tol: f64) -> Self {
        self.classification = classify_curve(&self, flat_tol).ok();
        self
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.lambda.to_f64()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,L_N,L_Nminus1\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.lambda, s.l_n, s.l_n_minus_1));
        }
        out
    }

    pub fn sidecar_json(&self) -> String {
        serde_json::json!({
            "samples": self.samples.len(),
            "classification": self.classification.map(|c| c.to_string()),
        })
        .to_string()
    }
}

/// A local extremum refined by a parabola through three neighbouring samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extremum {
    pub x: f64,
    pub value: f64,
    pub is_max: bool,
}

/// Vertex of the parabola through three points (Newton form), clamped to the bracket.
fn vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 {
        return (x[1], y[1]);
    }
    let b = d1 - a * (x[0] + x[1]);
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    (xv, y[0] + d1 * (xv - x[0]) + a * (xv - x[0]) * (xv - x[1]))
}

/// Interior extrema of y(x); differences with |dy| <= noise are ignored.
pub fn extrema(x: &[f64], y: &[f64], noise: f64) -> Vec<Extremum> {
    let mut out = Vec::new();
    let mut last_sign = 0i32;
    let mut last_idx = 0usize;
    for i in 0..y.len().saturating_sub(1) {
        let d = y[i + 1] - y[i];
        if d.abs() <= noise {
            continue;
        }
        let s = if d > 0.0 { 1 } else { -1 };
        if last_sign != 0 && s != last_sign {
            // turning point sits at the sample shared by the two monotone runs
            let k = (last_idx + 1..=i).max_by(|&a, &b| {
                let (ya, yb) = (y[a] * last_sign as f64, y[b] * last_sign as f64);
                ya.partial_cmp(&yb).unwrap_or(std::cmp::Ordering::Equal)
            });
            let k = k.unwrap_or(i).clamp(1, y.len() - 2);
            let (xv, yv) = vertex([x[k - 1], x[k], x[k + 1]], [y[k - 1], y[k], y[k + 1]]);
            out.push(Extremum { x: xv, value: yv, is_max: last_sign > 0 });
        }
        last_sign = s;
        last_idx = i;
    }
    out
}

/// Swing amplitudes |v_{k+1} - v_k| between successive extrema.
pub(crate) fn swings(ext: &[Extremum]) -> Vec<f64> {
    ext.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect()
}

/// Per-period growth factor of the swings: compares swings one period apart when available.
pub(crate) fn period_ratio(ext: &[Extremum]) -> Option<f64> {
    let sw = swings(ext);
    let lag = if sw.len() >= 3 { 2 } else { 1 };
    if sw.len() <= lag - 1 || sw.len() < 2 {
        return None;
    }
    let ratios: Vec<f64> = (lag..sw.len()).map(|i| sw[i] / sw[i - lag]).collect();
    let mean_log = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
    let per_period = if lag == 2 { mean_log } else { 2.0 * mean_log };
    Some(per_period.exp())
}

/// Classifies the L_N column of a curve.
pub fn classify_curve(curve: &LambdaCurve, flat_tol: f64) -> Result<CurveClass> {
    if curve.samples.len() < 8 {
        return Err(Error::Indeterminate(format!("{} samples, need at least 8", curve.samples.len())));
    }
    let x: Vec<f64> = curve.samples.iter().map(|s| s.lambda.to_f64()).collect();
    let y: Vec<f64> = curve.samples.iter().map(|s| s.l_n.to_f64()).collect();
    classify_xy(&x, &y, flat_tol)
}

pub(crate) fn classify_xy(x: &[f64], y: &[f64], flat_tol: f64) -> Result<CurveClass> {
    let mid = 0.5 * (x[0] + x[x.len() - 1]);
    let top: Vec<f64> = x.iter().zip(y).filter(|(xi, _)| **xi >= mid).map(|(_, yi)| *yi).collect();
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (lo, hi) = top.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
    if scale == 0.0 || (hi - lo) <= flat_tol * scale {
        return Ok(CurveClass::Flat);
    }
    let noise = scale * 1e-14;
    let ext = extrema(x, y, noise);
    match ext.len() {
        0 => Ok(if y[y.len() - 1] > y[0] { CurveClass::Increasing } else { CurveClass::Decreasing }),
        1 => Err(Error::Indeterminate("single extremum".into())),
        _ => {
            let r = period_ratio(&ext).ok_or_else(|| Error::Indeterminate("too few swings".into()))?;
            Ok(if r > 1.0 + 1e-2 {
                CurveClass::OscillatingGrowing
            } else if r < 1.0 - 1e-2 {
                CurveClass::OscillatingDamped
            } else {
                CurveClass::OscillatingFixed
            })
        }
    }
}
