//! Exact perturbative coefficient families for the quartic anharmonic oscillator.
//!
//! Everything here is rational arithmetic; nothing is rounded.

mod bender_wu;
mod excited;
mod semiclassical;
mod w;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exact::ExactRational;

pub use bender_wu::bender_wu_expand;
pub use excited::excited_expand;
pub use semiclassical::semiclassical_expand;
pub use w::{extend_w_series, ode_residual, WSeries};

/// Expansion variable of a scalar series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variable {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "hbar")]
    Hbar,
}

/// Coefficients c_0, c_1, ... of a power series in one variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarSeries {
    pub variable: Variable,
    pub coeffs: Vec<ExactRational>,
}

impl ScalarSeries {
    pub fn new(variable: Variable, coeffs: Vec<ExactRational>) -> Self {
        Self { variable, coeffs }
    }

    /// Highest stored order.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn truncated(&self, order: usize) -> Self {
        Self {
            variable: self.variable,
            coeffs: self.coeffs.iter().take(order + 1).cloned().collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, crate::Error> {
        serde_json::from_str(s).map_err(|e| crate::Error::Parse(e.to_string()))
    }
}

/// Which double expansion a [`BivariateSeries`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// a_{n,m}, coefficient of g^m in a_n; zero for m < n-1.
    BenderWu,
    /// a_{n,m}, coefficient of hbar^m in a_n.
    Semiclassical,
    /// c_{n,k}, coefficient of hbar^k x^n in the level-q prefactor.
    Excited { q: usize },
}

/// Sparse double-indexed coefficients; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BivariateSeries {
    pub flavor: Flavor,
    pub coeffs: BTreeMap<(usize, usize), ExactRational>,
    pub max_n: usize,
    pub max_m: usize,
}

impl BivariateSeries {
    pub fn new(flavor: Flavor, max_n: usize, max_m: usize) -> Self {
        Self { flavor, coeffs: BTreeMap::new(), max_n, max_m }
    }

    pub fn get(&self, n: usize, m: usize) -> ExactRational {
        self.coeffs.get(&(n, m)).cloned().unwrap_or_default()
    }

    /// Stores only nonzero entries.
    pub fn set(&mut self, n: usize, m: usize, v: ExactRational) {
        if v.is_zero() {
            self.coeffs.remove(&(n, m));
        } else {
            self.coeffs.insert((n, m), v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let s = ScalarSeries::new(
            Variable::Hbar,
            vec![ExactRational::one(), ExactRational::new(5, 8)],
        );
        let v: serde_json::Value = serde_json::from_str(&s.to_json()).unwrap();
        assert_eq!(v["variable"], "hbar");
        assert_eq!(v["coeffs"][1], "5/8");
        assert_eq!(ScalarSeries::from_json(&s.to_json()).unwrap(), s);
    }
}
