use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Log-wavefunction W(x) = sum_{n>=1} a_n x^{2n}; `coeffs[0]` is a_1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WSeries {
    pub coeffs: Vec<ExactRational>,
}

impl WSeries {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// a_n for n >= 1 (zero beyond the stored order).
    pub fn a(&self, n: usize) -> ExactRational {
        assert!(n >= 1, "W has no constant term");
        self.coeffs.get(n - 1).cloned().unwrap_or_default()
    }

    /// E = -2 a_1.
    pub fn energy(&self) -> ExactRational {
        -(self.a(1) * 2)
    }

    /// rho = 4 a_1^2 + 12 a_2.
    pub fn rho(&self) -> ExactRational {
        self.a(1).pow(2) * 4 + self.a(2) * 12
    }

    /// g = 16 a_1 a_2 + 30 a_3.
    pub fn coupling(&self) -> ExactRational {
        self.a(1) * self.a(2) * 16 + self.a(3) * 30
    }
}

type Key = (ExactRational, ExactRational, ExactRational);

fn cache() -> &'static Mutex<HashMap<Key, Vec<ExactRational>>> {
    static C: OnceLock<Mutex<HashMap<Key, Vec<ExactRational>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// a_{n+1} from a_1..a_n, n >= 3.
fn next_coefficient(a: &[ExactRational]) -> ExactRational {
    let n = a.len();
    let mut s = ExactRational::zero();
    for m in 1..=n {
        let w = (4 * m * (n - m + 1)) as i64;
        s += &(&a[m - 1] * &a[n - m] * w);
    }
    -s / (2 * (n as i64 + 1) * (2 * n as i64 + 1))
}

/// Extends (a_1, a_2, a_3) to a_1..a_{n_max} through the ground-state recurrence.
pub fn extend_w_series(
    a1: &ExactRational,
    a2: &ExactRational,
    a3: &ExactRational,
    n_max: usize,
) -> Result<WSeries> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 3, got {n_max}")));
    }
    let key = (a1.clone(), a2.clone(), a3.clone());
    let mut coeffs = {
        let c = cache().lock().expect("w cache poisoned");
        c.get(&key).cloned()
    }
    .unwrap_or_else(|| vec![a1.clone(), a2.clone(), a3.clone()]);
    if coeffs.len() >= n_max {
        coeffs.truncate(n_max);
        return Ok(WSeries { coeffs });
    }
    while coeffs.len() < n_max {
        let next = next_coefficient(&coeffs);
        coeffs.push(next);
    }
    let mut c = cache().lock().expect("w cache poisoned");
    let slot = c.entry(key).or_default();
    if slot.len() < coeffs.len() {
        *slot = coeffs.clone();
    }
    Ok(WSeries { coeffs })
}

/// Coefficients r_0..r_{N} (of x^{2k}) of -(W'' + W'^2) + rho x^2 + g x^4 - E for the truncated W.
pub fn ode_residual(
    w: &WSeries,
    e: &ExactRational,
    rho: &ExactRational,
    g: &ExactRational,
) -> Vec<ExactRational> {
    let n = w.order();
    let mut r = vec![ExactRational::zero(); 2 * n];
    // W'' = sum 2n(2n-1) a_n x^{2n-2}
    for k in 1..=n {
        let c = (2 * k * (2 * k - 1)) as i64;
        r[k - 1] -= &(w.a(k) * c);
    }
    // W'^2 = sum 4 j l a_j a_l x^{2(j+l)-2}
    for j in 1..=n {
        for l in 1..=n {
            let c = (4 * j * l) as i64;
            r[j + l - 1] -= &(w.a(j) * w.a(l) * c);
        }
    }
    r[0] -= e;
    r[1] += rho;
    r[2] += g;
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn harmonic_stays_harmonic() {
        let w = extend_w_series(&q(-1, 2), &q(0, 1), &q(0, 1), 10).unwrap();
        assert!(w.coeffs[1..].iter().all(|a| a.is_zero()));
        assert_eq!(w.energy(), ExactRational::one());
    }

    #[test]
    fn a4_by_hand() {
        let (a1, a2, a3) = (q(-1, 2), q(-1, 8), q(3, 7));
        let w = extend_w_series(&a1, &a2, &a3, 4).unwrap();
        let hand = -(&a1 * &a3 * 24 + &a2 * &a2 * 16) / 56;
        assert_eq!(w.a(4), hand);
    }

    #[test]
    fn residual_vanishes() {
        let w = extend_w_series(&q(-2, 3), &q(1, 5), &q(-7, 11), 12).unwrap();
        let r = ode_residual(&w, &w.energy(), &w.rho(), &w.coupling());
        for (k, rk) in r.iter().enumerate().take(w.order()) {
            assert!(rk.is_zero(), "x^{} coefficient {rk}", 2 * k);
        }
    }

    #[test]
    fn rejects_short() {
        assert!(extend_w_series(&q(-1, 2), &q(0, 1), &q(0, 1), 2).is_err());
    }

    #[test]
    fn cached_prefix_consistent() {
        let (a1, a2, a3) = (q(-1, 2), q(-1, 4), q(1, 9));
        let long = extend_w_series(&a1, &a2, &a3, 20).unwrap();
        let short = extend_w_series(&a1, &a2, &a3, 8).unwrap();
        assert_eq!(&long.coeffs[..8], &short.coeffs[..]);
    }
}
