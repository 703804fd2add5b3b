use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::{BivariateSeries, Flavor, ScalarSeries, Variable};
use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Dense triangle a[n][m] for n + m <= bound (n >= 1), with a_1 = -1/2, a_2 = -1/8 fixed.
pub(crate) struct Triangle {
    pub bound: usize,
    pub a: Vec<Vec<ExactRational>>,
}

impl Triangle {
    pub fn get(&self, n: usize, m: usize) -> &ExactRational {
        &self.a[n][m]
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<Triangle>>> {
    static C: OnceLock<Mutex<HashMap<usize, Arc<Triangle>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn build(bound: usize) -> Triangle {
    let zero = ExactRational::zero();
    let mut a = vec![vec![zero.clone(); bound + 1]; bound + 2];
    let a1 = ExactRational::new(-1, 2);
    a[1][0] = a1.clone();
    a[2][0] = ExactRational::new(-1, 8);
    let pivot_base = &a1 * 8;
    for m in 0..=bound.saturating_sub(3) {
        for n in 3..=bound - m {
            let mut s = if m >= 1 {
                &a[n + 1][m - 1] * (2 * (n + 1) * (2 * n + 1)) as i64
            } else {
                zero.clone()
            };
            for j in 1..=n {
                let l = n + 1 - j;
                let w = (4 * j * l) as i64;
                for i in 0..=m {
                    if (j == 1 && i == 0) || (l == 1 && i == m) {
                        continue;
                    }
                    let (x, y) = (&a[j][i], &a[l][m - i]);
                    if !x.is_zero() && !y.is_zero() {
                        s += &(x * y * w);
                    }
                }
            }
            a[n][m] = -s / (&pivot_base * n as i64);
        }
    }
    Triangle { bound, a }
}

/// Shared, memoized triangle covering at least `bound`.
pub(crate) fn triangle(bound: usize) -> Arc<Triangle> {
    let bound = bound.max(4);
    {
        let c = cache().lock().expect("semiclassical cache poisoned");
        if let Some(t) = c.values().filter(|t| t.bound >= bound).min_by_key(|t| t.bound) {
            return Arc::clone(t);
        }
    }
    let t = Arc::new(build(bound));
    cache().lock().expect("semiclassical cache poisoned").insert(bound, Arc::clone(&t));
    t
}

/// Expansion of a_n in powers of hbar with a_1 = -1/2, a_2 = -1/8; also b_2(hbar) = 16 a_1 a_2 + 30 a_3 hbar.
pub fn semiclassical_expand(n_max: usize, m_max: usize) -> Result<(BivariateSeries, ScalarSeries)> {
    if n_max < 3 {
        return Err(Error::InvalidArgument(format!("n_max must be >= 3, got {n_max}")));
    }
    // a_{n,m} needs a_{n+1,m-1}: the triangle n + m <= n_max + m_max covers the rectangle.
    let t = triangle((n_max + m_max).max(m_max + 3));
    let mut out = BivariateSeries::new(Flavor::Semiclassical, n_max, m_max);
    for n in 1..=n_max {
        for m in 0..=m_max {
            if n + m <= t.bound {
                out.set(n, m, t.get(n, m).clone());
            }
        }
    }
    let mut b2 = vec![ExactRational::one()];
    for m in 1..=m_max {
        b2.push(t.get(3, m - 1) * 30);
    }
    Ok((out, ScalarSeries::new(Variable::Hbar, b2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b2_low_orders() {
        let (_, b2) = semiclassical_expand(6, 6).unwrap();
        let want = ["1", "5/8", "-35/32", "2555/512", "-69545/2048", "4849705/16384", "-202337485/65536"];
        for (c, w) in b2.coeffs.iter().zip(want) {
            assert_eq!(c, &w.parse::<ExactRational>().unwrap());
        }
    }

    #[test]
    fn b2_signs_alternate_after_leading_pair() {
        let (_, b2) = semiclassical_expand(3, 100).unwrap();
        assert_eq!(b2.coeffs[0].signum(), 1);
        for (m, c) in b2.coeffs.iter().enumerate().skip(1) {
            assert_eq!(c.signum(), if m % 2 == 1 { 1 } else { -1 }, "order {m}");
        }
    }

    #[test]
    fn rectangle_independent_of_request() {
        let (small, _) = semiclassical_expand(5, 5).unwrap();
        let (big, _) = semiclassical_expand(9, 9).unwrap();
        for n in 1..=5 {
            for m in 0..=5 {
                assert_eq!(small.get(n, m), big.get(n, m));
            }
        }
    }
}
