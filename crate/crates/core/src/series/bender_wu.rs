use super::{BivariateSeries, Flavor, ScalarSeries, Variable};
use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Order-by-order solution of the ground-state equations in powers of g at rho = 1.
///
/// Returns a_{n,m} for n <= n_max, m <= m_max and the energy series E(g) = -2 sum a_{1,m} g^m.
pub fn bender_wu_expand(n_max: usize, m_max: usize) -> Result<(BivariateSeries, ScalarSeries)> {
    if n_max < 1 || m_max < 1 {
        return Err(Error::InvalidArgument("n_max and m_max must be >= 1".into()));
    }
    // a[k][m], k = 1..=m_max+1 (a_{k,m} = 0 for m < k-1)
    let kmax = m_max + 2;
    let mut a = vec![vec![ExactRational::zero(); m_max + 1]; kmax + 1];
    let a10 = ExactRational::new(-1, 2);
    a[1][0] = a10.clone();
    for m in 1..=m_max {
        for k in (1..=m + 1).rev() {
            let mut s = -(&a[k + 1][m] * ((2 * k + 2) * (2 * k + 1)) as i64);
            for j in 1..=k {
                let l = k + 1 - j;
                let w = (4 * j * l) as i64;
                for i in 0..=m {
                    if (j == 1 && i == 0) || (l == 1 && i == m) {
                        continue;
                    }
                    let (x, y) = (&a[j][i], &a[l][m - i]);
                    if !x.is_zero() && !y.is_zero() {
                        s -= &(x * y * w);
                    }
                }
            }
            if k == 2 && m == 1 {
                s += &ExactRational::one();
            }
            a[k][m] = s / (&a10 * (8 * k) as i64);
        }
    }
    let mut out = BivariateSeries::new(Flavor::BenderWu, n_max, m_max);
    for (n, row) in a.iter().enumerate().take(n_max.min(kmax) + 1).skip(1) {
        for (m, v) in row.iter().enumerate() {
            out.set(n, m, v.clone());
        }
    }
    let energy = (0..=m_max).map(|m| -(&a[1][m] * 2)).collect();
    Ok((out, ScalarSeries::new(Variable::G, energy)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_series() {
        let (_, e) = bender_wu_expand(6, 6).unwrap();
        let want = ["1", "3/4", "-21/16", "333/64", "-30885/1024", "916731/4096", "-65518401/32768"];
        for (c, w) in e.coeffs.iter().zip(want) {
            assert_eq!(c, &w.parse::<ExactRational>().unwrap());
        }
    }

    #[test]
    fn triangular() {
        let (a, _) = bender_wu_expand(12, 12).unwrap();
        assert_eq!(a.get(1, 0), ExactRational::new(-1, 2));
        assert_eq!(a.get(1, 1), ExactRational::new(-3, 8));
        for (&(n, m), _) in a.coeffs.iter() {
            assert!(m + 1 >= n, "a_{{{n},{m}}} below the diagonal");
        }
    }
}
