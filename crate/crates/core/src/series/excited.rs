use super::semiclassical::triangle;
use super::{BivariateSeries, Flavor, ScalarSeries, Variable};
use crate::error::{Error, Result};
use crate::exact::ExactRational;

/// Level-q prefactor expansion c_{n,k} and the energy coefficient series b_3(hbar).
///
/// Normalization: c_{q,0} = 1, c_{q,k} = 0 for k >= 1, b_{3,0} = 0, b_{3,1} = -2q.
pub fn excited_expand(q: i64, n_max: usize, k_max: usize) -> Result<(BivariateSeries, ScalarSeries)> {
    if q < 0 {
        return Err(Error::InvalidArgument(format!("q must be >= 0, got {q}")));
    }
    let q = q as usize;
    let kk = k_max + 1;
    // c_{n,k-1} is solved from the (k, n) relation, which reaches up to x^{n+2}.
    let nmax = (q + 2 * kk + 4).max(n_max + 2 * kk + 2);
    let amax = nmax / 2 + 2;
    let tri = triangle(amax + kk + 1);
    let zero = ExactRational::zero();
    let a = |m: usize, i: usize| -> &ExactRational {
        if m + i <= tri.bound {
            tri.get(m, i)
        } else {
            &zero
        }
    };

    let mut c = vec![vec![ExactRational::zero(); kk + 1]; nmax + 3];
    c[q][0] = ExactRational::one();
    let mut b3 = vec![ExactRational::zero(); kk + 1];
    b3[1] = ExactRational::from_int(-2 * q as i64);

    for k in 1..=kk {
        let top = nmax.saturating_sub(2 * (k - 1));
        let mut n = q % 2;
        while n <= top {
            let mut rest = ExactRational::zero();
            for i in 2..=k {
                if i == k && n >= q {
                    continue;
                }
                if !c[n][k - i].is_zero() {
                    rest += &(&b3[i] * &c[n][k - i]);
                }
            }
            if k >= 2 && n + 2 < c.len() {
                rest -= &(&c[n + 2][k - 2] * ((n + 2) * (n + 1)) as i64);
            }
            for m in 1..=(n + 2) / 2 {
                let idx = n + 2 - 2 * m;
                let w = (4 * m * idx) as i64;
                if w == 0 {
                    continue;
                }
                for i in 0..k {
                    if m == 1 && i == 0 {
                        continue;
                    }
                    let (x, y) = (a(m, i), &c[idx][k - 1 - i]);
                    if !x.is_zero() && !y.is_zero() {
                        rest -= &(x * y * w);
                    }
                }
            }
            if n == q {
                if k >= 2 {
                    b3[k] = -rest;
                }
            } else {
                if n > q && k >= 2 {
                    rest += &(&b3[k] * &c[n][0]);
                }
                c[n][k - 1] = -rest / (2 * (n as i64 - q as i64));
            }
            n += 2;
        }
    }

    let mut out = BivariateSeries::new(Flavor::Excited { q }, n_max, k_max);
    for (n, row) in c.iter().enumerate().take(n_max + 1) {
        for (k, v) in row.iter().enumerate().take(k_max + 1) {
            out.set(n, k, v.clone());
        }
    }
    b3.truncate(k_max + 1);
    Ok((out, ScalarSeries::new(Variable::Hbar, b3)))
}
