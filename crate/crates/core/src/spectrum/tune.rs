//! Boundary-condition tuning: bisect the free coefficient until the resummed large-x behaviour is right.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactRational;
use crate::real::BigReal;
use crate::par;
use crate::resum::PowerKernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Increasing,
    Decreasing,
    Flat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuneConfig {
    pub precision_bits: u32,
    /// Rotation exponent of the tuning integral.
    pub alpha: f64,
    /// Relative |T_N - T_{N-1}| bound defining the trusted lambda window.
    pub sigma: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub lambda_ratio: f64,
    /// A departure is a deviation larger than this fraction of the plateau magnitude.
    pub theta_exit: f64,
    /// Upper bound for coefficient-count escalation.
    pub max_coeffs: usize,
    pub max_iterations: usize,
    /// Rotation exponent of the prefactor integral U_N.
    pub excited_alpha: f64,
    /// Runaway factor of the prefactor verdict.
    pub growth_factor: f64,
    /// Points of the initial tau scan.
    pub excited_scan: usize,
}

impl Default for TuneConfig {
    fn default() -> Self {
        Self {
            precision_bits: 384,
            alpha: 1.0,
            sigma: 1e-5,
            lambda_min: 1.0,
            lambda_max: 400.0,
            lambda_ratio: 1.02,
            theta_exit: 1.0,
            max_coeffs: 480,
            max_iterations: 200,
            excited_alpha: 1.0,
            growth_factor: 100.0,
            excited_scan: 41,
        }
    }
}

impl TuneConfig {
    fn lambdas(&self) -> Vec<BigReal> {
        let mut out = Vec::new();
        let r = BigReal::from_f64(self.lambda_ratio, self.precision_bits);
        let mut l = BigReal::from_f64(self.lambda_min, self.precision_bits);
        while l <= self.lambda_max {
            out.push(l.clone());
            l *= &r;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneState {
    /// a_1 / a_2.
    pub k: i32,
    pub a2: ExactRational,
    pub a3_low: BigReal,
    pub a3_high: BigReal,
    pub tau: Option<BigReal>,
    pub iterations: usize,
    pub n_coeffs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub a3: BigReal,
    /// Energy and rho mapped to the target coupling.
    pub e: BigReal,
    pub rho: BigReal,
    pub g: BigReal,
    /// Values in the computational normalization.
    pub e_raw: BigReal,
    pub rho_raw: BigReal,
    pub g_raw: BigReal,
    pub state: TuneState,
}

impl TuneOutcome {
    pub fn a2(&self, prec: u32) -> BigReal {
        self.state.a2.to_big_real(prec)
    }

    pub fn a1(&self) -> BigReal {
        self.a2(self.a3.prec()) * self.state.k as i64
    }
}

/// W coefficients a_1..a_n from (a_1, a_2, a_3) at working precision.
pub fn w_coeffs(a1: &BigReal, a2: &BigReal, a3: &BigReal, n: usize) -> Vec<BigReal> {
    let mut a = vec![a1.clone(), a2.clone(), a3.clone()];
    while a.len() < n {
        let m = a.len();
        let mut s = BigReal::zero(a1.prec());
        for j in 1..=m {
            s += &a[j - 1] * &a[m - j] * (4 * j * (m - j + 1)) as i64;
        }
        a.push(-s / (2 * (m as i64 + 1) * (2 * m as i64 + 1)));
    }
    a.truncate(n);
    a
}

/// One point of the ground-state tuning diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct GroundSample {
    pub lambda: BigReal,
    pub t_n: BigReal,
    pub t_n_minus_1: BigReal,
    /// T_N minus its two-term large-lambda asymptote.
    pub d: BigReal,
}

pub(crate) struct GroundProbe {
    kernel: PowerKernel,
    lambdas: Vec<BigReal>,
    n: usize,
}

impl GroundProbe {
    pub fn new(n: usize, cfg: &TuneConfig) -> Result<Self> {
        let prec = cfg.precision_bits;
        let alpha = BigReal::from_f64(cfg.alpha, prec);
        let kernel = PowerKernel::linear(&alpha, 2, 2, n, -(&alpha * 3i64))?;
        Ok(Self { kernel, lambdas: cfg.lambdas(), n })
    }

    /// Samples until the sigma window closes (inclusive of the last trusted point).
    pub fn samples(&self, a: &[BigReal], cfg: &TuneConfig) -> Result<Vec<GroundSample>> {
        let mut out = Vec::new();
        self.stream(a, cfg, |s| {
            out.push(s);
            true
        })?;
        Ok(out)
    }

    /// Feeds trusted samples in lambda order to `visit` until it returns false or the window
    /// closes. Batches of lambdas are evaluated in parallel.
    fn stream(&self, a: &[BigReal], cfg: &TuneConfig, mut visit: impl FnMut(GroundSample) -> bool) -> Result<()> {
        let prec = cfg.precision_bits;
        let g = &a[0] * &a[1] * 16i64 + &a[2] * 30i64;
        let rho = a[0].powi(2) * 4i64 + &a[1] * 12i64;
        if !(g > 0.0) {
            return Err(Error::InvalidArgument("tuning needs a positive raw coupling".into()));
        }
        let sg = g.sqrt();
        let plateau = &sg / 18i64;
        for chunk in self.lambdas.chunks(par::batch_size()) {
            let sums = par::try_map(chunk, |l| {
                let s = self.kernel.partial_sums(&a[..self.n], l)?;
                Ok::<_, Error>((s[self.n - 1].clone(), s[self.n - 2].clone()))
            })?;
            for (l, (t, tp)) in chunk.iter().zip(sums) {
                if ((&t - &tp) / &tp).abs() > cfg.sigma {
                    return Ok(());
                }
                let d = &t + &plateau + &rho / (&sg * l.powi(2) * 2i64);
                if !visit(GroundSample { lambda: l.with_prec(prec), t_n: t, t_n_minus_1: tp, d }) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Online form of [`departure_verdict`].
struct Departure {
    exit: f64,
    armed: bool,
}

impl Departure {
    fn new(exit: f64) -> Self {
        Self { exit, armed: false }
    }

    fn push(&mut self, v: f64) -> Option<Verdict> {
        if !self.armed {
            self.armed = v.abs() < self.exit;
            None
        } else if v.abs() > self.exit {
            Some(if v > 0.0 { Verdict::Increasing } else { Verdict::Decreasing })
        } else {
            None
        }
    }
}

/// Sign of the first decisive departure of `d` from zero.
///
/// The verdict is armed once |d| has dropped below `exit` and is the sign of the first later
/// point with |d| > `exit`. The subleading humps of a tuned curve stay well inside the band,
/// while a mistuned coefficient makes |d| grow without bound.
pub fn departure_verdict(d: &[f64], exit: f64) -> Verdict {
    let mut det = Departure::new(exit);
    d.iter().find_map(|&v| det.push(v)).unwrap_or(Verdict::Flat)
}

pub(crate) fn ground_verdict(a: &[BigReal], probe: &GroundProbe, cfg: &TuneConfig) -> Result<Verdict> {
    let g = &a[0] * &a[1] * 16i64 + &a[2] * 30i64;
    let mut det = Departure::new((g.sqrt() / 18i64).to_f64() * cfg.theta_exit);
    let mut verdict = Verdict::Flat;
    probe.stream(a, cfg, |s| match det.push(s.d.to_f64()) {
        Some(v) => {
            verdict = v;
            false
        }
        None => true,
    })?;
    Ok(verdict)
}

/// Diagnostic curve for given (a_1, a_2, a_3).
pub fn ground_curve(a1: f64, a2: f64, a3: &BigReal, n: usize, cfg: &TuneConfig) -> Result<Vec<GroundSample>> {
    let prec = cfg.precision_bits;
    let a = w_coeffs(&BigReal::from_f64(a1, prec), &BigReal::from_f64(a2, prec), &a3.with_prec(prec), n);
    GroundProbe::new(n, cfg)?.samples(&a, cfg)
}

fn raw_triple(a1: &BigReal, a2: &BigReal, a3: &BigReal) -> (BigReal, BigReal, BigReal) {
    let e = -(a1 * 2i64);
    let rho = a1.powi(2) * 4i64 + a2 * 12i64;
    let g = a1 * a2 * 16i64 + a3 * 30i64;
    (e, rho, g)
}

struct GroundTuner<'a> {
    a1: BigReal,
    a2: BigReal,
    cfg: &'a TuneConfig,
    n: usize,
    probe: GroundProbe,
}

impl<'a> GroundTuner<'a> {
    fn new(a1: BigReal, a2: BigReal, n: usize, cfg: &'a TuneConfig) -> Result<Self> {
        Ok(Self { a1, a2, cfg, n, probe: GroundProbe::new(n, cfg)? })
    }

    /// The recurrence is covariant under a_n -> a_n c^n and the verdict is scale free, so
    /// curves are evaluated in units where |a_1| = 1.
    fn verdict_at(&self, a3: &BigReal) -> Result<Verdict> {
        let s = self.a1.abs().recip();
        let a = w_coeffs(&(&self.a1 * &s), &(&self.a2 * s.powi(2)), &(a3 * s.powi(3)), self.n);
        ground_verdict(&a, &self.probe, self.cfg)
    }

    /// Verdict, doubling N while the curve stays flat.
    fn verdict(&mut self, a3: &BigReal) -> Result<Verdict> {
        loop {
            let v = self.verdict_at(a3)?;
            if v != Verdict::Flat || 2 * self.n > self.cfg.max_coeffs {
                return Ok(v);
            }
            self.n *= 2;
            self.probe = GroundProbe::new(self.n, self.cfg)?;
        }
    }

    fn positive_coupling(&self, a3: &BigReal) -> bool {
        raw_triple(&self.a1, &self.a2, a3).2 > 0.0
    }

    /// Geometric scan over +-[1e-6, 1e3] for a decreasing -> increasing transition.
    fn bracket(&mut self) -> Result<(BigReal, BigReal)> {
        let prec = self.cfg.precision_bits;
        let mut pts: Vec<f64> = (-6..=3).rev().map(|e| -(10f64.powi(e))).collect();
        pts.extend((-6..=3).map(|e| 10f64.powi(e)));
        let mut last: Option<(BigReal, Verdict)> = None;
        for x in pts {
            let a3 = BigReal::from_f64(x, prec);
            if !self.positive_coupling(&a3) {
                continue;
            }
            let v = self.verdict_at(&a3)?;
            if v == Verdict::Flat {
                continue;
            }
            if let Some((prev, pv)) = &last {
                if *pv == Verdict::Decreasing && v == Verdict::Increasing {
                    return Ok((prev.clone(), a3));
                }
            }
            last = Some((a3, v));
        }
        Err(Error::BracketNotFound("no decreasing -> increasing transition in a3 over +-[1e-6, 1e3]".into()))
    }
}

/// Bisects a_3 with a_1 = k a_2 (k = 4 k_sign) and maps the tuned triple to coupling `g`.
///
/// Decreasing verdicts mean a_3 is too small, increasing ones that it is too large. The
/// coefficient count doubles (up to `max_coeffs`) whenever the curve looks flat inside its
/// trusted window.
pub fn tune_ground(
    k_sign: i32,
    a2: &ExactRational,
    g: &BigReal,
    n_coeffs: usize,
    cfg: &TuneConfig,
    tol: f64,
) -> Result<TuneOutcome> {
    tune_ground_from(k_sign, a2, g, n_coeffs, cfg, tol, None)
}

fn tune_ground_from(
    k_sign: i32,
    a2: &ExactRational,
    g: &BigReal,
    n_coeffs: usize,
    cfg: &TuneConfig,
    tol: f64,
    hint: Option<(BigReal, BigReal)>,
) -> Result<TuneOutcome> {
    if k_sign != 1 && k_sign != -1 {
        return Err(Error::InvalidArgument("k_sign must be +1 or -1".into()));
    }
    if !(*g > 0.0) {
        return Err(Error::InvalidArgument("g must be > 0".into()));
    }
    if n_coeffs < 4 {
        return Err(Error::InvalidArgument("need at least 4 coefficients".into()));
    }
    let prec = cfg.precision_bits;
    let k = 4 * k_sign;
    let a2r = a2.to_big_real(prec);
    let a1r = &a2r * k as i64;
    let mut t = GroundTuner::new(a1r.clone(), a2r.clone(), n_coeffs, cfg)?;
    let (mut lo, mut hi) = match hint {
        Some((l, h)) if t.positive_coupling(&l)
            && t.verdict(&l)? == Verdict::Decreasing
            && t.verdict(&h)? == Verdict::Increasing => (l, h),
        _ => t.bracket()?,
    };
    let mut it = 0;
    while (&hi - &lo).to_f64() > tol {
        it += 1;
        if it > cfg.max_iterations {
            return Err(Error::AccuracyUnreachable(format!("no convergence after {it} bisection steps")));
        }
        let mid = (&lo + &hi) / 2i64;
        match t.verdict(&mid)? {
            Verdict::Decreasing => lo = mid,
            Verdict::Increasing => hi = mid,
            Verdict::Flat => {
                return Err(Error::AccuracyUnreachable(format!(
                    "curve flat at a3 = {} with N = {}; bracket width {:e}",
                    mid.to_sig_string(16),
                    t.n,
                    (&hi - &lo).to_f64()
                )))
            }
        }
    }
    let a3 = (&lo + &hi) / 2i64;
    let (e_raw, rho_raw, g_raw) = raw_triple(&a1r, &a2r, &a3);
    if !(g_raw > 0.0) {
        return Err(Error::BracketNotFound("tuned raw coupling is not positive".into()));
    }
    let ratio = (g / &g_raw).cbrt();
    let e = &e_raw * &ratio;
    let rho = &rho_raw * ratio.powi(2);
    Ok(TuneOutcome {
        a3,
        e,
        rho,
        g: g.clone(),
        e_raw,
        rho_raw,
        g_raw,
        state: TuneState { k, a2: a2.clone(), a3_low: lo, a3_high: hi, tau: None, iterations: it, n_coeffs: t.n },
    })
}

/// Exact rational a_2 for which (a_1 = 4 a_2) has rho/E^2 = 1/e1^2, i.e. the rho = 1 energy is e1.
fn a2_for_energy(e1: &BigReal) -> ExactRational {
    let e2 = e1.powi(2);
    let a2 = -(&e2 * 3i64) / ((&e2 - 1i64) * 16i64);
    ExactRational::from_rational(a2.as_float().to_rational().expect("finite a2"))
}

/// Ground-state energy at (rho, g), rho > 0, by tuning.
///
/// The outer unknown is the normalization a_2 (parametrized by the rho = 1 energy it implies);
/// it is solved so that the scale invariant rho / g^{2/3} matches the target, and the energy is
/// read off through E = E_raw (g / g_raw)^{1/3}.
pub fn ground_energy_at(rho: &BigReal, g: &BigReal, n_coeffs: usize, cfg: &TuneConfig, tol: f64) -> Result<TuneOutcome> {
    if !(*rho > 0.0) || !(*g > 0.0) {
        return Err(Error::InvalidArgument("ground_energy_at needs rho > 0 and g > 0".into()));
    }
    let prec = cfg.precision_bits;
    let rho = rho.with_prec(prec);
    let g = g.with_prec(prec);
    let target = &rho / g.powi(2).cbrt();
    let a3_tol = 1e-3 * tol;
    let mut hint: Option<(BigReal, BigReal)> = None;
    // h(e1) = rho_raw / g_raw^{2/3} - target, decreasing in e1
    let mut eval = |e1: &BigReal| -> Result<(f64, TuneOutcome)> {
        let a2 = a2_for_energy(e1);
        let out = tune_ground_from(1, &a2, &g, n_coeffs, cfg, a3_tol, hint.clone())?;
        let w = ((&out.state.a3_high - &out.state.a3_low) * 64i64).max(BigReal::from_f64(1e-9, prec));
        hint = Some((&out.a3 - &w, &out.a3 + &w));
        let h = (&out.rho_raw / out.g_raw.powi(2).cbrt() - &target).to_f64();
        Ok((h, out))
    };
    let gp = (&g / rho.powi(3).sqrt()).to_f64();
    let guess = (1.0 + 0.75 * gp).min(1.1 * (1.0604 * gp.cbrt()).max(1.0)).max(1.0 + 1e-3);
    let mut a = BigReal::from_f64(guess, prec);
    let (mut ha, mut oa) = eval(&a)?;
    let grow = ha > 0.0;
    let mut b = a.clone();
    let (mut hb, mut ob) = (ha, oa.clone());
    for _ in 0..80 {
        let d = (&b - 1i64) * if grow { 1.5 } else { 1.0 / 1.5 };
        b = d + 1i64;
        let r = eval(&b)?;
        hb = r.0;
        ob = r.1;
        if (hb > 0.0) != (ha > 0.0) {
            break;
        }
        a = b.clone();
        ha = hb;
        oa = ob.clone();
    }
    if (hb > 0.0) == (ha > 0.0) {
        return Err(Error::BracketNotFound("energy bracket for the target coupling".into()));
    }
    // Illinois regula falsi on e1
    let mut side = 0i32;
    for _ in 0..cfg.max_iterations {
        let width = ((&b - &a) / &b).abs().to_f64();
        if width <= tol {
            break;
        }
        let c = &b - BigReal::from_f64(hb, prec) * (&b - &a) / BigReal::from_f64(hb - ha, prec);
        let (hc, oc) = eval(&c)?;
        if (hc > 0.0) == (hb > 0.0) {
            if side == 1 {
                ha *= 0.5;
            }
            side = 1;
        } else {
            a = b.clone();
            ha = hb;
            oa = ob.clone();
            side = -1;
        }
        b = c;
        hb = hc;
        ob = oc;
        if hc == 0.0 {
            break;
        }
    }
    Ok(if ha.abs() < hb.abs() { oa } else { ob })
}

/// Ground-state energy at rho = 1.
pub fn tune_ground_rho1(g: &BigReal, n_coeffs: usize, cfg: &TuneConfig, tol: f64) -> Result<TuneOutcome> {
    ground_energy_at(&BigReal::one(cfg.precision_bits), g, n_coeffs, cfg, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// Prefactor coefficients c_0..c_{n-1} (as powers of x) and the excitation energy E_q.
///
/// Odd sector: c_1 = 1, c_3 = -tau, E_q = 6 tau - 4 a_1. Even sector: c_0 = 1, c_2 = -tau,
/// E_q = 2 tau. `w` holds a_1, a_2, ... and must reach index n/2.
pub fn prefactor_coeffs(w: &[BigReal], parity: Parity, tau: &BigReal, n: usize) -> (Vec<BigReal>, BigReal) {
    let prec = tau.prec();
    let zero = BigReal::zero(prec);
    let eq = match parity {
        Parity::Odd => tau * 6i64 - &w[0] * 4i64,
        Parity::Even => tau * 2i64,
    };
    let mut c = vec![zero.clone(); n.max(4)];
    let o = parity.offset();
    c[o] = BigReal::one(prec);
    c[o + 2] = -tau.clone();
    let mut k = o + 2;
    while k + 2 < n {
        // (k+2)(k+1) c_{k+2} = -(4 a_1 k + E_q) c_k - 4 sum_{m>=2} m a_m (k+2-2m) c_{k+2-2m}
        let mut acc = (&w[0] * (4 * k) as i64 + &eq) * &c[k];
        let mut m = 2;
        while 2 * m <= k + 2 {
            let j = k + 2 - 2 * m;
            if j >= o && !c[j].is_zero() {
                acc += &w[m - 1] * &c[j] * (4 * m * j) as i64;
            }
            m += 1;
        }
        c[k + 2] = -acc / ((k + 2) * (k + 1)) as i64;
        k += 2;
    }
    c.truncate(n);
    (c, eq)
}

/// Streams U_N(lambda) = sum_n c_n lambda^{alpha n} / Gamma(alpha n + 1) over one parity sector.
struct ExcitedProbe {
    kernel: PowerKernel,
    lambdas: Vec<BigReal>,
    terms: usize,
}

impl ExcitedProbe {
    fn new(parity: Parity, terms: usize, cfg: &TuneConfig) -> Result<Self> {
        let alpha = BigReal::from_f64(cfg.excited_alpha, cfg.precision_bits);
        let kernel = PowerKernel::linear(&alpha, parity.offset(), 2, terms, BigReal::zero(cfg.precision_bits))?;
        Ok(Self { kernel, lambdas: cfg.lambdas(), terms })
    }

    fn stream(&self, c: &[BigReal], cfg: &TuneConfig, mut visit: impl FnMut(f64, f64) -> bool) -> Result<()> {
        for chunk in self.lambdas.chunks(par::batch_size()) {
            let sums = par::try_map(chunk, |l| {
                let s = self.kernel.partial_sums(c, l)?;
                Ok::<_, Error>((s[self.terms - 1].clone(), s[self.terms - 2].clone()))
            })?;
            for (l, (u, up)) in chunk.iter().zip(sums) {
                if ((&u - &up) / &up).abs() > cfg.sigma {
                    return Ok(());
                }
                if !visit(l.to_f64(), u.to_f64()) {
                    return Ok(());
                }
            }
        }
        Ok(())
    }
}

/// Sign of the first runaway of a curve that should level off: the first point where |u(l)|
/// exceeds `factor` times the largest |u| seen up to l/2. Power-law starts and bounded
/// oscillations never qualify; the exp(x^3)-type growth of a mistuned prefactor always does.
pub fn growth_verdict(points: &[(f64, f64)], factor: f64) -> Verdict {
    let mut g = Growth::new(factor);
    points.iter().find_map(|&(l, u)| g.push(l, u)).unwrap_or(Verdict::Flat)
}

struct Growth {
    factor: f64,
    seen: Vec<(f64, f64)>,
    ref_idx: usize,
    ref_max: f64,
}

impl Growth {
    fn new(factor: f64) -> Self {
        Self { factor, seen: Vec::new(), ref_idx: 0, ref_max: 0.0 }
    }

    fn push(&mut self, l: f64, u: f64) -> Option<Verdict> {
        while self.ref_idx < self.seen.len() && self.seen[self.ref_idx].0 <= 0.5 * l {
            self.ref_max = self.ref_max.max(self.seen[self.ref_idx].1);
            self.ref_idx += 1;
        }
        self.seen.push((l, u.abs()));
        if self.ref_max > 0.0 && u.abs() > self.factor * self.ref_max {
            Some(if u > 0.0 { Verdict::Increasing } else { Verdict::Decreasing })
        } else {
            None
        }
    }
}

/// One excited level found by [`tune_excited`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitedLevel {
    pub parity: Parity,
    /// Tuned -c_3 (odd) or -c_2 (even) with c_1 = 1 (odd) or c_0 = 1 (even), in the ground
    /// state's computational normalization.
    pub tau: BigReal,
    pub tau_low: BigReal,
    pub tau_high: BigReal,
    /// Excitation energy E_q = E - E_0 in the computational normalization and at the ground
    /// state's target coupling.
    pub e_q_raw: BigReal,
    pub e_q: BigReal,
    /// Real zeros of the resummed prefactor on the whole axis, when counted.
    pub nodes: Option<usize>,
    pub n_terms: usize,
}

struct ExcitedTuner<'a> {
    parity: Parity,
    w: Vec<BigReal>,
    scale: BigReal,
    cfg: &'a TuneConfig,
    terms: usize,
    probe: ExcitedProbe,
}

impl<'a> ExcitedTuner<'a> {
    fn new(parity: Parity, ground: &TuneOutcome, terms: usize, cfg: &'a TuneConfig) -> Result<Self> {
        let prec = cfg.precision_bits;
        let a1 = ground.a1().with_prec(prec);
        let scale = a1.abs().recip();
        let a = |v: &BigReal, k: i32| v.with_prec(prec) * scale.powi(k);
        let (ca1, ca2, ca3) = (a(&a1, 1), a(&ground.a2(prec), 2), a(&ground.a3, 3));
        let w = w_coeffs(&ca1, &ca2, &ca3, terms + 3);
        let probe = ExcitedProbe::new(parity, terms, cfg)?;
        Ok(Self { parity, w, scale, cfg, terms, probe })
    }

    fn grow(&mut self) -> Result<bool> {
        if 2 * self.terms > self.cfg.max_coeffs {
            return Ok(false);
        }
        self.terms *= 2;
        let w = &self.w;
        self.w = w_coeffs(&w[0], &w[1], &w[2], self.terms + 3);
        self.probe = ExcitedProbe::new(self.parity, self.terms, self.cfg)?;
        Ok(true)
    }

    /// Sector coefficients in canonical units for a raw tau.
    fn coeffs(&self, tau: &BigReal) -> Vec<BigReal> {
        let t = tau * &self.scale;
        let o = self.parity.offset();
        let (c, _) = prefactor_coeffs(&self.w, self.parity, &t, 2 * self.terms + o);
        c.into_iter().skip(o).step_by(2).collect()
    }

    fn verdict_at(&self, tau: &BigReal) -> Result<Verdict> {
        let c = self.coeffs(tau);
        let mut g = Growth::new(self.cfg.growth_factor);
        let mut out = Verdict::Flat;
        self.probe.stream(&c, self.cfg, |l, u| match g.push(l, u) {
            Some(v) => {
                out = v;
                false
            }
            None => true,
        })?;
        Ok(out)
    }

    fn verdict(&mut self, tau: &BigReal) -> Result<Verdict> {
        loop {
            let v = self.verdict_at(tau)?;
            if v != Verdict::Flat || !self.grow()? {
                return Ok(v);
            }
        }
    }
}

/// Finds every excited level of one parity with tau inside `bracket`.
///
/// tau is scanned on `cfg.excited_scan` equally spaced points; each change between increasing
/// and decreasing verdicts is bisected to width `tol`. Levels come back in ascending tau. The
/// ground state comes from [`tune_ground`] and fixes the normalization of tau and E_q.
pub fn tune_excited(
    parity: Parity,
    bracket: (&BigReal, &BigReal),
    ground: &TuneOutcome,
    n_terms: usize,
    cfg: &TuneConfig,
    tol: f64,
) -> Result<Vec<ExcitedLevel>> {
    let prec = cfg.precision_bits;
    let (lo, hi) = (bracket.0.with_prec(prec), bracket.1.with_prec(prec));
    if !(lo < hi) {
        return Err(Error::InvalidArgument("tau bracket must satisfy low < high".into()));
    }
    if n_terms < 4 || cfg.excited_scan < 2 {
        return Err(Error::InvalidArgument("need at least 4 terms and 2 scan points".into()));
    }
    let mut t = ExcitedTuner::new(parity, ground, n_terms, cfg)?;
    let m = cfg.excited_scan;
    let mut scan: Vec<(BigReal, Verdict)> = Vec::with_capacity(m);
    for i in 0..m {
        let tau = &lo + (&hi - &lo) * (i as f64 / (m - 1) as f64);
        let v = t.verdict(&tau)?;
        scan.push((tau, v));
    }
    let decided: Vec<&(BigReal, Verdict)> = scan.iter().filter(|(_, v)| *v != Verdict::Flat).collect();
    if decided.len() < 2 {
        return Err(Error::Indeterminate("no increasing/decreasing verdicts in the tau scan".into()));
    }
    let mut levels = Vec::new();
    for pair in decided.windows(2) {
        let (a, va) = pair[0];
        let (b, vb) = pair[1];
        if va == vb {
            continue;
        }
        let (mut l, mut h) = (a.clone(), b.clone());
        let mut it = 0;
        while (&h - &l).to_f64() > tol {
            it += 1;
            if it > cfg.max_iterations {
                return Err(Error::AccuracyUnreachable(format!("tau bisection did not converge in {it} steps")));
            }
            let mid = (&l + &h) / 2i64;
            match t.verdict(&mid)? {
                v if v == *va => l = mid,
                Verdict::Flat => {
                    return Err(Error::AccuracyUnreachable(format!(
                        "prefactor curve flat at tau = {} with {} terms",
                        mid.to_sig_string(16),
                        t.terms
                    )))
                }
                _ => h = mid,
            }
        }
        let tau = (&l + &h) / 2i64;
        let a1 = ground.a1().with_prec(prec);
        let e_q_raw = match parity {
            Parity::Odd => &tau * 6i64 - &a1 * 4i64,
            Parity::Even => &tau * 2i64,
        };
        let e_q = &e_q_raw * (&ground.g / &ground.g_raw).cbrt();
        levels.push(ExcitedLevel {
            parity,
            tau,
            tau_low: l,
            tau_high: h,
            e_q_raw,
            e_q,
            nodes: None,
            n_terms: t.terms,
        });
    }
    Ok(levels)
}

/// Sector coefficients (all powers of x, zeros included) of the prefactor for a tuned level.
pub fn excited_prefactor(level: &ExcitedLevel, ground: &TuneOutcome, n: usize, prec: u32) -> Vec<BigReal> {
    let a1 = ground.a1().with_prec(prec);
    let w = w_coeffs(&a1, &ground.a2(prec), &ground.a3.with_prec(prec), n / 2 + 3);
    prefactor_coeffs(&w, level.parity, &level.tau.with_prec(prec), n).0
}
