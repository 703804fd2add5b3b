use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use borel_core::resum::{
    resum, select_alpha_max, AlphaGrid, AsymptoticSeries, BorelKernel, CurveSample, LambdaCurve,
    LambdaGrid, ResumConfig, ResumResult,
};
use borel_core::series::{bender_wu_expand, excited_expand, semiclassical_expand, ScalarSeries};
use borel_core::singularity::{
    count_level_nodes, fit_pole, locate_zero_real, locate_zero_s_plane, pole_correction, test_function_series,
    test_function_zero, Frame, PoleConfig, PrefactorConfig, RealZeroConfig,
};
use borel_core::spectrum::{
    b2_series, b3_series, bender_wu_energy, coupling_from_b2, energy_series, infinite_coupling_detail,
    semiclassical_point, tune_excited, tune_ground, tune_ground_rho1, w_coeffs, Parity, TuneConfig, COUPLING_SCALE,
};
use borel_core::tables::{compute_table, error_pole_config, TableName};
use borel_core::{BigReal, Error, ExactRational};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Parser)]
#[command(name = "borel", version, about = "Modified Borel summation of anharmonic-oscillator series")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Working precision in bits (>= 128).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// Highest coefficient index N.
    #[arg(long = "N", global = true)]
    n: Option<usize>,
    /// Exponential re-expansion truncation P.
    #[arg(long = "P", global = true)]
    p: Option<usize>,
    /// Sigma rule tolerance in percent.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    /// min,max,step
    #[arg(long, global = true, value_parser = triple::<f64>)]
    alpha_grid: Option<(f64, f64, f64)>,
    /// min,max,points
    #[arg(long, global = true, value_parser = triple::<f64>)]
    lambda_grid: Option<(f64, f64, f64)>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

fn triple<T: std::str::FromStr>(s: &str) -> Result<(T, T, T), String> {
    let v: Vec<&str> = s.split(',').collect();
    if v.len() != 3 {
        return Err("expected three comma-separated values".into());
    }
    let p = |x: &str| x.trim().parse::<T>().map_err(|_| format!("cannot parse {x}"));
    Ok((p(v[0])?, p(v[1])?, p(v[2])?))
}

/// Settings shared by every command; mirrors the JSON config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    precision_bits: u32,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "P")]
    p: usize,
    sigma_percent: f64,
    alpha_grid: AlphaGrid,
    lambda_grid: LambdaGrid,
    truncation_floor: bool,
    output_format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let r = ResumConfig::default();
        Self {
            precision_bits: r.precision_bits,
            n: r.n,
            p: r.p,
            sigma_percent: r.sigma_percent,
            alpha_grid: r.alpha_grid,
            lambda_grid: r.lambda_grid,
            truncation_floor: r.truncation_floor,
            output_format: None,
        }
    }
}

impl RunConfig {
    fn resolve(g: &Global) -> Result<Self, Fail> {
        let mut c = match &g.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Fail::Io(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| Fail::Invalid(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = g.precision_bits {
            c.precision_bits = v;
        }
        if let Some(v) = g.n {
            c.n = v;
        }
        if let Some(v) = g.p {
            c.p = v;
        }
        if let Some(v) = g.sigma {
            c.sigma_percent = v;
        }
        if let Some((min, max, step)) = g.alpha_grid {
            c.alpha_grid = AlphaGrid { min, max, step };
        }
        if let Some((min, max, points)) = g.lambda_grid {
            if points < 2.0 || points.fract() != 0.0 {
                return Err(Fail::Invalid("lambda grid point count must be an integer >= 2".into()));
            }
            c.lambda_grid = LambdaGrid { min, max, points: points as usize };
        }
        if g.format.is_some() {
            c.output_format = g.format;
        }
        c.resum().validate().map_err(Fail::from)?;
        Ok(c)
    }

    fn resum(&self) -> ResumConfig {
        ResumConfig {
            n: self.n,
            p: self.p,
            sigma_percent: self.sigma_percent,
            alpha_grid: self.alpha_grid,
            lambda_grid: self.lambda_grid,
            precision_bits: self.precision_bits,
            truncation_floor: self.truncation_floor,
            ..ResumConfig::default()
        }
    }

    fn tune(&self) -> TuneConfig {
        TuneConfig { precision_bits: self.precision_bits.max(TuneConfig::default().precision_bits), ..TuneConfig::default() }
    }

    fn format_or(&self, d: Format) -> Format {
        self.output_format.unwrap_or(d)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact coefficient series (JSON unless --format csv).
    Series {
        #[arg(value_enum)]
        kind: SeriesKind,
        #[arg(long)]
        order: usize,
        /// Excited level (excited only).
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
    /// Resum one expansion at one point.
    Resum {
        #[arg(long, value_enum)]
        expansion: Expansion,
        /// Coupling g (expansion g) or hbar (h, h-shifted).
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        /// Excited level (expansion einf).
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Fixed alpha instead of alpha_M.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Tune the free coefficient against the large-x boundary condition.
    Tune {
        #[command(subcommand)]
        which: TuneCmd,
    },
    /// Zero and pole analysis.
    Poles {
        #[command(subcommand)]
        which: PolesCmd,
    },
    /// Regenerate a reference table with per-row pass flags.
    Table {
        #[arg(value_enum)]
        name: TableArg,
    },
    /// Coefficient-ratio and lambda-curve dumps for plotting.
    Diagnose {
        #[command(subcommand)]
        which: DiagnoseCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesKind {
    BenderWu,
    Semiclassical,
    Excited,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expansion {
    G,
    H,
    HShifted,
    Einf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    G,
    H,
    Einf,
    Hshifted,
    Error,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Odd,
    Even,
}

#[derive(Subcommand)]
enum TuneCmd {
    /// Ground state: a3 such that the resummed T(lambda) settles at -sqrt(g)/18.
    Ground(GroundArgs),
    /// Excited states: tau values where the prefactor curve flips, with node counts.
    Excited {
        #[command(flatten)]
        ground: GroundArgs,
        #[arg(long, value_enum)]
        parity: ParityArg,
        /// Scan interval for tau.
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["LOW", "HIGH"])]
        bracket: Vec<f64>,
        /// Prefactor coefficients used by the growth verdict.
        #[arg(long, default_value_t = 60)]
        terms: usize,
    },
}

#[derive(Args)]
struct GroundArgs {
    #[arg(long)]
    g: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Fix a2 (rational, e.g. -1/4) instead of solving for rho = 1.
    #[arg(long, allow_hyphen_values = true)]
    a2: Option<String>,
    /// Sign of k = a1/a2 when a2 is fixed.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    k_sign: i32,
    /// W coefficients used by the verdict.
    #[arg(long, default_value_t = 30)]
    coeffs: usize,
}

#[derive(Subcommand)]
enum PolesCmd {
    /// s-plane zero of log(e^{x^3} + e^{-x^3}) by fixed-amplitude tuning of s0.
    TestFunction {
        #[arg(long, default_value_t = 0.74)]
        guess: f64,
        #[arg(long, default_value_t = 420)]
        terms: usize,
        #[arg(long, default_value_t = 40.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 160.0)]
        lambda_max: f64,
    },
    /// Zero locus of a detuned ground state as a3 varies (real-axis extrapolation).
    Locus {
        #[arg(long)]
        g: String,
        /// a3 values relative to the tuned one: a3 = a3* (1 + d).
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        detune: Vec<f64>,
        #[arg(long, default_value_t = 60)]
        terms: usize,
    },
    /// Pole-pair corrected coupling from the shifted semi-classical expansion.
    Correct {
        #[arg(long)]
        hbar: String,
    },
}

#[derive(Subcommand)]
enum DiagnoseCmd {
    /// |c_{n+1} / c_n| of the b2 coefficients.
    RatioPlot {
        #[arg(long)]
        order: usize,
    },
    /// L_N and L_{N-1} against lambda.
    Curve {
        #[arg(long, value_enum)]
        expansion: Expansion,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        hbar: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
    },
}

enum Fail {
    Invalid(String),
    Io(String),
    Bracket(String),
    Accuracy(String),
    Other(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) => Fail::Invalid(e.to_string()),
            Error::BracketNotFound(_) => Fail::Bracket(e.to_string()),
            Error::AccuracyUnreachable(_) => Fail::Accuracy(e.to_string()),
            other => Fail::Other(other.to_string()),
        }
    }
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Other(_) => 1,
            Fail::Invalid(_) => 2,
            Fail::Io(_) => 3,
            Fail::Bracket(_) => 4,
            Fail::Accuracy(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Invalid(m) | Fail::Io(m) | Fail::Bracket(m) | Fail::Accuracy(m) | Fail::Other(m) => m,
        }
    }
}

type Out = Result<(String, bool), Fail>;

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn real(s: &str, prec: u32) -> Result<BigReal, Fail> {
    BigReal::parse(s, prec).map_err(Fail::from)
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn series_json(s: &ScalarSeries) -> String {
    let mut t = s.to_json();
    t.push('\n');
    t
}

fn cmd_series(rc: &RunConfig, kind: SeriesKind, order: usize, q: usize) -> Out {
    let s = match kind {
        SeriesKind::BenderWu => bender_wu_expand(order.max(1) + 1, order.max(1))?.1.truncated(order),
        SeriesKind::Semiclassical => semiclassical_expand(3, order.max(1))?.1.truncated(order),
        SeriesKind::Excited => excited_expand(q as i64, q, order)?.1,
    };
    let text = match rc.format_or(Format::Json) {
        Format::Json => series_json(&s),
        Format::Csv => {
            let mut t = String::from("n,coeff\n");
            for (n, c) in s.coeffs.iter().enumerate() {
                t.push_str(&format!("{n},{c}\n"));
            }
            t
        }
    };
    Ok((text, true))
}

fn resum_json(value: &BigReal, r: &ResumResult, extra: serde_json::Value) -> String {
    pretty(json!({
        "value": value.to_string(),
        "alpha_used": r.alpha_used.to_string(),
        "lambda_used": r.lambda_used.to_string(),
        "warnings": r.warnings,
        "detail": extra,
    }))
}

fn cmd_resum(rc: &RunConfig, expansion: Expansion, at: Option<String>, q: usize, alpha: Option<f64>) -> Out {
    let cfg = ResumConfig { alpha, ..rc.resum() };
    let prec = cfg.precision_bits;
    let need = |what: &str| at.clone().ok_or_else(|| Fail::Invalid(format!("--at <{what}> is required")));
    let text = match expansion {
        Expansion::G => {
            let g = real(&need("g")?, prec)?;
            let r = bender_wu_energy(&g, &cfg)?;
            let rr = r.resum.expect("coupling resummation carries its curve");
            resum_json(&r.e, &rr, json!({ "quantity": "E", "g": g.to_string() }))
        }
        Expansion::H | Expansion::HShifted => {
            let h = real(&need("hbar")?, prec)?;
            let p = semiclassical_point(&h, &cfg, matches!(expansion, Expansion::HShifted))?;
            resum_json(&p.b2, &p.resum, json!({ "quantity": "b2", "E": p.e.to_string(), "g": p.g.to_string() }))
        }
        Expansion::Einf => {
            let (e_inf, r0) = infinite_coupling_detail(&cfg)?;
            if q == 0 {
                resum_json(&r0.value, &r0, json!({ "quantity": "b2(2/3)", "E_inf": e_inf.to_string() }))
            } else {
                let b3 = b3_series(q, cfg.n)?;
                let series = AsymptoticSeries::from_scalar(&b3, prec, "b3");
                let r = resum(&series, &(BigReal::from_int(3, prec) / 2i64), &cfg)?;
                let e_q = -(&r.value * &e_inf * 3i64 / 2i64);
                resum_json(&r.value, &r, json!({ "quantity": "b3(2/3)", "q": q, "E_q_inf": e_q.to_string() }))
            }
        }
    };
    Ok((text, true))
}

fn ground(rc: &RunConfig, a: &GroundArgs) -> Result<borel_core::spectrum::TuneOutcome, Fail> {
    let tcfg = rc.tune();
    let g = real(&a.g, tcfg.precision_bits)?;
    Ok(match &a.a2 {
        Some(s) => {
            let a2: ExactRational = s.parse().map_err(Fail::from)?;
            tune_ground(a.k_sign, &a2, &g, a.coeffs, &tcfg, a.tol)?
        }
        None => tune_ground_rho1(&g, a.coeffs, &tcfg, a.tol)?,
    })
}

fn ground_json(o: &borel_core::spectrum::TuneOutcome) -> serde_json::Value {
    json!({
        "a3": o.a3.to_string(),
        "E": o.e.to_string(),
        "rho": o.rho.to_string(),
        "g": o.g.to_string(),
        "E_raw": o.e_raw.to_string(),
        "rho_raw": o.rho_raw.to_string(),
        "g_raw": o.g_raw.to_string(),
        "a3_bracket": [o.state.a3_low.to_string(), o.state.a3_high.to_string()],
        "iterations": o.state.iterations,
        "coefficients": o.state.n_coeffs,
    })
}

fn cmd_tune(rc: &RunConfig, which: TuneCmd) -> Out {
    match which {
        TuneCmd::Ground(a) => {
            let o = ground(rc, &a)?;
            Ok((pretty(ground_json(&o)), true))
        }
        TuneCmd::Excited { ground: a, parity, bracket, terms } => {
            if bracket.len() != 2 || !(bracket[0] < bracket[1]) {
                return Err(Fail::Invalid("--bracket needs LOW < HIGH".into()));
            }
            let o = ground(rc, &a)?;
            let tcfg = rc.tune();
            let prec = tcfg.precision_bits;
            let parity = match parity {
                ParityArg::Odd => Parity::Odd,
                ParityArg::Even => Parity::Even,
            };
            let lo = BigReal::from_f64(bracket[0], prec);
            let hi = BigReal::from_f64(bracket[1], prec);
            let levels = tune_excited(parity, (&lo, &hi), &o, terms, &tcfg, a.tol)?;
            if levels.is_empty() {
                return Err(Fail::Bracket("no verdict flip inside the tau bracket".into()));
            }
            let pcfg = PrefactorConfig { precision_bits: prec, ..PrefactorConfig::default() };
            let out: Vec<serde_json::Value> = levels
                .iter()
                .map(|l| {
                    let nodes = count_level_nodes(l, &o, terms, 200, &pcfg);
                    json!({
                        "parity": l.parity,
                        "tau": l.tau.to_string(),
                        "tau_bracket": [l.tau_low.to_string(), l.tau_high.to_string()],
                        "E_q": l.e_q.to_string(),
                        "E_q_raw": l.e_q_raw.to_string(),
                        "E": (&l.e_q + &o.e).to_string(),
                        "nodes": nodes.as_ref().ok(),
                        "nodes_error": nodes.as_ref().err().map(|e| e.to_string()),
                    })
                })
                .collect();
            Ok((pretty(json!({ "ground": ground_json(&o), "levels": out })), true))
        }
    }
}

fn cmd_poles(rc: &RunConfig, which: PolesCmd) -> Out {
    let prec = rc.precision_bits;
    match which {
        PolesCmd::TestFunction { guess, terms, lambda_min, lambda_max } => {
            let cfg = PoleConfig {
                n: terms,
                p: (1.4 * lambda_max) as usize,
                precision_bits: prec.max(576),
                lambda_min,
                lambda_max,
                s0_tol: 1e-5,
                ..PoleConfig::default()
            };
            let w = test_function_series(terms, cfg.precision_bits);
            let pole = locate_zero_s_plane(&w, &BigReal::from_f64(guess, cfg.precision_bits), &cfg)?;
            let exact = test_function_zero(cfg.precision_bits);
            Ok((
                pretty(json!({
                    "s_real": pole.x_p.to_f64(),
                    "s_imag": pole.y_p.to_f64(),
                    "analytic": { "s_real": exact.re.to_f64(), "s_imag": -exact.im.to_f64() },
                    "fit": pole.fit,
                })),
                true,
            ))
        }
        PolesCmd::Locus { g, detune, terms } => {
            let tcfg = rc.tune();
            let tp = tcfg.precision_bits;
            let gg = real(&g, tp)?;
            let a2 = ExactRational::new(-1, 4);
            let o = tune_ground(1, &a2, &gg, 30, &tcfg, 1e-12)?;
            let mut csv = String::from("s_real,s_imag,a3\n");
            for d in detune {
                let a3 = &o.a3 * (1.0 + d);
                let w = w_coeffs(&o.a1(), &o.a2(tp), &a3, terms);
                let series = AsymptoticSeries::new(w, borel_core::resum::VariableKind::WEvenPowers, "W");
                let zcfg = RealZeroConfig { n: 2 * terms, precision_bits: tp, ..RealZeroConfig::default() };
                match locate_zero_real(&series, &zcfg)? {
                    Some(s) => csv.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", s.to_f64(), 0.0, a3.to_f64())),
                    None => csv.push_str(&format!(",,{:.12e}\n", a3.to_f64())),
                }
            }
            Ok((csv, true))
        }
        PolesCmd::Correct { hbar } => {
            let cfg = rc.resum();
            let h = real(&hbar, prec)?;
            let p = semiclassical_point(&h, &cfg, true)?;
            let series = AsymptoticSeries::from_scalar(&*b2_series(cfg.n)?, prec, "b2");
            let pcfg = error_pole_config(&cfg);
            let s0 = h.recip();
            let pole = fit_pole(&series, &s0, Frame::Shifted, &pcfg)?;
            let c = pole_correction(&series, &s0, &p.resum.alpha_used, &p.resum.lambda_used, &pole, Frame::Shifted, &pcfg)?;
            Ok((
                pretty(json!({
                    "hbar": hbar,
                    "alpha_t": pole.alpha_t.to_string(),
                    "g_raw": p.g.to_string(),
                    "g_corr": coupling_from_b2(&h, &c.corrected_value).to_string(),
                    "b2_raw": c.raw_value.to_string(),
                    "correction": c.correction.to_string(),
                    "b2_corrected": c.corrected_value.to_string(),
                    "order": "leading",
                })),
                true,
            ))
        }
    }
}

fn cmd_table(rc: &RunConfig, name: TableArg) -> Out {
    let name = match name {
        TableArg::G => TableName::G,
        TableArg::H => TableName::H,
        TableArg::Einf => TableName::Einf,
        TableArg::Hshifted => TableName::Hshifted,
        TableArg::Error => TableName::Error,
    };
    let t = compute_table(name, &rc.resum())?;
    let text = match rc.format_or(Format::Csv) {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json() + "\n",
    };
    Ok((text, t.passed()))
}

fn curve_setup(rc: &RunConfig, expansion: Expansion, g: Option<String>, hbar: Option<String>) -> Result<(AsymptoticSeries, BigReal), Fail> {
    let prec = rc.precision_bits;
    match expansion {
        Expansion::G => {
            let g = real(&g.ok_or_else(|| Fail::Invalid("--g is required".into()))?, prec)?;
            let scale = BigReal::from_int(COUPLING_SCALE, prec);
            let s = AsymptoticSeries::from_scalar(&*energy_series(rc.n)?, prec, "E(g)").scaled(&scale);
            Ok((s, &scale / &g))
        }
        Expansion::H => {
            let h = real(&hbar.ok_or_else(|| Fail::Invalid("--hbar is required".into()))?, prec)?;
            Ok((AsymptoticSeries::from_scalar(&*b2_series(rc.n)?, prec, "b2"), h.recip()))
        }
        _ => Err(Fail::Invalid("curve dumps support expansions g and h".into())),
    }
}

fn cmd_diagnose(rc: &RunConfig, which: DiagnoseCmd) -> Out {
    match which {
        DiagnoseCmd::RatioPlot { order } => {
            if order < 2 {
                return Err(Fail::Invalid("--order must be >= 2".into()));
            }
            let b2 = b2_series(order)?;
            let mut csv = String::from("n,ratio\n");
            for n in 1..order {
                let r = (b2.coeffs[n + 1].as_rational().clone() / b2.coeffs[n].as_rational()).abs();
                csv.push_str(&format!("{},{}\n", n, r.to_f64()));
            }
            Ok((csv, true))
        }
        DiagnoseCmd::Curve { expansion, g, hbar, alpha } => {
            let cfg = rc.resum();
            let (series, s0) = curve_setup(rc, expansion, g, hbar)?;
            let alpha = match alpha {
                Some(a) => BigReal::from_f64(a, cfg.precision_bits),
                None => select_alpha_max(&series, &s0, &cfg)?.0,
            };
            let k = BorelKernel::new(&series, &s0, &alpha, cfg.n, cfg.p)?;
            let grid = cfg.lambda_grid.values(cfg.precision_bits);
            let mut samples = Vec::with_capacity(grid.len());
            for l in grid {
                match k.eval(&l) {
                    Ok((a, b)) => samples.push(CurveSample { lambda: l, l_n: a, l_n_minus_1: b }),
                    Err(_) => break,
                }
            }
            let curve = LambdaCurve::new(samples).classified(cfg.flat_tol);
            let text = match rc.format_or(Format::Csv) {
                Format::Csv => curve.to_csv(),
                Format::Json => pretty(json!({ "alpha": alpha.to_string(), "curve": curve })),
            };
            Ok((text, true))
        }
    }
}

fn run(cli: Cli) -> Result<bool, Fail> {
    let rc = RunConfig::resolve(&cli.global)?;
    let (text, ok) = match cli.cmd {
        Cmd::Series { kind, order, q } => cmd_series(&rc, kind, order, q)?,
        Cmd::Resum { expansion, at, q, alpha } => cmd_resum(&rc, expansion, at, q, alpha)?,
        Cmd::Tune { which } => cmd_tune(&rc, which)?,
        Cmd::Poles { which } => cmd_poles(&rc, which)?,
        Cmd::Table { name } => cmd_table(&rc, name)?,
        Cmd::Diagnose { which } => cmd_diagnose(&rc, which)?,
    };
    emit(&text, &cli.global.out)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more rows failed tolerance");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
