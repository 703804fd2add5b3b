//! Regeneration of the reference tables, row by row, with pass/fail flags against embedded values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::real::BigReal;
use crate::resum::{AsymptoticSeries, ResumConfig, WARN_NO_FLAT};
use crate::singularity::{fit_pole, pole_correction, Frame, PoleConfig};
use crate::spectrum::{
    b2_series, bender_wu_energy, coupling_from_b2, excited_infinite_detail, infinite_coupling_detail,
    semiclassical_point,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableName {
    /// Ground energy resummed in the coupling.
    G,
    /// Coupling from the semi-classical expansion.
    H,
    /// Excited-level infinite-coupling coefficients.
    Einf,
    /// Coupling from the shifted semi-classical expansion.
    Hshifted,
    /// Pole-corrected shifted couplings.
    Error,
}

impl std::str::FromStr for TableName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "g" => TableName::G,
            "h" => TableName::H,
            "einf" => TableName::Einf,
            "hshifted" => TableName::Hshifted,
            "error" => TableName::Error,
            _ => return Err(Error::InvalidArgument(format!("unknown table {s}"))),
        })
    }
}

/// Couplings at which the ground energy is known to 7-8 figures, with those energies.
pub const G_BEST: [(&str, &str); 13] = [
    ("0.0578320", "1.0397505"),
    ("0.1345815", "1.0846523"),
    ("0.2370183", "1.1359237"),
    ("0.3755570", "1.1952286"),
    ("0.5667201", "1.2649111"),
    ("0.8379430", "1.3483997"),
    ("1.2375945", "1.4509525"),
    ("1.8579267", "1.5811388"),
    ("2.8946902", "1.7541160"),
    ("4.8319442", "2.0000000"),
    ("9.1926555", "2.3904572"),
    ("23.5025564", "3.1622777"),
    ("206.0985278", "6.3245553"),
];

/// Reference L_30 values of the coupling resummation.
pub const G_L30: [f64; 13] = [
    1.0397406, 1.0846489, 1.1359213, 1.1952265, 1.2649090, 1.3483970, 1.4509422, 1.5810649, 1.7536476,
    1.9974138, 2.3766424, 3.0767794, 5.1098167,
];

pub const HBARS: [&str; 13] = [
    "0.05", "0.10", "0.15", "0.20", "0.25", "0.30", "0.35", "0.40", "0.45", "0.50", "0.55", "0.60", "0.65",
];

/// Reference g_est of the semi-classical resummation.
pub const H_G_EST: [f64; 13] = [
    0.0578315, 0.1345810, 0.2370176, 0.3755562, 0.5667191, 0.8379415, 1.2375925, 1.8579236, 2.8946853,
    4.8319353, 9.1926365, 23.5024991, 206.0979166,
];

/// Reference (b3_est, b3_best) for q = 1..10.
pub const EINF: [(f64, f64); 10] = [
    (-1.722251, -1.722249),
    (-4.020691, -4.020850),
    (-6.654020, -6.654572),
    (-9.555955, -9.557404),
    (-12.681877, -12.686239),
    (-16.000874, -16.012209),
    (-19.489826, -19.514237),
    (-23.130233, -23.176133),
    (-26.906049, -26.984993),
    (-30.803510, -30.930247),
];

/// Reference (g_est, Err %) of the shifted resummation.
pub const HSHIFTED: [(f64, f64); 13] = [
    (0.0578329, 0.002),
    (0.1345734, 0.006),
    (0.2372547, 0.100),
    (0.3763874, 0.221),
    (0.5689119, 0.387),
    (0.8426714, 0.564),
    (1.2471800, 0.775),
    (1.8763800, 0.993),
    (2.9298231, 1.214),
    (4.9010160, 1.429),
    (9.3469363, 1.678),
    (23.9503681, 1.905),
    (210.5377762, 2.154),
];

/// Reference (g_corr, resum err, corrected err, relative err) of the pole correction.
pub const ERROR: [(f64, f64, f64, f64); 13] = [
    (0.057833, 0.00165, 0.00002, 90.0),
    (0.134613, 0.00600, 0.00023, 26.0),
    (0.237378, 0.09976, 0.00152, 66.0),
    (0.376543, 0.22112, 0.00263, 84.0),
    (0.568924, 0.38674, 0.00389, 99.0),
    (0.842246, 0.56430, 0.00514, 110.0),
    (1.243168, 0.77452, 0.00450, 172.0),
    (1.866679, 0.99322, 0.00471, 211.0),
    (2.908286, 1.21370, 0.00470, 258.0),
    (4.864863, 1.42948, 0.00681, 210.0),
    (9.237419, 1.67830, 0.00487, 345.0),
    (23.666373, 1.90537, 0.00697, 273.0),
    (207.519940, 2.15394, 0.00690, 312.0),
];

pub const E_INF_RESUMMED: f64 = 1.0603632150;
pub const E_INF_EXACT: f64 = 1.06036209;

/// True when x agrees with `reference` to `digits` significant figures.
pub fn sig_match(x: f64, reference: f64, digits: i32) -> bool {
    if reference == 0.0 {
        return x.abs() < 10f64.powi(-digits);
    }
    let e = reference.abs().log10().floor() as i32;
    (x - reference).abs() <= 0.5 * 10f64.powi(e - digits + 1) * (1.0 + 1e-9)
}

/// Fixed-point rendering with `digits` significant figures.
pub fn display(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    let dec = (digits as i32 - 1 - e).max(0) as usize;
    format!("{x:.dec$}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub cells: Vec<String>,
    pub pass: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: TableName,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    /// Checks spanning several rows.
    pub checks: Vec<(String, bool)>,
}

impl Table {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.1)
    }

    pub fn to_csv(&self) -> String {
        let quote = |s: &str| if s.contains(',') || s.contains('"') { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() };
        let mut out = self.columns.join(",");
        out.push_str(",pass,note\n");
        for r in &self.rows {
            let cells: Vec<String> = r.cells.iter().map(|c| quote(c)).collect();
            out.push_str(&format!("{},{},{}\n", cells.join(","), r.pass, quote(&r.note)));
        }
        for (name, ok) in &self.checks {
            out.push_str(&format!("# check,{},{}\n", quote(name), ok));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serialization cannot fail")
    }
}

fn cols(c: &[&str]) -> Vec<String> {
    c.iter().map(|s| s.to_string()).collect()
}

fn failed_row(width: usize, lead: String, e: &Error) -> TableRow {
    let mut cells = vec![lead];
    cells.resize(width, String::new());
    TableRow { cells, pass: false, note: e.to_string() }
}

fn big(s: &str, prec: u32) -> BigReal {
    BigReal::parse(s, prec).expect("embedded constant parses")
}

fn table_g(cfg: &ResumConfig) -> Table {
    let columns = cols(&["g", "alpha_m", "lambda_m", "l_n", "l_n_display", "l_n_reference", "e_best", "error_pct", "no_flat_warning"]);
    let idx: Vec<usize> = (0..G_BEST.len()).collect();
    let rows = par::map(&idx, |&i| {
        let (gs, eb) = G_BEST[i];
        let g = big(gs, cfg.precision_bits);
        match bender_wu_energy(&g, cfg) {
            Err(e) => failed_row(columns.len(), gs.into(), &e),
            Ok(r) => {
                let res = r.resum.as_ref().expect("coupling resummation carries its curve");
                let l = r.e.to_f64();
                let best: f64 = eb.parse().expect("embedded constant parses");
                let err = 100.0 * (l - best).abs() / best;
                let warned = res.warnings.iter().any(|w| w == WARN_NO_FLAT);
                let (pass, note) = if i < 7 {
                    (sig_match(l, G_L30[i], 5), "L_N to 5 figures")
                } else if i >= 10 {
                    (warned && err > 0.5, "no-flat warning and error above 0.5%")
                } else {
                    (true, "not gated")
                };
                TableRow {
                    cells: vec![
                        gs.into(),
                        display(res.alpha_used.to_f64(), 5),
                        display(res.lambda_used.to_f64(), 5),
                        r.e.to_string(),
                        display(l, 8),
                        display(G_L30[i], 8),
                        eb.into(),
                        format!("{err:.5}"),
                        warned.to_string(),
                    ],
                    pass,
                    note: note.into(),
                }
            }
        }
    });
    Table { name: TableName::G, columns, rows, checks: vec![] }
}

fn table_h(cfg: &ResumConfig, shifted: bool) -> Table {
    let columns = cols(&["hbar", "alpha_m", "lambda_m", "b2", "g_est", "g_est_display", "g_est_reference", "g_best", "error"]);
    let idx: Vec<usize> = (0..HBARS.len()).collect();
    let rows = par::map(&idx, |&i| {
        let h = big(HBARS[i], cfg.precision_bits);
        match semiclassical_point(&h, cfg, shifted) {
            Err(e) => failed_row(columns.len(), HBARS[i].into(), &e),
            Ok(p) => {
                let g = p.g.to_f64();
                let best: f64 = G_BEST[i].0.parse().expect("embedded constant parses");
                let rel = (g - best).abs() / best;
                let (reference, pass, err, note) = if shifted {
                    let (r, e_ref) = HSHIFTED[i];
                    let pct = 100.0 * rel;
                    let ok = sig_match(g, r, 5) && pct <= 1.3 * e_ref;
                    (r, ok, format!("{pct:.3}"), format!("Err % vs reference {e_ref}"))
                } else {
                    let r = H_G_EST[i];
                    let ok = sig_match(g, r, 6) && rel <= 5e-6;
                    (r, ok, format!("{:.2}", 1e6 * rel), "Err in 1e-4 %".to_string())
                };
                TableRow {
                    cells: vec![
                        HBARS[i].into(),
                        display(p.resum.alpha_used.to_f64(), 5),
                        display(p.resum.lambda_used.to_f64(), 5),
                        display(p.b2.to_f64(), 8),
                        p.g.to_string(),
                        display(g, 8),
                        display(reference, 8),
                        G_BEST[i].0.into(),
                        err,
                    ],
                    pass,
                    note,
                }
            }
        }
    });
    Table { name: if shifted { TableName::Hshifted } else { TableName::H }, columns, rows, checks: vec![] }
}

fn table_einf(cfg: &ResumConfig) -> Table {
    let columns = cols(&["q", "alpha_m", "lambda_m", "b3_est", "b3_est_display", "b3_est_reference", "b3_best", "error_pct"]);
    let e_inf = match infinite_coupling_detail(cfg) {
        Ok((e, _)) => e,
        Err(e) => {
            let rows = (1..=10).map(|q| failed_row(columns.len(), q.to_string(), &e)).collect();
            return Table { name: TableName::Einf, columns, rows, checks: vec![] };
        }
    };
    let qs: Vec<usize> = (1..=10).collect();
    let res = par::map(&qs, |&q| excited_infinite_detail(q, cfg, &e_inf));
    let mut errs = Vec::new();
    let rows = qs
        .iter()
        .zip(res)
        .map(|(&q, r)| match r {
            Err(e) => failed_row(columns.len(), q.to_string(), &e),
            Ok((b3, _, rr)) => {
                let (reference, best) = EINF[q - 1];
                let v = b3.to_f64();
                let err = 100.0 * ((v - best) / best).abs();
                errs.push(err);
                TableRow {
                    cells: vec![
                        q.to_string(),
                        display(rr.alpha_used.to_f64(), 5),
                        display(rr.lambda_used.to_f64(), 6),
                        b3.to_string(),
                        display(v, 7),
                        display(reference, 7),
                        display(best, 7),
                        format!("{err:.4}"),
                    ],
                    pass: sig_match(v, reference, 5),
                    note: "b3 to 5 figures".into(),
                }
            }
        })
        .collect();
    let monotone = errs.len() == 10 && errs.windows(2).all(|w| w[1] >= w[0]);
    Table { name: TableName::Einf, columns, rows, checks: vec![("error grows with q".into(), monotone)] }
}

/// Pole-fit settings used for the corrected shifted couplings.
pub fn error_pole_config(cfg: &ResumConfig) -> PoleConfig {
    PoleConfig {
        n: cfg.n,
        p: cfg.p,
        precision_bits: cfg.precision_bits,
        lambda_min: 0.02,
        lambda_max: 4.0,
        samples: 400,
        trust: cfg.sigma_fraction(),
        alpha_min: 0.6,
        alpha_max: 3.0,
        alpha_points: 13,
        alpha_tol: 1e-5,
        ..PoleConfig::default()
    }
}

fn table_error(cfg: &ResumConfig) -> Table {
    let columns = cols(&["g_best", "alpha_t", "g_corr", "resum_err_pct", "corrected_err_pct", "relative_err", "g_corr_reference"]);
    let pcfg = error_pole_config(cfg);
    let idx: Vec<usize> = (0..HBARS.len()).collect();
    let rows = par::map(&idx, |&i| {
        let gb = G_BEST[i].0;
        let run = || -> Result<TableRow> {
            let prec = cfg.precision_bits;
            let h = big(HBARS[i], prec);
            let p = semiclassical_point(&h, cfg, true)?;
            let series = AsymptoticSeries::from_scalar(&*b2_series(cfg.n)?, prec, "b2(hbar)");
            let s0 = h.recip();
            let pole = fit_pole(&series, &s0, Frame::Shifted, &pcfg)?;
            let c = pole_correction(&series, &s0, &p.resum.alpha_used, &p.resum.lambda_used, &pole, Frame::Shifted, &pcfg)?;
            let g_corr = coupling_from_b2(&h, &c.corrected_value).to_f64();
            let best: f64 = gb.parse().expect("embedded constant parses");
            let raw_err = 100.0 * (p.g.to_f64() - best).abs() / best;
            let corr_err = 100.0 * (g_corr - best).abs() / best;
            let factor = raw_err / corr_err;
            let (g_ref, _, corr_ref, _) = ERROR[i];
            Ok(TableRow {
                cells: vec![
                    gb.into(),
                    display(pole.alpha_t.to_f64(), 5),
                    display(g_corr, 7),
                    format!("{raw_err:.5}"),
                    format!("{corr_err:.5}"),
                    format!("{factor:.0}"),
                    display(g_ref, 7),
                ],
                pass: corr_err <= 2.0 * corr_ref && factor >= 50.0,
                note: "leading-order single pole pair".into(),
            })
        };
        run().unwrap_or_else(|e| failed_row(columns.len(), gb.into(), &e))
    });
    Table { name: TableName::Error, columns, rows, checks: vec![] }
}

/// Regenerates one table; rows are computed in parallel and returned in reference order.
pub fn compute_table(name: TableName, cfg: &ResumConfig) -> Result<Table> {
    cfg.validate()?;
    Ok(match name {
        TableName::G => table_g(cfg),
        TableName::H => table_h(cfg, false),
        TableName::Einf => table_einf(cfg),
        TableName::Hshifted => table_h(cfg, true),
        TableName::Error => table_error(cfg),
    })
}
