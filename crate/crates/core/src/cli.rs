//! Command-line surface: `analyze`, `predict`, `remez`, `compare`, `bridge`.
//!
//! Every command reads an interval system (`{"endpoints": [...]}`) and an
//! optional weight (`{"type": "unit"}`, `{"type": "poly", "roots": [...]}`
//! or `{"type": "sampled", "grid": [...], "values": [...]}`). JSON goes to
//! `--out` or stdout; grid samples go to `--csv` as `x,value` rows.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or configuration
//! error. Failures print `{"error": {"kind", "message"}}` on stderr.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::AsymptoticModel;
use crate::l2_bridge::{bridge_compare, gap_point_agreement, pell_verify, BridgePart, EdgeClassWeight};
use crate::potential::PotentialTable;
use crate::remez::{minimax_monic, RemezConfig, RemezResult};
use crate::szego::{SzegoData, Weight};
use crate::{json, Error, IntervalSystem};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "CHEBBAND_THREADS";

#[derive(Debug, Parser)]
#[command(name = "chebband", version, about = "Weighted Chebyshev polynomials on several intervals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Predict,
    Remez,
    Compare,
    Bridge,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity, harmonic measures, period matrix and Szegő data.
    Analyze(RunArgs),
    /// Predicted deviation, gap points and zero counts per degree.
    Predict(RunArgs),
    /// Weighted monic minimax polynomial by Remez exchange.
    Remez(RunArgs),
    /// CSV of Remez against prediction over a list of degrees.
    Compare(RunArgs),
    /// L∞ against edge-class L2 deviations.
    Bridge(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Interval system JSON.
    #[arg(long)]
    pub system: PathBuf,
    /// Weight JSON; the unit weight when omitted.
    #[arg(long)]
    pub weight: Option<PathBuf>,
    /// Single degree.
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma separated degrees.
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
    /// Remez stopping tolerance on the relative certificate gap.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file for the JSON (CSV for `compare`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of grid points per band (per hull for `remez`).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output file for grid samples.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Summary JSON of `compare`; stderr when omitted.
    #[arg(long)]
    pub summary: Option<PathBuf>,
    /// Use `x^{2n+1}` and the `(a_R − x)` class in `bridge`.
    #[arg(long)]
    pub odd: bool,
}

/// Validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub system: IntervalSystem,
    pub weight: Weight,
    pub degrees: Vec<usize>,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub odd: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Usage,
    Numerical,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl Into<String>) -> Self {
        CliError {
            kind: ErrorKind::Usage,
            message: m.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Numerical => 1,
            ErrorKind::Usage => 2,
        }
    }

    pub fn to_json(&self) -> String {
        json::to_string(&json!({"error": {"kind": self.kind, "message": self.message}})).expect("serializable")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let kind = match e {
            Error::InvalidSystem(_) | Error::InvalidWeight(_) | Error::InvalidArgument(_) => ErrorKind::Usage,
            _ => ErrorKind::Numerical,
        };
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::usage(format!("{what} {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{what} {}: {e}", path.display())))
}

impl RunConfig {
    pub fn from_args(command: CommandKind, a: &RunArgs) -> CliResult<Self> {
        let system: IntervalSystem = read_json(&a.system, "system")?;
        let weight = match &a.weight {
            Some(p) => read_json(p, "weight")?,
            None => Weight::Unit,
        };
        let mut degrees: Vec<usize> = a.n.into_iter().chain(a.n_list.iter().copied()).collect();
        if command != CommandKind::Analyze && degrees.is_empty() {
            return Err(CliError::usage("a degree is required (--n or --n-list)"));
        }
        if degrees.contains(&0) {
            return Err(CliError::usage("degrees must be at least 1"));
        }
        degrees.dedup();
        if !(a.tol > 0.0 && a.tol < 1.0) {
            return Err(CliError::usage("--tol must lie in (0, 1)"));
        }
        if a.grid == Some(0) {
            return Err(CliError::usage("--grid must be positive"));
        }
        if a.csv.is_some() && (a.grid.is_none() || degrees.len() != 1) {
            return Err(CliError::usage("--csv needs --grid and exactly one degree"));
        }
        Ok(RunConfig {
            command,
            system,
            weight,
            degrees,
            tol: a.tol,
            out: a.out.clone(),
            grid: a.grid,
            csv: a.csv.clone(),
            summary: a.summary.clone(),
            odd: a.odd,
        })
    }

    fn remez_config(&self) -> RemezConfig {
        RemezConfig {
            tol: self.tol,
            ..RemezConfig::default()
        }
    }
}

/// Primary output plus `x,value` grid samples.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub body: String,
    pub grid: Option<Vec<(f64, f64)>>,
    pub summary: Option<String>,
}

pub fn cmd_analyze(cfg: &RunConfig) -> CliResult<Output> {
    let table = PotentialTable::new(&cfg.system)?;
    let sz = SzegoData::new(&table, &cfg.weight)?;
    let v = json!({
        "table": table.export(),
        "log_moments": sz.log_moments(),
        "w_inf": sz.w_inf(),
    });
    Ok(Output {
        body: json::to_string(&v).expect("serializable"),
        ..Output::default()
    })
}

fn band_grid(sys: &IntervalSystem, m: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..sys.l())
        .flat_map(|k| (0..m).map(move |i| (k, std::f64::consts::PI * (i as f64 + 0.5) / m as f64)))
        .map(|(k, t)| sys.band_point(k, t))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

pub fn cmd_predict(cfg: &RunConfig) -> CliResult<Output> {
    let table = PotentialTable::new(&cfg.system)?;
    let sz = SzegoData::new(&table, &cfg.weight)?;
    let mut preds = Vec::new();
    let mut grid = None;
    for &n in &cfg.degrees {
        let model = AsymptoticModel::new(&sz, n)?;
        let sol = model.solution();
        preds.push(json!({
            "n": n,
            "deviation": model.predict_deviation()?,
            "tau": sol.tau,
            "gamma": sol.gamma,
            "sigma": sol.sigma,
            "c": sol.c,
            "endpoint_flags": sol.endpoint_flags,
            "inversion_residual": sol.residual,
            "zero_counts": model.zero_counts()?,
        }));
        if let (Some(m), Some(_)) = (cfg.grid, &cfg.csv) {
            let rows = band_grid(&cfg.system, m)
                .into_iter()
                .map(|x| Ok((x, model.predict_on_e(x)?)))
                .collect::<crate::Result<Vec<_>>>()?;
            grid = Some(rows);
        }
    }
    let v = json!({"system": cfg.system, "predictions": preds});
    Ok(Output {
        body: json::to_string(&v).expect("serializable"),
        grid,
        summary: None,
    })
}

fn remez_json(r: &RemezResult) -> Value {
    json!({
        "n": r.n,
        "coeffs": r.poly,
        "deviation": r.deviation,
        "vp_lower": r.vp_lower,
        "certificate_gap": r.certificate_gap(),
        "alternation": r.alternation,
        "zeros_per_band": r.zeros_per_band,
        "gap_zeros": r.gap_zeros,
        "zeros": r.zeros,
        "iterations": r.iterations,
        "converged": r.converged,
    })
}

pub fn cmd_remez(cfg: &RunConfig) -> CliResult<Output> {
    let table = PotentialTable::new(&cfg.system)?;
    let rc = cfg.remez_config();
    let results = cfg
        .degrees
        .iter()
        .map(|&n| minimax_monic(&cfg.system, &cfg.weight, n, table.omega_inf(), &rc))
        .collect::<crate::Result<Vec<_>>>()?;
    let grid = match (cfg.grid, &cfg.csv) {
        (Some(m), Some(_)) => {
            let (lo, hi) = (cfg.system.left(), cfg.system.right());
            let r = &results[0];
            Some(
                (0..=m)
                    .map(|i| {
                        let x = lo + (hi - lo) * i as f64 / m as f64;
                        (x, r.eval(x))
                    })
                    .collect(),
            )
        }
        _ => None,
    };
    let body = if results.len() == 1 {
        json::to_string(&remez_json(&results[0]))
    } else {
        json::to_string(&Value::Array(results.iter().map(remez_json).collect()))
    }
    .expect("serializable");
    Ok(Output {
        body,
        grid,
        summary: None,
    })
}

/// One row of `compare`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub n: usize,
    pub e_remez: Option<f64>,
    pub e_predicted: Option<f64>,
    pub ratio: Option<f64>,
    /// Per gap: distance of the Remez gap zero to an interior `c_j`.
    pub gap_zero_distance: Vec<Option<f64>>,
    pub zero_count_match: Option<bool>,
    pub error: Option<String>,
}

fn compare_row(table: &PotentialTable, sz: &SzegoData, cfg: &RunConfig, n: usize) -> CompareRow {
    let gaps = table.l() - 1;
    let run = || -> crate::Result<CompareRow> {
        let r = minimax_monic(table.system(), sz.weight(), n, table.omega_inf(), &cfg.remez_config())?;
        let model = AsymptoticModel::new(sz, n)?;
        let pred = model.predict_deviation()?;
        let counts = model.zero_counts()?;
        let dist = counts
            .gap_zeros
            .iter()
            .zip(&r.gap_zeros)
            .map(|(c, zs)| {
                let c = (*c)?;
                zs.iter().map(|z| (z - c).abs()).min_by(f64::total_cmp)
            })
            .collect();
        let matched = counts
            .per_band
            .iter()
            .zip(&r.zeros_per_band)
            .all(|(p, q)| *p == *q as i64);
        Ok(CompareRow {
            n,
            e_remez: Some(r.deviation),
            e_predicted: Some(pred),
            ratio: Some(r.deviation / pred),
            gap_zero_distance: dist,
            zero_count_match: Some(matched),
            error: None,
        })
    };
    run().unwrap_or_else(|e| CompareRow {
        n,
        e_remez: None,
        e_predicted: None,
        ratio: None,
        gap_zero_distance: vec![None; gaps],
        zero_count_match: None,
        error: Some(e.to_string()),
    })
}

fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let t: usize = v
            .parse()
            .ok()
            .filter(|t| *t > 0)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer")))?;
        b = b.num_threads(t);
    }
    b.build().map_err(|e| CliError::usage(e.to_string()))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

/// Rows of `compare` in the order of `cfg.degrees`.
pub fn compare_rows(cfg: &RunConfig) -> CliResult<Vec<CompareRow>> {
    let table = PotentialTable::new(&cfg.system)?;
    let sz = SzegoData::new(&table, &cfg.weight)?;
    let pool = thread_pool()?;
    Ok(pool.install(|| {
        cfg.degrees
            .par_iter()
            .map(|&n| compare_row(&table, &sz, cfg, n))
            .collect()
    }))
}

/// Non-increasing along the sequence, ignoring missing entries.
fn non_increasing(v: impl Iterator<Item = Option<f64>>) -> bool {
    let v: Vec<f64> = v.flatten().collect();
    v.windows(2).all(|w| w[1] <= w[0])
}

pub fn cmd_compare(cfg: &RunConfig) -> CliResult<Output> {
    let rows = compare_rows(cfg)?;
    let gaps = cfg.system.l() - 1;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["n".to_string(), "e_remez".into(), "e_predicted".into(), "ratio".into()];
    header.extend((1..=gaps).map(|j| format!("gap_zero_distance_{j}")));
    header.extend(["zero_count_match".to_string(), "error".into()]);
    let csv_err = |e: csv::Error| CliError::usage(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for r in &rows {
        let mut rec = vec![r.n.to_string(), fmt_opt(r.e_remez), fmt_opt(r.e_predicted), fmt_opt(r.ratio)];
        rec.extend(r.gap_zero_distance.iter().map(|d| fmt_opt(*d)));
        rec.push(r.zero_count_match.map(|b| b.to_string()).unwrap_or_default());
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| CliError::usage(e.to_string()))?).expect("UTF-8");
    let summary = json!({
        "rows": rows.len(),
        "failures": rows.iter().filter(|r| r.error.is_some()).count(),
        "ratio_improves": non_increasing(rows.iter().map(|r| r.ratio.map(|q| (q - 1.0).abs()))),
        "gap_distance_improves": (0..gaps)
            .map(|j| non_increasing(rows.iter().map(|r| r.gap_zero_distance[j])))
            .collect::<Vec<_>>(),
        "zero_counts_match": rows.iter().all(|r| r.zero_count_match != Some(false)),
    });
    Ok(Output {
        body,
        grid: None,
        summary: Some(json::to_string(&summary).expect("serializable")),
    })
}

pub fn cmd_bridge(cfg: &RunConfig) -> CliResult<Output> {
    let table = PotentialTable::new(&cfg.system)?;
    let part = if cfg.odd { BridgePart::Odd } else { BridgePart::Even };
    let mut reports = Vec::new();
    for &n in &cfg.degrees {
        let rep = bridge_compare(&table, &cfg.weight, n, part)?;
        let mask = rep.delta_mask.unwrap_or(rep.sigma_mask);
        let w = EdgeClassWeight::new(&cfg.system, mask, cfg.odd, &cfg.weight.prepare(&cfg.system)?)?;
        let pell = pell_verify(&w, n)?;
        let agreement = gap_point_agreement(&table, &w, n)?;
        reports.push(json!({
            "report": rep,
            "pell": pell,
            "gap_point_agreement": agreement,
        }));
    }
    let v = if reports.len() == 1 { reports.pop().unwrap() } else { Value::Array(reports) };
    Ok(Output {
        body: json::to_string(&v).expect("serializable"),
        ..Output::default()
    })
}

pub fn execute(cfg: &RunConfig) -> CliResult<Output> {
    match cfg.command {
        CommandKind::Analyze => cmd_analyze(cfg),
        CommandKind::Predict => cmd_predict(cfg),
        CommandKind::Remez => cmd_remez(cfg),
        CommandKind::Compare => cmd_compare(cfg),
        CommandKind::Bridge => cmd_bridge(cfg),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn grid_csv(rows: &[(f64, f64)]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::usage(e.to_string());
    w.write_record(["x", "value"]).map_err(err)?;
    for (x, v) in rows {
        w.write_record([format!("{x:.16e}"), format!("{v:.16e}")]).map_err(err)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| CliError::usage(e.to_string()))?).expect("UTF-8"))
}

fn run_parsed(cli: Cli) -> CliResult<()> {
    let (kind, args) = match &cli.command {
        Command::Analyze(a) => (CommandKind::Analyze, a),
        Command::Predict(a) => (CommandKind::Predict, a),
        Command::Remez(a) => (CommandKind::Remez, a),
        Command::Compare(a) => (CommandKind::Compare, a),
        Command::Bridge(a) => (CommandKind::Bridge, a),
    };
    let cfg = RunConfig::from_args(kind, args)?;
    let out = execute(&cfg)?;
    match &cfg.out {
        Some(p) => write_file(p, &out.body)?,
        None => print!("{}", out.body),
    }
    if let (Some(rows), Some(p)) = (&out.grid, &cfg.csv) {
        write_file(p, &grid_csv(rows)?)?;
    }
    if let Some(s) = &out.summary {
        match &cfg.summary {
            Some(p) => write_file(p, s)?,
            None => eprint!("{s}"),
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name); returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprint!("{}", e.to_json());
            e.exit_code()
        }
    }
}
