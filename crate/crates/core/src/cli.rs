//! Command-line front end: each subcommand writes one CSV dataset and
//! re-derives its closed-form columns along an independent numerical path,
//! exiting non-zero when the two disagree.
//!
//! Exit codes: 0 success, 1 a cross-check exceeded its tolerance, 2 usage
//! error. CSV goes to `--out` or stdout; summaries and diagnostics go to
//! stderr. `GAUSSCLONE_THREADS` caps the worker pool. Results do not depend
//! on it.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::ensembles::Method;
use crate::error::{Error, Result};
use crate::estimation::{bayes_mse_theory, estimator_mse, Estimator, MIN_MSE_SAMPLES};
use crate::numerics::{linspace, logspace};
use crate::single_quad_cloner::{
    clone_fidelity, clone_line, clone_snr_plus, duan_value, fidelity_line, optimal_vsqz,
    optimal_vsqz_numeric, snr_plus, sum_snr_transfer, unity_gain_h, LineClonerConfig,
};
use crate::symmetric_cloner::{
    average_fidelity, max_average_fidelity, numeric_optimal_gain, optimal_gain, ClonerConfig,
};
use crate::teleportation::{
    crossing_scan, nocloning_lambda, nocloning_lambda_bisect, squeezing_db, variance_db,
};

pub const THREADS_ENV: &str = "GAUSSCLONE_THREADS";

pub const FBAR_TOL: f64 = 1e-6;
pub const LAMBDA_TOL: f64 = 1e-8;
pub const NOCLONE_TOL: f64 = 1e-9;
pub const LINE_TOL: f64 = 1e-12;
/// `|z|` above which an MSE row is flagged.
pub const MSE_Z_LIMIT: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(name = "gaussclone", version, about = "Optimal cloning of coherent states from finite Gaussian ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output CSV path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Significant digits in CSV fields, 6 to 17.
    #[arg(long, global = true, default_value_t = 12)]
    pub precision: usize,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Optimal gain and maximum average clone fidelity against ensemble width.
    Fbar(SigmaGrid),
    /// Entanglement needed for teleportation to reach the cloning limit.
    Noclone(SigmaGrid),
    /// Teleportation fidelity against the cloning limit at fixed lambda.
    Tele {
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[command(flatten)]
        grid: SigmaGrid,
    },
    /// Single-quadrature cloner over the injected squeezing.
    Singlequad {
        #[arg(long, default_value_t = 0.2)]
        v_min: f64,
        #[arg(long, default_value_t = 5.0)]
        v_max: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Monte Carlo mean-squared error of dual-homodyne estimators.
    Estimate {
        #[arg(long, default_value_t = 0.0)]
        sigma_min: f64,
        #[arg(long, default_value_t = 3.0)]
        sigma_max: f64,
        #[arg(long, default_value_t = 7)]
        steps: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Args)]
pub struct SigmaGrid {
    #[arg(long, default_value_t = 0.0)]
    pub sigma_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub sigma_max: f64,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
}

impl Default for SigmaGrid {
    fn default() -> Self {
        Self {
            sigma_min: 0.0,
            sigma_max: 10.0,
            steps: 201,
        }
    }
}

impl SigmaGrid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.sigma_min >= 0.0 && self.sigma_min < self.sigma_max && self.sigma_max.is_finite()) {
            return Err(Error::Usage(format!(
                "need 0 <= sigma-min < sigma-max, got {} and {}",
                self.sigma_min, self.sigma_max
            )));
        }
        if self.steps < 2 {
            return Err(Error::Usage(format!("steps must be at least 2, got {}", self.steps)));
        }
        Ok(linspace(self.sigma_min, self.sigma_max, self.steps))
    }
}

/// A validated invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out: Option<PathBuf>,
    pub precision: usize,
}

impl RunConfig {
    pub fn new(command: Command, out: Option<PathBuf>, precision: usize) -> Result<Self> {
        if !(6..=17).contains(&precision) {
            return Err(Error::Usage(format!("precision must be in [6, 17], got {precision}")));
        }
        Ok(Self { command, out, precision })
    }
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self {
            command: cli.command,
            out: cli.out,
            precision: cli.precision,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutput {
    pub csv: String,
    pub summary: Vec<String>,
    /// Cross-check violations; non-empty means exit code 1.
    pub failures: Vec<String>,
}

impl CommandOutput {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

/// `%g`-style formatting with `digits` significant digits, `.` as decimal
/// separator and no grouping.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct Table {
    precision: usize,
    text: String,
}

impl Table {
    fn new(header: &[&str], precision: usize) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { precision, text }
    }

    fn row(&mut self, fields: &[Field]) {
        let line: Vec<String> = fields
            .iter()
            .map(|f| match f {
                Field::Num(x) => format_sig(*x, self.precision),
                Field::Flag(b) => if *b { "1" } else { "0" }.to_string(),
            })
            .collect();
        let _ = writeln!(self.text, "{}", line.join(","));
    }
}

enum Field {
    Num(f64),
    Flag(bool),
}

use Field::{Flag, Num};

pub fn cmd_fbar(grid: &SigmaGrid, precision: usize) -> Result<CommandOutput> {
    let sigmas = grid.points()?;
    let rows: Vec<(f64, f64, f64, f64)> = sigmas
        .par_iter()
        .map(|&sigma| {
            let closed = max_average_fidelity(sigma);
            let numeric = numeric_optimal_gain(sigma, 40, 1e-10)?.value;
            Ok((sigma, optimal_gain(sigma), closed, numeric))
        })
        .collect::<Result<_>>()?;
    let mut out = CommandOutput::default();
    let mut table = Table::new(&["sigma", "optimal_G", "fbar_closed", "fbar_numeric", "abs_diff"], precision);
    for (sigma, g, closed, numeric) in rows {
        let diff = (closed - numeric).abs();
        if diff > FBAR_TOL {
            out.failures.push(format!("sigma={sigma}: |closed - numeric| = {diff:e} > {FBAR_TOL:e}"));
        }
        table.row(&[Num(sigma), Num(g), Num(closed), Num(numeric), Num(diff)]);
    }
    out.csv = table.text;
    Ok(out)
}

pub fn cmd_noclone(grid: &SigmaGrid, precision: usize) -> Result<CommandOutput> {
    let sigmas = grid.points()?;
    let rows: Vec<(f64, f64, f64)> = sigmas
        .par_iter()
        .map(|&sigma| Ok((sigma, nocloning_lambda(sigma), nocloning_lambda_bisect(sigma, 1e-14)?)))
        .collect::<Result<_>>()?;
    let mut out = CommandOutput::default();
    let mut table = Table::new(
        &["sigma", "lambda_closed", "lambda_bisect", "squeezing_dB", "variance_dB"],
        precision,
    );
    for (sigma, closed, bisect) in rows {
        let diff = (closed - bisect).abs();
        if diff >= LAMBDA_TOL {
            out.failures.push(format!("sigma={sigma}: |closed - bisect| = {diff:e}"));
        }
        let v_db = if sigma > 0.0 { variance_db(sigma)? } else { f64::NEG_INFINITY };
        table.row(&[Num(sigma), Num(closed), Num(bisect), Num(squeezing_db(closed)?), Num(v_db)]);
    }
    // the boundary at width 3 differs from that at variance 3
    out.summary.push(format!("lambda(sigma=3) = {:.6}", nocloning_lambda(3.0)));
    out.summary.push(format!("lambda(sigma^2=3) = {:.6}", nocloning_lambda(3f64.sqrt())));
    out.csv = table.text;
    Ok(out)
}

pub fn cmd_tele(lambda: f64, grid: &SigmaGrid, precision: usize) -> Result<CommandOutput> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Usage(format!("lambda must lie in [0, 1), got {lambda}")));
    }
    let sigmas = grid.points()?;
    let points = crossing_scan(lambda, &sigmas)?;
    let numeric: Vec<f64> = sigmas
        .par_iter()
        .map(|&sigma| {
            let cfg = ClonerConfig::new(optimal_gain(sigma))?;
            Ok(average_fidelity(cfg, sigma, Method::default())?.value)
        })
        .collect::<Result<_>>()?;
    let mut out = CommandOutput::default();
    let mut table = Table::new(&["sigma", "tele_F", "noclone_F", "above"], precision);
    for (p, q) in points.iter().zip(numeric) {
        let diff = (p.noclone_fidelity - q).abs();
        if diff > NOCLONE_TOL {
            out.failures.push(format!("sigma={}: no-cloning limit off by {diff:e} from quadrature", p.sigma));
        }
        table.row(&[Num(p.sigma), Num(p.tele_fidelity), Num(p.noclone_fidelity), Flag(p.above)]);
    }
    let below: Vec<f64> = points.iter().filter(|p| !p.above).map(|p| p.sigma).collect();
    out.summary.push(match (below.first(), below.last()) {
        (Some(lo), Some(hi)) => format!("lambda={lambda}: below the cloning limit for sigma in [{lo}, {hi}]"),
        _ => format!("lambda={lambda}: at or above the cloning limit on the whole grid"),
    });
    out.csv = table.text;
    Ok(out)
}

pub fn cmd_singlequad(v_min: f64, v_max: f64, steps: usize, precision: usize) -> Result<CommandOutput> {
    if !(v_min > 0.0 && v_min < v_max && v_max.is_finite()) {
        return Err(Error::Usage(format!("need 0 < v-min < v-max, got {v_min} and {v_max}")));
    }
    if steps < 2 {
        return Err(Error::Usage(format!("steps must be at least 2, got {steps}")));
    }
    let h = unity_gain_h();
    let mut out = CommandOutput::default();
    let mut table = Table::new(&["v_plus", "fidelity", "snr_plus", "duan_value", "sum_snr"], precision);
    for v in logspace(v_min, v_max, steps) {
        let cfg = LineClonerConfig::new(h, v)?;
        let f = fidelity_line(v)?;
        let snr = snr_plus(v)?;
        let sum = sum_snr_transfer(cfg)?;
        let duan = duan_value(&clone_line(0.0, cfg)?)?;
        let f_circuit = clone_fidelity(1.0, cfg)?;
        let snr_circuit = clone_snr_plus(cfg)?;
        if (f - f_circuit).abs() > LINE_TOL || (snr - snr_circuit).abs() > LINE_TOL || (sum - 1.0).abs() > LINE_TOL {
            out.failures.push(format!(
                "v_plus={v}: formula/circuit mismatch (F {f} vs {f_circuit}, SNR {snr} vs {snr_circuit}, sum {sum})"
            ));
        }
        table.row(&[Num(v), Num(f), Num(snr), Num(duan), Num(sum)]);
    }
    let (v_opt, f_opt) = optimal_vsqz();
    let numeric = optimal_vsqz_numeric(1e-12)?;
    if (numeric.argmax - v_opt).abs() > 1e-8 || (numeric.value - f_opt).abs() > 1e-10 {
        out.failures.push(format!(
            "numeric optimum ({}, {}) disagrees with ({v_opt}, {f_opt})",
            numeric.argmax, numeric.value
        ));
    }
    let opt = LineClonerConfig::new(h, v_opt)?;
    out.summary.push(format!("H = {h}"));
    out.summary.push(format!("optimal v_plus = {v_opt:.9} (numeric {:.9})", numeric.argmax));
    out.summary.push(format!("F_max = {f_opt:.9}"));
    out.summary.push(format!("snr_plus at optimum = {:.6}", snr_plus(v_opt)?));
    out.summary.push(format!("duan_value at optimum = {:.6}", duan_value(&clone_line(0.0, opt)?)?));
    out.csv = table.text;
    Ok(out)
}

pub fn cmd_estimate(grid: &SigmaGrid, samples: usize, seed: u64, precision: usize) -> Result<CommandOutput> {
    if samples < MIN_MSE_SAMPLES {
        return Err(Error::Usage(format!("samples must be at least {MIN_MSE_SAMPLES}, got {samples}")));
    }
    let sigmas = grid.points()?;
    let mut out = CommandOutput::default();
    let mut table = Table::new(&["sigma", "mse_bayes", "mse_naive", "mse_theory", "z_score"], precision);
    for sigma in sigmas {
        let bayes = estimator_mse(Estimator::Bayes, sigma, samples, seed)?;
        let naive = estimator_mse(Estimator::Naive, sigma, samples, seed)?;
        let theory = bayes_mse_theory(sigma);
        let diff = bayes.mse - theory;
        let z = if bayes.std_error > 0.0 { diff / bayes.std_error } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
        if z.abs() > MSE_Z_LIMIT {
            out.failures.push(format!("sigma={sigma}: z = {z}"));
        }
        table.row(&[Num(sigma), Num(bayes.mse), Num(naive.mse), Num(theory), Num(z)]);
    }
    out.csv = table.text;
    Ok(out)
}

pub fn run(config: &RunConfig) -> Result<CommandOutput> {
    let p = config.precision;
    match &config.command {
        Command::Fbar(grid) => cmd_fbar(grid, p),
        Command::Noclone(grid) => cmd_noclone(grid, p),
        Command::Tele { lambda, grid } => cmd_tele(*lambda, grid, p),
        Command::Singlequad { v_min, v_max, steps } => cmd_singlequad(*v_min, *v_max, *steps, p),
        Command::Estimate {
            sigma_min,
            sigma_max,
            steps,
            samples,
            seed,
        } => {
            let grid = SigmaGrid {
                sigma_min: *sigma_min,
                sigma_max: *sigma_max,
                steps: *steps,
            };
            cmd_estimate(&grid, *samples, *seed, p)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Entry point of the `gaussclone` binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let config = match RunConfig::new(cli.command, cli.out, cli.precision) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let output = match run(&config) {
        Ok(o) => o,
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            return 2;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &output.csv),
        None => std::io::stdout().lock().write_all(output.csv.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write CSV: {e}");
        return 1;
    }
    for line in &output.summary {
        eprintln!("{line}");
    }
    for line in &output.failures {
        eprintln!("cross-check failed: {line}");
    }
    output.exit_code()
}
