//! `recur`: return-time statistics for powers of Haar-random unitary
//! matrices. Exact Toeplitz determinants, large-N expansions, saddle-point
//! approximations and first-return Monte Carlo behind one command line.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use recur_core::montecarlo::{
    self, ExperimentConfig, FirstReturnRecord, McmcParams, Model, TimeKind,
};
use recur_core::toeplitz::{self, LogProb};
use recur_core::{abia, asymptotics, validate, windows, Error};

mod io;

use io::fmt_f64;

/// `println!` that exits quietly when stdout's consumer closes the pipe.
macro_rules! outln {
    ($($arg:tt)*) => {
        crate::io::out(&format!($($arg)*))
    };
}

#[derive(Parser)]
#[command(
    name = "recur",
    version,
    about = "Return-time statistics for powers of Haar-random unitary matrices"
)]
struct Cli {
    /// Worker threads for scans and Monte Carlo (default: available
    /// parallelism; the RECUR_THREADS environment variable overrides this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format for single-result commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    Leading,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Cue,
    Iid,
}

#[derive(Clone, Copy, ValueEnum)]
enum TimeArg {
    Continuous,
    Discrete,
}

#[derive(Subcommand)]
enum Command {
    /// Return-window geometry: regime, intervals and total measure.
    Windows {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        eps: f64,
    },
    /// Exact strong-return log-probability (Toeplitz determinant).
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        t: f64,
    },
    /// Large-N expansion of the strong-return log-probability.
    Asympt {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Order::Full)]
        order: Order,
    },
    /// Saddle-point (ABIA) value of (1/N^2) ln P.
    Abia {
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        t: f64,
        /// Also print the optimal filling fractions.
        #[arg(long)]
        fractions: bool,
    },
    /// Weak-return tail estimate.
    Weak {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Real-part-return tail estimate.
    Real {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Threshold time t_c with sinc(pi t_c) = 1 - delta.
    Threshold {
        #[arg(long)]
        delta: f64,
    },
    /// Order-of-magnitude estimate of the first real-part return time.
    Recurrence {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Sweep t and emit CSV rows (one per grid point and method).
    Scan {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long = "t-min")]
        t_min: f64,
        #[arg(long = "t-max")]
        t_max: f64,
        #[arg(long = "t-step")]
        t_step: f64,
        /// Comma-separated list from {exact, asympt, abia}.
        #[arg(long, default_value = "exact")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// First-return Monte Carlo experiment; emits one CSV row per sample.
    McFirstReturn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        samples: usize,
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, value_enum)]
        time: TimeArg,
        #[arg(long)]
        seed: u64,
        #[arg(long = "horizon-mult", default_value_t = 1.0)]
        horizon_mult: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponential fit of a recorded first-return CSV.
    McFit {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run the cross-validation battery (add --acceptance for the slow
    /// Monte Carlo and large-N checks).
    Validate {
        #[arg(long)]
        acceptance: bool,
    },
}

enum CliError {
    Core(Error),
    Io(std::io::Error),
    Parse(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let threads = std::env::var("RECUR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(k) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
        {
            eprintln!("recur: could not size the worker pool: {e}");
        }
    }

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Core(e)) => {
            eprintln!("recur: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
        Err(CliError::Io(e)) => {
            eprintln!("recur: io error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Parse(msg)) => {
            eprintln!("recur: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Windows { t, eps } => cmd_windows(*t, *eps, cli.format),
        Command::Exact { n, eps, t } => {
            let lp = toeplitz::log_prob_exact(*n, *t, *eps)?;
            print_log_prob("exact", &lp, &[("n", *n as f64), ("t", *t), ("eps", *eps)], cli.format)
        }
        Command::Asympt { n, eps, t, order } => {
            let lp = asympt_value(*n, *t, *eps, *order)?;
            print_log_prob(
                "asympt",
                &lp,
                &[("n", *n as f64), ("t", *t), ("eps", *eps)],
                cli.format,
            )
        }
        Command::Abia { eps, t, fractions } => cmd_abia(*t, *eps, *fractions, cli.format),
        Command::Weak { n, t, delta } => {
            let lp = asymptotics::weak_log_prob(*n, *t, *delta)?;
            print_log_prob(
                "weak",
                &lp,
                &[("n", *n as f64), ("t", *t), ("delta", *delta)],
                cli.format,
            )
        }
        Command::Real { n, t, delta } => {
            let mut lp = asymptotics::real_log_prob(*n, *t, *delta)?;
            if let Ok(exact) = asymptotics::real_log_prob_erfc(*n, *t, *delta) {
                lp.diagnostics
                    .push(format!("erfc path: log_prob = {}", fmt_f64(exact.log_value)));
            }
            print_log_prob(
                "real",
                &lp,
                &[("n", *n as f64), ("t", *t), ("delta", *delta)],
                cli.format,
            )
        }
        Command::Threshold { delta } => {
            let tc = asymptotics::threshold_time(*delta)?;
            match cli.format {
                Format::Text => outln!("t_c: {}", fmt_f64(tc)),
                Format::Json => {
                    io::write_json(None, &json!({ "delta": delta, "t_c": tc }))?;
                }
            }
            Ok(())
        }
        Command::Recurrence { n, delta } => {
            let est = asymptotics::recurrence_estimate(*n, *delta)?;
            let a = asymptotics::sinc_root(*delta)?;
            match cli.format {
                Format::Text => {
                    outln!("sinc_root: {}", fmt_f64(a));
                    outln!("estimate: {}", fmt_f64(est));
                }
                Format::Json => {
                    io::write_json(
                        None,
                        &json!({ "n": n, "delta": delta, "sinc_root": a, "estimate": est }),
                    )?;
                }
            }
            Ok(())
        }
        Command::Scan {
            n,
            eps,
            t_min,
            t_max,
            t_step,
            method,
            out,
        } => cmd_scan(*n, *eps, *t_min, *t_max, *t_step, method, out.as_deref()),
        Command::McFirstReturn {
            n,
            eps,
            samples,
            model,
            time,
            seed,
            horizon_mult,
            out,
        } => {
            let cfg = ExperimentConfig {
                n: *n,
                eps: *eps,
                samples: *samples,
                model: match model {
                    ModelArg::Cue => Model::CueMcmc,
                    ModelArg::Iid => Model::IidUniform,
                },
                time: match time {
                    TimeArg::Continuous => TimeKind::Continuous,
                    TimeArg::Discrete => TimeKind::Discrete,
                },
                seed: *seed,
                horizon_mult: *horizon_mult,
                mcmc: Some(McmcParams::for_size(*n)),
            };
            let records = montecarlo::run_first_return(&cfg)?;
            let rows: Vec<Vec<String>> = records
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    vec![
                        i.to_string(),
                        fmt_f64(r.tau),
                        fmt_f64(r.normalized),
                        (r.horizon_hit as u8).to_string(),
                    ]
                })
                .collect();
            io::write_csv(
                out.as_deref(),
                &["sample_id", "tau", "normalized", "horizon_hit"],
                &rows,
            )?;
            Ok(())
        }
        Command::McFit { input } => cmd_mc_fit(input, cli.format),
        Command::Validate { acceptance } => cmd_validate(*acceptance),
    }
}

fn asympt_value(n: usize, t: f64, eps: f64, order: Order) -> Result<LogProb, Error> {
    match order {
        Order::Leading => {
            if !(eps > 0.0 && eps < 1.0 && t > 0.0) {
                return Err(Error::domain(format!("invalid t = {t}, eps = {eps}")));
            }
            let over_n2 = asymptotics::widom_leading_over_n2(t, eps);
            let mut lp = LogProb {
                log_value: (n * n) as f64 * over_n2,
                method: toeplitz::Method::Asymptotic,
                diagnostics: Vec::new(),
            };
            lp.diagnostics.push("leading order N^2 term only".to_string());
            Ok(lp)
        }
        Order::Full => {
            if t >= eps && t <= 2.0 - eps {
                asymptotics::widom_log_prob(n, t, eps)
            } else if (t - t.round()).abs() < 1e-9 && t.round() >= 1.0 {
                asymptotics::integer_time_log_prob(n, t.round() as u32, eps)
            } else {
                Err(Error::domain(format!(
                    "asymptotic expansions cover eps <= t <= 2 - eps and integer t (t = {t})"
                )))
            }
        }
    }
}

fn print_log_prob(
    command: &str,
    lp: &LogProb,
    params: &[(&str, f64)],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Text => {
            outln!("log_prob: {}", fmt_f64(lp.log_value));
            outln!("prob: {}", fmt_f64(lp.prob()));
            outln!("method: {}", lp.method);
            for d in &lp.diagnostics {
                outln!("note: {d}");
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("command".into(), json!(command));
            for (k, v) in params {
                obj.insert((*k).into(), json!(v));
            }
            obj.insert("log_prob".into(), json!(lp.log_value));
            obj.insert("prob".into(), json!(lp.prob()));
            obj.insert("method".into(), json!(lp.method.to_string()));
            obj.insert("diagnostics".into(), json!(lp.diagnostics));
            io::write_json(None, &serde_json::Value::Object(obj))?;
        }
    }
    Ok(())
}

fn cmd_windows(t: f64, eps: f64, format: Format) -> Result<(), CliError> {
    let w = windows::build_window(t, eps)?;
    let measure = windows::window_measure(&w);
    let regime = match w.regime {
        windows::Regime::Initial => ("initial".to_string(), 0u32),
        windows::Regime::Bulk(k) => ("bulk".to_string(), k),
        windows::Regime::Boundary(k) => ("boundary".to_string(), k),
    };
    match format {
        Format::Text => {
            outln!("regime: {} (k = {})", regime.0, regime.1);
            outln!("measure: {}", fmt_f64(measure));
            outln!("lo,hi");
            for &(lo, hi) in &w.intervals {
                outln!("{},{}", fmt_f64(lo), fmt_f64(hi));
            }
        }
        Format::Json => {
            io::write_json(
                None,
                &json!({
                    "t": t,
                    "eps": eps,
                    "regime": regime.0,
                    "k": regime.1,
                    "measure": measure,
                    "intervals": w.intervals,
                }),
            )?;
        }
    }
    Ok(())
}

fn cmd_abia(t: f64, eps: f64, fractions: bool, format: Format) -> Result<(), CliError> {
    let value = abia::abia_log_prob_over_n2(t, eps)?;
    let fr = if fractions && t > 2.0 - eps {
        Some(abia::solve(&abia::build_system(t, eps)?)?)
    } else {
        None
    };
    match format {
        Format::Text => {
            outln!("log_prob_over_n2: {}", fmt_f64(value));
            if let Some(sol) = &fr {
                let list = sol
                    .filling_fractions
                    .iter()
                    .map(|f| fmt_f64(*f))
                    .collect::<Vec<_>>()
                    .join(",");
                outln!("fractions: {list}");
                outln!("valid: {}", sol.valid);
            } else if fractions {
                outln!("fractions: 1 (single interval)");
            }
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("command".into(), json!("abia"));
            obj.insert("t".into(), json!(t));
            obj.insert("eps".into(), json!(eps));
            obj.insert("log_prob_over_n2".into(), json!(value));
            obj.insert("method".into(), json!(toeplitz::Method::Abia.to_string()));
            if let Some(sol) = &fr {
                obj.insert("fractions".into(), json!(sol.filling_fractions));
                obj.insert("valid".into(), json!(sol.valid));
            }
            io::write_json(None, &serde_json::Value::Object(obj))?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ScanMethod {
    Exact,
    Asympt,
    Abia,
}

fn cmd_scan(
    n: usize,
    eps: f64,
    t_min: f64,
    t_max: f64,
    t_step: f64,
    method: &str,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if !(t_step > 0.0) || t_max < t_min {
        return Err(CliError::Core(Error::domain(
            "need t-step > 0 and t-max >= t-min".to_string(),
        )));
    }
    if method.contains("exact") && n > toeplitz::DEFAULT_SIZE_CAP {
        return Err(CliError::Core(Error::DimensionTooLarge {
            n,
            cap: toeplitz::DEFAULT_SIZE_CAP,
        }));
    }
    let mut methods = Vec::new();
    for part in method.split(',') {
        match part.trim() {
            "exact" => methods.push(ScanMethod::Exact),
            "asympt" => methods.push(ScanMethod::Asympt),
            "abia" => methods.push(ScanMethod::Abia),
            other => {
                return Err(CliError::Parse(format!(
                    "unknown method '{other}' (expected exact, asympt or abia)"
                )))
            }
        }
    }

    let steps = ((t_max - t_min) / t_step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| t_min + i as f64 * t_step).collect();
    let n2 = (n * n) as f64;

    let rows: Vec<Vec<String>> = grid
        .par_iter()
        .flat_map_iter(|&t| {
            let mut local = Vec::new();
            for &m in &methods {
                let pair = match m {
                    ScanMethod::Exact => toeplitz::log_prob_exact(n, t, eps)
                        .ok()
                        .map(|lp| (lp.log_value, lp.log_value / n2, "exact")),
                    ScanMethod::Asympt => asympt_value(n, t, eps, Order::Full)
                        .ok()
                        .map(|lp| (lp.log_value, lp.log_value / n2, "asympt")),
                    ScanMethod::Abia => abia::abia_log_prob_over_n2(t, eps)
                        .ok()
                        .map(|v| (n2 * v, v, "abia")),
                };
                if let Some((log, over_n2, name)) = pair {
                    local.push(vec![
                        fmt_f64(t),
                        fmt_f64(log),
                        fmt_f64(over_n2),
                        name.to_string(),
                    ]);
                }
            }
            local
        })
        .collect();

    io::write_csv(out, &["t", "log_prob", "log_prob_over_n2", "method"], &rows)?;
    Ok(())
}

fn cmd_mc_fit(input: &std::path::Path, format: Format) -> Result<(), CliError> {
    let text = fs::read_to_string(input)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Parse("empty input file".to_string()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let tau_idx = cols.iter().position(|c| *c == "tau");
    let norm_idx = cols
        .iter()
        .position(|c| *c == "normalized")
        .ok_or_else(|| CliError::Parse("missing 'normalized' column".to_string()))?;
    let hit_idx = cols.iter().position(|c| *c == "horizon_hit");

    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |idx: usize| -> Result<f64, CliError> {
            fields
                .get(idx)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| CliError::Parse(format!("bad row {} in {input:?}", lineno + 2)))
        };
        let normalized = parse(norm_idx)?;
        let tau = tau_idx.map(parse).transpose()?.unwrap_or(normalized);
        let horizon_hit = match hit_idx {
            Some(i) => parse(i)? != 0.0,
            None => false,
        };
        records.push(FirstReturnRecord {
            tau,
            normalized,
            candidates_checked: 0,
            horizon_hit,
        });
    }
    let fit = montecarlo::fit_exponential(&records)?;
    match format {
        Format::Text => {
            outln!("lambda_hat: {}", fmt_f64(fit.lambda_hat));
            outln!("ks_statistic: {}", fmt_f64(fit.ks_statistic));
            outln!("ks_p_value: {}", fmt_f64(fit.ks_p_value));
            outln!("n_samples: {}", fit.n_samples);
            outln!("censored: {}", fit.censored);
        }
        Format::Json => {
            io::write_json(
                None,
                &json!({
                    "lambda_hat": fit.lambda_hat,
                    "ks_statistic": fit.ks_statistic,
                    "ks_p_value": fit.ks_p_value,
                    "n_samples": fit.n_samples,
                    "censored": fit.censored,
                }),
            )?;
        }
    }
    Ok(())
}

fn cmd_validate(acceptance: bool) -> Result<(), CliError> {
    let mut checks = validate::invariant_checks();
    if acceptance {
        checks.extend(validate::acceptance_checks());
    }
    let mut failures = 0usize;
    let mut report = String::new();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        if !c.passed {
            failures += 1;
        }
        let _ = writeln!(report, "{status}  {} [{}]", c.name, c.detail);
    }
    outln!("{}", report.trim_end());
    outln!("{} checks, {} failed", checks.len(), failures);
    if failures > 0 {
        return Err(CliError::Core(Error::domain(format!(
            "{failures} validation check(s) failed"
        ))));
    }
    Ok(())
}
