//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on runtime errors.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::crm::{sample_three_param_bp, BetaProcessParams, StickBreakingConfig, DEFAULT_WEIGHT_FLOOR};
use crate::error::{Error, Result};
use crate::experiment::{run_sweep, ExperimentConfig, SweepResult};
use crate::graphgen::{binarize, generate_with, PairOptions, DEFAULT_PAIR_SKIP};
use crate::io;
use crate::plot::loglog_scatter_svg;
use crate::powerlaw::{ccdf, fit_ccdf, fit_loglog, FitReport, FitScope, LogLogFit, PowerLawKind};
use crate::stats::summarize;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crmgg", version, about = "Random graphs from completely random measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a truncated (three-parameter) beta process and print its atoms.
    Measure(MeasureArgs),
    /// Draw a multigraph from a measure file and print its edge list.
    Graph(GraphArgs),
    /// Summarize an edge list as degree/triangle statistics.
    Stats(StatsArgs),
    /// Run a sweep over N and write sweep.csv, hist.csv, fits.csv, fits.json, config.json.
    Sweep(SweepArgs),
    /// Fit a log-log line to two columns of a CSV file.
    Fit(FitArgs),
    /// Empirical survival curve P(X > M) of integer samples.
    Ccdf(CcdfArgs),
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long, default_value_t = 3.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    rounds: u32,
    #[arg(long, default_value_t = DEFAULT_WEIGHT_FLOOR)]
    weight_floor: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphArgs {
    /// Measure CSV (`atom_id,weight,label`); `-` reads stdin.
    #[arg(long)]
    weights: PathBuf,
    /// Number of rounds.
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Draw every pair instead of skipping negligible ones.
    #[arg(long)]
    exact_pairs: bool,
    #[arg(long, default_value_t = DEFAULT_PAIR_SKIP)]
    pair_skip: f64,
    /// Print `i,j` instead of `i,j,count`.
    #[arg(long)]
    binary: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Edge list (`i,j` or `i,j,count`); `-` reads stdin.
    edges: PathBuf,
    /// Round count to record in the N column.
    #[arg(long, default_value_t = 0)]
    n: u64,
    /// Long format `N,kind,r,count` instead of the wide table.
    #[arg(long)]
    long: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Profile {
    Desk,
    Paper,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON config; overrides the profile when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
    /// Override the output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write SVG scatter plots.
    #[arg(long)]
    svg: bool,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// CSV file with a header row; `-` reads stdin.
    input: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 0.5)]
    lower_q: f64,
    #[arg(long, default_value_t = 1.0)]
    upper_q: f64,
}

#[derive(Debug, Args)]
struct CcdfArgs {
    /// One nonnegative integer per line, optional header; `-` reads stdin.
    input: PathBuf,
    /// Print the log-log fit of the curve instead of the curve.
    #[arg(long)]
    fit: bool,
    #[arg(long, default_value_t = 0.0)]
    lower_q: f64,
    #[arg(long, default_value_t = 0.8)]
    upper_q: f64,
}

/// Runs the CLI on `argv` (including the program name) with the process's
/// standard streams.
pub fn cli_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    dispatch(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the CLI writing results to `out` and diagnostics to `err`.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match run(cli.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path == Path::new("-") {
        return Ok(Box::new(std::io::stdin()));
    }
    File::open(path)
        .map(|f| Box::new(f) as Box<dyn Read>)
        .map_err(|source| Error::Output {
            path: path.to_path_buf(),
            source,
        })
}

fn with_output<F>(path: Option<&Path>, out: &mut dyn Write, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|source| Error::Output {
                path: p.to_path_buf(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn run(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match command {
        Command::Measure(a) => {
            let params = BetaProcessParams::new(a.theta, a.alpha, a.gamma)?;
            let cfg = StickBreakingConfig::new(a.rounds, a.seed).with_weight_floor(a.weight_floor);
            let measure = sample_three_param_bp(params, cfg)?;
            with_output(a.out.as_deref(), out, |w| io::write_measure_csv(&measure, w))
        }
        Command::Graph(a) => {
            let measure = io::read_measure_csv(open_input(&a.weights)?)?;
            let opts = if a.exact_pairs {
                PairOptions::exact()
            } else {
                PairOptions {
                    pair_skip: Some(a.pair_skip),
                }
            };
            let (graph, report) = generate_with(&measure, a.n, a.seed, opts);
            writeln!(
                err,
                "pairs drawn {}, skipped {}, missed-edge bound {:e}",
                report.pairs_drawn, report.pairs_skipped, report.missed_edge_bound
            )?;
            with_output(a.out.as_deref(), out, |w| {
                if a.binary {
                    io::write_binary_csv(&binarize(&graph), w)
                } else {
                    io::write_multigraph_csv(&graph, w)
                }
            })
        }
        Command::Stats(a) => {
            let graph = io::read_edge_list(open_input(&a.edges)?)?;
            let stats = summarize(&graph, a.n)?;
            with_output(a.out.as_deref(), out, |w| {
                if a.long {
                    io::write_stats_long(std::slice::from_ref(&stats), w)
                } else {
                    io::write_stats_wide(std::slice::from_ref(&stats), w)
                }
            })
        }
        Command::Sweep(a) => {
            let mut cfg = match &a.config {
                Some(path) => {
                    let mut text = String::new();
                    open_input(path)?.read_to_string(&mut text)?;
                    ExperimentConfig::from_json(&text)?
                }
                None => match a.profile {
                    Profile::Desk => ExperimentConfig::desk(),
                    Profile::Paper => {
                        writeln!(
                            err,
                            "warning: --profile paper (5000 rounds, 196 grid points) can take a long time"
                        )?;
                        ExperimentConfig::paper()
                    }
                },
            };
            if let Some(dir) = a.out_dir {
                cfg.out_dir = dir;
            }
            let result = run_sweep(&cfg)?;
            if a.svg {
                write_plots(&result)?;
            }
            writeln!(
                err,
                "{} rows in {:.2?}, missed-edge bound {:e}, outputs in {}",
                result.rows.len(),
                result.elapsed,
                result.missed_edge_bound,
                cfg.out_dir.display()
            )?;
            let pooled = FitReport {
                fits: result
                    .fits
                    .fits
                    .iter()
                    .filter(|f| f.scope == FitScope::Pooled)
                    .cloned()
                    .collect(),
            };
            pooled.write_csv(out)
        }
        Command::Fit(a) => {
            let cols = io::read_csv_columns(open_input(&a.input)?, &[a.x.as_str(), a.y.as_str()])?;
            let (xs, ys): (Vec<f64>, Vec<f64>) = cols[0]
                .iter()
                .zip(&cols[1])
                .filter(|(x, y)| **x > 0.0 && **y > 0.0)
                .map(|(x, y)| (*x, *y))
                .unzip();
            let dropped = cols[0].len() - xs.len();
            if dropped > 0 {
                writeln!(err, "dropped {dropped} rows with nonpositive values")?;
            }
            let fit = fit_loglog(&xs, &ys, a.lower_q, a.upper_q)?;
            write_single_fit(out, &format!("{}~{}", a.y, a.x), &fit)
        }
        Command::Ccdf(a) => {
            let samples = io::read_samples(open_input(&a.input)?)?;
            let curve = ccdf(&samples)?;
            if a.fit {
                let fit = fit_ccdf(&curve, a.lower_q, a.upper_q)?;
                write_single_fit(out, "ccdf", &fit)
            } else {
                writeln!(out, "M,survival")?;
                for (m, s) in curve.points() {
                    writeln!(out, "{m},{s}")?;
                }
                Ok(())
            }
        }
    }
}

fn write_single_fit(out: &mut dyn Write, label: &str, fit: &LogLogFit) -> Result<()> {
    writeln!(out, "type,slope,intercept,r2,n_points,lower_q,upper_q")?;
    writeln!(
        out,
        "{label},{},{},{},{},{},{}",
        fit.slope, fit.intercept, fit.r_squared, fit.n_points, fit.lower_q, fit.upper_q
    )?;
    Ok(())
}

fn write_plots(result: &SweepResult) -> Result<()> {
    let dir = &result.config.out_dir;
    let v_points = |f: &dyn Fn(&crate::stats::GraphStats) -> u64| -> Vec<(f64, f64)> {
        result
            .rows
            .iter()
            .map(|r| (r.stats.effective_vertices as f64, f(&r.stats) as f64))
            .collect()
    };
    let type1 = loglog_scatter_svg(
        &v_points(&|s| s.total_edges),
        result.fits.pooled(PowerLawKind::I),
        "Edges vs effective vertices",
        "V",
        "E",
    );
    std::fs::write(dir.join("type1.svg"), type1)?;
    let type2a = loglog_scatter_svg(
        &v_points(&|s| s.degree_count(1)),
        result.fits.pooled(PowerLawKind::IIa),
        "Degree-1 vertices vs effective vertices",
        "V",
        "D1",
    );
    std::fs::write(dir.join("type2a.svg"), type2a)?;
    Ok(())
}
