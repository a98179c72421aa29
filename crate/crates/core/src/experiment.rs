//! Sweeps over the number of rounds `N`.
//!
//! Each replica samples one measure, then either grows a single graph through
//! the whole `N`-grid (coupled mode) or draws a fresh graph at every grid point
//! (independent mode). Every snapshot is summarized, the rows are fitted, and
//! the results are written as CSV/JSON. All randomness is derived from the
//! master seed, so outputs are byte-identical across runs and thread counts.

use std::fs;
use std::io::{BufWriter, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::crm::{sample_three_param_bp, BetaProcessParams, StickBreakingConfig, DEFAULT_WEIGHT_FLOOR};
use crate::error::{Error, Result};
use crate::graphgen::{binarize, generate_with, GrowthState, PairOptions};
use crate::io;
use crate::powerlaw::{classify, ClassifyOptions, FitReport};
use crate::rng::{stream_key, tag};
use crate::stats::{summarize, GraphStats};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "CRMGG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// One trajectory per replica, observed at every grid point.
    Coupled,
    /// A fresh graph per grid point.
    Independent,
}

/// Sweep configuration, serialized as `config.json` with keys in this order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub gamma: f64,
    pub theta: f64,
    pub alpha: f64,
    pub rounds: u32,
    pub weight_floor: f64,
    pub n_start: u64,
    pub n_stop: u64,
    pub n_step: u64,
    pub replicas: u32,
    pub growth_mode: GrowthMode,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub fit_lower_q: f64,
    pub fit_upper_q: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl ExperimentConfig {
    /// Laptop-scale profile: 1000 rounds, `N = 50..=2000` step 50, 10 replicas.
    pub fn desk() -> Self {
        Self {
            gamma: 3.0,
            theta: 1.0,
            alpha: 0.1,
            rounds: 1000,
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            n_start: 50,
            n_stop: 2000,
            n_step: 50,
            replicas: 10,
            growth_mode: GrowthMode::Coupled,
            seed: 1,
            out_dir: PathBuf::from("out"),
            fit_lower_q: 0.5,
            fit_upper_q: 1.0,
        }
    }

    /// Full-size profile: 5000 rounds, `N = 50..=2000` step 10.
    pub fn paper() -> Self {
        Self {
            rounds: 5000,
            n_step: 10,
            ..Self::desk()
        }
    }

    pub fn params(&self) -> Result<BetaProcessParams> {
        BetaProcessParams::new(self.theta, self.alpha, self.gamma)
    }

    pub fn stick_config(&self, seed: u64) -> StickBreakingConfig {
        StickBreakingConfig {
            rounds: self.rounds,
            weight_floor: self.weight_floor,
            seed,
        }
    }

    pub fn grid(&self) -> Vec<u64> {
        if self.n_step == 0 || self.n_start > self.n_stop {
            return Vec::new();
        }
        (self.n_start..=self.n_stop).step_by(self.n_step as usize).collect()
    }

    pub fn classify_options(&self) -> ClassifyOptions {
        ClassifyOptions {
            lower_q: self.fit_lower_q,
            upper_q: self.fit_upper_q,
            ..ClassifyOptions::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.stick_config(0).validate()?;
        if self.n_step == 0 {
            return Err(Error::Param("n_step must be at least 1".into()));
        }
        if self.n_start > self.n_stop {
            return Err(Error::Param(format!(
                "n_start {} exceeds n_stop {}",
                self.n_start, self.n_stop
            )));
        }
        if self.replicas < 1 {
            return Err(Error::Param("replicas must be at least 1".into()));
        }
        let (lo, hi) = (self.fit_lower_q, self.fit_upper_q);
        if !(0.0..1.0).contains(&lo) || !(hi > 0.0 && hi <= 1.0) || lo >= hi {
            return Err(Error::Param(format!(
                "fit quantiles must satisfy 0 <= lower < upper <= 1, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub replica: u32,
    pub stats: GraphStats,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    /// Sorted by replica, then `N`.
    pub rows: Vec<SweepRow>,
    pub fits: FitReport,
    /// Largest per-replica union bound on edges missed by pair pruning.
    pub missed_edge_bound: f64,
    pub elapsed: Duration,
}

/// Seed of a replica; independent of the total number of replicas.
pub fn replica_seed(master: u64, replica: u32) -> u64 {
    stream_key(master, &[tag::REPLICA, replica as u64])
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Param(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs the sweep and writes `sweep.csv`, `hist.csv`, `fits.csv`, `fits.json`
/// and `config.json` into `cfg.out_dir`.
///
/// The output directory is checked for writability before any sampling.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    prepare_out_dir(&cfg.out_dir)?;
    let result = simulate_with_threads(cfg, threads_from_env()?)?;
    write_outputs(&result, &cfg.out_dir)?;
    Ok(result)
}

/// Runs the sweep without touching the filesystem.
pub fn simulate(cfg: &ExperimentConfig) -> Result<SweepResult> {
    simulate_with_threads(cfg, threads_from_env()?)
}

pub fn simulate_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<SweepResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Param(format!("cannot start worker pool: {e}")))?;

    let outcomes: Vec<Result<(Vec<SweepRow>, f64)>> = pool.install(|| {
        (0..cfg.replicas)
            .into_par_iter()
            .map(|replica| {
                catch_unwind(AssertUnwindSafe(|| run_replica(cfg, replica))).unwrap_or_else(|payload| {
                    Err(Error::ReplicaPanicked {
                        replica,
                        message: panic_message(payload.as_ref()),
                    })
                })
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut missed_edge_bound: f64 = 0.0;
    for outcome in outcomes {
        let (replica_rows, bound) = outcome?;
        rows.extend(replica_rows);
        missed_edge_bound = missed_edge_bound.max(bound);
    }
    let fits = classify(&rows, &cfg.classify_options());
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        fits,
        missed_edge_bound,
        elapsed: start.elapsed(),
    })
}

fn run_replica(cfg: &ExperimentConfig, replica: u32) -> Result<(Vec<SweepRow>, f64)> {
    let seed = replica_seed(cfg.seed, replica);
    let measure = sample_three_param_bp(cfg.params()?, cfg.stick_config(stream_key(seed, &[tag::MEASURE])))?;
    let graph_seed = stream_key(seed, &[tag::GRAPH]);
    let grid = cfg.grid();
    let mut rows = Vec::with_capacity(grid.len());

    let bound = match cfg.growth_mode {
        GrowthMode::Coupled => {
            let mut state = GrowthState::new(&measure, graph_seed);
            for &n in &grid {
                if n > state.n_rounds() {
                    state.extend(n - state.n_rounds())?;
                }
                let stats = summarize(&binarize(state.graph()), n)?;
                rows.push(SweepRow { replica, stats });
            }
            state.report().missed_edge_bound
        }
        GrowthMode::Independent => {
            let mut worst: f64 = 0.0;
            for &n in &grid {
                let (graph, report) = generate_with(&measure, n, stream_key(graph_seed, &[n]), PairOptions::default());
                worst = worst.max(report.missed_edge_bound);
                rows.push(SweepRow {
                    replica,
                    stats: summarize(&binarize(&graph), n)?,
                });
            }
            worst
        }
    };
    Ok((rows, bound))
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_string()
    }
}

fn prepare_out_dir(dir: &Path) -> Result<()> {
    let wrap = |source| Error::Output {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(wrap)?;
    let probe = dir.join(".crmgg-write-probe");
    fs::write(&probe, b"").map_err(wrap)?;
    fs::remove_file(&probe).map_err(wrap)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    fs::File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Output {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<()> {
    let mut sweep = create(&dir.join("sweep.csv"))?;
    io::write_sweep_csv(&result.rows, &mut sweep)?;
    sweep.flush()?;

    let mut hist = create(&dir.join("hist.csv"))?;
    io::write_hist_csv(&result.rows, &mut hist)?;
    hist.flush()?;

    let mut fits = create(&dir.join("fits.csv"))?;
    result.fits.write_csv(&mut fits)?;
    fits.flush()?;

    let mut fits_json = create(&dir.join("fits.json"))?;
    serde_json::to_writer_pretty(&mut fits_json, &result.fits.to_json())?;
    writeln!(fits_json)?;
    fits_json.flush()?;

    fs::write(dir.join("config.json"), result.config.to_json()?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            rounds: 200,
            n_start: 10,
            n_stop: 300,
            n_step: 10,
            replicas: 3,
            ..ExperimentConfig::desk()
        }
    }

    #[test]
    fn profiles() {
        let desk = ExperimentConfig::desk();
        assert_eq!(desk.grid().len(), 40);
        assert_eq!((desk.gamma, desk.theta, desk.alpha), (3.0, 1.0, 0.1));
        let full = ExperimentConfig::paper();
        assert_eq!(full.rounds, 5000);
        assert_eq!(full.grid().first(), Some(&50));
        assert_eq!(full.grid().last(), Some(&2000));
        assert_eq!(full.grid().len(), 196);
    }

    #[test]
    fn validation() {
        assert!(ExperimentConfig { n_step: 0, ..small() }.validate().is_err());
        assert!(ExperimentConfig {
            n_start: 500,
            ..small()
        }
        .validate()
        .is_err());
        assert!(ExperimentConfig { replicas: 0, ..small() }.validate().is_err());
        assert!(ExperimentConfig { alpha: 1.0, ..small() }.validate().is_err());
        assert!(ExperimentConfig { rounds: 0, ..small() }.validate().is_err());
        assert!(ExperimentConfig {
            fit_lower_q: 1.0,
            ..small()
        }
        .validate()
        .is_err());
        assert!(small().validate().is_ok());
    }

    #[test]
    fn config_round_trips_in_canonical_order() {
        let cfg = small();
        let text = cfg.to_json().unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        let keys = [
            "gamma",
            "theta",
            "alpha",
            "rounds",
            "weight_floor",
            "n_start",
            "n_stop",
            "n_step",
            "replicas",
            "growth_mode",
            "seed",
            "out_dir",
            "fit_lower_q",
            "fit_upper_q",
        ];
        let mut last = 0;
        for key in keys {
            let pos = text.find(&format!("\"{key}\"")).unwrap();
            assert!(pos >= last, "{key} out of order");
            last = pos;
        }
        assert!(text.contains("\"growth_mode\": \"coupled\""));
        assert!(ExperimentConfig::from_json(&text.replace("\"gamma\"", "\"gama\"")).is_err());
    }

    #[test]
    fn zero_round_grid_gives_zero_rows() {
        for mode in [GrowthMode::Coupled, GrowthMode::Independent] {
            let cfg = ExperimentConfig {
                n_start: 0,
                n_stop: 0,
                replicas: 1,
                growth_mode: mode,
                ..small()
            };
            let res = simulate(&cfg).unwrap();
            assert_eq!(res.rows.len(), 1);
            let s = &res.rows[0].stats;
            assert_eq!((s.n_rounds, s.effective_vertices, s.total_edges), (0, 0, 0));
            assert!(s.degree_hist.is_empty() && s.triangle_hist.is_empty());
        }
    }

    #[test]
    fn one_row_per_replica_and_grid_point() {
        let cfg = small();
        let res = simulate(&cfg).unwrap();
        assert_eq!(res.rows.len(), 3 * cfg.grid().len());
        for (idx, row) in res.rows.iter().enumerate() {
            assert_eq!(row.replica as usize, idx / cfg.grid().len());
            assert_eq!(row.stats.n_rounds, cfg.grid()[idx % cfg.grid().len()]);
        }
        assert!(res.missed_edge_bound < 1e-3);
    }

    #[test]
    fn replicas_do_not_depend_on_replica_count() {
        let three = simulate(&small()).unwrap();
        let five = simulate(&ExperimentConfig { replicas: 5, ..small() }).unwrap();
        assert_eq!(&five.rows[..three.rows.len()], &three.rows[..]);
    }

    #[test]
    fn unwritable_output_fails_before_sampling() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let cfg = ExperimentConfig {
            out_dir: blocker.join("sub"),
            ..small()
        };
        let start = Instant::now();
        assert!(matches!(run_sweep(&cfg), Err(Error::Output { .. })));
        assert!(start.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn panics_are_reported_with_replica_index() {
        let payload: Box<dyn std::any::Any + Send> = Box::new("boom");
        assert_eq!(panic_message(payload.as_ref()), "boom");
        let err = Error::ReplicaPanicked {
            replica: 4,
            message: "boom".into(),
        };
        assert_eq!(err.to_string(), "replica 4 panicked: boom");
    }
}
