//! Random graphs generated from completely random measures.
//!
//! A truncated beta process (or three-parameter beta process) realization is
//! drawn by stick-breaking ([`crm`]). Its atoms are latent vertices; over `N`
//! rounds each unordered pair `(i, j)` gains an edge with probability
//! `w_i * w_j` ([`graphgen`]). The resulting binary graph is summarized by
//! degree and triangle statistics ([`stats`]) whose scaling is checked with
//! log-log regressions ([`powerlaw`]). [`experiment`] wires everything into
//! reproducible sweeps over `N`.

pub mod cli;
pub mod crm;
pub mod error;
pub mod experiment;
pub mod graphgen;
pub mod io;
pub mod plot;
pub mod powerlaw;
pub mod rng;
pub mod stats;

pub use crm::{AtomicMeasure, BetaProcessParams, StickBreakingConfig};
pub use error::{Error, Result};
pub use experiment::{ExperimentConfig, GrowthMode, SweepResult};
pub use graphgen::{BinaryGraph, GrowthState, MultiGraph};
pub use powerlaw::{CcdfCurve, LogLogFit};
pub use stats::GraphStats;
