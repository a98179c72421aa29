//! Truncated completely random measures.
//!
//! The three-parameter beta process is sampled by stick-breaking: round `i`
//! contributes `C_i ~ Poisson(mass)` atoms, and atom `j` of round `i` has weight
//!
//! ```text
//! V[i] * (1 - V[1]) * (1 - V[2]) * ... * (1 - V[i-1]),
//! V[l] ~ Beta(1 - discount, concentration + l * discount)
//! ```
//!
//! with every `V[l]` drawn independently for that atom. Atom labels are drawn
//! from the uniform base measure on `[0, 1]`. A discount of zero gives the
//! plain beta process.

use rand::Rng;
use rand_distr::{Beta, Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::{keyed_rng, tag};

/// Largest accepted per-round Poisson rate.
pub const MAX_MASS: f64 = 100.0;

/// Default weight floor; atoms lighter than this are not emitted.
pub const DEFAULT_WEIGHT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaProcessParams {
    /// Concentration `θ` (the `c` of the plain beta process).
    pub concentration: f64,
    /// Discount `α` in `[0, 1)`.
    pub discount: f64,
    /// Mass `γ`: total base-measure mass, i.e. the Poisson rate per round.
    pub mass: f64,
}

impl BetaProcessParams {
    pub fn new(concentration: f64, discount: f64, mass: f64) -> Result<Self> {
        let params = Self {
            concentration,
            discount,
            mass,
        };
        params.validate()?;
        Ok(params)
    }

    /// Plain beta process (`discount = 0`).
    pub fn beta_process(concentration: f64, mass: f64) -> Result<Self> {
        Self::new(concentration, 0.0, mass)
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            concentration,
            discount,
            mass,
        } = *self;
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::Param(format!("discount must lie in [0, 1), got {discount}")));
        }
        if !(concentration.is_finite() && concentration > 0.0) {
            return Err(Error::Param(format!(
                "concentration must be positive and finite, got {concentration}"
            )));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Param(format!("mass must be positive and finite, got {mass}")));
        }
        if mass > MAX_MASS {
            return Err(Error::Param(format!(
                "mass {mass} exceeds the supported maximum {MAX_MASS}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StickBreakingConfig {
    /// Number of outer stick-breaking rounds.
    pub rounds: u32,
    /// Atoms with weight below this are dropped.
    pub weight_floor: f64,
    pub seed: u64,
}

impl StickBreakingConfig {
    pub fn new(rounds: u32, seed: u64) -> Self {
        Self {
            rounds,
            weight_floor: DEFAULT_WEIGHT_FLOOR,
            seed,
        }
    }

    pub fn with_weight_floor(mut self, weight_floor: f64) -> Self {
        self.weight_floor = weight_floor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds < 1 {
            return Err(Error::Param("rounds must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.weight_floor) {
            return Err(Error::Param(format!(
                "weight floor must lie in [0, 1), got {}",
                self.weight_floor
            )));
        }
        Ok(())
    }
}

/// How a measure was produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub params: BetaProcessParams,
    pub config: StickBreakingConfig,
}

/// A finite atomic measure `Σ w_i δ_{label_i}` with weights in `(0, 1)`.
///
/// Atom ids are positions in generation order. The measure is immutable once
/// built.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    weights: Vec<f64>,
    labels: Vec<f64>,
    provenance: Option<Provenance>,
}

impl AtomicMeasure {
    /// Builds a measure from explicit atoms, checking every invariant.
    pub fn new(weights: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        if weights.len() != labels.len() {
            return Err(Error::Param(format!(
                "{} weights but {} labels",
                weights.len(),
                labels.len()
            )));
        }
        if weights.len() > u32::MAX as usize {
            return Err(Error::SizeGuard("more than u32::MAX atoms".into()));
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0 && **w < 1.0)) {
            return Err(Error::Param(format!("weight of atom {i} is {w}, outside (0, 1)")));
        }
        if let Some((i, l)) = labels.iter().enumerate().find(|(_, l)| !(0.0..=1.0).contains(*l)) {
            return Err(Error::Param(format!("label of atom {i} is {l}, outside [0, 1]")));
        }
        if has_duplicates(&labels) {
            return Err(Error::Param("atom labels must be pairwise distinct".into()));
        }
        Ok(Self {
            weights,
            labels,
            provenance: None,
        })
    }

    /// Convenience constructor with evenly spaced labels.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        let labels = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        Self::new(weights, labels)
    }

    pub fn empty() -> Self {
        Self {
            weights: Vec::new(),
            labels: Vec::new(),
            provenance: None,
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Sum of weights, accumulated smallest first so that the result does not
    /// depend on atom order.
    pub fn total_mass(&self) -> f64 {
        let mut sorted = self.weights.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.iter().sum()
    }

    /// `(weight, label)` pairs in stored order.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.labels.iter().copied())
    }

    /// The same atoms reordered by nonincreasing weight. Ties keep stored order.
    pub fn sorted_view(&self) -> AtomicMeasure {
        let order = self.order_by_weight_desc();
        AtomicMeasure {
            weights: order.iter().map(|&i| self.weights[i]).collect(),
            labels: order.iter().map(|&i| self.labels[i]).collect(),
            provenance: self.provenance,
        }
    }

    /// Atom ids sorted by nonincreasing weight.
    pub fn order_by_weight_desc(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.weights[b].total_cmp(&self.weights[a]).then(a.cmp(&b)));
        order
    }
}

fn has_duplicates(labels: &[f64]) -> bool {
    let mut sorted = labels.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Samples a truncated three-parameter beta process by stick-breaking.
///
/// Rounds `1..=rounds` are generated independently from keyed streams, so the
/// output is identical for any thread count. The stick product for an atom
/// is abandoned as soon as it falls below the weight floor, since the atom's
/// weight can only be smaller.
pub fn sample_three_param_bp(params: BetaProcessParams, cfg: StickBreakingConfig) -> Result<AtomicMeasure> {
    params.validate()?;
    cfg.validate()?;

    let poisson = Poisson::new(params.mass).map_err(|e| Error::Param(e.to_string()))?;
    let sticks = (1..=cfg.rounds)
        .map(|l| {
            Beta::new(1.0 - params.discount, params.concentration + l as f64 * params.discount)
                .map_err(|e| Error::Param(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;

    let per_round: Vec<Vec<(f64, f64)>> = (1..=cfg.rounds)
        .into_par_iter()
        .map(|round| sample_round(round, &poisson, &sticks, &cfg))
        .collect();

    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for (w, l) in per_round.into_iter().flatten() {
        weights.push(w);
        labels.push(l);
    }
    dedup_labels(&mut labels, cfg.seed);

    Ok(AtomicMeasure {
        weights,
        labels,
        provenance: Some(Provenance { params, config: cfg }),
    })
}

fn sample_round(
    round: u32,
    poisson: &Poisson<f64>,
    sticks: &[Beta<f64>],
    cfg: &StickBreakingConfig,
) -> Vec<(f64, f64)> {
    let count = poisson.sample(&mut keyed_rng(cfg.seed, &[tag::ROUND_COUNT, round as u64])) as u64;
    let mut atoms = Vec::new();
    for j in 0..count {
        let mut rng = keyed_rng(cfg.seed, &[tag::ATOM, round as u64, j]);
        let label: f64 = rng.random();
        let mut remaining = 1.0;
        let mut alive = true;
        for stick in &sticks[..round as usize - 1] {
            remaining *= 1.0 - stick.sample(&mut rng);
            if remaining < cfg.weight_floor {
                alive = false;
                break;
            }
        }
        if !alive {
            continue;
        }
        let weight = sticks[round as usize - 1].sample(&mut rng) * remaining;
        // Beta draws can round to exactly 0 or 1.
        if weight >= cfg.weight_floor && weight > 0.0 && weight < 1.0 {
            atoms.push((weight, label));
        }
    }
    atoms
}

/// Replaces repeated labels with fresh uniform draws until all are distinct.
fn dedup_labels(labels: &mut [f64], seed: u64) {
    let mut attempt = 0u64;
    loop {
        let mut order: Vec<usize> = (0..labels.len()).collect();
        order.sort_by(|&a, &b| labels[a].total_cmp(&labels[b]).then(a.cmp(&b)));
        let dupes: Vec<usize> = order
            .windows(2)
            .filter(|w| labels[w[0]] == labels[w[1]])
            .map(|w| w[1])
            .collect();
        if dupes.is_empty() {
            return;
        }
        for i in dupes {
            labels[i] = keyed_rng(seed, &[tag::LABEL_RETRY, i as u64, attempt]).random();
        }
        attempt += 1;
    }
}

/// Density of the rate measure with respect to `dw` times the uniform base
/// measure, scaled by the mass:
///
/// ```text
/// mass * Γ(1+θ) / (Γ(1-α) Γ(θ+α)) * w^(-1-α) * (1-w)^(θ+α-1)
/// ```
///
/// For `α = 0` this is `mass * θ * w^-1 * (1-w)^(θ-1)`, the plain beta
/// process. Evaluated in log space.
pub fn rate_density(params: BetaProcessParams, w: f64) -> Result<f64> {
    params.validate()?;
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::Domain(format!("rate density is defined on (0, 1), got w = {w}")));
    }
    let BetaProcessParams {
        concentration: theta,
        discount: alpha,
        mass,
    } = params;
    let log_norm = ln_gamma(1.0 + theta) - ln_gamma(1.0 - alpha) - ln_gamma(theta + alpha);
    let log_density = mass.ln() + log_norm + (-1.0 - alpha) * w.ln() + (theta + alpha - 1.0) * (-w).ln_1p();
    Ok(log_density.exp())
}
