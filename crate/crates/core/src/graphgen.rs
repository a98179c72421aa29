//! Multigraphs from `N` rounds of Bernoulli edge draws.
//!
//! In every round each unordered pair of distinct atoms `(i, j)` gains an edge
//! with probability `w_i * w_j`, independently of everything else. Because the
//! rounds are iid, the count after `N` rounds is `Binomial(N, w_i * w_j)` and
//! pairs are independent, so [`generate`] draws one binomial per pair instead
//! of simulating rounds. [`generate_exact_rounds`] keeps the literal
//! round-by-round simulation around as a reference.
//!
//! Vertex ids are atom ids of the source [`AtomicMeasure`].

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::crm::AtomicMeasure;
use crate::error::{Error, Result};
use crate::rng::{keyed_rng, stream_key, tag, unit_from_key};

/// Default pair-skip threshold on the expected count `N * w_i * w_j`.
pub const DEFAULT_PAIR_SKIP: f64 = 1e-12;

/// Size limits for [`generate_exact_rounds`].
pub const EXACT_ROUNDS_MAX_ATOMS: usize = 200;
pub const EXACT_ROUNDS_MAX_N: u64 = 1000;

/// Below this expected count, binomials are drawn by inversion from a single
/// keyed uniform.
const INVERSION_MAX_MEAN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOptions {
    /// Skip pairs whose expected count `N * w_i * w_j` is below this. `None`
    /// enumerates every pair.
    pub pair_skip: Option<f64>,
}

impl Default for PairOptions {
    fn default() -> Self {
        Self {
            pair_skip: Some(DEFAULT_PAIR_SKIP),
        }
    }
}

impl PairOptions {
    pub fn exact() -> Self {
        Self { pair_skip: None }
    }
}

/// What pair pruning left out of a draw.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PruneReport {
    pub pairs_drawn: u64,
    pub pairs_skipped: u64,
    /// Union bound on the expected number of edges the skipped pairs would
    /// have received: `Σ_skipped n * w_i * w_j`.
    pub missed_edge_bound: f64,
}

impl PruneReport {
    fn absorb(&mut self, other: PruneReport) {
        self.pairs_drawn += other.pairs_drawn;
        self.pairs_skipped += other.pairs_skipped;
        self.missed_edge_bound += other.missed_edge_bound;
    }
}

/// Accumulated edge counts `G_N` over unordered pairs `i < j`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiGraph {
    n_rounds: u64,
    atom_count: usize,
    edge_counts: BTreeMap<(u32, u32), u64>,
}

impl MultiGraph {
    pub fn empty(atom_count: usize, n_rounds: u64) -> Self {
        Self {
            n_rounds,
            atom_count,
            edge_counts: BTreeMap::new(),
        }
    }

    /// Builds a multigraph from `(i, j, count)` triples. Pairs are normalized
    /// to `i < j`; loops, zero counts, counts above `n_rounds`, ids outside
    /// `atom_count` and repeated pairs are rejected.
    pub fn from_counts(
        atom_count: usize,
        n_rounds: u64,
        counts: impl IntoIterator<Item = (u32, u32, u64)>,
    ) -> Result<Self> {
        let mut edge_counts = BTreeMap::new();
        for (i, j, c) in counts {
            let key = normalize_pair(i, j, atom_count)?;
            if c == 0 || c > n_rounds {
                return Err(Error::Param(format!(
                    "count {c} for pair ({i}, {j}) outside 1..={n_rounds}"
                )));
            }
            if edge_counts.insert(key, c).is_some() {
                return Err(Error::Param(format!("pair ({i}, {j}) listed twice")));
            }
        }
        Ok(Self {
            n_rounds,
            atom_count,
            edge_counts,
        })
    }

    pub fn n_rounds(&self) -> u64 {
        self.n_rounds
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn count(&self, i: u32, j: u32) -> u64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edge_counts.get(&key).copied().unwrap_or(0)
    }

    /// Nonzero counts in lexicographic pair order.
    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.edge_counts.iter().map(|(&k, &v)| (k, v))
    }

    /// Number of pairs with a nonzero count.
    pub fn pair_count(&self) -> usize {
        self.edge_counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_counts.is_empty()
    }
}

/// Binary adjacency `Z_N = min(G_N, 1)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinaryGraph {
    atom_count: usize,
    edges: BTreeSet<(u32, u32)>,
}

impl BinaryGraph {
    /// Builds a graph from unordered pairs. Loops, ids outside `atom_count` and
    /// repeated pairs are rejected.
    pub fn from_edges(atom_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (i, j) in edges {
            if !set.insert(normalize_pair(i, j, atom_count)?) {
                return Err(Error::Param(format!("pair ({i}, {j}) listed twice")));
            }
        }
        Ok(Self { atom_count, edges: set })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        let key = if i < j { (i, j) } else { (j, i) };
        self.edges.contains(&key)
    }

    /// Pairs `(i, j)` with `i < j` in lexicographic order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Indicator counts, each pair with count 1, as a one-round multigraph.
    pub fn to_indicator_counts(&self) -> MultiGraph {
        MultiGraph {
            n_rounds: 1,
            atom_count: self.atom_count,
            edge_counts: self.edges.iter().map(|&k| (k, 1)).collect(),
        }
    }
}

fn normalize_pair(i: u32, j: u32, atom_count: usize) -> Result<(u32, u32)> {
    if i == j {
        return Err(Error::Param(format!("loop ({i}, {i}) not allowed")));
    }
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    if b as usize >= atom_count {
        return Err(Error::Param(format!("vertex {b} out of range for {atom_count} atoms")));
    }
    Ok((a, b))
}

pub fn binarize(graph: &MultiGraph) -> BinaryGraph {
    BinaryGraph {
        atom_count: graph.atom_count,
        edges: graph.edge_counts.keys().copied().collect(),
    }
}

/// Draws `G_N` with default pair pruning.
pub fn generate(measure: &AtomicMeasure, n: u64, seed: u64) -> MultiGraph {
    generate_with(measure, n, seed, PairOptions::default()).0
}

pub fn generate_with(measure: &AtomicMeasure, n: u64, seed: u64, opts: PairOptions) -> (MultiGraph, PruneReport) {
    let (increments, report) = draw_increments(measure, n, seed, 0, opts);
    let graph = MultiGraph {
        n_rounds: n,
        atom_count: measure.len(),
        edge_counts: increments.into_iter().collect(),
    };
    (graph, report)
}

type PairCount = ((u32, u32), u64);

/// One binomial draw per pair for `n` rounds, keyed by `(seed, i, j, epoch)`.
///
/// Atoms are visited in descending weight order so a row can stop at the first
/// pair whose expected count falls below the skip threshold; the rest of the
/// row (and any later row) is only smaller. Returns sorted `(pair, count)`
/// entries with count ≥ 1.
fn draw_increments(
    measure: &AtomicMeasure,
    n: u64,
    seed: u64,
    epoch: u64,
    opts: PairOptions,
) -> (Vec<PairCount>, PruneReport) {
    let k = measure.len();
    if n == 0 || k < 2 {
        return (Vec::new(), PruneReport::default());
    }
    let order = measure.order_by_weight_desc();
    let w: Vec<f64> = order.iter().map(|&i| measure.weights()[i]).collect();
    // suffix[b] = Σ_{c ≥ b} w[c]
    let mut suffix = vec![0.0; k + 1];
    for b in (0..k).rev() {
        suffix[b] = suffix[b + 1] + w[b];
    }
    let nf = n as f64;

    let rows: Vec<(Vec<PairCount>, PruneReport)> = (0..k - 1)
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            let mut report = PruneReport::default();
            let ia = order[a] as u32;
            for b in a + 1..k {
                let p = w[a] * w[b];
                if let Some(delta) = opts.pair_skip {
                    if nf * p < delta {
                        report.pairs_skipped += (k - b) as u64;
                        report.missed_edge_bound += nf * w[a] * suffix[b];
                        break;
                    }
                }
                report.pairs_drawn += 1;
                let ib = order[b] as u32;
                let key = if ia < ib { (ia, ib) } else { (ib, ia) };
                let count = keyed_binomial(stream_key(seed, &[tag::PAIR, key.0 as u64, key.1 as u64, epoch]), n, p);
                if count > 0 {
                    out.push((key, count));
                }
            }
            (out, report)
        })
        .collect();

    let mut report = PruneReport::default();
    let mut entries = Vec::new();
    for (row, r) in rows {
        entries.extend(row);
        report.absorb(r);
    }
    entries.sort_unstable_by_key(|&(key, _)| key);
    (entries, report)
}

/// Exact `Binomial(n, p)` draw from a stream key.
///
/// Small means use CDF inversion on one uniform, which makes the common
/// zero outcome a single hash and one `exp`. Larger means fall back to a
/// keyed generator.
fn keyed_binomial(key: u64, n: u64, p: f64) -> u64 {
    let mean = n as f64 * p;
    if mean <= INVERSION_MAX_MEAN {
        let u = unit_from_key(key);
        let mut pmf = (n as f64 * (-p).ln_1p()).exp();
        let mut cdf = pmf;
        if u < cdf {
            return 0;
        }
        let odds = p / (1.0 - p);
        let mut x = 0u64;
        while x < n {
            pmf *= (n - x) as f64 / (x + 1) as f64 * odds;
            x += 1;
            cdf += pmf;
            if u < cdf {
                return x;
            }
        }
        // Rounding left the total just under 1.
        return n;
    }
    let dist = Binomial::new(n, p).expect("p is a product of weights in (0, 1)");
    dist.sample(&mut keyed_rng(key, &[]))
}

/// Literal simulation: `n` rounds, one Bernoulli(`w_i * w_j`) per pair per round.
///
/// `O(n * K^2)`; refuses measures above [`EXACT_ROUNDS_MAX_ATOMS`] atoms or
/// `n` above [`EXACT_ROUNDS_MAX_N`].
pub fn generate_exact_rounds(measure: &AtomicMeasure, n: u64, seed: u64) -> Result<MultiGraph> {
    let k = measure.len();
    if k > EXACT_ROUNDS_MAX_ATOMS {
        return Err(Error::SizeGuard(format!(
            "round-by-round simulation limited to {EXACT_ROUNDS_MAX_ATOMS} atoms, got {k}"
        )));
    }
    if n > EXACT_ROUNDS_MAX_N {
        return Err(Error::SizeGuard(format!(
            "round-by-round simulation limited to {EXACT_ROUNDS_MAX_N} rounds, got {n}"
        )));
    }
    let w = measure.weights();
    let mut rng = keyed_rng(seed, &[tag::EXACT_ROUNDS]);
    let mut counts = vec![0u64; k * k];
    for _ in 0..n {
        for i in 0..k {
            for j in i + 1..k {
                if rng.random::<f64>() < w[i] * w[j] {
                    counts[i * k + j] += 1;
                }
            }
        }
    }
    let mut edge_counts = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            if counts[i * k + j] > 0 {
                edge_counts.insert((i as u32, j as u32), counts[i * k + j]);
            }
        }
    }
    Ok(MultiGraph {
        n_rounds: n,
        atom_count: k,
        edge_counts,
    })
}

/// A multigraph grown round-block by round-block over a fixed measure.
///
/// Each [`extend`](Self::extend) adds `Binomial(ΔN, w_i w_j)` to every pair
/// from a fresh epoch of the keyed streams, so replaying the same sequence of
/// extensions reproduces every intermediate graph.
#[derive(Debug, Clone)]
pub struct GrowthState<'a> {
    measure: &'a AtomicMeasure,
    seed: u64,
    epoch: u64,
    opts: PairOptions,
    graph: MultiGraph,
    report: PruneReport,
}

impl<'a> GrowthState<'a> {
    pub fn new(measure: &'a AtomicMeasure, seed: u64) -> Self {
        Self::with_options(measure, seed, PairOptions::default())
    }

    pub fn with_options(measure: &'a AtomicMeasure, seed: u64, opts: PairOptions) -> Self {
        Self {
            measure,
            seed,
            epoch: 0,
            opts,
            graph: MultiGraph::empty(measure.len(), 0),
            report: PruneReport::default(),
        }
    }

    pub fn n_rounds(&self) -> u64 {
        self.graph.n_rounds
    }

    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn measure(&self) -> &'a AtomicMeasure {
        self.measure
    }

    /// Accumulated pruning report over all extensions so far.
    pub fn report(&self) -> PruneReport {
        self.report
    }

    /// Adds `delta` rounds. `delta` must be at least 1.
    pub fn extend(&mut self, delta: u64) -> Result<()> {
        if delta == 0 {
            return Err(Error::Param("extend requires at least one round".into()));
        }
        let n_rounds = self
            .graph
            .n_rounds
            .checked_add(delta)
            .ok_or_else(|| Error::Param("round count overflows u64".into()))?;
        self.epoch += 1;
        let (increments, report) = draw_increments(self.measure, delta, self.seed, self.epoch, self.opts);
        for (key, c) in increments {
            *self.graph.edge_counts.entry(key).or_insert(0) += c;
        }
        self.graph.n_rounds = n_rounds;
        self.report.absorb(report);
        Ok(())
    }

    /// Consuming form of [`extend`](Self::extend).
    pub fn extended(mut self, delta: u64) -> Result<Self> {
        self.extend(delta)?;
        Ok(self)
    }
}
