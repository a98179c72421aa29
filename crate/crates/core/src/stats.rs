//! Degree and triangle statistics of a binary graph.
//!
//! Triangle counts are unordered: a vertex `i` with neighbours `j` and `k` that
//! are themselves adjacent gets one triangle for the pair `{j, k}`. Summing
//! over ordered `(j, k)` instead gives exactly twice this number.
//!
//! Only effective vertices (degree ≥ 1) appear in any per-vertex map or
//! histogram.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphgen::BinaryGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexProfile {
    pub vertex: u32,
    pub degree: u32,
    pub triangles: u64,
}

/// Snapshot statistics of `Z_N`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub n_rounds: u64,
    pub effective_vertices: u64,
    pub total_edges: u64,
    /// `r -> number of vertices with degree exactly r`, for r ≥ 1.
    pub degree_hist: BTreeMap<u64, u64>,
    /// `r -> number of effective vertices in exactly r triangles`, for r ≥ 0.
    pub triangle_hist: BTreeMap<u64, u64>,
}

impl GraphStats {
    pub fn degree_count(&self, r: u64) -> u64 {
        self.degree_hist.get(&r).copied().unwrap_or(0)
    }

    pub fn triangle_count(&self, r: u64) -> u64 {
        self.triangle_hist.get(&r).copied().unwrap_or(0)
    }

    /// Checks the handshake and histogram-sum identities.
    pub fn check_invariants(&self) -> Result<()> {
        let degree_sum: u64 = self.degree_hist.iter().map(|(r, c)| r * c).sum();
        if degree_sum != 2 * self.total_edges {
            return Err(Error::Inconsistent(format!(
                "degree sum {degree_sum} != 2 * {} edges",
                self.total_edges
            )));
        }
        let vertices: u64 = self.degree_hist.values().sum();
        if vertices != self.effective_vertices {
            return Err(Error::Inconsistent(format!(
                "degree histogram covers {vertices} vertices, expected {}",
                self.effective_vertices
            )));
        }
        let tri_vertices: u64 = self.triangle_hist.values().sum();
        if tri_vertices != self.effective_vertices {
            return Err(Error::Inconsistent(format!(
                "triangle histogram covers {tri_vertices} vertices, expected {}",
                self.effective_vertices
            )));
        }
        if self.degree_hist.contains_key(&0) {
            return Err(Error::Inconsistent("degree histogram has an entry for degree 0".into()));
        }
        Ok(())
    }
}

/// Sorted neighbour lists of every effective vertex.
pub fn adjacency(graph: &BinaryGraph) -> BTreeMap<u32, Vec<u32>> {
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for (i, j) in graph.edges() {
        adj.entry(i).or_default().push(j);
        adj.entry(j).or_default().push(i);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    adj
}

/// Degree of every effective vertex.
pub fn degrees(graph: &BinaryGraph) -> BTreeMap<u32, u32> {
    let mut deg: BTreeMap<u32, u32> = BTreeMap::new();
    for (i, j) in graph.edges() {
        *deg.entry(i).or_default() += 1;
        *deg.entry(j).or_default() += 1;
    }
    deg
}

/// Triangle count of every effective vertex (zero included).
///
/// Each edge `(i, j)` with `i < j` intersects the sorted neighbour lists of its
/// endpoints; common neighbours `k > j` close a triangle found exactly once.
pub fn triangles(graph: &BinaryGraph) -> BTreeMap<u32, u64> {
    let adj = adjacency(graph);
    triangles_from_adjacency(&adj)
}

fn triangles_from_adjacency(adj: &BTreeMap<u32, Vec<u32>>) -> BTreeMap<u32, u64> {
    let mut tri: BTreeMap<u32, u64> = adj.keys().map(|&v| (v, 0)).collect();
    for (&i, ni) in adj {
        for &j in ni.iter().filter(|&&j| j > i) {
            let nj = &adj[&j];
            for k in sorted_intersection(ni, nj).filter(|&k| k > j) {
                *tri.get_mut(&i).unwrap() += 1;
                *tri.get_mut(&j).unwrap() += 1;
                *tri.get_mut(&k).unwrap() += 1;
            }
        }
    }
    tri
}

fn sorted_intersection<'a>(a: &'a [u32], b: &'a [u32]) -> impl Iterator<Item = u32> + 'a {
    let (mut x, mut y) = (0, 0);
    std::iter::from_fn(move || {
        while x < a.len() && y < b.len() {
            match a[x].cmp(&b[y]) {
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
                std::cmp::Ordering::Equal => {
                    let v = a[x];
                    x += 1;
                    y += 1;
                    return Some(v);
                }
            }
        }
        None
    })
}

pub fn vertex_profiles(graph: &BinaryGraph) -> Vec<VertexProfile> {
    let adj = adjacency(graph);
    let tri = triangles_from_adjacency(&adj);
    adj.iter()
        .map(|(&vertex, list)| VertexProfile {
            vertex,
            degree: list.len() as u32,
            triangles: tri[&vertex],
        })
        .collect()
}

/// Computes [`GraphStats`] for the snapshot after `n_rounds` rounds.
///
/// The edge total is computed both as half the degree sum and by direct count;
/// any disagreement, or a violated histogram identity, is an
/// [`Error::Inconsistent`].
pub fn summarize(graph: &BinaryGraph, n_rounds: u64) -> Result<GraphStats> {
    let profiles = vertex_profiles(graph);
    let degree_sum: u64 = profiles.iter().map(|p| p.degree as u64).sum();
    if !degree_sum.is_multiple_of(2) || degree_sum / 2 != graph.edge_count() as u64 {
        return Err(Error::Inconsistent(format!(
            "half degree sum {degree_sum}/2 disagrees with {} listed edges",
            graph.edge_count()
        )));
    }
    let mut degree_hist = BTreeMap::new();
    let mut triangle_hist = BTreeMap::new();
    for p in &profiles {
        let max_tri = p.degree as u64 * (p.degree as u64).saturating_sub(1) / 2;
        if p.triangles > max_tri {
            return Err(Error::Inconsistent(format!(
                "vertex {} has {} triangles with degree {}",
                p.vertex, p.triangles, p.degree
            )));
        }
        *degree_hist.entry(p.degree as u64).or_insert(0) += 1;
        *triangle_hist.entry(p.triangles).or_insert(0) += 1;
    }
    let stats = GraphStats {
        n_rounds,
        effective_vertices: profiles.len() as u64,
        total_edges: degree_sum / 2,
        degree_hist,
        triangle_hist,
    };
    stats.check_invariants()?;
    Ok(stats)
}
