//! Oracles shared by the integration tests. Nothing here calls into the
//! library code it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Random simple graph on `n` vertices, each pair present with probability `p`.
pub fn random_edges(n: u32, p: f64, seed: u64) -> Vec<(u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Dense adjacency matrix.
pub fn matrix(n: u32, edges: &[(u32, u32)]) -> Vec<Vec<bool>> {
    let mut a = vec![vec![false; n as usize]; n as usize];
    for &(i, j) in edges {
        a[i as usize][j as usize] = true;
        a[j as usize][i as usize] = true;
    }
    a
}

/// Degree of every vertex with at least one edge.
pub fn brute_degrees(n: u32, edges: &[(u32, u32)]) -> BTreeMap<u32, u32> {
    let a = matrix(n, edges);
    (0..n)
        .map(|v| (v, a[v as usize].iter().filter(|&&x| x).count() as u32))
        .filter(|&(_, d)| d > 0)
        .collect()
}

/// Triangles through every non-isolated vertex, by enumerating all triples.
pub fn brute_triangles(n: u32, edges: &[(u32, u32)]) -> BTreeMap<u32, u64> {
    let a = matrix(n, edges);
    let mut tri: BTreeMap<u32, u64> = brute_degrees(n, edges).keys().map(|&v| (v, 0)).collect();
    let n = n as usize;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    for v in [i, j, k] {
                        *tri.get_mut(&(v as u32)).unwrap() += 1;
                    }
                }
            }
        }
    }
    tri
}

pub fn histogram<V: Copy + Into<u64>>(values: impl IntoIterator<Item = V>) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v.into()).or_insert(0) += 1;
    }
    h
}

/// Two-sample chi-square homogeneity statistic over integer-valued samples.
///
/// Adjacent values are merged left to right until every cell has an expected
/// count of at least 5 in both samples; a short trailing cell is folded into
/// its predecessor. Returns `(statistic, degrees of freedom)`.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, usize) {
    let ha = histogram(a.iter().copied());
    let hb = histogram(b.iter().copied());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut values: Vec<u64> = ha.keys().chain(hb.keys()).copied().collect();
    values.sort_unstable();
    values.dedup();

    let min_share = |ca: f64, cb: f64| (ca + cb) * na.min(nb) / total;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut ca, mut cb) = (0.0, 0.0);
    for v in values {
        ca += *ha.get(&v).unwrap_or(&0) as f64;
        cb += *hb.get(&v).unwrap_or(&0) as f64;
        if min_share(ca, cb) >= 5.0 {
            cells.push((ca, cb));
            ca = 0.0;
            cb = 0.0;
        }
    }
    if ca + cb > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += ca;
                last.1 += cb;
            }
            None => cells.push((ca, cb)),
        }
    }
    let mut stat = 0.0;
    for &(ca, cb) in &cells {
        let col = ca + cb;
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (ca - ea).powi(2) / ea + (cb - eb).powi(2) / eb;
    }
    (stat, cells.len().saturating_sub(1))
}

/// Upper-tail probability of a chi-square statistic.
pub fn chi_square_p(stat: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat)
}

/// Composite 5-point Gauss-Legendre quadrature on `[a, b]`. Never evaluates
/// the endpoints.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for k in 0..5 {
            sum += W[k] * f(mid + 0.5 * h * X[k]);
        }
    }
    sum * 0.5 * h
}

/// Closed-form simple linear regression: `(slope, intercept, r²)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let r = (n * sxy - sx * sy) / ((n * sxx - sx * sx) * (n * syy - sy * sy)).sqrt();
    (slope, intercept, r * r)
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
