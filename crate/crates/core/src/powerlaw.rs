//! Log-log regressions for power-law scaling.
//!
//! Types I, IIa and IIb relate counts across snapshots (`E_N`, `D_{N,r}` or
//! `T_{N,r}` against `V_N`) and are fitted by ordinary least squares on
//! `(log10 x, log10 y)`. Types IIIa and IIIb are tail laws of a single
//! snapshot: the empirical survival function `P(X > M)` of per-vertex degrees
//! or triangle counts, fitted the same way against `M`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::experiment::SweepRow;

/// Minimum number of points a fit may use.
pub const MIN_FIT_POINTS: usize = 5;

/// Largest sample value a survival curve is built for; the curve is dense in `M`.
pub const MAX_CCDF_VALUE: u64 = 1 << 24;

/// Minimum number of distinct `N` values for Types I and II.
pub const MIN_SWEEP_SNAPSHOTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    /// Intercept in log10 units, i.e. `log10 c`.
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub lower_q: f64,
    pub upper_q: f64,
    /// x-range actually used.
    pub x_lo: f64,
    pub x_hi: f64,
}

impl LogLogFit {
    pub fn predict(&self, x: f64) -> f64 {
        10f64.powf(self.intercept + self.slope * x.log10())
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let h = q * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// OLS of `log10 y` on `log10 x` over points whose x lies between the
/// `lower_q` and `upper_q` quantiles of `xs`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], lower_q: f64, upper_q: f64) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::Fit(format!("{} x values but {} y values", xs.len(), ys.len())));
    }
    if !(0.0..1.0).contains(&lower_q) || !(upper_q > 0.0 && upper_q <= 1.0) || lower_q >= upper_q {
        return Err(Error::Fit(format!(
            "quantile bounds must satisfy 0 <= lower < upper <= 1, got [{lower_q}, {upper_q}]"
        )));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Fit(format!("log-log fit needs positive finite values, got {v}")));
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "need at least {MIN_FIT_POINTS} points, got {}",
            xs.len()
        )));
    }

    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let x_lo = quantile(&sorted, lower_q);
    let x_hi = quantile(&sorted, upper_q);

    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, _)| **x >= x_lo && **x <= x_hi)
        .map(|(x, y)| (x.log10(), y.log10()))
        .unzip();
    let n = lx.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "only {n} points within x-quantiles [{lower_q}, {upper_q}], need {MIN_FIT_POINTS}"
        )));
    }

    let mean_x = lx.iter().sum::<f64>() / n as f64;
    let mean_y = ly.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::Fit("x values are constant over the fit range".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };

    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
        n_points: n,
        lower_q,
        upper_q,
        x_lo,
        x_hi,
    })
}

/// Empirical survival function `P(X > M)` at `M = 0, 1, ..., max - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub thresholds: Vec<u64>,
    pub survival: Vec<f64>,
    pub sample_count: u64,
}

impl CcdfCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.thresholds.iter().copied().zip(self.survival.iter().copied())
    }
}

pub fn ccdf(samples: &[u64]) -> Result<CcdfCurve> {
    let mut hist = BTreeMap::new();
    for &s in samples {
        *hist.entry(s).or_insert(0u64) += 1;
    }
    ccdf_from_histogram(&hist)
}

/// Same as [`ccdf`] for samples given as `value -> multiplicity`.
pub fn ccdf_from_histogram(hist: &BTreeMap<u64, u64>) -> Result<CcdfCurve> {
    let total: u64 = hist.values().sum();
    if total == 0 {
        return Err(Error::Domain("survival curve of an empty sample".into()));
    }
    let max = hist.iter().rev().find(|(_, &c)| c > 0).map(|(&v, _)| v).unwrap_or(0);
    if max == 0 {
        return Err(Error::Domain(
            "survival curve needs at least one positive sample".into(),
        ));
    }
    if max > MAX_CCDF_VALUE {
        return Err(Error::SizeGuard(format!(
            "sample value {max} exceeds the survival-curve limit {MAX_CCDF_VALUE}"
        )));
    }
    let mut thresholds = Vec::with_capacity(max as usize);
    let mut survival = Vec::with_capacity(max as usize);
    let mut at_most: u64 = 0;
    let mut iter = hist.iter().peekable();
    for m in 0..max {
        while let Some((&v, &c)) = iter.peek() {
            if v > m {
                break;
            }
            at_most += c;
            iter.next();
        }
        thresholds.push(m);
        survival.push((total - at_most) as f64 / total as f64);
    }
    Ok(CcdfCurve {
        thresholds,
        survival,
        sample_count: total,
    })
}

/// Log-log fit of `P(X > M)` against `M ≥ 1`, restricted to the given
/// quantiles of the thresholds.
///
/// Only thresholds where the curve steps down (observed sample values) are
/// used; the flat runs between sparse tail values would otherwise dominate
/// the fit.
pub fn fit_ccdf(curve: &CcdfCurve, lower_q: f64, upper_q: f64) -> Result<LogLogFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = curve
        .survival
        .windows(2)
        .zip(curve.thresholds.iter().skip(1))
        .filter(|&(w, _)| w[1] < w[0] && w[1] > 0.0)
        .map(|(w, &m)| (m as f64, w[1]))
        .unzip();
    fit_loglog(&xs, &ys, lower_q, upper_q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PowerLawKind {
    /// `E_N` against `V_N`.
    I,
    /// `D_{N,r}` against `V_N`.
    IIa,
    /// `T_{N,r}` against `V_N`.
    IIb,
    /// Survival of per-vertex degree.
    IIIa,
    /// Survival of per-vertex triangle count.
    IIIb,
}

impl PowerLawKind {
    pub const ALL: [PowerLawKind; 5] = [Self::I, Self::IIa, Self::IIb, Self::IIIa, Self::IIIb];

    pub fn label(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::IIa => "IIa",
            Self::IIb => "IIb",
            Self::IIIa => "IIIa",
            Self::IIIb => "IIIb",
        }
    }

    fn is_tail(self) -> bool {
        matches!(self, Self::IIIa | Self::IIIb)
    }
}

impl fmt::Display for PowerLawKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// x-quantile bounds for Types I and II.
    pub lower_q: f64,
    pub upper_q: f64,
    /// Threshold-quantile bounds for Types IIIa and IIIb.
    pub tail_lower_q: f64,
    pub tail_upper_q: f64,
    /// `r` of `D_{N,r}` for Type IIa.
    pub degree_r: u64,
    /// `r` of `T_{N,r}` for Type IIb.
    pub triangle_r: u64,
    /// Snapshot for Types IIIa/IIIb; defaults to the largest `N`.
    pub tail_n: Option<u64>,
    pub per_replica: bool,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            lower_q: 0.5,
            upper_q: 1.0,
            tail_lower_q: 0.0,
            tail_upper_q: 0.8,
            degree_r: 1,
            triangle_r: 1,
            tail_n: None,
            per_replica: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FitScope {
    Pooled,
    Replica(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitOutcome {
    Fitted(LogLogFit),
    Unavailable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeFit {
    pub kind: PowerLawKind,
    pub scope: FitScope,
    pub outcome: FitOutcome,
    /// Points dropped before the log transform because a coordinate was zero.
    pub dropped: usize,
    /// Type I only: slope < 2.
    pub sparse: Option<bool>,
    pub lower_q: f64,
    pub upper_q: f64,
}

impl TypeFit {
    pub fn fit(&self) -> Option<&LogLogFit> {
        match &self.outcome {
            FitOutcome::Fitted(f) => Some(f),
            FitOutcome::Unavailable(_) => None,
        }
    }

    pub fn label(&self) -> String {
        match self.scope {
            FitScope::Pooled => self.kind.label().to_string(),
            FitScope::Replica(r) => format!("{}/replica={r}", self.kind.label()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitReport {
    pub fits: Vec<TypeFit>,
}

impl FitReport {
    pub fn get(&self, kind: PowerLawKind, scope: FitScope) -> Option<&TypeFit> {
        self.fits.iter().find(|f| f.kind == kind && f.scope == scope)
    }

    pub fn pooled(&self, kind: PowerLawKind) -> Option<&LogLogFit> {
        self.get(kind, FitScope::Pooled).and_then(TypeFit::fit)
    }

    /// `type,slope,intercept,r2,n_points,lower_q,upper_q`; unavailable fits
    /// print `NaN` and zero points.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "type,slope,intercept,r2,n_points,lower_q,upper_q")?;
        for f in &self.fits {
            match f.fit() {
                Some(fit) => writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    f.label(),
                    fit.slope,
                    fit.intercept,
                    fit.r_squared,
                    fit.n_points,
                    f.lower_q,
                    f.upper_q
                )?,
                None => writeln!(out, "{},NaN,NaN,NaN,0,{},{}", f.label(), f.lower_q, f.upper_q)?,
            }
        }
        Ok(())
    }

    /// JSON mirror of [`write_csv`](Self::write_csv) with the extra per-fit
    /// metadata.
    pub fn to_json(&self) -> serde_json::Value {
        let fits: Vec<serde_json::Value> = self
            .fits
            .iter()
            .map(|f| {
                let replica = match f.scope {
                    FitScope::Pooled => None,
                    FitScope::Replica(r) => Some(r),
                };
                let (slope, intercept, r2, n_points, x_lo, x_hi, reason) = match &f.outcome {
                    FitOutcome::Fitted(fit) => (
                        Some(fit.slope),
                        Some(fit.intercept),
                        Some(fit.r_squared),
                        fit.n_points,
                        Some(fit.x_lo),
                        Some(fit.x_hi),
                        None,
                    ),
                    FitOutcome::Unavailable(why) => (None, None, None, 0, None, None, Some(why.clone())),
                };
                json!({
                    "type": f.label(),
                    "kind": f.kind.label(),
                    "replica": replica,
                    "slope": slope,
                    "intercept": intercept,
                    "r2": r2,
                    "n_points": n_points,
                    "lower_q": f.lower_q,
                    "upper_q": f.upper_q,
                    "x_lo": x_lo,
                    "x_hi": x_hi,
                    "dropped": f.dropped,
                    "sparse": f.sparse,
                    "unavailable": reason,
                })
            })
            .collect();
        json!({ "fits": fits })
    }
}

/// Fits every power-law type on a sweep, pooled over replicas and (if asked)
/// per replica. Missing data makes a single type unavailable rather than
/// failing the report.
pub fn classify(rows: &[SweepRow], opts: &ClassifyOptions) -> FitReport {
    let mut fits: Vec<TypeFit> = PowerLawKind::ALL
        .iter()
        .map(|&kind| fit_type(kind, FitScope::Pooled, rows.iter(), opts))
        .collect();
    if opts.per_replica {
        let replicas: BTreeSet<u32> = rows.iter().map(|r| r.replica).collect();
        for replica in replicas {
            for kind in PowerLawKind::ALL {
                let subset = rows.iter().filter(|r| r.replica == replica);
                fits.push(fit_type(kind, FitScope::Replica(replica), subset, opts));
            }
        }
    }
    FitReport { fits }
}

fn fit_type<'a>(
    kind: PowerLawKind,
    scope: FitScope,
    rows: impl Iterator<Item = &'a SweepRow> + Clone,
    opts: &ClassifyOptions,
) -> TypeFit {
    let (lower_q, upper_q) = if kind.is_tail() {
        (opts.tail_lower_q, opts.tail_upper_q)
    } else {
        (opts.lower_q, opts.upper_q)
    };
    let mut out = TypeFit {
        kind,
        scope,
        outcome: FitOutcome::Unavailable(String::new()),
        dropped: 0,
        sparse: None,
        lower_q,
        upper_q,
    };

    if kind.is_tail() {
        let Some(n) = opts.tail_n.or_else(|| rows.clone().map(|r| r.stats.n_rounds).max()) else {
            out.outcome = FitOutcome::Unavailable("no snapshots".into());
            return out;
        };
        let mut hist = BTreeMap::new();
        for row in rows.filter(|r| r.stats.n_rounds == n) {
            let source = if kind == PowerLawKind::IIIa {
                &row.stats.degree_hist
            } else {
                &row.stats.triangle_hist
            };
            for (&v, &c) in source {
                *hist.entry(v).or_insert(0) += c;
            }
        }
        out.outcome = match ccdf_from_histogram(&hist).and_then(|c| fit_ccdf(&c, lower_q, upper_q)) {
            Ok(fit) => FitOutcome::Fitted(fit),
            Err(e) => FitOutcome::Unavailable(format!("N={n}: {e}")),
        };
        return out;
    }

    let snapshots: BTreeSet<u64> = rows.clone().map(|r| r.stats.n_rounds).collect();
    if snapshots.len() < MIN_SWEEP_SNAPSHOTS {
        out.outcome = FitOutcome::Unavailable(format!(
            "{} distinct N values, need {MIN_SWEEP_SNAPSHOTS}",
            snapshots.len()
        ));
        return out;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for row in rows {
        let s = &row.stats;
        let y = match kind {
            PowerLawKind::I => s.total_edges,
            PowerLawKind::IIa => s.degree_count(opts.degree_r),
            _ => s.triangle_count(opts.triangle_r),
        };
        if s.effective_vertices == 0 || y == 0 {
            out.dropped += 1;
            continue;
        }
        xs.push(s.effective_vertices as f64);
        ys.push(y as f64);
    }
    out.outcome = match fit_loglog(&xs, &ys, lower_q, upper_q) {
        Ok(fit) => {
            if kind == PowerLawKind::I {
                out.sparse = Some(fit.slope < 2.0);
            }
            FitOutcome::Fitted(fit)
        }
        Err(e) => FitOutcome::Unavailable(e.to_string()),
    };
    out
}
