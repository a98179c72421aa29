//! CSV formats.
//!
//! | file            | header                                   |
//! |-----------------|------------------------------------------|
//! | measure         | `atom_id,weight,label`                   |
//! | multigraph      | `i,j,count`                              |
//! | binary graph    | `i,j`                                    |
//! | stats (wide)    | `N,V,E,D_1,...,D_k,T_0,...,T_m`          |
//! | stats (long)    | `N,kind,r,count`                         |
//! | sweep           | `replica,N,V,E,D1,T0,T1`                 |
//! | sweep histogram | `replica,N,kind,r,count`                 |
//!
//! Edge rows are written in lexicographic `(i, j)` order. Measure weights and
//! labels are written with 17 significant digits, which round-trips every
//! `f64` exactly.
//!
//! Readers accept untrusted text: they return [`Error::Parse`] on malformed
//! input and never panic.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use crate::crm::AtomicMeasure;
use crate::error::{Error, Result};
use crate::experiment::SweepRow;
use crate::graphgen::{BinaryGraph, MultiGraph};
use crate::stats::GraphStats;

pub const MEASURE_HEADER: [&str; 3] = ["atom_id", "weight", "label"];
pub const MULTIGRAPH_HEADER: [&str; 3] = ["i", "j", "count"];
pub const BINARY_HEADER: [&str; 2] = ["i", "j"];

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, e.to_string())
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(csv_error)?;
    if !headers.iter().eq(expected.iter().copied()) {
        return Err(Error::parse(
            1,
            format!(
                "expected header {:?}, got {:?}",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
    let raw = record
        .get(idx)
        .ok_or_else(|| Error::parse(line, format!("missing column {name}")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("cannot parse {name} from {raw:?}")))
}

fn line_of(record: &csv::StringRecord) -> usize {
    record.position().map(|p| p.line() as usize).unwrap_or(0)
}

pub fn write_measure_csv<W: Write>(measure: &AtomicMeasure, mut out: W) -> Result<()> {
    writeln!(out, "{}", MEASURE_HEADER.join(","))?;
    for (id, (w, l)) in measure.atoms().enumerate() {
        writeln!(out, "{id},{w:.16e},{l:.16e}")?;
    }
    Ok(())
}

/// Reads a measure. Atom ids must be `0, 1, 2, ...` in order.
pub fn read_measure_csv<R: Read>(input: R) -> Result<AtomicMeasure> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &MEASURE_HEADER)?;
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let id: u64 = field(&record, 0, "atom_id")?;
        if id != weights.len() as u64 {
            return Err(Error::parse(
                line_of(&record),
                format!("atom_id {id} out of sequence, expected {}", weights.len()),
            ));
        }
        weights.push(field::<f64>(&record, 1, "weight")?);
        labels.push(field::<f64>(&record, 2, "label")?);
    }
    AtomicMeasure::new(weights, labels).map_err(|e| Error::parse(0, e.to_string()))
}

pub fn write_multigraph_csv<W: Write>(graph: &MultiGraph, mut out: W) -> Result<()> {
    writeln!(out, "{}", MULTIGRAPH_HEADER.join(","))?;
    for ((i, j), c) in graph.iter() {
        writeln!(out, "{i},{j},{c}")?;
    }
    Ok(())
}

pub fn write_binary_csv<W: Write>(graph: &BinaryGraph, mut out: W) -> Result<()> {
    writeln!(out, "{}", BINARY_HEADER.join(","))?;
    for (i, j) in graph.edges() {
        writeln!(out, "{i},{j}")?;
    }
    Ok(())
}

fn read_triples<R: Read>(input: R, with_count: bool) -> Result<Vec<(u32, u32, u64)>> {
    let mut rdr = reader(input);
    let header: &[&str] = if with_count { &MULTIGRAPH_HEADER } else { &BINARY_HEADER };
    check_header(&mut rdr, header)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let i = field(&record, 0, "i")?;
        let j = field(&record, 1, "j")?;
        let c = if with_count { field(&record, 2, "count")? } else { 1 };
        out.push((i, j, c));
    }
    Ok(out)
}

fn atom_count_for(triples: &[(u32, u32, u64)]) -> usize {
    triples
        .iter()
        .map(|&(i, j, _)| i.max(j) as usize + 1)
        .max()
        .unwrap_or(0)
}

/// Reads `i,j,count`. The atom count is one past the largest id; the round
/// count is `n_rounds` if given, else the largest count.
pub fn read_multigraph_csv<R: Read>(input: R, n_rounds: Option<u64>) -> Result<MultiGraph> {
    let triples = read_triples(input, true)?;
    let n = n_rounds.unwrap_or_else(|| triples.iter().map(|t| t.2).max().unwrap_or(0));
    MultiGraph::from_counts(atom_count_for(&triples), n, triples).map_err(|e| Error::parse(0, e.to_string()))
}

/// Reads a binary edge list, either `i,j` or `i,j,count` (nonzero counts).
pub fn read_edge_list<R: Read>(input: R) -> Result<BinaryGraph> {
    let mut buf = BufReader::new(input);
    let mut first = String::new();
    buf.read_line(&mut first)?;
    let header: Vec<String> = first.trim().split(',').map(|s| s.trim().to_string()).collect();
    let with_count = header == MULTIGRAPH_HEADER;
    let rest = std::io::Cursor::new(first.into_bytes()).chain(buf);
    let triples = read_triples(rest, with_count)?;
    if let Some(&(i, j, _)) = triples.iter().find(|t| t.2 == 0) {
        return Err(Error::parse(0, format!("pair ({i}, {j}) has count 0")));
    }
    let atom_count = atom_count_for(&triples);
    BinaryGraph::from_edges(atom_count, triples.into_iter().map(|(i, j, _)| (i, j)))
        .map_err(|e| Error::parse(0, e.to_string()))
}

/// Reads the named numeric columns of a CSV with a header row.
pub fn read_csv_columns<R: Read>(input: R, names: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = reader(input);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let idx = names
        .iter()
        .map(|name| {
            headers
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| Error::parse(1, format!("no column named {name:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![Vec::new(); names.len()];
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        for (col, (&i, name)) in columns.iter_mut().zip(idx.iter().zip(names)) {
            col.push(field(&record, i, name)?);
        }
    }
    Ok(columns)
}

/// Reads nonnegative integers, one per line. Blank lines are skipped and a
/// non-numeric first line is taken as a header.
pub fn read_samples<R: Read>(input: R) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    let mut seen_content = false;
    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        match text.parse::<u64>() {
            Ok(v) => out.push(v),
            Err(_) if !seen_content => {}
            Err(_) => return Err(Error::parse(idx + 1, format!("not a nonnegative integer: {text:?}"))),
        }
        seen_content = true;
    }
    Ok(out)
}

/// Wide stats table. Degree columns run from 1 and triangle columns from 0 up
/// to the largest value seen in any row.
pub fn write_stats_wide<W: Write>(stats: &[GraphStats], mut out: W) -> Result<()> {
    let max_d = stats
        .iter()
        .filter_map(|s| s.degree_hist.keys().last().copied())
        .max()
        .unwrap_or(0);
    let max_t = stats
        .iter()
        .filter_map(|s| s.triangle_hist.keys().last().copied())
        .max();
    let mut header = vec!["N".to_string(), "V".to_string(), "E".to_string()];
    header.extend((1..=max_d).map(|r| format!("D_{r}")));
    if let Some(max_t) = max_t {
        header.extend((0..=max_t).map(|r| format!("T_{r}")));
    }
    writeln!(out, "{}", header.join(","))?;
    for s in stats {
        let mut row = vec![s.n_rounds, s.effective_vertices, s.total_edges];
        row.extend((1..=max_d).map(|r| s.degree_count(r)));
        if let Some(max_t) = max_t {
            row.extend((0..=max_t).map(|r| s.triangle_count(r)));
        }
        let row: Vec<String> = row.iter().map(u64::to_string).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn hist_rows<'a>(s: &'a GraphStats) -> impl Iterator<Item = (&'static str, u64, u64)> + 'a {
    s.degree_hist
        .iter()
        .map(|(&r, &c)| ("degree", r, c))
        .chain(s.triangle_hist.iter().map(|(&r, &c)| ("triangle", r, c)))
}

/// Long histogram table `N,kind,r,count`; zero counts are omitted.
pub fn write_stats_long<W: Write>(stats: &[GraphStats], mut out: W) -> Result<()> {
    writeln!(out, "N,kind,r,count")?;
    for s in stats {
        for (kind, r, c) in hist_rows(s) {
            writeln!(out, "{},{kind},{r},{c}", s.n_rounds)?;
        }
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "replica,N,V,E,D1,T0,T1")?;
    for row in rows {
        let s = &row.stats;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            row.replica,
            s.n_rounds,
            s.effective_vertices,
            s.total_edges,
            s.degree_count(1),
            s.triangle_count(0),
            s.triangle_count(1)
        )?;
    }
    Ok(())
}

pub fn write_hist_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "replica,N,kind,r,count")?;
    for row in rows {
        for (kind, r, c) in hist_rows(&row.stats) {
            writeln!(out, "{},{},{kind},{r},{c}", row.replica, row.stats.n_rounds)?;
        }
    }
    Ok(())
}

/// Reads `hist.csv` back into per-snapshot histograms keyed by `(replica, N)`.
pub fn read_hist_csv<R: Read>(input: R) -> Result<BTreeMap<(u32, u64), GraphStats>> {
    let mut rdr = reader(input);
    check_header(&mut rdr, &["replica", "N", "kind", "r", "count"])?;
    let mut out: BTreeMap<(u32, u64), GraphStats> = BTreeMap::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let replica: u32 = field(&record, 0, "replica")?;
        let n: u64 = field(&record, 1, "N")?;
        let r: u64 = field(&record, 3, "r")?;
        let c: u64 = field(&record, 4, "count")?;
        let entry = out.entry((replica, n)).or_insert_with(|| GraphStats {
            n_rounds: n,
            ..GraphStats::default()
        });
        let hist = match record.get(2) {
            Some("degree") => &mut entry.degree_hist,
            Some("triangle") => &mut entry.triangle_hist,
            other => return Err(Error::parse(line_of(&record), format!("unknown kind {other:?}"))),
        };
        if hist.insert(r, c).is_some() {
            return Err(Error::parse(line_of(&record), format!("duplicate bin r={r}")));
        }
    }
    for s in out.values_mut() {
        s.effective_vertices = s.degree_hist.values().fold(0u64, |a, &c| a.saturating_add(c));
        let degree_sum = s
            .degree_hist
            .iter()
            .fold(0u64, |a, (&r, &c)| a.saturating_add(r.saturating_mul(c)));
        s.total_edges = degree_sum / 2;
    }
    Ok(out)
}
