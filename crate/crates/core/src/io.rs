//! CSV ingestion and fixed-precision output formatting.

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, GroupAssignment};
use serde::{Serialize, Serializer};
use std::path::Path;

/// Whether node ids in input files start at 0 or 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexBase {
    #[default]
    Zero,
    One,
}

impl IndexBase {
    fn offset(self) -> u64 {
        match self {
            IndexBase::Zero => 0,
            IndexBase::One => 1,
        }
    }
}

/// A network read from disk together with its node groups.
#[derive(Clone, Debug)]
pub struct Network {
    pub adjacency: AdjacencyMatrix,
    pub groups: GroupAssignment,
    /// Original group labels, indexed by internal group id.
    pub group_labels: Vec<String>,
    pub duplicate_arcs: usize,
}

fn open(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io { path: path.display().to_string(), source },
        kind => Error::Parse {
            path: path.display().to_string(),
            line,
            message: format!("{kind:?}"),
        },
    }
}

fn check_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, want: [&str; 2]) -> Result<()> {
    let headers = rdr.headers().map_err(|e| csv_error(path, e))?;
    let got: Vec<&str> = headers.iter().collect();
    if got.len() < 2 || got[0] != want[0] || got[1] != want[1] {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: format!("expected header `{},{}`, found `{}`", want[0], want[1], got.join(",")),
        });
    }
    Ok(())
}

fn parse_id(path: &Path, line: u64, field: &str, base: IndexBase) -> Result<usize> {
    let parse_err = |message: String| Error::Parse {
        path: path.display().to_string(),
        line,
        message,
    };
    let raw: u64 = field
        .parse()
        .map_err(|_| parse_err(format!("`{field}` is not a non-negative integer node id")))?;
    raw.checked_sub(base.offset())
        .map(|v| v as usize)
        .ok_or_else(|| parse_err(format!("node id {raw} is below the index base")))
}

/// Reads a `source,target` edge list.
pub fn read_edges(path: &Path, base: IndexBase) -> Result<Vec<(usize, usize)>> {
    let mut rdr = open(path)?;
    check_header(path, &mut rdr, ["source", "target"])?;
    let mut edges = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 2 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("expected 2 fields, found {}", rec.len()),
            });
        }
        let i = parse_id(path, line, &rec[0], base)?;
        let j = parse_id(path, line, &rec[1], base)?;
        if i == j {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: format!("self-loop on node {}", &rec[0]),
            });
        }
        edges.push((i, j));
    }
    Ok(edges)
}

/// Reads a `node,group` table. Every node `0..N` must appear exactly once.
/// Group labels are mapped to internal ids in sorted order (numerically if
/// every label is an integer).
pub fn read_nodes(path: &Path, base: IndexBase) -> Result<(GroupAssignment, Vec<String>)> {
    let mut rdr = open(path)?;
    check_header(path, &mut rdr, ["node", "group"])?;
    let mut rows: Vec<(usize, String, u64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 2 || rec[1].is_empty() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line,
                message: "expected `node,group` with a non-empty group".into(),
            });
        }
        rows.push((parse_id(path, line, &rec[0], base)?, rec[1].to_string(), line));
    }
    let n = rows.len();
    let mut seen = vec![false; n];
    for (node, _, line) in &rows {
        if *node >= n || seen[*node] {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: *line,
                message: format!("node ids must be a permutation of 0..{n} after the index base"),
            });
        }
        seen[*node] = true;
    }
    let mut labels: Vec<String> = rows.iter().map(|r| r.1.clone()).collect();
    labels.sort();
    labels.dedup();
    if labels.iter().all(|l| l.parse::<i64>().is_ok()) {
        labels.sort_by_key(|l| l.parse::<i64>().unwrap());
    }
    let index: std::collections::HashMap<&str, usize> =
        labels.iter().enumerate().map(|(k, l)| (l.as_str(), k)).collect();
    let mut groups = vec![0; n];
    for (node, label, _) in &rows {
        groups[*node] = index[label.as_str()];
    }
    let k = labels.len().max(1);
    let groups = GroupAssignment::new(groups, k)?;
    Ok((groups, labels))
}

/// Loads an edge list and, optionally, a node table. Without a node table
/// every node is in one group and `N` is the largest id plus one.
pub fn load_network(edges: &Path, nodes: Option<&Path>, base: IndexBase) -> Result<Network> {
    let arcs = read_edges(edges, base)?;
    let (groups, group_labels) = match nodes {
        Some(p) => read_nodes(p, base)?,
        None => {
            let n = arcs.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0);
            (GroupAssignment::single(n), vec!["all".to_string()])
        }
    };
    let n = groups.n_nodes();
    if let Some(&(i, j)) = arcs.iter().find(|&&(i, j)| i >= n || j >= n) {
        return Err(Error::invalid(format!(
            "edge ({i}, {j}) references a node missing from the node table (N = {n})"
        )));
    }
    let (adjacency, duplicate_arcs) = AdjacencyMatrix::from_edge_list(&arcs, n)?;
    if duplicate_arcs > 0 {
        log::warn!("{duplicate_arcs} duplicate arcs collapsed");
    }
    Ok(Network { adjacency, groups, group_labels, duplicate_arcs })
}

pub fn write_edges(path: &Path, d: &AdjacencyMatrix, base: IndexBase) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["source", "target"]).map_err(|e| csv_error(path, e))?;
    let off = base.offset() as usize;
    for (i, j) in d.to_edge_list() {
        w.write_record([(i + off).to_string(), (j + off).to_string()])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}

/// Formats a float with 17 significant digits; non-finite values become
/// `NaN`, `inf` or `-inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A float serialized to JSON with 17 significant digits. Non-finite
/// values serialize as `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed17(pub f64);

impl Serialize for Fixed17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = serde_json::value::RawValue::from_string(fmt17(self.0))
            .map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

/// `serialize_with` form of [`Fixed17`] for plain `f64` fields.
pub fn serialize_fixed17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    Fixed17(*x).serialize(s)
}

pub fn fixed_vec(xs: &[f64]) -> Vec<Fixed17> {
    xs.iter().copied().map(Fixed17).collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    s.push('\n');
    std::fs::write(path, s).map_err(|e| Error::Io { path: path.display().to_string(), source: e })
}
