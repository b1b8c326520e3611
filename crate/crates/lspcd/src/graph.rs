//! Sparse symmetric signed graphs and edge-list ingestion.
//!
//! A [`SignedGraph`] stores a symmetric weighted adjacency in compressed
//! sparse rows, with both directions of every undirected edge present, a
//! zero diagonal, and no explicit zero weights. Graphs are immutable after
//! construction and safe to share across concurrent solver runs.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex id {id} out of range (n = {n})")]
    VertexOutOfRange { id: u32, n: usize },
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("edge ({0}, {1}) has non-finite weight")]
    NonFiniteWeight(u32, u32),
    #[error("vertex count {n} too small for max vertex id {max_id}")]
    VertexCountTooSmall { n: usize, max_id: u32 },
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: malformed record: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: self-loop on vertex {id}")]
    SelfLoop { line: usize, id: u64 },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: u64, v: u64 },
    #[error("line {line}: asymmetric pair ({u}, {v}): weights {w_uv} and {w_vu}")]
    AsymmetricPair {
        line: usize,
        u: u64,
        v: u64,
        w_uv: f64,
        w_vu: f64,
    },
    #[error("line {line}: vertex id {id} below index base {base}")]
    IdBelowBase { line: usize, id: u64, base: u32 },
    #[error("vertex count override {n} too small for max vertex id {max_id}")]
    VertexCountTooSmall { n: usize, max_id: u32 },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// What to do when the same ordered pair `(u, v)` appears more than once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Error,
    /// Sum the weights of all records for the ordered pair.
    Sum,
}

/// What to do when `(u, v)` and `(v, u)` both appear with different weights.
///
/// Records carrying the same weight in both orientations are always accepted
/// as one symmetric edge. The default forces an explicit choice for
/// genuinely directed inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AsymmetryPolicy {
    #[default]
    Error,
    /// Symmetrize as `A_uv = A_vu = (w_uv + w_vu) / 2`.
    SumThenHalve,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Smallest legal vertex id in the input (0 or 1).
    pub index_base: u32,
    pub duplicate_policy: DuplicatePolicy,
    pub asymmetry_policy: AsymmetryPolicy,
    /// Lines whose first non-blank character is this are skipped.
    pub comment_prefix: char,
    /// Force the vertex count; allows trailing isolated vertices beyond the
    /// largest id present in the input.
    pub n_override: Option<usize>,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            index_base: 0,
            duplicate_policy: DuplicatePolicy::Error,
            asymmetry_policy: AsymmetryPolicy::Error,
            comment_prefix: '#',
            n_override: None,
        }
    }
}

/// Immutable symmetric signed graph in CSR form.
///
/// Every stored entry `(i, j, w)` has its mirror `(j, i, w)` stored as well,
/// so iterating all entries visits every ordered pair of adjacent vertices
/// exactly once. Neighbor lists are sorted by id.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    weights: Vec<f64>,
    edge_count: usize,
}

impl SignedGraph {
    /// Build a graph from undirected edges, each given once as `(u, v, w)`.
    ///
    /// Rejects self-loops, zero or non-finite weights, duplicate pairs
    /// (in either orientation), and ids `>= n`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32, f64)>,
    {
        let mut undirected: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v, w) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !w.is_finite() {
                return Err(GraphError::NonFiniteWeight(u, v));
            }
            for id in [u, v] {
                if id as usize >= n {
                    return Err(GraphError::VertexOutOfRange { id, n });
                }
            }
            if w == 0.0 {
                continue;
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            undirected.push((a, b, w));
        }
        undirected.sort_unstable_by_key(|&(u, v, _)| (u, v));
        for pair in undirected.windows(2) {
            if pair[0].0 == pair[1].0 && pair[0].1 == pair[1].1 {
                return Err(GraphError::DuplicateEdge(pair[0].0, pair[0].1));
            }
        }

        let edge_count = undirected.len();
        let mut degree = vec![0usize; n];
        for &(u, v, _) in &undirected {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + degree[i];
        }
        let mut cols = vec![0u32; 2 * edge_count];
        let mut weights = vec![0f64; 2 * edge_count];
        let mut cursor = row_ptr.clone();
        for &(u, v, w) in &undirected {
            let cu = cursor[u as usize];
            cols[cu] = v;
            weights[cu] = w;
            cursor[u as usize] += 1;
            let cv = cursor[v as usize];
            cols[cv] = u;
            weights[cv] = w;
            cursor[v as usize] += 1;
        }
        // Rows were filled in order of sorted (u, v) pairs: row u is already
        // sorted, row v receives u's in ascending order too, but mixed rows
        // (a vertex appearing as both endpoint kinds) need a sort.
        for i in 0..n {
            let (lo, hi) = (row_ptr[i], row_ptr[i + 1]);
            let mut row: Vec<(u32, f64)> = cols[lo..hi]
                .iter()
                .copied()
                .zip(weights[lo..hi].iter().copied())
                .collect();
            row.sort_unstable_by_key(|&(j, _)| j);
            for (off, (j, w)) in row.into_iter().enumerate() {
                cols[lo + off] = j;
                weights[lo + off] = w;
            }
        }
        Ok(SignedGraph {
            n,
            row_ptr,
            cols,
            weights,
            edge_count,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected nonzero edges.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn check_id(&self, i: u32) -> Result<usize, GraphError> {
        if (i as usize) < self.n {
            Ok(i as usize)
        } else {
            Err(GraphError::VertexOutOfRange { id: i, n: self.n })
        }
    }

    /// The stored row `A[i, :]` restricted to nonzeros, sorted by neighbor id.
    pub fn neighbors(&self, i: u32) -> Result<impl Iterator<Item = (u32, f64)> + '_, GraphError> {
        let i = self.check_id(i)?;
        Ok(self
            .row(i)
            .0
            .iter()
            .copied()
            .zip(self.row(i).1.iter().copied()))
    }

    /// Row slices without bounds diagnostics; callers guarantee `i < n`.
    pub(crate) fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.cols[lo..hi], &self.weights[lo..hi])
    }

    /// All stored ordered entries `(i, j, w)`; each undirected edge appears twice.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, ws) = self.row(i);
            cols.iter()
                .zip(ws.iter())
                .map(move |(&j, &w)| (i as u32, j, w))
        })
    }

    /// Sum of `|A_ij|` over all stored ordered entries (each edge twice).
    pub fn h0_ordered(&self) -> f64 {
        self.weights.iter().map(|w| w.abs()).sum()
    }

    /// Sum of `|A_ij|` counting each undirected edge once.
    pub fn h0_undirected(&self) -> f64 {
        self.h0_ordered() / 2.0
    }

    /// Sum of `A_ij` over all stored ordered entries.
    pub fn total_weight_ordered(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_j |A_ij|` for one vertex.
    pub fn row_abs_sum(&self, i: u32) -> Result<f64, GraphError> {
        let i = self.check_id(i)?;
        Ok(self.row(i).1.iter().map(|w| w.abs()).sum())
    }

    pub fn max_row_abs_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).1.iter().map(|w| w.abs()).sum())
            .fold(0.0, f64::max)
    }

    /// Write the canonical edge-list form: a `#` header with `n` and
    /// `edge_count`, then one `u\tv\tw` line per undirected edge with
    /// `u < v`, sorted by `(u, v)`.
    pub fn write_canonical<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "# n {}", self.n)?;
        writeln!(out, "# edge_count {}", self.edge_count)?;
        for i in 0..self.n {
            let (cols, ws) = self.row(i);
            for (&j, &w) in cols.iter().zip(ws.iter()) {
                if (i as u32) < j {
                    writeln!(out, "{}\t{}\t{}", i, j, w)?;
                }
            }
        }
        Ok(())
    }
}

/// Parse a signed edge list.
///
/// Each non-comment, non-blank line is `u <sep> v <sep> w` with whitespace or
/// comma separators. Records are directed entries; see [`DuplicatePolicy`]
/// and [`AsymmetryPolicy`] for how repeats and orientation conflicts are
/// combined. Entries whose combined weight is exactly zero are dropped.
pub fn parse_edge_list<R: BufRead>(
    reader: R,
    opts: &ParseOptions,
) -> Result<SignedGraph, ParseError> {
    // Per ordered pair: combined weight and the line of the last record.
    let mut records: HashMap<(u64, u64), (f64, usize)> = HashMap::new();
    let mut max_id: Option<u64> = None;

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(opts.comment_prefix) {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if fields.len() != 3 {
            return Err(ParseError::Malformed {
                line: line_no,
                msg: format!("expected `u v w`, got {} fields", fields.len()),
            });
        }
        let parse_id = |s: &str| -> Result<u64, ParseError> {
            s.parse().map_err(|_| ParseError::Malformed {
                line: line_no,
                msg: format!("bad vertex id `{s}`"),
            })
        };
        let u = parse_id(fields[0])?;
        let v = parse_id(fields[1])?;
        let w: f64 = fields[2].parse().map_err(|_| ParseError::Malformed {
            line: line_no,
            msg: format!("bad weight `{}`", fields[2]),
        })?;
        if !w.is_finite() {
            return Err(ParseError::Malformed {
                line: line_no,
                msg: format!("non-finite weight `{}`", fields[2]),
            });
        }
        for id in [u, v] {
            if id < opts.index_base as u64 {
                return Err(ParseError::IdBelowBase {
                    line: line_no,
                    id,
                    base: opts.index_base,
                });
            }
        }
        if u == v {
            return Err(ParseError::SelfLoop {
                line: line_no,
                id: u,
            });
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        match records.entry((u, v)) {
            std::collections::hash_map::Entry::Occupied(mut e) => match opts.duplicate_policy {
                DuplicatePolicy::Error => {
                    return Err(ParseError::DuplicateEdge {
                        line: line_no,
                        u,
                        v,
                    })
                }
                DuplicatePolicy::Sum => {
                    e.get_mut().0 += w;
                    e.get_mut().1 = line_no;
                }
            },
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert((w, line_no));
            }
        }
    }

    let n_inferred = match max_id {
        Some(m) => (m - opts.index_base as u64 + 1) as usize,
        None => 0,
    };
    let n = match opts.n_override {
        Some(n) => {
            if n < n_inferred {
                return Err(ParseError::VertexCountTooSmall {
                    n,
                    max_id: max_id.unwrap_or(0) as u32,
                });
            }
            n
        }
        None => n_inferred,
    };

    // Sorted traversal keeps error reporting deterministic.
    let mut keys: Vec<(u64, u64)> = records.keys().copied().collect();
    keys.sort_unstable();
    let mut edges: Vec<(u32, u32, f64)> = Vec::with_capacity(records.len());
    for (u, v) in keys {
        let (w_uv, _) = records[&(u, v)];
        if u > v {
            // Handled from the (v, u) side unless only this orientation exists.
            if records.contains_key(&(v, u)) {
                continue;
            }
        }
        let (a, b) = (u.min(v), u.max(v));
        let combined = match (records.get(&(a, b)), records.get(&(b, a))) {
            (Some(&(w_ab, _)), Some(&(w_ba, line_ba))) => {
                if w_ab == w_ba {
                    w_ab
                } else {
                    match opts.asymmetry_policy {
                        AsymmetryPolicy::Error => {
                            return Err(ParseError::AsymmetricPair {
                                line: line_ba,
                                u: a,
                                v: b,
                                w_uv: w_ab,
                                w_vu: w_ba,
                            })
                        }
                        AsymmetryPolicy::SumThenHalve => (w_ab + w_ba) / 2.0,
                    }
                }
            }
            _ => w_uv,
        };
        if combined == 0.0 {
            continue;
        }
        edges.push((
            (a - opts.index_base as u64) as u32,
            (b - opts.index_base as u64) as u32,
            combined,
        ));
    }
    Ok(SignedGraph::from_edges(n, edges)?)
}
