//! Cluster membership with a neutral set.
//!
//! Labels live in `{0, 1, ..., k}` where 0 marks the neutral set. The same
//! data doubles as the one-hot block encoding used by the solver: label `m`
//! of vertex `i` is the basis vector with a one at index `m`.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::Rng;

use crate::rng;

#[derive(Debug, Error)]
pub enum AssignmentError {
    #[error("cluster count k must be at least 1")]
    ZeroClusters,
    #[error("label {label} exceeds cluster count k = {k}")]
    LabelOutOfRange { label: u32, k: u32 },
    #[error("malformed assignment: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Per-vertex labels in `{0..k}`, 0 = neutral.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    labels: Vec<u32>,
    k: u32,
}

#[derive(Serialize, Deserialize)]
struct AssignmentJson {
    k: u32,
    labels: Vec<u32>,
}

impl Assignment {
    pub fn new(labels: Vec<u32>, k: u32) -> Result<Self, AssignmentError> {
        if k == 0 {
            return Err(AssignmentError::ZeroClusters);
        }
        if let Some(&label) = labels.iter().find(|&&l| l > k) {
            return Err(AssignmentError::LabelOutOfRange { label, k });
        }
        Ok(Assignment { labels, k })
    }

    pub fn all_neutral(n: usize, k: u32) -> Result<Self, AssignmentError> {
        Assignment::new(vec![0; n], k)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    pub(crate) fn set_label(&mut self, i: usize, label: u32) {
        debug_assert!(label <= self.k);
        self.labels[i] = label;
    }

    /// Copy with one label replaced. Panics if `label > k` or `i` is out of
    /// range; meant for what-if evaluations against the objective.
    pub fn with_label(&self, i: usize, label: u32) -> Assignment {
        assert!(label <= self.k, "label {label} exceeds k = {}", self.k);
        let mut copy = self.clone();
        copy.labels[i] = label;
        copy
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<(), AssignmentError> {
        serde_json::to_writer(
            out,
            &AssignmentJson {
                k: self.k,
                labels: self.labels.clone(),
            },
        )
        .map_err(|e| AssignmentError::Malformed(e.to_string()))
    }

    pub fn read_json<R: BufRead>(reader: R) -> Result<Self, AssignmentError> {
        let parsed: AssignmentJson = serde_json::from_reader(reader)
            .map_err(|e| AssignmentError::Malformed(e.to_string()))?;
        Assignment::new(parsed.labels, parsed.k)
    }

    /// `vertex,label` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), AssignmentError> {
        writeln!(out, "vertex,label")?;
        for (v, l) in self.labels.iter().enumerate() {
            writeln!(out, "{v},{l}")?;
        }
        Ok(())
    }

    /// Reads `vertex,label` rows; `k` is taken as the largest label seen
    /// (at least 1) unless `k_override` says otherwise.
    pub fn read_csv<R: BufRead>(
        reader: R,
        k_override: Option<u32>,
    ) -> Result<Self, AssignmentError> {
        let mut rows: Vec<(usize, u32)> = Vec::new();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t == "vertex,label" {
                continue;
            }
            let (v, l) = t.split_once(',').ok_or_else(|| {
                AssignmentError::Malformed(format!("line {}: expected `vertex,label`", line_no + 1))
            })?;
            let v: usize = v.trim().parse().map_err(|_| {
                AssignmentError::Malformed(format!("line {}: bad vertex `{v}`", line_no + 1))
            })?;
            let l: u32 = l.trim().parse().map_err(|_| {
                AssignmentError::Malformed(format!("line {}: bad label `{l}`", line_no + 1))
            })?;
            rows.push((v, l));
        }
        rows.sort_unstable();
        let mut labels = vec![0u32; rows.last().map_or(0, |&(v, _)| v + 1)];
        for &(v, l) in &rows {
            labels[v] = l;
        }
        let k = k_override.unwrap_or_else(|| labels.iter().copied().max().unwrap_or(1).max(1));
        Assignment::new(labels, k)
    }
}

/// Cluster size histogram: `sizes[m - 1] = |S_m|`, plus the neutral count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterSizes {
    sizes: Vec<u64>,
    neutral_count: u64,
}

impl ClusterSizes {
    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn neutral_count(&self) -> u64 {
        self.neutral_count
    }

    /// `|S_m|` for `m` in `1..=k`; `m = 0` returns the neutral count.
    pub fn size_of(&self, m: u32) -> u64 {
        if m == 0 {
            self.neutral_count
        } else {
            self.sizes[(m - 1) as usize]
        }
    }

    /// Number of non-neutral vertices.
    pub fn non_neutral(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// `sum_m |S_m|^2` over the non-neutral clusters.
    pub fn sum_sq(&self) -> u64 {
        self.sizes.iter().map(|&s| s * s).sum()
    }

    pub fn nonempty(&self) -> u32 {
        self.sizes.iter().filter(|&&s| s > 0).count() as u32
    }

    pub(crate) fn apply_move(&mut self, from: u32, to: u32) {
        match from {
            0 => self.neutral_count -= 1,
            m => self.sizes[(m - 1) as usize] -= 1,
        }
        match to {
            0 => self.neutral_count += 1,
            m => self.sizes[(m - 1) as usize] += 1,
        }
    }
}

/// Exact histogram of an assignment's labels.
pub fn cluster_sizes(a: &Assignment) -> ClusterSizes {
    let mut sizes = vec![0u64; a.k() as usize];
    let mut neutral_count = 0u64;
    for &l in a.labels() {
        if l == 0 {
            neutral_count += 1;
        } else {
            sizes[(l - 1) as usize] += 1;
        }
    }
    ClusterSizes {
        sizes,
        neutral_count,
    }
}

/// Assign each vertex independently and uniformly to `{0, ..., k}`
/// (the neutral set included with the same probability as each cluster).
/// A pure function of `(n, k, seed)`.
pub fn random_assignment(n: usize, k: u32, seed: u64) -> Result<Assignment, AssignmentError> {
    if k == 0 {
        return Err(AssignmentError::ZeroClusters);
    }
    let mut rng = rng::init_rng(seed);
    let labels = (0..n).map(|_| rng.random_range(0..=k)).collect();
    Assignment::new(labels, k)
}

/// Like [`random_assignment`] but drawing uniformly from `{1, ..., k}`,
/// leaving no vertex neutral at the start.
pub fn random_assignment_non_neutral(
    n: usize,
    k: u32,
    seed: u64,
) -> Result<Assignment, AssignmentError> {
    if k == 0 {
        return Err(AssignmentError::ZeroClusters);
    }
    let mut rng = rng::init_rng(seed);
    let labels = (0..n).map(|_| rng.random_range(1..=k)).collect();
    Assignment::new(labels, k)
}
