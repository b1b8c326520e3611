//! The polarized-community objective, polarity, and correlation-clustering
//! variants.
//!
//! All pair sums use the ordered convention: every unordered vertex pair
//! `{i, j}` contributes both `(i, j)` and `(j, i)`, so each undirected edge
//! counts twice and `sum_m |S_m|^2` counts diagonal pairs. Mixing
//! conventions would silently break the shift identity checked by
//! [`shifted_objective`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{cluster_sizes, Assignment};
use crate::graph::SignedGraph;

#[derive(Debug, Error)]
pub enum ObjectiveError {
    #[error("assignment has {labels} labels but graph has {n} vertices")]
    SizeMismatch { labels: usize, n: usize },
}

/// Weights of the objective: `alpha` scales the inter-cluster term,
/// `beta` the squared-size regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveParams {
    pub alpha: f64,
    pub beta: f64,
}

impl ObjectiveParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        debug_assert!(alpha.is_finite() && beta.is_finite());
        ObjectiveParams { alpha, beta }
    }

    /// The conventional inter-term weight: `1/(k-1)` for `k >= 2`, else 0.
    /// With this alpha the normalized objective is called polarity.
    pub fn default_alpha(k: u32) -> f64 {
        if k >= 2 {
            1.0 / (k as f64 - 1.0)
        } else {
            0.0
        }
    }

    pub fn with_default_alpha(k: u32, beta: f64) -> Self {
        ObjectiveParams {
            alpha: Self::default_alpha(k),
            beta,
        }
    }
}

/// Ordered-pair sums of intra/inter positive/negative weights, plus the
/// size statistics the objective needs. Neutral vertices contribute to no
/// term.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TermDecomposition {
    pub n_intra_pos: f64,
    pub n_intra_neg: f64,
    pub n_inter_pos: f64,
    pub n_inter_neg: f64,
    pub sum_sq_sizes: u64,
    pub non_neutral_count: u64,
}

/// Exact ordered-pair decomposition of a graph under an assignment.
pub fn decompose(g: &SignedGraph, a: &Assignment) -> Result<TermDecomposition, ObjectiveError> {
    if a.n() != g.n() {
        return Err(ObjectiveError::SizeMismatch {
            labels: a.n(),
            n: g.n(),
        });
    }
    let labels = a.labels();
    let mut d = TermDecomposition::default();
    for i in 0..g.n() {
        let li = labels[i];
        if li == 0 {
            continue;
        }
        let (cols, ws) = g.row(i);
        for (&j, &w) in cols.iter().zip(ws.iter()) {
            let lj = labels[j as usize];
            if lj == 0 {
                continue;
            }
            if li == lj {
                if w > 0.0 {
                    d.n_intra_pos += w;
                } else {
                    d.n_intra_neg += -w;
                }
            } else if w > 0.0 {
                d.n_inter_pos += w;
            } else {
                d.n_inter_neg += -w;
            }
        }
    }
    let sizes = cluster_sizes(a);
    d.sum_sq_sizes = sizes.sum_sq();
    d.non_neutral_count = sizes.non_neutral();
    Ok(d)
}

/// The regularized objective:
/// `(N+intra - N-intra) + alpha (N-inter - N+inter) - beta sum_m |S_m|^2`.
pub fn pcd_objective(d: &TermDecomposition, p: &ObjectiveParams) -> f64 {
    let intra = d.n_intra_pos - d.n_intra_neg;
    let inter = d.n_inter_neg - d.n_inter_pos;
    intra + p.alpha * inter - p.beta * d.sum_sq_sizes as f64
}

/// The shift form of the same objective:
/// `sum_m sum_{i,j in S_m} (A_ij - beta) - alpha * (inter-cluster sum of A_ij)`,
/// with the intra double sum over all ordered pairs including the diagonal
/// (`A_ii = 0` contributes `-beta` each). Equal to [`pcd_objective`] for all
/// inputs; computed along a different arithmetic route so the identity is a
/// meaningful cross-check.
pub fn shifted_objective(
    g: &SignedGraph,
    a: &Assignment,
    p: &ObjectiveParams,
) -> Result<f64, ObjectiveError> {
    if a.n() != g.n() {
        return Err(ObjectiveError::SizeMismatch {
            labels: a.n(),
            n: g.n(),
        });
    }
    let labels = a.labels();
    let mut intra_shifted = 0.0; // sum of (A_ij - beta) over intra pairs with an edge
    let mut inter_sum = 0.0;
    let mut intra_edge_pairs = 0u64;
    for i in 0..g.n() {
        let li = labels[i];
        if li == 0 {
            continue;
        }
        let (cols, ws) = g.row(i);
        for (&j, &w) in cols.iter().zip(ws.iter()) {
            let lj = labels[j as usize];
            if lj == 0 {
                continue;
            }
            if li == lj {
                intra_shifted += w - p.beta;
                intra_edge_pairs += 1;
            } else {
                inter_sum += w;
            }
        }
    }
    // Ordered intra pairs without an edge (diagonal included) contribute
    // (0 - beta) each.
    let sizes = cluster_sizes(a);
    let zero_pairs = sizes.sum_sq() - intra_edge_pairs;
    Ok(intra_shifted - p.beta * zero_pairs as f64 - p.alpha * inter_sum)
}

/// `[(N+intra - N-intra) + alpha (N-inter - N+inter)] / sum_m |S_m|`.
/// Defined as 0 when no vertex is non-neutral.
pub fn polarity(d: &TermDecomposition, alpha: f64) -> f64 {
    if d.non_neutral_count == 0 {
        return 0.0;
    }
    let intra = d.n_intra_pos - d.n_intra_neg;
    let inter = d.n_inter_neg - d.n_inter_pos;
    (intra + alpha * inter) / d.non_neutral_count as f64
}

/// The correlation-clustering objective family. On partitions (no neutral
/// vertices) all five are equal up to additive constants; with neutral
/// vertices allowed they genuinely differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcVariant {
    /// `N+intra - N-intra + N-inter - N+inter`
    Full,
    /// `N+intra + N-inter`
    MaxAgree,
    /// `-N-intra - N+inter` (negated disagreement count, so larger is better)
    MinDisagreeNeg,
    /// `N+intra - N-intra`
    MaxCorr,
    /// `N-inter - N+inter` (negated cut, so larger is better)
    MinCutNeg,
}

pub fn cc_objective(d: &TermDecomposition, variant: CcVariant) -> f64 {
    match variant {
        CcVariant::Full => d.n_intra_pos - d.n_intra_neg + d.n_inter_neg - d.n_inter_pos,
        CcVariant::MaxAgree => d.n_intra_pos + d.n_inter_neg,
        CcVariant::MinDisagreeNeg => -d.n_intra_neg - d.n_inter_pos,
        CcVariant::MaxCorr => d.n_intra_pos - d.n_intra_neg,
        CcVariant::MinCutNeg => d.n_inter_neg - d.n_inter_pos,
    }
}
