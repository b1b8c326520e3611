//! Solution-quality metrics: size balance, ground-truth recovery, and the
//! cohesion/opposition/density aspects of a clustering.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assignment::{cluster_sizes, Assignment, ClusterSizes};
use crate::graph::SignedGraph;
use crate::objective::{decompose, polarity, ObjectiveError};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("imbalance factor needs k >= 2, got k = {0}")]
    KTooSmall(u32),
    #[error("xi must be positive, got {0}")]
    BadXi(f64),
    #[error("assignments have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Evaluation summary of one clustering. Ratio metrics fall back to 0 on
/// degenerate denominators, with the reason recorded in `degenerate_flags`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    #[serde(rename = "SIZE")]
    pub size: u64,
    #[serde(rename = "K")]
    pub k_nonempty: u32,
    #[serde(rename = "POL")]
    pub polarity: f64,
    #[serde(rename = "IF")]
    pub imbalance_factor: f64,
    #[serde(rename = "MAC")]
    pub mac: f64,
    #[serde(rename = "MAO")]
    pub mao: f64,
    #[serde(rename = "CC+")]
    pub cc_plus: f64,
    #[serde(rename = "CC-")]
    pub cc_minus: f64,
    #[serde(rename = "DENS")]
    pub density: f64,
    #[serde(rename = "ISO")]
    pub isolation: f64,
    #[serde(rename = "F1", skip_serializing_if = "Option::is_none")]
    pub f1: Option<f64>,
    pub degenerate_flags: BTreeSet<String>,
}

/// Normalized Renyi-style balance of cluster size proportions: 1 is perfect
/// balance, 0 means all mass in one cluster. `xi = 1` takes the Shannon
/// entropy limit. Returns 0 when no or one cluster is occupied.
pub fn imbalance_factor(sizes: &ClusterSizes, xi: f64) -> Result<f64, MetricsError> {
    let k = sizes.sizes().len() as u32;
    if k < 2 {
        return Err(MetricsError::KTooSmall(k));
    }
    if xi.is_nan() || xi <= 0.0 {
        return Err(MetricsError::BadXi(xi));
    }
    let total = sizes.non_neutral();
    if total == 0 || sizes.nonempty() <= 1 {
        return Ok(0.0);
    }
    let props = sizes
        .sizes()
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| s as f64 / total as f64);
    let log_k = (k as f64).log2();
    let raw = if xi == 1.0 {
        let entropy: f64 = props.map(|p| -p * p.log2()).sum();
        entropy / log_k
    } else {
        let sum_pow: f64 = props.map(|p| p.powf(xi)).sum();
        sum_pow.log2() / ((1.0 - xi) * log_k)
    };
    // The value lies in [0, 1] mathematically; rounding can overshoot by an ulp.
    Ok(raw.clamp(0.0, 1.0))
}

/// Hungarian assignment on a square cost matrix (minimization), by the
/// classic potentials-and-slack method. Returns `match_of_row[i] = j`.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched = vec![0usize; n + 1]; // matched[j] = row occupying column j
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let slack = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if matched[j] != 0 {
            row_to_col[matched[j] - 1] = j - 1;
        }
    }
    row_to_col
}

/// Mean per-cluster F1 of a prediction against a ground truth.
///
/// Each (truth, prediction) cluster pair scores the harmonic mean of
/// precision and recall of their non-neutral member sets; an optimal
/// one-to-one matching maximizes the total, and the mean is taken over the
/// truth clusters (unmatched ones score 0). Neutral vertices participate
/// only through absence.
pub fn f1_score(pred: &Assignment, truth: &Assignment) -> Result<f64, MetricsError> {
    if pred.n() != truth.n() {
        return Err(MetricsError::LengthMismatch(pred.n(), truth.n()));
    }
    let kt = truth.k() as usize;
    let kp = pred.k() as usize;
    let mut overlap = vec![vec![0u64; kp]; kt];
    let mut truth_size = vec![0u64; kt];
    let mut pred_size = vec![0u64; kp];
    for (&lt, &lp) in truth.labels().iter().zip(pred.labels().iter()) {
        if lt != 0 {
            truth_size[lt as usize - 1] += 1;
        }
        if lp != 0 {
            pred_size[lp as usize - 1] += 1;
        }
        if lt != 0 && lp != 0 {
            overlap[lt as usize - 1][lp as usize - 1] += 1;
        }
    }
    // Pairwise F1 = 2|T∩P| / (|T| + |P|); square matrix padded with zeros.
    let side = kt.max(kp);
    let mut cost = vec![vec![0.0f64; side]; side];
    for t in 0..kt {
        for p in 0..kp {
            if overlap[t][p] > 0 {
                let f1 = 2.0 * overlap[t][p] as f64 / (truth_size[t] + pred_size[p]) as f64;
                cost[t][p] = -f1;
            }
        }
    }
    let matching = hungarian_min(&cost);
    let total: f64 = (0..kt).map(|t| -cost[t][matching[t]]).sum();
    Ok(total / kt as f64)
}

/// Full quality report for a clustering of a signed graph.
///
/// Conventions for degenerate denominators: empty or singleton clusters
/// contribute 1.0 to the mean cohesion (small clusters trivially cohere);
/// opposition terms with an empty factor contribute 0; pure ratios return 0.
/// Every fallback raises a flag.
pub fn quality_report(
    g: &SignedGraph,
    a: &Assignment,
    alpha: f64,
    xi: f64,
    truth: Option<&Assignment>,
) -> Result<MetricsReport, MetricsError> {
    let d = decompose(g, a)?;
    let sizes = cluster_sizes(a);
    let k = a.k() as usize;
    let mut flags = BTreeSet::new();

    // Per-cluster-pair weight sums over ordered pairs of non-neutral labels,
    // plus the neutral-to-non-neutral boundary (one direction, as defined).
    let mut pos = vec![vec![0.0f64; k + 1]; k + 1];
    let mut neg = vec![vec![0.0f64; k + 1]; k + 1];
    let mut boundary = 0.0f64;
    let labels = a.labels();
    for i in 0..g.n() {
        let li = labels[i] as usize;
        let (cols, ws) = g.row(i);
        for (&j, &w) in cols.iter().zip(ws.iter()) {
            let lj = labels[j as usize] as usize;
            if li == 0 {
                if lj != 0 {
                    boundary += w.abs();
                }
                continue;
            }
            if lj == 0 {
                continue;
            }
            if w > 0.0 {
                pos[li][lj] += w;
            } else {
                neg[li][lj] += -w;
            }
        }
    }

    let n_non_neutral = sizes.non_neutral();
    if n_non_neutral == 0 {
        flags.insert("all_neutral".to_string());
    }

    let mut mac = 0.0;
    for m in 1..=k {
        let s = sizes.size_of(m as u32);
        if s >= 2 {
            mac += pos[m][m] / (s * (s - 1)) as f64;
        } else {
            mac += 1.0;
            flags.insert("mac_degenerate".to_string());
        }
    }
    mac /= k as f64;

    let mao = if k >= 2 {
        let mut total = 0.0;
        for m in 1..=k {
            for p in 1..=k {
                if m == p {
                    continue;
                }
                let (sm, sp) = (sizes.size_of(m as u32), sizes.size_of(p as u32));
                if sm > 0 && sp > 0 {
                    total += neg[m][p] / (sm * sp) as f64;
                } else {
                    flags.insert("mao_degenerate".to_string());
                }
            }
        }
        total / (k * (k - 1)) as f64
    } else {
        flags.insert("mao_degenerate".to_string());
        0.0
    };

    let ratio = |num: f64, den: f64, flag: &str, flags: &mut BTreeSet<String>| {
        if den > 0.0 {
            num / den
        } else {
            flags.insert(flag.to_string());
            0.0
        }
    };
    let cc_plus = ratio(
        d.n_intra_pos - d.n_intra_neg,
        d.n_intra_pos + d.n_intra_neg,
        "cc_plus_degenerate",
        &mut flags,
    );
    let cc_minus = ratio(
        d.n_inter_neg - d.n_inter_pos,
        d.n_inter_neg + d.n_inter_pos,
        "cc_minus_degenerate",
        &mut flags,
    );
    let n_nz = d.n_intra_pos + d.n_intra_neg + d.n_inter_pos + d.n_inter_neg;
    let density = ratio(
        n_nz,
        (n_non_neutral * n_non_neutral.saturating_sub(1)) as f64,
        "dens_degenerate",
        &mut flags,
    );
    let isolation = ratio(n_nz, n_nz + boundary, "iso_degenerate", &mut flags);

    let pol = polarity(&d, alpha);
    if d.non_neutral_count == 0 {
        flags.insert("polarity_degenerate".to_string());
    }

    let imbalance = if k >= 2 {
        let v = imbalance_factor(&sizes, xi)?;
        if n_non_neutral == 0 || sizes.nonempty() <= 1 {
            flags.insert("if_degenerate".to_string());
        }
        v
    } else {
        flags.insert("if_degenerate".to_string());
        0.0
    };

    let f1 = match truth {
        Some(t) => Some(f1_score(a, t)?),
        None => None,
    };

    Ok(MetricsReport {
        size: n_non_neutral,
        k_nonempty: sizes.nonempty(),
        polarity: pol,
        imbalance_factor: imbalance,
        mac,
        mao,
        cc_plus,
        cc_minus,
        density,
        isolation,
        f1,
        degenerate_flags: flags,
    })
}
