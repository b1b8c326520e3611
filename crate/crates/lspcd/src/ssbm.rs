//! Synthetic benchmark generator with planted polarized communities.
//!
//! For each unordered vertex pair exactly one uniform draw decides the edge:
//!
//! * both endpoints in the same planted cluster: `+1` with probability
//!   `1 - eta`, `-1` with probability `eta/2`, absent with `eta/2`;
//! * endpoints in different planted clusters: `-1` with probability
//!   `1 - eta`, `+1` with probability `eta/2`, absent with `eta/2`;
//! * at least one endpoint neutral: `+1` and `-1` each with probability
//!   `min(eta, 1/2)`, absent otherwise.
//!
//! Pairs are visited in ascending `(i, j)` order with `i < j` and one draw
//! per pair, so output is fully determined by the seed.

use rand::Rng;
use thiserror::Error;

use crate::assignment::Assignment;
use crate::graph::SignedGraph;
use crate::rng;

#[derive(Debug, Error)]
pub enum SsbmError {
    #[error("eta must be in [0, 1], got {0}")]
    BadEta(f64),
    #[error("rho must be at least 1, got {0}")]
    BadRho(f64),
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("planted sizes sum to {planted} but n = {n}")]
    PlantedExceedN { planted: u64, n: usize },
    #[error("group {index} rounds to size 0 (ell = {ell}, rho = {rho})")]
    EmptyGroup { index: usize, ell: u64, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsbmParams {
    /// Total vertex count; vertices beyond the planted groups are neutral.
    pub n: usize,
    /// Number of planted clusters.
    pub k: u32,
    /// Per-cluster size in the balanced case; with `rho > 1` the planted
    /// total stays `k * ell`.
    pub ell: u64,
    /// Noise level in `[0, 1]`.
    pub eta: f64,
    /// Largest-to-smallest group size ratio; 1 keeps groups balanced.
    pub rho: f64,
    pub seed: u64,
}

impl SsbmParams {
    pub fn balanced(n: usize, k: u32, ell: u64, eta: f64, seed: u64) -> Self {
        SsbmParams {
            n,
            k,
            ell,
            eta,
            rho: 1.0,
            seed,
        }
    }
}

/// Planted group sizes for ratio `rho`: real sizes follow the geometric
/// progression `s * rho^(i/(k-1))`, scaled so they sum to `k * ell`, rounded
/// to nearest with the largest group absorbing the rounding slack so the
/// total is exact.
pub fn group_sizes(k: u32, ell: u64, rho: f64) -> Result<Vec<u64>, SsbmError> {
    if k == 0 {
        return Err(SsbmError::ZeroClusters);
    }
    if rho.is_nan() || rho < 1.0 {
        return Err(SsbmError::BadRho(rho));
    }
    if k == 1 || rho == 1.0 {
        if ell == 0 {
            return Err(SsbmError::EmptyGroup { index: 0, ell, rho });
        }
        return Ok(vec![ell; k as usize]);
    }
    let total = (k as u64 * ell) as f64;
    let ratios: Vec<f64> = (0..k)
        .map(|i| rho.powf(i as f64 / (k as f64 - 1.0)))
        .collect();
    let scale = total / ratios.iter().sum::<f64>();
    let mut sizes: Vec<u64> = Vec::with_capacity(k as usize);
    for (i, r) in ratios.iter().enumerate() {
        let rounded = (scale * r).round();
        if rounded < 1.0 {
            return Err(SsbmError::EmptyGroup { index: i, ell, rho });
        }
        sizes.push(rounded as u64);
    }
    // Sizes ascend with i, so the last group is the largest.
    let sum_others: u64 = sizes[..k as usize - 1].iter().sum();
    let target = k as u64 * ell;
    if sum_others >= target {
        return Err(SsbmError::EmptyGroup {
            index: k as usize - 1,
            ell,
            rho,
        });
    }
    *sizes.last_mut().unwrap() = target - sum_others;
    Ok(sizes)
}

/// Generate a graph and its planted ground truth. Planted members take
/// labels `1..=k` in blocks of the group sizes, remaining vertices are
/// neutral.
pub fn generate(p: &SsbmParams) -> Result<(SignedGraph, Assignment), SsbmError> {
    if !(0.0..=1.0).contains(&p.eta) {
        return Err(SsbmError::BadEta(p.eta));
    }
    let sizes = group_sizes(p.k, p.ell, p.rho)?;
    let planted: u64 = sizes.iter().sum();
    if planted > p.n as u64 {
        return Err(SsbmError::PlantedExceedN { planted, n: p.n });
    }
    let mut labels = vec![0u32; p.n];
    let mut cursor = 0usize;
    for (g_idx, &s) in sizes.iter().enumerate() {
        for _ in 0..s {
            labels[cursor] = g_idx as u32 + 1;
            cursor += 1;
        }
    }
    let truth = Assignment::new(labels, p.k).expect("labels stay within 1..=k");

    let eta = p.eta;
    let q_neutral = eta.min(0.5);
    let mut rng = rng::generation_rng(p.seed);
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for i in 0..p.n as u32 {
        let li = truth.label(i as usize);
        for j in (i + 1)..p.n as u32 {
            let lj = truth.label(j as usize);
            let u: f64 = rng.random();
            let w = if li != 0 && lj != 0 {
                if li == lj {
                    // Thresholds in order: +1, -1, absent.
                    if u < 1.0 - eta {
                        1.0
                    } else if u < 1.0 - eta / 2.0 {
                        -1.0
                    } else {
                        0.0
                    }
                } else if u < 1.0 - eta {
                    -1.0
                } else if u < 1.0 - eta / 2.0 {
                    1.0
                } else {
                    0.0
                }
            } else if u < q_neutral {
                1.0
            } else if u < 2.0 * q_neutral {
                -1.0
            } else {
                0.0
            };
            if w != 0.0 {
                edges.push((i, j, w));
            }
        }
    }
    let graph = SignedGraph::from_edges(p.n, edges).expect("generated pairs are unique and valid");
    Ok((graph, truth))
}
