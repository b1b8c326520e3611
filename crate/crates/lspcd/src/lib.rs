//! Discovery of k polarized communities in signed networks.
//!
//! A signed network carries positive (friendly) and negative (antagonistic)
//! edge weights. This crate finds k clusters that are internally positive
//! and mutually negative while letting vertices stay neutral, by local
//! search on a squared-size-regularized clustering objective. It ships:
//!
//! * [`graph`] — immutable CSR signed graphs and edge-list parsing;
//! * [`assignment`] — cluster labels with a neutral set;
//! * [`objective`] — the regularized objective, polarity, and the
//!   correlation-clustering objective family;
//! * [`solver`] — three equivalent local-search implementations with
//!   duality-gap tracking;
//! * [`ssbm`] — a planted-community benchmark generator;
//! * [`metrics`] — F1 recovery, imbalance factor, and solution-quality
//!   aspects;
//! * [`runner`] — parallel execution of independent runs (feature
//!   `parallel`, on by default, with a sequential fallback).

pub mod assignment;
pub mod graph;
pub mod metrics;
pub mod objective;
pub mod rng;
pub mod runner;
pub mod solver;
pub mod ssbm;

pub use assignment::{cluster_sizes, random_assignment, Assignment, ClusterSizes};
pub use graph::{parse_edge_list, ParseOptions, SignedGraph};
pub use metrics::{f1_score, imbalance_factor, quality_report, MetricsReport};
pub use objective::{
    cc_objective, decompose, pcd_objective, polarity, shifted_objective, CcVariant,
    ObjectiveParams, TermDecomposition,
};
pub use solver::{
    solve, solve_naive, GradientRow, SolveReport, SolverConfig, SolverState, Variant,
};
pub use ssbm::{generate, group_sizes, SsbmParams};
