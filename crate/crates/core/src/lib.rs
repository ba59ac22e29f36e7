//! Simulation and soft-output decoding workbench for measurement-based
//! resource-state preparation with postselection.
//!
//! The pipeline: build a noisy cluster-state preparation circuit
//! ([`circuits`]), collapse it to a detector error model, sample shots,
//! decode with minimum-weight perfect matching, score each shot with a
//! partial logical gap that marginalizes over hidden detectors, and
//! postselect / fit the resulting ensembles.

pub mod analysis;
pub mod circuits;
pub mod decoder;
pub mod gap;
pub mod graph;

pub use circuits::dem::DetectorErrorModel;
pub use circuits::{repetition_cluster, surface_cluster, NoisyCircuit, ShotSampler};
pub use analysis::{
    bin_and_fit_logistic, calibrate, calibrate_cutoff, fit_boundary_threshold,
    fit_effective_threshold, kappa, kappa_at_matched_rate, lambda_metric, overhead_points,
    pareto_frontier, postselect, score_shot, score_shots, wilson, AnalysisError, Cutoff,
    Estimator, GapBin, JointThresholdFit, LambdaFit, LogisticFit, OverheadPoint,
    PostselectionReport, RateEstimate, ScoredShot, ThresholdFit,
};
pub use decoder::{Correction, DecodeError, Decoder};
pub use gap::{GapEngine, GapError, GapScore, DEFAULT_HIDDEN_CAP};
pub use graph::{edge_weight, GraphEdge, GraphError, MatchingGraph};
