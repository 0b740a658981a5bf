//! Statistical shape analysis of multivariate closed planar curves.
//!
//! A segmented image is represented by the contours of its p objects, each a
//! closed planar curve expanded in a Fourier basis. This crate provides:
//!
//! - exact coefficient algebra for such curves ([`basis`], [`curve`]);
//! - smoothing of raw discretized contours by least squares ([`ingest`]);
//! - removal of translation, scale, rotation and per-component
//!   starting-point shifts, the last two via an alternating "iterative
//!   closest function" alignment ([`deformation`]);
//! - geometry of the unit sphere in coefficient space: geodesic distance,
//!   log/exp maps, and the intrinsic mean ([`sphere`]);
//! - an interlaced pipeline alternating alignment and mean estimation
//!   ([`pipeline`]);
//! - supervised classification of shapes from tangent-space predictors:
//!   group-lasso logistic regression, PLS and PCR discriminants with
//!   cross-validation ([`classify`]);
//! - synthetic data generation and alignment benchmarks ([`synth`]).
//!
//! Start with the runnable examples (`cargo run --release --example ...`):
//! each major capability has one. A thin `multishape` binary exposes the
//! same functionality as subcommands for file-based workflows.

pub mod basis;
pub mod classify;
pub mod cli;
pub mod curve;
pub mod deformation;
pub mod error;
pub mod ingest;
pub mod io;
pub mod pipeline;
pub mod report;
pub mod seeding;
pub mod sphere;
pub mod synth;

pub use basis::{eval_basis, BasisSpec};
pub use curve::{ComponentCoefficients, MultiCurve, ReparamMatrix};
pub use deformation::{
    center_and_scale, estimate_rotation, icf_align, solve_reparam, DeformationParams, IcfConfig,
    PreShape, Shape,
};
pub use error::{Error, Result};
pub use ingest::{arclength_grid, fit_curve, RawContour, RawMultiContour};
pub use pipeline::{estimate_pipeline, estimate_pipeline_from_curves, PipelineConfig, PipelineResult};
pub use sphere::{exp_map, frechet_mean, geodesic_distance, log_map, FrechetMeanResult, TangentVector};
