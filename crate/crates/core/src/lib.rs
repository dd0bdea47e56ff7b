//! Physical-plausibility evaluation for generated video continuations.
//!
//! A generated continuation is compared against the real recording it should
//! reproduce. Motion masks from background subtraction feed three IoU-style
//! metrics (where, when and how much motion happens); pixel MSE covers how it
//! looks. Scores are normalized by the disagreement between two real takes of
//! the same scene, so a model that is as close to reality as reality is to
//! itself scores 100.
//!
//! - [`frameseq`]: frame sequences, on-disk layouts, fps resampling, the 3 s / 5 s split
//! - [`motionmask`]: background-subtraction motion masks and motion maps
//! - [`metrics`]: spatial, spatiotemporal and weighted IoU, MSE
//! - [`bench`]: dataset manifests, variance baselines, scoring, rankings, reports
//! - [`synthlab`]: deterministic synthetic scenes and brute-force oracles
//! - [`judge`]: two-alternative forced-choice realism judging

pub mod bench;
pub mod error;
pub mod frameseq;
pub mod judge;
pub mod metrics;
pub mod motionmask;
pub mod synthlab;

pub use error::{Error, Result};
