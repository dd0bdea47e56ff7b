//! Published reference numbers for eight video models on the full real-world
//! benchmark. They need the recorded dataset and the models themselves, so they are
//! kept as constants for documentation and for exercising the ranking code.
//!
//! The published scores are not reproducible from the per-metric means below with
//! this crate's per-pair normalization; they are listed as printed.

use crate::metrics::MetricSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceModel {
    pub name: &'static str,
    pub metrics: MetricSet,
    pub physics_iq: f64,
}

const fn row(
    name: &'static str,
    s: f64,
    st: f64,
    w: f64,
    mse: f64,
    physics_iq: f64,
) -> ReferenceModel {
    ReferenceModel {
        name,
        metrics: MetricSet {
            spatial_iou: s,
            spatiotemporal_iou: st,
            weighted_spatial_iou: w,
            mse,
        },
        physics_iq,
    }
}

/// Take-1 vs take-2 means over the real dataset.
pub const PHYSICAL_VARIANCE: ReferenceModel =
    row("Physical Variance", 0.645, 0.512, 0.626, 0.002, 100.0);

pub const MODELS: [ReferenceModel; 8] = [
    row("VideoPoet (multiframe)", 0.245, 0.143, 0.054, 0.010, 24.1),
    row("Runway Gen 3 (i2v)", 0.220, 0.109, 0.044, 0.015, 18.4),
    row("Lumiere (multiframe)", 0.170, 0.146, 0.034, 0.013, 18.2),
    row("VideoPoet (i2v)", 0.175, 0.106, 0.057, 0.012, 18.0),
    row("Lumiere (i2v)", 0.138, 0.165, 0.024, 0.016, 17.1),
    row(
        "Stable Video Diffusion (i2v)",
        0.139,
        0.054,
        0.088,
        0.021,
        13.5,
    ),
    row("Pika 1.0 (i2v)", 0.151, 0.034, 0.026, 0.014, 9.5),
    row("Sora (i2v)", 0.142, 0.041, 0.055, 0.036, 8.7),
];

/// Published 2AFC identification accuracies (percent) for the models where the value
/// is stated in the text; lower means more realistic.
pub const MLLM_SCORES: [(&str, f64); 4] = [
    ("Sora (i2v)", 55.6),
    ("Runway Gen 3 (i2v)", 74.8),
    ("VideoPoet (multiframe)", 77.3),
    ("Lumiere (multiframe)", 86.9),
];

/// Published correlation between Physics-IQ score and mean rank over the eight models.
pub const SPEARMAN_SCORE_VS_RANK: f64 = -0.87;

/// Published correlation between MLLM score and Physics-IQ score.
pub const PEARSON_REALISM_VS_SCORE: f64 = -0.46;
