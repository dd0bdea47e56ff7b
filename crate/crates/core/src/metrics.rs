//! The four physical-understanding metrics: spatial IoU, spatiotemporal IoU,
//! weighted spatial IoU and MSE.
//!
//! IoU-type metrics score 1.0 when both inputs are empty: agreeing that nothing
//! moved is a correct prediction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frameseq::{resample_fps, FrameSequence, SplitSpec};
use crate::motionmask::{
    collapse_spatial, collapse_weighted, compute_mask_video, MapKind, MaskParams, MaskVideo,
    MotionMap,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    SpatialIou,
    SpatiotemporalIou,
    WeightedSpatialIou,
    Mse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherBetter,
    LowerBetter,
}

impl MetricName {
    pub const ALL: [MetricName; 4] = [
        MetricName::SpatialIou,
        MetricName::SpatiotemporalIou,
        MetricName::WeightedSpatialIou,
        MetricName::Mse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MetricName::SpatialIou => "spatial_iou",
            MetricName::SpatiotemporalIou => "spatiotemporal_iou",
            MetricName::WeightedSpatialIou => "weighted_spatial_iou",
            MetricName::Mse => "mse",
        }
    }

    pub fn direction(self) -> Direction {
        match self {
            MetricName::Mse => Direction::LowerBetter,
            _ => Direction::HigherBetter,
        }
    }
}

impl fmt::Display for MetricName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How spatiotemporal IoU aggregates over time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StMode {
    /// One IoU over the whole `h x w x t` volume.
    #[default]
    Volume,
    /// Mean of per-frame IoUs; frames where both masks are empty count as 1.0.
    FrameMean,
}

impl StMode {
    pub fn as_str(self) -> &'static str {
        match self {
            StMode::Volume => "volume",
            StMode::FrameMean => "frame-mean",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub name: MetricName,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<StMode>,
}

impl MetricValue {
    fn plain(name: MetricName, value: f64) -> Self {
        Self {
            name,
            value,
            mode: None,
        }
    }

    pub fn direction(&self) -> Direction {
        self.name.direction()
    }
}

/// The four metric values for one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub spatial_iou: f64,
    pub spatiotemporal_iou: f64,
    pub weighted_spatial_iou: f64,
    pub mse: f64,
}

impl MetricSet {
    pub fn get(&self, name: MetricName) -> f64 {
        match name {
            MetricName::SpatialIou => self.spatial_iou,
            MetricName::SpatiotemporalIou => self.spatiotemporal_iou,
            MetricName::WeightedSpatialIou => self.weighted_spatial_iou,
            MetricName::Mse => self.mse,
        }
    }

    pub fn set(&mut self, name: MetricName, value: f64) {
        match name {
            MetricName::SpatialIou => self.spatial_iou = value,
            MetricName::SpatiotemporalIou => self.spatiotemporal_iou = value,
            MetricName::WeightedSpatialIou => self.weighted_spatial_iou = value,
            MetricName::Mse => self.mse = value,
        }
    }

    pub fn from_fn(mut f: impl FnMut(MetricName) -> f64) -> Self {
        let mut out = Self::zeros();
        for name in MetricName::ALL {
            out.set(name, f(name));
        }
        out
    }

    pub fn zeros() -> Self {
        Self {
            spatial_iou: 0.0,
            spatiotemporal_iou: 0.0,
            weighted_spatial_iou: 0.0,
            mse: 0.0,
        }
    }

    /// Element-wise mean; `None` for an empty input.
    pub fn mean<'a>(sets: impl IntoIterator<Item = &'a MetricSet>) -> Option<Self> {
        let mut sum = Self::zeros();
        let mut n = 0usize;
        for s in sets {
            for name in MetricName::ALL {
                sum.set(name, sum.get(name) + s.get(name));
            }
            n += 1;
        }
        (n > 0).then(|| Self::from_fn(|name| sum.get(name) / n as f64))
    }
}

fn ratio_or_one(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

fn check_map_dims(a: &MotionMap, b: &MotionMap) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch(format!(
            "maps are {}x{} and {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// `|a ∩ b| / |a ∪ b|` over two binary motion maps.
pub fn spatial_iou(a: &MotionMap, b: &MotionMap) -> Result<MetricValue> {
    check_map_dims(a, b)?;
    if a.kind() != MapKind::Binary || b.kind() != MapKind::Binary {
        return Err(Error::NonBinary);
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        let (x, y) = (x == 1.0, y == 1.0);
        inter += (x && y) as u64;
        union += (x || y) as u64;
    }
    Ok(MetricValue::plain(
        MetricName::SpatialIou,
        ratio_or_one(inter as f64, union as f64),
    ))
}

fn check_volume_dims(a: &MaskVideo, b: &MaskVideo) -> Result<()> {
    if (a.width(), a.height(), a.frame_count()) != (b.width(), b.height(), b.frame_count()) {
        return Err(Error::DimensionMismatch(format!(
            "mask videos are {}x{}x{} and {}x{}x{}",
            a.width(),
            a.height(),
            a.frame_count(),
            b.width(),
            b.height(),
            b.frame_count()
        )));
    }
    Ok(())
}

fn plane_counts(a: &[u8], b: &[u8]) -> (u64, u64) {
    a.iter().zip(b).fold((0, 0), |(i, u), (&x, &y)| {
        (i + (x & y) as u64, u + (x | y) as u64)
    })
}

/// IoU of two motion-mask videos, either over the full volume or averaged per frame.
pub fn spatiotemporal_iou(a: &MaskVideo, b: &MaskVideo, mode: StMode) -> Result<MetricValue> {
    check_volume_dims(a, b)?;
    let value = match mode {
        StMode::Volume => {
            let (inter, union) = plane_counts(a.data(), b.data());
            ratio_or_one(inter as f64, union as f64)
        }
        StMode::FrameMean => {
            let total: f64 = (0..a.frame_count())
                .map(|t| {
                    let (inter, union) = plane_counts(a.frame(t), b.frame(t));
                    ratio_or_one(inter as f64, union as f64)
                })
                .sum();
            total / a.frame_count() as f64
        }
    };
    Ok(MetricValue {
        name: MetricName::SpatiotemporalIou,
        value,
        mode: Some(mode),
    })
}

/// `Σ min(a, b) / Σ max(a, b)` over two weighted motion maps.
pub fn weighted_spatial_iou(a: &MotionMap, b: &MotionMap) -> Result<MetricValue> {
    check_map_dims(a, b)?;
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (&x, &y) in a.values().iter().zip(b.values()) {
        for v in [x, y] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange(v));
            }
        }
        lo += x.min(y);
        hi += x.max(y);
    }
    Ok(MetricValue::plain(
        MetricName::WeightedSpatialIou,
        ratio_or_one(lo, hi),
    ))
}

/// Mean squared difference of intensities scaled to [0, 1], over every frame, pixel and channel.
///
/// Accumulates squared 8-bit differences in integers and divides once, so the result is the
/// correctly rounded value of the exact mean.
pub fn mse(a: &FrameSequence, b: &FrameSequence) -> Result<MetricValue> {
    if a.dims() != b.dims() || a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "sequences are {}x{}x{} and {}x{}x{}",
            a.width(),
            a.height(),
            a.len(),
            b.width(),
            b.height(),
            b.len()
        )));
    }
    let mut sum = 0u64;
    let mut count = 0u64;
    for (fa, fb) in a.frames().iter().zip(b.frames()) {
        for (&x, &y) in fa.data().iter().zip(fb.data()) {
            let d = x as i64 - y as i64;
            sum += (d * d) as u64;
        }
        count += fa.data().len() as u64;
    }
    Ok(MetricValue::plain(
        MetricName::Mse,
        sum as f64 / (255.0 * 255.0 * count as f64),
    ))
}

/// Brings a real test segment onto the generated video's frame rate and resolution, then
/// truncates both to the shorter of 5 s and their own lengths.
pub fn align_pair(
    real_test: &FrameSequence,
    generated: &FrameSequence,
) -> Result<(FrameSequence, FrameSequence)> {
    let real = if real_test.fps() == generated.fps() && real_test.dims() == generated.dims() {
        real_test.clone()
    } else {
        resample_fps(real_test, generated.fps(), Some(generated.dims()))?
    };
    let window = SplitSpec::at(0).test_len(generated.fps()).max(1);
    let n = window.min(real.len()).min(generated.len());
    Ok((real.truncated(n)?, generated.truncated(n)?))
}

/// Masks and motion maps for one sequence, computed once and shared across metrics.
pub struct MotionSummary {
    pub mask: MaskVideo,
    pub spatial: MotionMap,
    pub weighted: MotionMap,
}

impl MotionSummary {
    pub fn compute(seq: &FrameSequence, params: &MaskParams) -> Result<Self> {
        let mask = compute_mask_video(seq, params)?;
        let spatial = collapse_spatial(&mask);
        let weighted = collapse_weighted(&mask);
        Ok(Self {
            mask,
            spatial,
            weighted,
        })
    }
}

/// Aligns `generated` with `real_test` and evaluates all four metrics.
pub fn evaluate_pair(
    real_test: &FrameSequence,
    generated: &FrameSequence,
    params: &MaskParams,
    mode: StMode,
) -> Result<MetricSet> {
    let (real, generated) = align_pair(real_test, generated)?;
    let r = MotionSummary::compute(&real, params)?;
    let g = MotionSummary::compute(&generated, params)?;
    Ok(MetricSet {
        spatial_iou: spatial_iou(&r.spatial, &g.spatial)?.value,
        spatiotemporal_iou: spatiotemporal_iou(&r.mask, &g.mask, mode)?.value,
        weighted_spatial_iou: weighted_spatial_iou(&r.weighted, &g.weighted)?.value,
        mse: mse(&real, &generated)?.value,
    })
}

/// One metric result as emitted by `physiq evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub scenario_id: Option<String>,
    pub perspective: Option<String>,
    pub metric: MetricName,
    pub mode: Option<StMode>,
    pub value: f64,
    pub mask_params: MaskParams,
}

impl MetricRecord {
    pub fn from_set(
        set: &MetricSet,
        scenario_id: Option<&str>,
        perspective: Option<&str>,
        mode: StMode,
        params: &MaskParams,
    ) -> Vec<Self> {
        MetricName::ALL
            .iter()
            .map(|&metric| Self {
                scenario_id: scenario_id.map(str::to_owned),
                perspective: perspective.map(str::to_owned),
                metric,
                mode: (metric == MetricName::SpatiotemporalIou).then_some(mode),
                value: set.get(metric),
                mask_params: *params,
            })
            .collect()
    }
}
