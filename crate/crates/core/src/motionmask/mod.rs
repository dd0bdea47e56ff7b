//! Motion masks from adaptive background subtraction, and their spatial collapses.
//!
//! Every frame is converted to luma and Gaussian-blurred. The background starts as
//! the mean of the first `window` preprocessed frames and is then updated with an
//! exponential running average; pixels farther than `threshold` from it are marked
//! as moving, and each mask frame is cleaned by a morphological opening and closing.

pub mod filters;

use std::fs;
use std::path::Path;

use image::GrayImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frameseq::FrameSequence;

/// Background-subtraction settings. Real and generated videos must share them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaskParams {
    /// Luma difference (0..255) above which a pixel counts as moving.
    pub threshold: f64,
    /// Background running-average rate, in (0, 1).
    pub update_rate: f64,
    /// Frames averaged into the initial background.
    pub window: usize,
    pub blur_sigma: f64,
    /// Half-width of the blur kernel; 0 disables blurring.
    pub blur_radius: usize,
    /// Side of the square structuring element; 1 disables cleaning.
    pub morph_kernel: usize,
}

impl Default for MaskParams {
    fn default() -> Self {
        Self {
            threshold: 25.0,
            update_rate: 0.05,
            window: 5,
            blur_sigma: 1.5,
            blur_radius: 2,
            morph_kernel: 3,
        }
    }
}

impl MaskParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_owned()));
        if !(self.threshold.is_finite() && (0.0..=255.0).contains(&self.threshold)) {
            return bad("threshold must lie in [0, 255]");
        }
        if !(self.update_rate > 0.0 && self.update_rate < 1.0) {
            return bad("update_rate must lie in (0, 1)");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if !(self.blur_sigma.is_finite() && self.blur_sigma > 0.0) {
            return bad("blur_sigma must be positive");
        }
        if self.morph_kernel == 0 {
            return bad("morph_kernel must be at least 1");
        }
        Ok(())
    }

    /// Reads params from a JSON file; absent keys keep their defaults.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let params: Self = serde_json::from_str(&fs::read_to_string(path)?)?;
        params.validate()?;
        Ok(params)
    }
}

/// Binary `height x width x frames` motion volume, stored frame-major with values 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskVideo {
    width: u32,
    height: u32,
    frames: usize,
    data: Vec<u8>,
}

impl MaskVideo {
    pub fn new(width: u32, height: u32, frames: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || frames == 0 {
            return Err(Error::InvalidParams(format!(
                "empty mask volume {width}x{height}x{frames}"
            )));
        }
        if data.len() != width as usize * height as usize * frames {
            return Err(Error::DimensionMismatch(format!(
                "mask data length {} for {width}x{height}x{frames}",
                data.len()
            )));
        }
        if data.iter().any(|&v| v > 1) {
            return Err(Error::NonBinary);
        }
        Ok(Self {
            width,
            height,
            frames,
            data,
        })
    }

    pub fn zeros(width: u32, height: u32, frames: usize) -> Result<Self> {
        Self::new(
            width,
            height,
            frames,
            vec![0; width as usize * height as usize * frames],
        )
    }

    /// Stacks equally sized binary planes.
    pub fn from_planes(width: u32, height: u32, planes: Vec<Vec<u8>>) -> Result<Self> {
        let frames = planes.len();
        Self::new(width, height, frames, planes.concat())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn frame_count(&self) -> usize {
        self.frames
    }

    pub fn plane_len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn frame(&self, t: usize) -> &[u8] {
        let n = self.plane_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn get(&self, x: u32, y: u32, t: usize) -> u8 {
        self.data[t * self.plane_len() + y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, t: usize, on: bool) {
        let i = t * self.plane_len() + y as usize * self.width as usize + x as usize;
        self.data[i] = on as u8;
    }

    pub fn active_voxels(&self) -> usize {
        self.data.iter().filter(|&&v| v == 1).count()
    }

    /// Circularly shifts the volume by `shift` frames along time.
    pub fn rolled(&self, shift: usize) -> Self {
        let n = self.plane_len();
        let mut data = Vec::with_capacity(self.data.len());
        for t in 0..self.frames {
            let src = (t + self.frames - shift % self.frames) % self.frames;
            data.extend_from_slice(&self.data[src * n..(src + 1) * n]);
        }
        Self { data, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Binary,
    Weighted,
}

/// Spatial `height x width` motion map, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionMap {
    width: u32,
    height: u32,
    kind: MapKind,
    values: Vec<f64>,
}

impl MotionMap {
    pub fn new(width: u32, height: u32, kind: MapKind, values: Vec<f64>) -> Result<Self> {
        if values.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "map data length {} for {width}x{height}",
                values.len()
            )));
        }
        match kind {
            MapKind::Binary if values.iter().any(|&v| v != 0.0 && v != 1.0) => {
                return Err(Error::NonBinary)
            }
            MapKind::Weighted => {
                if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(Error::OutOfRange(v));
                }
            }
            _ => {}
        }
        Ok(Self {
            width,
            height,
            kind,
            values,
        })
    }

    pub fn binary(width: u32, height: u32, bits: &[u8]) -> Result<Self> {
        Self::new(
            width,
            height,
            MapKind::Binary,
            bits.iter().map(|&b| b as f64).collect(),
        )
    }

    pub fn weighted(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        Self::new(width, height, MapKind::Weighted, values)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn active_pixels(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }
}

/// Runs background subtraction over `seq`; one mask frame per input frame.
pub fn compute_mask_video(seq: &FrameSequence, params: &MaskParams) -> Result<MaskVideo> {
    params.validate()?;
    if seq.len() < params.window {
        return Err(Error::TooShort(format!(
            "{} frames, background window needs {}",
            seq.len(),
            params.window
        )));
    }
    let (w, h) = (seq.width() as usize, seq.height() as usize);
    let kernel = filters::gaussian_kernel(params.blur_sigma, params.blur_radius);
    let preprocess = |i: usize| filters::blur(&filters::grayscale(&seq.frames()[i]), w, h, &kernel);

    let warmup: Vec<Vec<f64>> = (0..params.window).into_par_iter().map(preprocess).collect();
    let mut background = vec![0.0; w * h];
    for plane in &warmup {
        for (b, v) in background.iter_mut().zip(plane) {
            *b += v;
        }
    }
    for b in &mut background {
        *b /= params.window as f64;
    }

    const CHUNK: usize = 16;
    let alpha = params.update_rate;
    let mut data = Vec::with_capacity(w * h * seq.len());
    for start in (0..seq.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(seq.len());
        let planes: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(|i| {
                if i < warmup.len() {
                    warmup[i].clone()
                } else {
                    preprocess(i)
                }
            })
            .collect();
        let mut raw = Vec::with_capacity(planes.len());
        for plane in &planes {
            let mut m = vec![0u8; w * h];
            for ((b, &f), out) in background.iter_mut().zip(plane).zip(&mut m) {
                *b = (1.0 - alpha) * *b + alpha * f;
                *out = ((f - *b).abs() > params.threshold) as u8;
            }
            raw.push(m);
        }
        let cleaned: Vec<Vec<u8>> = raw
            .par_iter()
            .map(|m| filters::open_close(m, w, h, params.morph_kernel))
            .collect();
        for m in cleaned {
            data.extend(m);
        }
    }
    MaskVideo::new(seq.width(), seq.height(), seq.len(), data)
}

/// Max over time: 1 wherever motion occurred at any frame.
pub fn collapse_spatial(mask: &MaskVideo) -> MotionMap {
    let n = mask.plane_len();
    let mut bits = vec![0u8; n];
    for t in 0..mask.frame_count() {
        for (acc, &v) in bits.iter_mut().zip(mask.frame(t)) {
            *acc |= v;
        }
    }
    MotionMap::binary(mask.width, mask.height, &bits).expect("max of binary planes is binary")
}

/// Mean over time: the fraction of frames in which each pixel moved.
pub fn collapse_weighted(mask: &MaskVideo) -> MotionMap {
    let n = mask.plane_len();
    let mut counts = vec![0u32; n];
    for t in 0..mask.frame_count() {
        for (acc, &v) in counts.iter_mut().zip(mask.frame(t)) {
            *acc += v as u32;
        }
    }
    let t = mask.frame_count() as f64;
    let values = counts.into_iter().map(|c| c as f64 / t).collect();
    MotionMap::weighted(mask.width, mask.height, values).expect("frame fractions lie in [0, 1]")
}

/// Stores a mask video as 1-channel PNG frames (0 or 255) plus `meta.json`.
pub fn save_mask_video(mask: &MaskVideo, fps: f64, dir: &Path) -> Result<()> {
    use crate::frameseq::SequenceMeta;
    fs::create_dir_all(dir)?;
    crate::frameseq::io::remove_stale_frames(dir)?;
    (0..mask.frame_count())
        .into_par_iter()
        .try_for_each(|t| -> Result<()> {
            let px = mask.frame(t).iter().map(|&v| v * 255).collect();
            let img =
                GrayImage::from_raw(mask.width, mask.height, px).expect("plane matches dimensions");
            let path = dir.join(crate::frameseq::io::frame_file_name(t));
            img.save(&path).map_err(|e| Error::UnreadableImage {
                path,
                reason: e.to_string(),
            })
        })?;
    let meta = SequenceMeta {
        fps,
        width: mask.width,
        height: mask.height,
        num_frames: mask.frame_count(),
        scenario_id: None,
        switch_index: None,
    };
    crate::frameseq::io::write_meta(dir, &meta)
}

/// Loads a mask video written by [`save_mask_video`]; any nonzero pixel counts as motion.
pub fn load_mask_video(dir: &Path) -> Result<(MaskVideo, f64)> {
    let meta = crate::frameseq::read_meta(dir)?;
    let files = crate::frameseq::io::list_frame_files(dir)?;
    if files.len() != meta.num_frames {
        return Err(Error::FrameCountMismatch {
            declared: meta.num_frames,
            found: files.len(),
        });
    }
    let planes: Vec<Vec<u8>> = files
        .par_iter()
        .map(|path| {
            let img = image::open(path)
                .map_err(|e| Error::UnreadableImage {
                    path: path.clone(),
                    reason: e.to_string(),
                })?
                .to_luma8();
            if (img.width(), img.height()) != (meta.width, meta.height) {
                return Err(Error::InvalidFrame(format!(
                    "{} has unexpected size",
                    path.display()
                )));
            }
            Ok(img.into_raw().into_iter().map(|v| (v > 0) as u8).collect())
        })
        .collect::<Result<_>>()?;
    Ok((
        MaskVideo::from_planes(meta.width, meta.height, planes)?,
        meta.fps,
    ))
}
