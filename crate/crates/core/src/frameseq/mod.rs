//! Frame sequences: the in-memory video model, its on-disk layouts, temporal
//! resampling and the conditioning/test split.

pub(crate) mod io;
mod resample;

pub use io::{
    load_sequence, read_meta, save_raw, save_sequence, save_sequence_tagged, SequenceMeta,
};
pub use resample::{bilinear_resize, resample_fps, resampled_len};

use std::ops::Range;

use crate::error::{Error, Result};

/// Channels per pixel. Frames are always RGB8.
pub const CHANNELS: usize = 3;

/// One RGB8 frame, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!(
                "zero dimension {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * CHANNELS;
        if data.len() != expected {
            return Err(Error::InvalidFrame(format!(
                "data length {} does not match {width}x{height}x{CHANNELS} = {expected}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A frame with every pixel set to `rgb`.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        let n = width as usize * height as usize;
        let data = rgb.iter().copied().cycle().take(n * CHANNELS).collect();
        Self::new(width, height, data)
    }

    /// Replicates a single-channel plane into all three channels.
    pub fn from_gray(width: u32, height: u32, gray: &[u8]) -> Result<Self> {
        let data = gray.iter().flat_map(|&v| [v, v, v]).collect();
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * CHANNELS;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// An ordered, non-empty list of equally sized frames played back at `fps`.
///
/// Sequences are immutable once built; every transformation returns a new one.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    frames: Vec<Frame>,
    fps: f64,
}

impl FrameSequence {
    pub fn new(frames: Vec<Frame>, fps: f64) -> Result<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::InvalidFps(fps));
        }
        let first = frames.first().ok_or(Error::EmptySequence)?;
        let (width, height) = (first.width, first.height);
        for (index, f) in frames.iter().enumerate() {
            if f.width != width || f.height != height {
                return Err(Error::InhomogeneousFrames {
                    index,
                    width,
                    height,
                    got_width: f.width,
                    got_height: f.height,
                });
            }
        }
        Ok(Self { frames, fps })
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn width(&self) -> u32 {
        self.frames[0].width
    }

    pub fn height(&self) -> u32 {
        self.frames[0].height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width(), self.height())
    }

    /// Seconds covered by the sequence: frame count divided by fps.
    pub fn duration(&self) -> f64 {
        self.frames.len() as f64 / self.fps
    }

    /// Copies out a contiguous sub-range, keeping fps.
    pub fn slice(&self, range: Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.frames.len() {
            return Err(Error::TooShort(format!(
                "cannot take frames {range:?} of a {}-frame sequence",
                self.frames.len()
            )));
        }
        Self::new(self.frames[range].to_vec(), self.fps)
    }

    /// Keeps the first `n` frames (all of them if `n` exceeds the length).
    pub fn truncated(&self, n: usize) -> Result<Self> {
        self.slice(0..n.min(self.frames.len()))
    }
}

/// Where to cut a recording into conditioning and test segments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    /// Index of the switch frame, the last conditioning frame.
    pub switch_index: usize,
    pub conditioning_seconds: f64,
    pub test_seconds: f64,
}

impl SplitSpec {
    pub const CONDITIONING_SECONDS: f64 = 3.0;
    pub const TEST_SECONDS: f64 = 5.0;

    /// The 3 s / 5 s split with the switch frame at the end of the third second.
    pub fn standard(fps: f64) -> Self {
        let cond = (Self::CONDITIONING_SECONDS * fps).round() as usize;
        Self {
            switch_index: cond.saturating_sub(1),
            conditioning_seconds: Self::CONDITIONING_SECONDS,
            test_seconds: Self::TEST_SECONDS,
        }
    }

    /// A hand-picked switch frame with the standard 5 s test window.
    pub fn at(switch_index: usize) -> Self {
        Self {
            switch_index,
            conditioning_seconds: Self::CONDITIONING_SECONDS,
            test_seconds: Self::TEST_SECONDS,
        }
    }

    pub fn test_len(&self, fps: f64) -> usize {
        (self.test_seconds * fps).round() as usize
    }
}

/// Cuts `seq` into `[0, switch_index]` and the following `round(test_seconds * fps)` frames.
pub fn split_at_switch(
    seq: &FrameSequence,
    spec: &SplitSpec,
) -> Result<(FrameSequence, FrameSequence)> {
    let test_len = spec.test_len(seq.fps());
    let cond_len = spec.switch_index + 1;
    if test_len == 0 || cond_len + test_len > seq.len() {
        return Err(Error::TooShort(format!(
            "too short: {} frames at {} fps cannot hold {cond_len} conditioning + {test_len} test frames",
            seq.len(),
            seq.fps()
        )));
    }
    let conditioning = seq.slice(0..cond_len)?;
    let test = seq.slice(cond_len..cond_len + test_len)?;
    Ok((conditioning, test))
}
