use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use image::RgbImage;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Frame, FrameSequence, CHANNELS};
use crate::error::{Error, Result};

pub(crate) const META_FILE: &str = "meta.json";
pub(crate) const RAW_FILE: &str = "frames.piqf";
const RAW_MAGIC: &[u8; 4] = b"PIQF";
const RAW_HEADER_LEN: usize = 16;

/// Contents of `meta.json` next to every stored sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    pub fps: f64,
    pub width: u32,
    pub height: u32,
    pub num_frames: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch_index: Option<usize>,
}

impl SequenceMeta {
    pub(crate) fn describe(seq_fps: f64, width: u32, height: u32, num_frames: usize) -> Self {
        Self {
            fps: seq_fps,
            width,
            height,
            num_frames,
            scenario_id: None,
            switch_index: None,
        }
    }
}

pub(crate) fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.png")
}

fn meta_path_for(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(META_FILE)
    } else {
        path.parent().unwrap_or(Path::new(".")).join(META_FILE)
    }
}

/// Reads `meta.json` for a sequence directory or raw file.
pub fn read_meta(path: &Path) -> Result<SequenceMeta> {
    let meta_path = meta_path_for(path);
    let text = fs::read_to_string(&meta_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::MissingMetadata(meta_path.clone()),
        _ => Error::Io(e),
    })?;
    Ok(serde_json::from_str(&text)?)
}

pub(crate) fn write_meta(dir: &Path, meta: &SequenceMeta) -> Result<()> {
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(dir.join(META_FILE), text)?;
    Ok(())
}

/// Lists `frame_NNNNNN.png` files in index order, requiring indices `0..n` with no gaps.
pub(crate) fn list_frame_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut indexed = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(digits) = name
            .strip_prefix("frame_")
            .and_then(|s| s.strip_suffix(".png"))
        else {
            continue;
        };
        if let Ok(index) = digits.parse::<usize>() {
            indexed.push((index, entry.path()));
        }
    }
    indexed.sort();
    for (expected, (index, path)) in indexed.iter().enumerate() {
        if *index != expected {
            return Err(Error::UnreadableImage {
                path: path.clone(),
                reason: format!("frame numbering gap: expected index {expected}"),
            });
        }
    }
    Ok(indexed.into_iter().map(|(_, p)| p).collect())
}

pub(crate) fn remove_stale_frames(dir: &Path) -> Result<()> {
    for path in list_frame_files(dir).unwrap_or_default() {
        fs::remove_file(path)?;
    }
    let raw = dir.join(RAW_FILE);
    if raw.exists() {
        fs::remove_file(raw)?;
    }
    Ok(())
}

/// Loads a sequence from a PNG frame directory, a directory holding
/// `frames.piqf`, or a `.piqf` file directly. Metadata always comes from `meta.json`.
pub fn load_sequence(path: &Path) -> Result<FrameSequence> {
    let meta = read_meta(path)?;
    let frames = if path.is_file() {
        load_raw(path, &meta)?
    } else if path.join(RAW_FILE).is_file() {
        load_raw(&path.join(RAW_FILE), &meta)?
    } else {
        load_png_frames(path, &meta)?
    };
    FrameSequence::new(frames, meta.fps)
}

fn load_png_frames(dir: &Path, meta: &SequenceMeta) -> Result<Vec<Frame>> {
    let files = list_frame_files(dir)?;
    if files.len() != meta.num_frames {
        return Err(Error::FrameCountMismatch {
            declared: meta.num_frames,
            found: files.len(),
        });
    }
    files
        .par_iter()
        .map(|path| {
            let img = image::open(path).map_err(|e| Error::UnreadableImage {
                path: path.clone(),
                reason: e.to_string(),
            })?;
            let rgb = img.to_rgb8();
            if rgb.width() != meta.width || rgb.height() != meta.height {
                return Err(Error::InvalidFrame(format!(
                    "{} is {}x{}, metadata says {}x{}",
                    path.display(),
                    rgb.width(),
                    rgb.height(),
                    meta.width,
                    meta.height
                )));
            }
            Frame::new(rgb.width(), rgb.height(), rgb.into_raw())
        })
        .collect()
}

fn load_raw(path: &Path, meta: &SequenceMeta) -> Result<Vec<Frame>> {
    let bytes = fs::read(path)?;
    if bytes.len() < RAW_HEADER_LEN || &bytes[..4] != RAW_MAGIC {
        return Err(Error::MalformedRaw(format!(
            "{}: bad magic",
            path.display()
        )));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let (width, height, count) = (word(4), word(8), word(12) as usize);
    if count != meta.num_frames {
        return Err(Error::FrameCountMismatch {
            declared: meta.num_frames,
            found: count,
        });
    }
    if width != meta.width || height != meta.height {
        return Err(Error::MalformedRaw(format!(
            "header says {width}x{height}, metadata says {}x{}",
            meta.width, meta.height
        )));
    }
    let plane = width as usize * height as usize;
    let frame_len = plane * CHANNELS;
    let body = &bytes[RAW_HEADER_LEN..];
    if body.len() != frame_len * count {
        return Err(Error::MalformedRaw(format!(
            "expected {} payload bytes, found {}",
            frame_len * count,
            body.len()
        )));
    }
    body.chunks_exact(frame_len)
        .map(|planar| {
            let mut data = vec![0u8; frame_len];
            for (p, px) in data.chunks_exact_mut(CHANNELS).enumerate() {
                for (c, v) in px.iter_mut().enumerate() {
                    *v = planar[c * plane + p];
                }
            }
            Frame::new(width, height, data)
        })
        .collect()
}

/// Writes `frame_000000.png ...` plus `meta.json` into `dir`, replacing any earlier frames.
pub fn save_sequence(seq: &FrameSequence, dir: &Path) -> Result<()> {
    save_sequence_tagged(seq, dir, None, None)
}

/// Like [`save_sequence`], additionally recording scenario id and switch frame in the metadata.
pub fn save_sequence_tagged(
    seq: &FrameSequence,
    dir: &Path,
    scenario_id: Option<&str>,
    switch_index: Option<usize>,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    remove_stale_frames(dir)?;
    seq.frames()
        .par_iter()
        .enumerate()
        .try_for_each(|(i, frame)| -> Result<()> {
            let img = RgbImage::from_raw(frame.width(), frame.height(), frame.data().to_vec())
                .expect("frame buffer matches its dimensions");
            let path = dir.join(frame_file_name(i));
            img.save(&path).map_err(|e| Error::UnreadableImage {
                path,
                reason: e.to_string(),
            })
        })?;
    let mut meta = SequenceMeta::describe(seq.fps(), seq.width(), seq.height(), seq.len());
    meta.scenario_id = scenario_id.map(str::to_owned);
    meta.switch_index = switch_index;
    write_meta(dir, &meta)
}

/// Writes the raw planar layout to `dir/frames.piqf` with its `meta.json`.
pub fn save_raw(seq: &FrameSequence, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    remove_stale_frames(dir)?;
    let mut out = BufWriter::new(fs::File::create(dir.join(RAW_FILE))?);
    out.write_all(RAW_MAGIC)?;
    out.write_all(&seq.width().to_le_bytes())?;
    out.write_all(&seq.height().to_le_bytes())?;
    out.write_all(&(seq.len() as u32).to_le_bytes())?;
    for frame in seq.frames() {
        for c in 0..CHANNELS {
            let plane: Vec<u8> = frame
                .data()
                .iter()
                .skip(c)
                .step_by(CHANNELS)
                .copied()
                .collect();
            out.write_all(&plane)?;
        }
    }
    out.flush()?;
    write_meta(
        dir,
        &SequenceMeta::describe(seq.fps(), seq.width(), seq.height(), seq.len()),
    )
}
