//! Per-frame image filters used by the mask pipeline. Borders replicate edge pixels.

use crate::frameseq::{Frame, CHANNELS};

/// BT.601 luma, computed in integers so gray pixels map to themselves exactly.
pub fn grayscale(frame: &Frame) -> Vec<f64> {
    frame
        .data()
        .chunks_exact(CHANNELS)
        .map(|px| {
            let weighted = 299 * px[0] as u32 + 587 * px[1] as u32 + 114 * px[2] as u32;
            weighted as f64 / 1000.0
        })
        .collect()
}

/// Normalized 1-D Gaussian taps for `-radius..=radius`.
pub fn gaussian_kernel(sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Separable convolution with `kernel` along rows then columns.
pub fn blur(plane: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    if kernel.len() <= 1 {
        return plane.to_vec();
    }
    let r = (kernel.len() / 2) as i64;
    let clamp = |v: i64, len: usize| v.clamp(0, len as i64 - 1) as usize;
    let mut rows = vec![0.0; plane.len()];
    for y in 0..height {
        let line = &plane[y * width..(y + 1) * width];
        for x in 0..width {
            rows[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * line[clamp(x as i64 + k as i64 - r, width)])
                .sum();
        }
    }
    let mut out = vec![0.0; plane.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, w)| w * rows[clamp(y as i64 + k as i64 - r, height) * width + x])
                .sum();
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Extremum {
    Min,
    Max,
}

/// Running min/max over a `side`-wide window along both axes (a square structuring element).
fn square_filter(mask: &[u8], width: usize, height: usize, side: usize, op: Extremum) -> Vec<u8> {
    if side <= 1 {
        return mask.to_vec();
    }
    let before = (side / 2) as i64;
    let after = (side - 1 - side / 2) as i64;
    let pick = |acc: u8, v: u8| match op {
        Extremum::Min => acc.min(v),
        Extremum::Max => acc.max(v),
    };
    let seed = match op {
        Extremum::Min => 1,
        Extremum::Max => 0,
    };
    let clamp = |v: i64, len: usize| v.clamp(0, len as i64 - 1) as usize;
    let mut rows = vec![0u8; mask.len()];
    for y in 0..height {
        for x in 0..width {
            rows[y * width + x] = (-before..=after)
                .map(|d| mask[y * width + clamp(x as i64 + d, width)])
                .fold(seed, pick);
        }
    }
    let mut out = vec![0u8; mask.len()];
    for y in 0..height {
        for x in 0..width {
            out[y * width + x] = (-before..=after)
                .map(|d| rows[clamp(y as i64 + d, height) * width + x])
                .fold(seed, pick);
        }
    }
    out
}

pub fn erode(mask: &[u8], width: usize, height: usize, side: usize) -> Vec<u8> {
    square_filter(mask, width, height, side, Extremum::Min)
}

pub fn dilate(mask: &[u8], width: usize, height: usize, side: usize) -> Vec<u8> {
    square_filter(mask, width, height, side, Extremum::Max)
}

/// Opening (erode, dilate) followed by closing (dilate, erode).
pub fn open_close(mask: &[u8], width: usize, height: usize, side: usize) -> Vec<u8> {
    let opened = dilate(&erode(mask, width, height, side), width, height, side);
    erode(&dilate(&opened, width, height, side), width, height, side)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_pixels_are_unchanged() {
        let frame = Frame::new(3, 1, vec![0, 0, 0, 128, 128, 128, 255, 255, 255]).unwrap();
        assert_eq!(grayscale(&frame), vec![0.0, 128.0, 255.0]);
    }

    #[test]
    fn luma_weights() {
        let frame = Frame::new(3, 1, vec![255, 0, 0, 0, 255, 0, 0, 0, 255]).unwrap();
        assert_eq!(grayscale(&frame), vec![76.245, 149.685, 29.07]);
    }

    #[test]
    fn kernel_is_normalized_and_symmetric() {
        let k = gaussian_kernel(1.5, 2);
        assert_eq!(k.len(), 5);
        assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(k[0], k[4]);
        assert!(k[2] > k[1] && k[1] > k[0]);
    }

    #[test]
    fn blur_preserves_constants() {
        let plane = vec![42.0; 6 * 4];
        let k = gaussian_kernel(1.5, 2);
        assert!(blur(&plane, 6, 4, &k)
            .iter()
            .all(|v| (v - 42.0).abs() < 1e-9));
    }

    #[test]
    fn opening_removes_isolated_pixels() {
        let mut m = vec![0u8; 7 * 7];
        m[3 * 7 + 3] = 1;
        assert!(open_close(&m, 7, 7, 3).iter().all(|&v| v == 0));
    }

    #[test]
    fn closing_fills_single_pixel_holes() {
        let mut m = vec![1u8; 7 * 7];
        m[3 * 7 + 3] = 0;
        assert!(open_close(&m, 7, 7, 3).iter().all(|&v| v == 1));
    }

    #[test]
    fn blocks_survive_open_close() {
        let mut m = vec![0u8; 8 * 8];
        for y in 2..6 {
            for x in 2..6 {
                m[y * 8 + x] = 1;
            }
        }
        assert_eq!(open_close(&m, 8, 8, 3), m);
    }

    #[test]
    fn edge_replication_keeps_border_blocks() {
        // a block touching the border is not eroded away by virtual zero padding
        let mut m = vec![0u8; 6 * 6];
        for y in 0..3 {
            for x in 0..3 {
                m[y * 6 + x] = 1;
            }
        }
        assert_eq!(open_close(&m, 6, 6, 3), m);
    }
}
