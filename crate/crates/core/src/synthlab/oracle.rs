//! Voxel-by-voxel reference implementations of the metrics, written with explicit
//! index loops and no shared helpers. Inputs are capped at 32x32x16 so they stay cheap
//! to run inside property tests.

use crate::error::{Error, Result};
use crate::frameseq::FrameSequence;
use crate::metrics::{MetricSet, StMode};
use crate::motionmask::MaskVideo;

pub const ORACLE_MAX_SIDE: u32 = 32;
pub const ORACLE_MAX_FRAMES: usize = 16;

fn check_cap(width: u32, height: u32, frames: usize) -> Result<()> {
    if width > ORACLE_MAX_SIDE || height > ORACLE_MAX_SIDE || frames > ORACLE_MAX_FRAMES {
        return Err(Error::OracleCap(format!(
            "{width}x{height}x{frames} exceeds {ORACLE_MAX_SIDE}x{ORACLE_MAX_SIDE}x{ORACLE_MAX_FRAMES}"
        )));
    }
    Ok(())
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        1.0
    } else {
        num / den
    }
}

/// Spatial, spatiotemporal and weighted IoU from two mask videos by enumeration.
/// The `mse` field is left at 0.
pub fn oracle_mask_metrics(a: &MaskVideo, b: &MaskVideo, mode: StMode) -> Result<MetricSet> {
    let (w, h, n) = (a.width(), a.height(), a.frame_count());
    if (w, h, n) != (b.width(), b.height(), b.frame_count()) {
        return Err(Error::DimensionMismatch(
            "oracle inputs differ in shape".into(),
        ));
    }
    check_cap(w, h, n)?;

    let mut spatial_inter = 0u32;
    let mut spatial_union = 0u32;
    let mut weighted_lo = 0.0;
    let mut weighted_hi = 0.0;
    for y in 0..h {
        for x in 0..w {
            let mut ever_a = false;
            let mut ever_b = false;
            let mut count_a = 0u32;
            let mut count_b = 0u32;
            for t in 0..n {
                let va = a.get(x, y, t) == 1;
                let vb = b.get(x, y, t) == 1;
                ever_a |= va;
                ever_b |= vb;
                count_a += va as u32;
                count_b += vb as u32;
            }
            if ever_a && ever_b {
                spatial_inter += 1;
            }
            if ever_a || ever_b {
                spatial_union += 1;
            }
            let fa = count_a as f64 / n as f64;
            let fb = count_b as f64 / n as f64;
            weighted_lo += fa.min(fb);
            weighted_hi += fa.max(fb);
        }
    }

    let spatiotemporal = match mode {
        StMode::Volume => {
            let mut inter = 0u32;
            let mut union = 0u32;
            for t in 0..n {
                for y in 0..h {
                    for x in 0..w {
                        let (va, vb) = (a.get(x, y, t) == 1, b.get(x, y, t) == 1);
                        inter += (va && vb) as u32;
                        union += (va || vb) as u32;
                    }
                }
            }
            ratio(inter as f64, union as f64)
        }
        StMode::FrameMean => {
            let mut total = 0.0;
            for t in 0..n {
                let mut inter = 0u32;
                let mut union = 0u32;
                for y in 0..h {
                    for x in 0..w {
                        let (va, vb) = (a.get(x, y, t) == 1, b.get(x, y, t) == 1);
                        inter += (va && vb) as u32;
                        union += (va || vb) as u32;
                    }
                }
                total += ratio(inter as f64, union as f64);
            }
            total / n as f64
        }
    };

    Ok(MetricSet {
        spatial_iou: ratio(spatial_inter as f64, spatial_union as f64),
        spatiotemporal_iou: spatiotemporal,
        weighted_spatial_iou: ratio(weighted_lo, weighted_hi),
        mse: 0.0,
    })
}

/// Spatial and weighted IoU from motion maps given directly as row-major slices.
/// Returns `(spatial, weighted)`; `spatial` reads any nonzero value as motion.
pub fn oracle_map_metrics(a: &[f64], b: &[f64], width: u32, height: u32) -> Result<(f64, f64)> {
    check_cap(width, height, 1)?;
    let n = (width * height) as usize;
    if a.len() != n || b.len() != n {
        return Err(Error::DimensionMismatch(
            "oracle maps differ from declared size".into(),
        ));
    }
    let (mut inter, mut union, mut lo, mut hi) = (0u32, 0u32, 0.0, 0.0);
    for i in 0..n {
        inter += (a[i] != 0.0 && b[i] != 0.0) as u32;
        union += (a[i] != 0.0 || b[i] != 0.0) as u32;
        lo += a[i].min(b[i]);
        hi += a[i].max(b[i]);
    }
    Ok((ratio(inter as f64, union as f64), ratio(lo, hi)))
}

/// Pixel-wise MSE over intensities scaled to [0, 1].
pub fn oracle_mse(a: &FrameSequence, b: &FrameSequence) -> Result<f64> {
    if a.dims() != b.dims() || a.len() != b.len() {
        return Err(Error::DimensionMismatch(
            "oracle sequences differ in shape".into(),
        ));
    }
    check_cap(a.width(), a.height(), a.len())?;
    // squared 8-bit differences are integers, so this float sum is exact
    let mut sum = 0.0;
    let mut count = 0.0;
    for t in 0..a.len() {
        for y in 0..a.height() {
            for x in 0..a.width() {
                let (pa, pb) = (a.frames()[t].pixel(x, y), b.frames()[t].pixel(x, y));
                for c in 0..3 {
                    let d = pa[c] as f64 - pb[c] as f64;
                    sum += d * d;
                    count += 1.0;
                }
            }
        }
    }
    Ok(sum / (255.0 * 255.0 * count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{spatial_iou, spatiotemporal_iou, weighted_spatial_iou};
    use crate::motionmask::{collapse_spatial, collapse_weighted};

    #[test]
    fn cap_is_enforced() {
        let big = MaskVideo::zeros(33, 4, 2).unwrap();
        assert!(matches!(
            oracle_mask_metrics(&big, &big, StMode::Volume),
            Err(Error::OracleCap(_))
        ));
        let long = MaskVideo::zeros(4, 4, 17).unwrap();
        assert!(matches!(
            oracle_mask_metrics(&long, &long, StMode::Volume),
            Err(Error::OracleCap(_))
        ));
    }

    #[test]
    fn agrees_with_fast_path_on_a_small_case() {
        let mut a = MaskVideo::zeros(4, 3, 3).unwrap();
        let mut b = MaskVideo::zeros(4, 3, 3).unwrap();
        for (x, y, t) in [(0, 0, 0), (1, 0, 1), (2, 2, 2), (3, 1, 0)] {
            a.set(x, y, t, true);
        }
        for (x, y, t) in [(0, 0, 0), (1, 0, 2), (3, 2, 1)] {
            b.set(x, y, t, true);
        }
        for mode in [StMode::Volume, StMode::FrameMean] {
            let o = oracle_mask_metrics(&a, &b, mode).unwrap();
            assert_eq!(
                o.spatiotemporal_iou,
                spatiotemporal_iou(&a, &b, mode).unwrap().value
            );
            let (sa, sb) = (collapse_spatial(&a), collapse_spatial(&b));
            assert_eq!(o.spatial_iou, spatial_iou(&sa, &sb).unwrap().value);
            let (wa, wb) = (collapse_weighted(&a), collapse_weighted(&b));
            assert_eq!(
                o.weighted_spatial_iou,
                weighted_spatial_iou(&wa, &wb).unwrap().value
            );
        }
        // 2 of 5 active pixels overlap in space; 1 of 6 voxels in the volume
        let o = oracle_mask_metrics(&a, &b, StMode::Volume).unwrap();
        assert_eq!(o.spatial_iou, 2.0 / 5.0);
        assert_eq!(o.spatiotemporal_iou, 1.0 / 6.0);
    }
}
