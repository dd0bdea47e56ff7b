use super::{Frame, FrameSequence, CHANNELS};
use crate::error::{Error, Result};

/// Number of output frames when `seq` is resampled to `fps_new`: `round(duration * fps_new)`, at least 1.
pub fn resampled_len(seq: &FrameSequence, fps_new: f64) -> usize {
    ((seq.duration() * fps_new).round() as usize).max(1)
}

/// Changes the frame rate by linearly blending neighbouring frames, optionally
/// resizing each blended frame bilinearly to `out_dims`.
///
/// Output frame `j` samples the input at `j * (n_in - 1) / (n_out - 1)`; blending and
/// resizing run in floating point and are rounded half-to-even once at the end.
pub fn resample_fps(
    seq: &FrameSequence,
    fps_new: f64,
    out_dims: Option<(u32, u32)>,
) -> Result<FrameSequence> {
    if !(fps_new.is_finite() && fps_new > 0.0) {
        return Err(Error::InvalidFps(fps_new));
    }
    if let Some((w, h)) = out_dims {
        if w == 0 || h == 0 {
            return Err(Error::InvalidParams(format!(
                "zero-dimension resize to {w}x{h}"
            )));
        }
    }
    let n_in = seq.len();
    let n_out = resampled_len(seq, fps_new);
    let (src_w, src_h) = seq.dims();
    let target = out_dims.filter(|&d| d != (src_w, src_h));
    let frames = seq.frames();

    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out {
        let alpha = if n_out == 1 {
            0.0
        } else {
            (j * (n_in - 1)) as f64 / (n_out - 1) as f64
        };
        let i = alpha.floor() as usize;
        let beta = alpha - i as f64;
        let f1 = frames[i].data();
        let f2 = frames[(i + 1).min(n_in - 1)].data();
        let blended: Vec<f64> = f1
            .iter()
            .zip(f2)
            .map(|(&a, &b)| (1.0 - beta) * a as f64 + beta * b as f64)
            .collect();
        let (w, h, values) = match target {
            Some((w, h)) => (
                w,
                h,
                bilinear_resize(&blended, src_w, src_h, CHANNELS, w, h),
            ),
            None => (src_w, src_h, blended),
        };
        out.push(Frame::new(w, h, quantize(&values))?);
    }
    FrameSequence::new(out, fps_new)
}

fn quantize(values: &[f64]) -> Vec<u8> {
    values
        .iter()
        .map(|v| v.round_ties_even().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Bilinear resize of an interleaved float image using pixel-centre alignment and clamped edges.
pub fn bilinear_resize(
    src: &[f64],
    src_w: u32,
    src_h: u32,
    channels: usize,
    dst_w: u32,
    dst_h: u32,
) -> Vec<f64> {
    let (sw, sh) = (src_w as usize, src_h as usize);
    let (dw, dh) = (dst_w as usize, dst_h as usize);
    let axis = |dst: usize, dst_len: usize, src_len: usize| -> (usize, usize, f64) {
        let pos = ((dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5)
            .clamp(0.0, (src_len - 1) as f64);
        let lo = pos.floor() as usize;
        (lo, (lo + 1).min(src_len - 1), pos - lo as f64)
    };
    let cols: Vec<_> = (0..dw).map(|x| axis(x, dw, sw)).collect();
    let mut out = vec![0.0; dw * dh * channels];
    for y in 0..dh {
        let (y0, y1, fy) = axis(y, dh, sh);
        for (x, &(x0, x1, fx)) in cols.iter().enumerate() {
            for c in 0..channels {
                let at = |xx: usize, yy: usize| src[(yy * sw + xx) * channels + c];
                let top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
                let bottom = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
                out[(y * dw + x) * channels + c] = (1.0 - fy) * top + fy * bottom;
            }
        }
    }
    out
}
