//! Resample a 30 fps clip to 8 fps and cut it at the switch frame.
//!
//! Run with `cargo run --example resample`.

use physiq::frameseq::{
    resample_fps, resampled_len, split_at_switch, Frame, FrameSequence, SplitSpec,
};

fn main() -> physiq::Result<()> {
    // 9 s at 30 fps, a horizontal gradient sliding right one pixel per frame
    let (w, h) = (48u32, 32u32);
    let frames = (0..270u32)
        .map(|t| {
            let gray: Vec<u8> = (0..w * h)
                .map(|i| (((i % w + t) * 5) % 256) as u8)
                .collect();
            Frame::from_gray(w, h, &gray)
        })
        .collect::<physiq::Result<Vec<_>>>()?;
    let clip = FrameSequence::new(frames, 30.0)?;
    println!(
        "source: {} frames, {:.1} s at {} fps",
        clip.len(),
        clip.duration(),
        clip.fps()
    );

    println!("expected length at 8 fps: {}", resampled_len(&clip, 8.0));
    let small = resample_fps(&clip, 8.0, Some((24, 16)))?;
    println!("resampled: {} frames of {:?}", small.len(), small.dims());

    let spec = SplitSpec::standard(small.fps());
    let (context, test) = split_at_switch(&small, &spec)?;
    println!(
        "context frames 0..={} ({}), test segment {} frames",
        spec.switch_index,
        context.len(),
        test.len()
    );
    Ok(())
}
