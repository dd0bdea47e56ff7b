//! Detect motion in a rendered falling ball and print the collapsed map.
//!
//! Run with `cargo run --example motion_mask`.

use physiq::bench::Take;
use physiq::motionmask::{collapse_spatial, collapse_weighted, compute_mask_video, MaskParams};
use physiq::synthlab::{render_scenario, SynthKind, SynthSpec};

fn main() -> physiq::Result<()> {
    let spec = SynthSpec::preset(SynthKind::FallingBall);
    let video = render_scenario(&spec, Take::One)?;
    let params = MaskParams::default();
    let mask = compute_mask_video(&video, &params)?;
    println!(
        "{} frames, {} active voxels",
        mask.frame_count(),
        mask.active_voxels()
    );

    let spatial = collapse_spatial(&mask);
    let weighted = collapse_weighted(&mask);
    // '#' fires often, '+' sometimes, '.' once or twice
    for y in (0..spatial.height()).step_by(2) {
        let row: String = (0..spatial.width())
            .map(|x| match weighted.get(x, y) {
                v if v > 0.25 => '#',
                v if v > 0.05 => '+',
                _ if spatial.get(x, y) > 0.0 => '.',
                _ => ' ',
            })
            .collect();
        println!("|{row}|");
    }
    Ok(())
}
