//! Check the detector against analytic motion maps for every synthetic kind.
//!
//! Run with `cargo run --example synth_oracle`.

use physiq::bench::Take;
use physiq::metrics::{spatial_iou, MotionSummary};
use physiq::motionmask::MaskParams;
use physiq::synthlab::{oracle_motion_map, render_scenario, SynthKind, SynthSpec};

fn main() -> physiq::Result<()> {
    let params = MaskParams::default();
    for kind in SynthKind::ALL {
        let spec = SynthSpec::preset(kind);
        let test = render_scenario(&spec, Take::One)?.slice(spec.test_range()?)?;
        let detected = MotionSummary::compute(&test, &params)?;
        let oracle = oracle_motion_map(&spec)?;
        let iou = spatial_iou(&detected.spatial, &oracle)?;
        println!(
            "{:<16} oracle {:>4} px  detected {:>4} px  IoU {:.3}",
            kind.as_str(),
            oracle.active_pixels(),
            detected.spatial.active_pixels(),
            iou.value
        );
    }
    Ok(())
}
