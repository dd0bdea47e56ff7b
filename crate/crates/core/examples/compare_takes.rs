//! Score two takes of one scene against each other, then a degraded copy.
//!
//! Run with `cargo run --example compare_takes`.

use physiq::bench::Take;
use physiq::frameseq::split_at_switch;
use physiq::metrics::{evaluate_pair, StMode};
use physiq::motionmask::MaskParams;
use physiq::synthlab::{add_pixel_noise, render_scenario, SynthKind, SynthSpec};

fn main() -> physiq::Result<()> {
    let spec = SynthSpec::preset(SynthKind::Pendulum).with_noise(7, 1.0);
    let split = spec.split();
    let (_, take1) = split_at_switch(&render_scenario(&spec, Take::One)?, &split)?;
    let (_, take2) = split_at_switch(&render_scenario(&spec, Take::Two)?, &split)?;
    let params = MaskParams::default();

    let rows = [
        ("take 1 vs itself", take1.clone()),
        ("take 1 vs take 2", take2),
        ("take 1 vs noisy copy", add_pixel_noise(&take1, 60, 3)?),
    ];
    println!(
        "{:<22} {:>8} {:>8} {:>8} {:>9}",
        "pair", "spatial", "st", "weighted", "mse"
    );
    for (label, other) in rows {
        let m = evaluate_pair(&take1, &other, &params, StMode::Volume)?;
        println!(
            "{label:<22} {:>8.3} {:>8.3} {:>8.3} {:>9.5}",
            m.spatial_iou, m.spatiotemporal_iou, m.weighted_spatial_iou, m.mse
        );
    }
    Ok(())
}
