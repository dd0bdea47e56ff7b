//! End to end on the synthetic mini-benchmark: variance baseline, two fake models,
//! per-category breakdown and the summary table.
//!
//! Run with `cargo run --release --example mini_benchmark`.

use physiq::bench::{compute_variance_baseline, evaluate_model, summary_table, EvalReport};
use physiq::metrics::StMode;
use physiq::motionmask::MaskParams;
use physiq::synthlab::{write_mini_benchmark, write_model_outputs};

fn main() -> physiq::Result<()> {
    let dir = tempfile::tempdir()?;
    let dataset = write_mini_benchmark(&dir.path().join("data"), 42)?;
    let summary = dataset.validate(true)?;
    println!("dataset: {summary:?}");

    let params = MaskParams::default();
    let baseline = compute_variance_baseline(&dataset, &params, StMode::Volume)?;

    let mut reports = Vec::new();
    for (model, noise) in [("copy-of-take-1", 0u8), ("noisy-take-1", 90)] {
        let out = dir.path().join(model);
        write_model_outputs(&dataset, &out, noise, 1)?;
        let scored = evaluate_model(&dataset, &out, &params, StMode::Volume)?;
        reports.push(EvalReport::build(model, scored, &baseline)?);
    }

    for row in &reports[1].categories {
        match row.physics_iq {
            Some(score) => println!("  {:<16} {:>6.2}", row.category.label(), score),
            None => println!("  {:<16}    n/a", row.category.label()),
        }
    }
    println!();
    for row in summary_table(&reports)? {
        let rank = row.mean_rank.map_or("-".to_owned(), |r| format!("{r:.3}"));
        println!(
            "{:<18} physics-iq {:>6.2}  mean rank {rank}",
            row.model, row.physics_iq
        );
    }
    Ok(())
}
