//! Rank the published reference models per metric and correlate rank with score.
//!
//! Run with `cargo run --example rankings`.

use physiq::bench::reference::{MLLM_SCORES, MODELS, SPEARMAN_SCORE_VS_RANK};
use physiq::bench::{mean_rank, pearson, spearman};

fn main() -> physiq::Result<()> {
    let metrics: Vec<_> = MODELS.iter().map(|m| m.metrics).collect();
    let ranks = mean_rank(&metrics)?;
    for (model, rank) in MODELS.iter().zip(&ranks) {
        println!(
            "{:<30} score {:>5.1}  mean rank {rank:.2}",
            model.name, model.physics_iq
        );
    }

    let scores: Vec<f64> = MODELS.iter().map(|m| m.physics_iq).collect();
    let rho = spearman(&scores, &ranks)?;
    println!("spearman(score, mean rank) = {rho:.3} (published {SPEARMAN_SCORE_VS_RANK})");

    // only four models have a stated 2AFC accuracy
    let (mllm, iq): (Vec<f64>, Vec<f64>) = MLLM_SCORES
        .iter()
        .map(|(name, acc)| {
            (
                *acc,
                MODELS
                    .iter()
                    .find(|m| m.name == *name)
                    .expect("listed")
                    .physics_iq,
            )
        })
        .unzip();
    println!(
        "pearson(2AFC accuracy, score) over {} models = {:.3}",
        mllm.len(),
        pearson(&mllm, &iq)?
    );
    Ok(())
}
