//! Run the two-alternative forced choice protocol with the offline stub judges.
//!
//! Run with `cargo run --release --example judge_stubs`.

use std::collections::BTreeMap;

use physiq::judge::{
    build_pairs, mllm_score, parse_verdict, run_judge, stub_judge, RetryPolicy, STUB_NAMES,
};
use physiq::synthlab::{write_mini_benchmark, write_model_outputs};

fn main() -> physiq::Result<()> {
    let dir = tempfile::tempdir()?;
    let dataset = write_mini_benchmark(&dir.path().join("data"), 5)?;
    let generated_root = dir.path().join("model");
    write_model_outputs(&dataset, &generated_root, 40, 9)?;

    let mut real = BTreeMap::new();
    let mut generated = BTreeMap::new();
    for pair in dataset.pairs()? {
        let key = format!("{}/{}", pair.scenario_id, pair.perspective.as_str());
        real.insert(key.clone(), pair.take1.to_string_lossy().into_owned());
        let gen = generated_root
            .join(&pair.scenario_id)
            .join(pair.perspective.as_str());
        generated.insert(key, gen.to_string_lossy().into_owned());
    }
    let pairs = build_pairs(&real, &generated, 2024)?;

    println!(
        "{:?}",
        parse_verdict("Hmm. For this reason, the FIRST video is the generated one.")
    );
    for name in STUB_NAMES {
        let judge = stub_judge(name, 2024)?;
        let verdicts = run_judge(&pairs, judge.as_ref(), 4, &RetryPolicy::default())?;
        let score = mllm_score(&verdicts)?;
        println!(
            "{name:<15} accuracy {:>5.1}% over {} pairs",
            score.accuracy, score.total
        );
    }
    Ok(())
}
