use std::collections::BTreeMap;

use proptest::prelude::*;

use physiq::bench::{
    average_ranks, mean_rank, normalize, pearson, spearman, BaselineEntry, Category, EvalReport,
    Perspective, ScoredPair, VarianceBaseline,
};
use physiq::frameseq::{resample_fps, Frame, FrameSequence};
use physiq::judge::{build_pairs, mllm_score, run_judge, Judge, Position, RetryPolicy};
use physiq::metrics::{
    mse, spatial_iou, spatiotemporal_iou, weighted_spatial_iou, MetricName, MetricSet, StMode,
};
use physiq::motionmask::{collapse_spatial, collapse_weighted, MaskParams, MaskVideo};
use physiq::synthlab::{oracle_mask_metrics, oracle_mse};

fn mask_pair() -> impl Strategy<Value = (MaskVideo, MaskVideo)> {
    (1u32..=12, 1u32..=12, 1usize..=8).prop_flat_map(|(w, h, n)| {
        let len = (w * h) as usize * n;
        let bits = || prop::collection::vec(prop::bool::weighted(0.3), len);
        (bits(), bits()).prop_map(move |(a, b)| {
            let to_u8 = |v: Vec<bool>| v.into_iter().map(u8::from).collect();
            (
                MaskVideo::new(w, h, n, to_u8(a)).unwrap(),
                MaskVideo::new(w, h, n, to_u8(b)).unwrap(),
            )
        })
    })
}

fn sequence_pair() -> impl Strategy<Value = (FrameSequence, FrameSequence)> {
    (1u32..=8, 1u32..=8, 1usize..=4).prop_flat_map(|(w, h, n)| {
        let len = (w * h) as usize * 3 * n;
        let bytes = || prop::collection::vec(any::<u8>(), len);
        (bytes(), bytes()).prop_map(move |(a, b)| (sequence(w, h, n, a), sequence(w, h, n, b)))
    })
}

fn sequence(w: u32, h: u32, n: usize, data: Vec<u8>) -> FrameSequence {
    let frame_len = (w * h) as usize * 3;
    let frames: Vec<Frame> = data
        .chunks(frame_len)
        .map(|c| Frame::new(w, h, c.to_vec()).unwrap())
        .collect();
    assert_eq!(frames.len(), n);
    FrameSequence::new(frames, 8.0).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12
}

proptest! {
    #[test]
    fn iou_metrics_symmetric_and_bounded((a, b) in mask_pair()) {
        let (sa, sb) = (collapse_spatial(&a), collapse_spatial(&b));
        let (wa, wb) = (collapse_weighted(&a), collapse_weighted(&b));
        let values = [
            (spatial_iou(&sa, &sb).unwrap().value, spatial_iou(&sb, &sa).unwrap().value),
            (weighted_spatial_iou(&wa, &wb).unwrap().value, weighted_spatial_iou(&wb, &wa).unwrap().value),
            (
                spatiotemporal_iou(&a, &b, StMode::Volume).unwrap().value,
                spatiotemporal_iou(&b, &a, StMode::Volume).unwrap().value,
            ),
            (
                spatiotemporal_iou(&a, &b, StMode::FrameMean).unwrap().value,
                spatiotemporal_iou(&b, &a, StMode::FrameMean).unwrap().value,
            ),
        ];
        for (ab, ba) in values {
            prop_assert_eq!(ab, ba);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
        prop_assert_eq!(spatial_iou(&sa, &sa).unwrap().value, 1.0);
        prop_assert_eq!(spatiotemporal_iou(&a, &a, StMode::Volume).unwrap().value, 1.0);
    }

    #[test]
    fn metrics_match_oracle((a, b) in mask_pair()) {
        for mode in [StMode::Volume, StMode::FrameMean] {
            let oracle = oracle_mask_metrics(&a, &b, mode).unwrap();
            let st = spatiotemporal_iou(&a, &b, mode).unwrap().value;
            prop_assert!(close(st, oracle.spatiotemporal_iou), "{st} vs {}", oracle.spatiotemporal_iou);
        }
        let oracle = oracle_mask_metrics(&a, &b, StMode::Volume).unwrap();
        let s = spatial_iou(&collapse_spatial(&a), &collapse_spatial(&b)).unwrap().value;
        let w = weighted_spatial_iou(&collapse_weighted(&a), &collapse_weighted(&b)).unwrap().value;
        prop_assert!(close(s, oracle.spatial_iou));
        prop_assert!(close(w, oracle.weighted_spatial_iou));
    }

    #[test]
    fn mse_matches_oracle_and_is_symmetric((a, b) in sequence_pair()) {
        let fast = mse(&a, &b).unwrap().value;
        prop_assert!(close(fast, oracle_mse(&a, &b).unwrap()));
        prop_assert_eq!(fast, mse(&b, &a).unwrap().value);
        prop_assert!((0.0..=1.0).contains(&fast));
        prop_assert_eq!(mse(&a, &a).unwrap().value, 0.0);
    }

    #[test]
    fn weighted_map_below_spatial_map((a, _) in mask_pair()) {
        let (s, w) = (collapse_spatial(&a), collapse_weighted(&a));
        for (sv, wv) in s.values().iter().zip(w.values()) {
            prop_assert!(wv <= sv);
            prop_assert_eq!(*wv > 0.0, *sv > 0.0);
        }
    }

    #[test]
    fn collapse_is_monotone((a, b) in mask_pair()) {
        // a | b dominates a, so both collapsed maps can only grow
        let merged: Vec<u8> = a.data().iter().zip(b.data()).map(|(x, y)| x | y).collect();
        let merged = MaskVideo::new(a.width(), a.height(), a.frame_count(), merged).unwrap();
        for (lo, hi) in [(collapse_spatial(&a), collapse_spatial(&merged)), (collapse_weighted(&a), collapse_weighted(&merged))] {
            for (l, h) in lo.values().iter().zip(hi.values()) {
                prop_assert!(l <= h);
            }
        }
    }

    #[test]
    fn resample_keeps_endpoints(n in 2usize..40, fps in 4.0f64..60.0, target in 2.0f64..30.0, seed in any::<u8>()) {
        let frames: Vec<Frame> =
            (0..n).map(|i| Frame::filled(4, 3, [seed.wrapping_add((i as u8).wrapping_mul(7)), i as u8, 255 - i as u8]).unwrap()).collect();
        let seq = FrameSequence::new(frames, fps).unwrap();
        let out = resample_fps(&seq, target, None).unwrap();
        let expected = ((n as f64 / fps) * target).round_ties_even().max(1.0) as usize;
        prop_assert_eq!(out.len(), expected);
        prop_assert_eq!(out.fps(), target);
        prop_assert_eq!(out.frames()[0].data(), seq.frames()[0].data());
        if out.len() > 1 {
            prop_assert_eq!(out.frames()[out.len() - 1].data(), seq.frames()[n - 1].data());
        }
    }

    #[test]
    fn normalized_scores_bounded(v in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        for metric in MetricName::ALL {
            let s = normalize(metric, v, b);
            prop_assert!((0.0..=1.0).contains(&s), "{metric:?} {v} {b} -> {s}");
        }
    }

    #[test]
    fn normalized_scores_monotone(v1 in 0.0f64..=1.0, v2 in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        for metric in [MetricName::SpatialIou, MetricName::SpatiotemporalIou, MetricName::WeightedSpatialIou] {
            prop_assert!(normalize(metric, lo, b) <= normalize(metric, hi, b));
        }
        prop_assert!(normalize(MetricName::Mse, lo, b) >= normalize(MetricName::Mse, hi, b));
    }

    #[test]
    fn ranks_invariant_under_monotone_maps(values in prop::collection::vec(-50i32..50, 1..12)) {
        let raw: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let mapped: Vec<f64> = raw.iter().map(|v| (v / 10.0).exp() * 3.0 + 1.0).collect();
        let ranks = average_ranks(&raw);
        prop_assert_eq!(&ranks, &average_ranks(&mapped));
        let n = raw.len() as f64;
        prop_assert!(close(ranks.iter().sum::<f64>(), n * (n + 1.0) / 2.0));
    }

    #[test]
    fn mean_rank_ignores_metric_scale(models in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..0.1), 2..7)) {
        let sets: Vec<MetricSet> = models
            .iter()
            .map(|&(s, st, w, m)| MetricSet { spatial_iou: s, spatiotemporal_iou: st, weighted_spatial_iou: w, mse: m })
            .collect();
        let scaled: Vec<MetricSet> = sets.iter().map(|m| MetricSet::from_fn(|k| m.get(k).sqrt())).collect();
        prop_assert_eq!(mean_rank(&sets).unwrap(), mean_rank(&scaled).unwrap());
    }

    #[test]
    fn category_scores_recombine(
        pairs in prop::collection::vec((0usize..5, 0.0f64..1.0, 0.0f64..0.05, any::<bool>()), 1..20)
    ) {
        let cats = [Category::SolidMechanics, Category::FluidDynamics, Category::Optics, Category::Magnetism, Category::Thermodynamics];
        let base = MetricSet { spatial_iou: 0.6, spatiotemporal_iou: 0.5, weighted_spatial_iou: 0.4, mse: 0.01 };
        let entries = (0..pairs.len())
            .map(|i| BaselineEntry { scenario_id: format!("s{i}"), category: cats[pairs[i].0], perspective: Perspective::Center, metrics: Some(base) })
            .collect();
        let baseline = VarianceBaseline::from_entries(MaskParams::default(), StMode::Volume, entries).unwrap();
        let scored = pairs
            .iter()
            .enumerate()
            .map(|(i, &(c, iou, err, present))| ScoredPair {
                scenario_id: format!("s{i}"),
                category: cats[c],
                perspective: Perspective::Center,
                metrics: present.then_some(MetricSet { spatial_iou: iou, spatiotemporal_iou: iou / 2.0, weighted_spatial_iou: iou / 3.0, mse: err }),
            })
            .collect();
        let report = EvalReport::build("m", scored, &baseline).unwrap();
        prop_assert!((0.0..=100.0).contains(&report.physics_iq));

        let mut weighted = 0.0;
        let mut count = 0;
        for row in &report.categories {
            let members: Vec<_> = report.entries.iter().filter(|e| e.category == row.category).collect();
            prop_assert_eq!(row.entries, members.len());
            prop_assert_eq!(row.present, !members.is_empty());
            if let Some(score) = row.physics_iq {
                let direct = 100.0 * members.iter().map(|e| e.normalized_mean).sum::<f64>() / members.len() as f64;
                prop_assert!((score - direct).abs() < 1e-9);
                weighted += score * row.entries as f64;
                count += row.entries;
            }
        }
        prop_assert_eq!(count, report.entries.len());
        prop_assert!((weighted / count as f64 - report.physics_iq).abs() < 1e-9);
    }
}

fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

// Textbook forms on distinct values: centred cross-products for Pearson and
// 1 - 6 sum(d^2) / (n (n^2 - 1)) for Spearman.
fn pearson_naive(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn spearman_naive(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let rank = |v: &[f64], i: usize| 1.0 + v.iter().filter(|&&o| o < v[i]).count() as f64;
    let d2: f64 = (0..x.len())
        .map(|i| (rank(x, i) - rank(y, i)).powi(2))
        .sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn correlations_match_textbook_over_all_orderings_of_five() {
    let x = [0.3, 1.7, 2.2, 4.0, 9.5];
    let base = [10.0, 20.0, 25.0, 31.0, 40.0];
    let mut seen = 0;
    for y in permutations(&base) {
        let p = pearson(&x, &y).unwrap();
        let s = spearman(&x, &y).unwrap();
        assert!((p - pearson_naive(&x, &y)).abs() < 1e-12, "pearson {y:?}");
        assert!((s - spearman_naive(&x, &y)).abs() < 1e-12, "spearman {y:?}");
        assert!((-1.0..=1.0).contains(&p) && (-1.0..=1.0).contains(&s));
        seen += 1;
    }
    assert_eq!(seen, 120);
}

/// Names the video whose reference mentions "gen", wherever it was shown.
struct ContentJudge;

impl Judge for ContentJudge {
    fn name(&self) -> String {
        "content".into()
    }

    fn ask(&self, _prompt: &str, first: &str, _second: &str) -> physiq::Result<String> {
        let pick = if first.contains("gen") {
            "first"
        } else {
            "second"
        };
        Ok(format!(
            "Looks synthetic. For this reason, the {pick} video is the generated one."
        ))
    }
}

fn refs(n: usize) -> (BTreeMap<String, String>, BTreeMap<String, String>) {
    let real = (0..n)
        .map(|i| (format!("k{i:03}"), format!("real/{i}")))
        .collect();
    let generated = (0..n)
        .map(|i| (format!("k{i:03}"), format!("gen/{i}")))
        .collect();
    (real, generated)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn order_invariant_judge_scores_the_same_for_every_seed(seed in any::<u64>()) {
        let (real, generated) = refs(40);
        let pairs = build_pairs(&real, &generated, seed).unwrap();
        let verdicts = run_judge(&pairs, &ContentJudge, 4, &RetryPolicy::default()).unwrap();
        prop_assert_eq!(mllm_score(&verdicts).unwrap().accuracy, 100.0);
        for (pair, verdict) in pairs.iter().zip(&verdicts) {
            let (gen_ref, real_ref) = match pair.generated_position {
                Position::First => (&pair.first, &pair.second),
                Position::Second => (&pair.second, &pair.first),
            };
            prop_assert_eq!(gen_ref, &generated[&pair.scenario_id]);
            prop_assert_eq!(real_ref, &real[&pair.scenario_id]);
            prop_assert_eq!(verdict.chosen_position, Some(pair.generated_position));
        }
    }

    #[test]
    fn presentation_order_is_balanced(seed in any::<u64>()) {
        let (real, generated) = refs(400);
        let pairs = build_pairs(&real, &generated, seed).unwrap();
        let first = pairs.iter().filter(|p| p.generated_position == Position::First).count();
        // 400 fair flips land in [150, 250] with probability above 1 - 1e-6
        prop_assert!((150..=250).contains(&first), "{first} of 400");
        prop_assert_eq!(build_pairs(&real, &generated, seed).unwrap(), pairs);
    }
}
