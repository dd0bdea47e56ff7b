use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{load_test_segment, Category, Dataset, PairKey, Perspective};
use crate::error::{Error, Result};
use crate::frameseq::{load_sequence, FrameSequence};
use crate::metrics::{evaluate_pair, Direction, MetricName, MetricSet, StMode};
use crate::motionmask::MaskParams;

/// Floor applied to baselines and model MSE before dividing.
pub const EPSILON: f64 = 1e-6;

/// Score of one metric relative to its physical-variance value, clipped to [0, 1].
///
/// IoU metrics score `v / base`; MSE scores `base / v`, so matching or beating the
/// variance between two real takes earns the full point.
pub fn normalize(metric: MetricName, value: f64, baseline: f64) -> f64 {
    let base = baseline.max(EPSILON);
    let n = match metric.direction() {
        Direction::HigherBetter => value / base,
        Direction::LowerBetter => base / value.max(EPSILON),
    };
    n.clamp(0.0, 1.0)
}

fn normalize_set(values: &MetricSet, baseline: &MetricSet) -> MetricSet {
    MetricSet::from_fn(|m| normalize(m, values.get(m), baseline.get(m)))
}

fn mean_of(set: &MetricSet) -> f64 {
    MetricName::ALL.iter().map(|&m| set.get(m)).sum::<f64>() / MetricName::ALL.len() as f64
}

/// Take-1 vs take-2 metrics for one (scenario, perspective). `metrics` is `None`
/// when the pair is known but could not be measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    pub metrics: Option<MetricSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceBaseline {
    pub mask_params: MaskParams,
    pub mode: StMode,
    pub entries: Vec<BaselineEntry>,
    /// Mean over all measured entries.
    pub aggregate: MetricSet,
}

impl VarianceBaseline {
    pub fn from_entries(
        mask_params: MaskParams,
        mode: StMode,
        entries: Vec<BaselineEntry>,
    ) -> Result<Self> {
        let aggregate = MetricSet::mean(entries.iter().filter_map(|e| e.metrics.as_ref()))
            .ok_or_else(|| {
                Error::InvalidDataset("variance baseline has no measured pairs".into())
            })?;
        Ok(Self {
            mask_params,
            mode,
            entries,
            aggregate,
        })
    }

    /// Per-pair baseline, or the aggregate (flagged `true`) when the pair is absent or unmeasured.
    pub fn lookup(&self, scenario_id: &str, perspective: Perspective) -> (MetricSet, bool) {
        self.entries
            .iter()
            .find(|e| e.scenario_id == scenario_id && e.perspective == perspective)
            .and_then(|e| e.metrics)
            .map_or((self.aggregate, true), |m| (m, false))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Evaluates take 2 against take 1 on every pair's test segment.
pub fn compute_variance_baseline(
    dataset: &Dataset,
    params: &MaskParams,
    mode: StMode,
) -> Result<VarianceBaseline> {
    params.validate()?;
    let entries = dataset
        .pairs()?
        .par_iter()
        .map(|pair| {
            let one = load_test_segment(&pair.take1, pair.switch_index)?;
            let two = load_test_segment(&pair.take2, pair.switch_index)?;
            Ok(BaselineEntry {
                scenario_id: pair.scenario_id.clone(),
                category: pair.category,
                perspective: pair.perspective,
                metrics: Some(evaluate_pair(&one, &two, params, mode)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    VarianceBaseline::from_entries(*params, mode, entries)
}

/// Raw metrics of one model on one pair; `None` if the model produced no video.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    pub metrics: Option<MetricSet>,
}

/// Scores generated continuations supplied by `generate`, which receives the pair and
/// its real take-1 test segment and may return `None` for a missing video. Pairs run
/// in parallel; the output keeps the dataset's pair order.
pub fn evaluate_with<F>(
    dataset: &Dataset,
    params: &MaskParams,
    mode: StMode,
    generate: F,
) -> Result<Vec<ScoredPair>>
where
    F: Fn(&PairKey, &FrameSequence) -> Result<Option<FrameSequence>> + Sync,
{
    params.validate()?;
    dataset
        .pairs()?
        .par_iter()
        .map(|pair| {
            let real = load_test_segment(&pair.take1, pair.switch_index)?;
            let metrics = match generate(pair, &real)? {
                Some(generated) => Some(evaluate_pair(&real, &generated, params, mode)?),
                None => None,
            };
            Ok(ScoredPair {
                scenario_id: pair.scenario_id.clone(),
                category: pair.category,
                perspective: pair.perspective,
                metrics,
            })
        })
        .collect()
}

/// Scores continuations stored as `<generated_root>/<scenario_id>/<perspective>/`.
pub fn evaluate_model(
    dataset: &Dataset,
    generated_root: &Path,
    params: &MaskParams,
    mode: StMode,
) -> Result<Vec<ScoredPair>> {
    evaluate_with(dataset, params, mode, |pair, _| {
        let dir = generated_root
            .join(&pair.scenario_id)
            .join(pair.perspective.as_str());
        if dir.exists() {
            load_sequence(&dir).map(Some)
        } else {
            Ok(None)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    /// Raw metrics; `None` when the generated video was missing.
    pub metrics: Option<MetricSet>,
    pub missing: bool,
    pub baseline: MetricSet,
    /// Set when the aggregate baseline stood in for a missing per-pair one.
    pub baseline_fallback: bool,
    pub normalized: MetricSet,
    pub normalized_mean: f64,
    pub physics_iq: f64,
}

/// Per-category means. Categories without entries have `present == false` and no values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryRow {
    pub category: Category,
    pub present: bool,
    pub entries: usize,
    pub metrics: Option<MetricSet>,
    pub normalized: Option<MetricSet>,
    pub baseline: Option<MetricSet>,
    pub physics_iq: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub mask_params: MaskParams,
    pub mode: StMode,
    pub physics_iq: f64,
    pub missing: usize,
    pub entries: Vec<ReportEntry>,
    pub categories: Vec<CategoryRow>,
}

impl EvalReport {
    /// Normalizes every pair against the baseline and aggregates. Missing videos score 0.
    pub fn build(
        model: &str,
        scored: Vec<ScoredPair>,
        baseline: &VarianceBaseline,
    ) -> Result<Self> {
        if scored.is_empty() {
            return Err(Error::EmptyReport);
        }
        let entries: Vec<ReportEntry> = scored
            .into_iter()
            .map(|s| {
                let (base, fallback) = baseline.lookup(&s.scenario_id, s.perspective);
                let normalized = s
                    .metrics
                    .map_or_else(MetricSet::zeros, |m| normalize_set(&m, &base));
                let normalized_mean = mean_of(&normalized);
                ReportEntry {
                    scenario_id: s.scenario_id,
                    category: s.category,
                    perspective: s.perspective,
                    missing: s.metrics.is_none(),
                    metrics: s.metrics,
                    baseline: base,
                    baseline_fallback: fallback,
                    normalized,
                    normalized_mean,
                    physics_iq: 100.0 * normalized_mean,
                }
            })
            .collect();
        let physics_iq =
            100.0 * entries.iter().map(|e| e.normalized_mean).sum::<f64>() / entries.len() as f64;
        let categories = category_breakdown(&entries);
        Ok(Self {
            model: model.to_owned(),
            mask_params: baseline.mask_params,
            mode: baseline.mode,
            physics_iq,
            missing: entries.iter().filter(|e| e.missing).count(),
            entries,
            categories,
        })
    }

    /// Mean raw metrics over the pairs the model produced.
    pub fn mean_metrics(&self) -> Option<MetricSet> {
        MetricSet::mean(self.entries.iter().filter_map(|e| e.metrics.as_ref()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }
}

/// Physics-IQ score in [0, 100] of raw per-pair metrics against a baseline.
pub fn physics_iq_score(scored: &[ScoredPair], baseline: &VarianceBaseline) -> Result<f64> {
    Ok(EvalReport::build("", scored.to_vec(), baseline)?.physics_iq)
}

/// One row per category in fixed order.
pub fn category_breakdown(entries: &[ReportEntry]) -> Vec<CategoryRow> {
    Category::ALL
        .into_iter()
        .map(|category| {
            let rows: Vec<&ReportEntry> =
                entries.iter().filter(|e| e.category == category).collect();
            if rows.is_empty() {
                return CategoryRow {
                    category,
                    present: false,
                    entries: 0,
                    metrics: None,
                    normalized: None,
                    baseline: None,
                    physics_iq: None,
                };
            }
            let n = rows.len() as f64;
            CategoryRow {
                category,
                present: true,
                entries: rows.len(),
                metrics: MetricSet::mean(rows.iter().filter_map(|e| e.metrics.as_ref())),
                normalized: MetricSet::mean(rows.iter().map(|e| &e.normalized)),
                baseline: MetricSet::mean(rows.iter().map(|e| &e.baseline)),
                physics_iq: Some(100.0 * rows.iter().map(|e| e.normalized_mean).sum::<f64>() / n),
            }
        })
        .collect()
}
