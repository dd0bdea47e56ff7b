//! Benchmark datasets, physical-variance baselines, Physics-IQ scoring, rankings
//! and report emission.
//!
//! A dataset manifest (`dataset.json`) is a JSON array of [`ScenarioRecord`]s whose
//! paths are relative to the manifest's directory. Each record is one take of one
//! scenario seen from one perspective.

pub mod reference;
mod report;
mod score;
mod stats;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frameseq::{load_sequence, read_meta, split_at_switch, FrameSequence, SplitSpec};

pub use report::{
    load_report, load_report_csv, summary_table, write_report, write_summary, CsvRow, ReportFormat,
    SummaryRow, VARIANCE_ROW,
};
pub use score::{
    category_breakdown, compute_variance_baseline, evaluate_model, evaluate_with, normalize,
    physics_iq_score, BaselineEntry, CategoryRow, EvalReport, ReportEntry, ScoredPair,
    VarianceBaseline, EPSILON,
};
pub use stats::{average_ranks, mean_rank, mean_rank_reports, pearson, spearman};

/// Scenario count of the full benchmark.
pub const FULL_SCENARIOS: usize = 66;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    SolidMechanics,
    FluidDynamics,
    Optics,
    Thermodynamics,
    Magnetism,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::SolidMechanics,
        Category::FluidDynamics,
        Category::Optics,
        Category::Thermodynamics,
        Category::Magnetism,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::SolidMechanics => "solid_mechanics",
            Category::FluidDynamics => "fluid_dynamics",
            Category::Optics => "optics",
            Category::Thermodynamics => "thermodynamics",
            Category::Magnetism => "magnetism",
        }
    }

    /// Human-readable label, e.g. "solid mechanics".
    pub fn label(self) -> &'static str {
        match self {
            Category::SolidMechanics => "solid mechanics",
            Category::FluidDynamics => "fluid dynamics",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = Error;

    /// Accepts `solid_mechanics`, `solid mechanics`, `Solid-Mechanics` and so on.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .map(|c| {
                if c == ' ' || c == '-' {
                    '_'
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect();
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == key)
            .ok_or_else(|| Error::UnknownCategory(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perspective {
    Left,
    Center,
    Right,
}

impl Perspective {
    pub const ALL: [Perspective; 3] = [Perspective::Left, Perspective::Center, Perspective::Right];

    pub fn as_str(self) -> &'static str {
        match self {
            Perspective::Left => "left",
            Perspective::Center => "center",
            Perspective::Right => "right",
        }
    }
}

impl fmt::Display for Perspective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Perspective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidDataset(format!("unknown perspective {s:?}")))
    }
}

/// Recording number; serialized as the integer 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Take {
    One,
    Two,
}

impl Take {
    pub fn number(self) -> u8 {
        match self {
            Take::One => 1,
            Take::Two => 2,
        }
    }
}

impl TryFrom<u8> for Take {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Take::One),
            2 => Ok(Take::Two),
            _ => Err(Error::InvalidDataset(format!(
                "take must be 1 or 2, got {n}"
            ))),
        }
    }
}

impl From<Take> for u8 {
    fn from(t: Take) -> u8 {
        t.number()
    }
}

impl fmt::Display for Take {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    pub take: Take,
    pub switch_index: usize,
    /// Sequence location relative to the dataset root.
    pub path: PathBuf,
}

/// A (scenario, perspective) with both takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairKey {
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    pub switch_index: usize,
    pub take1: PathBuf,
    pub take2: PathBuf,
}

/// Counts reported by [`Dataset::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DatasetSummary {
    pub scenarios: usize,
    pub pairs: usize,
    pub records: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub root: PathBuf,
    pub records: Vec<ScenarioRecord>,
}

impl Dataset {
    pub fn new(root: PathBuf, records: Vec<ScenarioRecord>) -> Self {
        Self { root, records }
    }

    /// Reads a manifest; record paths resolve against its parent directory.
    pub fn load(manifest: &Path) -> Result<Self> {
        let text = fs::read_to_string(manifest)?;
        let records: Vec<ScenarioRecord> = serde_json::from_str(&text)?;
        let root = manifest.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self { root, records })
    }

    pub fn save(&self, manifest: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.records)?;
        text.push('\n');
        fs::write(manifest, text)?;
        Ok(())
    }

    pub fn resolve(&self, record: &ScenarioRecord) -> PathBuf {
        self.root.join(&record.path)
    }

    /// Groups records into take pairs, sorted by scenario then perspective.
    ///
    /// Fails on duplicate takes, a missing take, takes whose switch indices differ, or
    /// a scenario listed under two categories.
    pub fn pairs(&self) -> Result<Vec<PairKey>> {
        let mut categories: BTreeMap<&str, Category> = BTreeMap::new();
        let mut takes: BTreeMap<(&str, Perspective), [Option<&ScenarioRecord>; 2]> =
            BTreeMap::new();
        for r in &self.records {
            if let Some(&c) = categories.get(r.scenario_id.as_str()) {
                if c != r.category {
                    return Err(Error::InvalidDataset(format!(
                        "scenario {} listed as both {} and {}",
                        r.scenario_id, c, r.category
                    )));
                }
            }
            categories.insert(&r.scenario_id, r.category);
            let slot = &mut takes.entry((&r.scenario_id, r.perspective)).or_default()
                [r.take.number() as usize - 1];
            if slot.is_some() {
                return Err(Error::InvalidDataset(format!(
                    "duplicate take {} for {} ({})",
                    r.take, r.scenario_id, r.perspective
                )));
            }
            *slot = Some(r);
        }
        takes
            .into_iter()
            .map(|((id, perspective), pair)| {
                let missing = |take: u8| Error::MissingTake {
                    scenario_id: id.to_owned(),
                    perspective: perspective.to_string(),
                    take,
                };
                let one = pair[0].ok_or_else(|| missing(1))?;
                let two = pair[1].ok_or_else(|| missing(2))?;
                if one.switch_index != two.switch_index {
                    return Err(Error::SwitchMismatch(format!(
                        "{id} ({perspective}): {} vs {}",
                        one.switch_index, two.switch_index
                    )));
                }
                Ok(PairKey {
                    scenario_id: id.to_owned(),
                    category: one.category,
                    perspective,
                    switch_index: one.switch_index,
                    take1: self.resolve(one),
                    take2: self.resolve(two),
                })
            })
            .collect()
    }

    /// Checks structure and that every sequence is long enough for its split. Unless
    /// `partial`, also requires 66 scenarios with all three perspectives.
    pub fn validate(&self, partial: bool) -> Result<DatasetSummary> {
        if self.records.is_empty() {
            return Err(Error::InvalidDataset("no records".into()));
        }
        let pairs = self.pairs()?;
        let mut perspectives: BTreeMap<&str, BTreeSet<Perspective>> = BTreeMap::new();
        for p in &pairs {
            perspectives
                .entry(&p.scenario_id)
                .or_default()
                .insert(p.perspective);
        }
        if !partial {
            if perspectives.len() != FULL_SCENARIOS {
                return Err(Error::InvalidDataset(format!(
                    "expected {FULL_SCENARIOS} scenarios, found {}",
                    perspectives.len()
                )));
            }
            for (id, seen) in &perspectives {
                if let Some(p) = Perspective::ALL.iter().find(|p| !seen.contains(p)) {
                    return Err(Error::InvalidDataset(format!(
                        "scenario {id} lacks perspective {p}"
                    )));
                }
            }
        }
        for r in &self.records {
            let meta = read_meta(&self.resolve(r))?;
            let need = r.switch_index + 1 + SplitSpec::at(r.switch_index).test_len(meta.fps);
            if need > meta.num_frames {
                return Err(Error::TooShort(format!(
                    "{} ({}, take {}) has {} frames, split needs {need}",
                    r.scenario_id, r.perspective, r.take, meta.num_frames
                )));
            }
        }
        Ok(DatasetSummary {
            scenarios: perspectives.len(),
            pairs: pairs.len(),
            records: self.records.len(),
        })
    }
}

/// Loads a sequence and returns the test segment after `switch_index`.
pub fn load_test_segment(path: &Path, switch_index: usize) -> Result<FrameSequence> {
    let seq = load_sequence(path)?;
    let (_, test) = split_at_switch(&seq, &SplitSpec::at(switch_index))?;
    Ok(test)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(id: &str, p: Perspective, take: Take, switch: usize) -> ScenarioRecord {
        ScenarioRecord {
            scenario_id: id.into(),
            category: Category::Optics,
            perspective: p,
            take,
            switch_index: switch,
            path: format!("{id}/{p}/take{take}").into(),
        }
    }

    #[test]
    fn category_parsing() {
        assert_eq!(
            "solid mechanics".parse::<Category>().unwrap(),
            Category::SolidMechanics
        );
        assert_eq!(
            "Fluid-Dynamics".parse::<Category>().unwrap(),
            Category::FluidDynamics
        );
        assert_eq!("optics".parse::<Category>().unwrap(), Category::Optics);
        assert!(matches!(
            "acoustics".parse::<Category>(),
            Err(Error::UnknownCategory(_))
        ));
        assert!(serde_json::from_str::<Category>("\"acoustics\"").is_err());
    }

    #[test]
    fn take_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Take::Two).unwrap(), "2");
        assert_eq!(serde_json::from_str::<Take>("1").unwrap(), Take::One);
        assert!(serde_json::from_str::<Take>("3").is_err());
    }

    #[test]
    fn pairs_are_sorted_and_complete() {
        let ds = Dataset::new(
            "/data".into(),
            vec![
                record("b", Perspective::Left, Take::Two, 23),
                record("a", Perspective::Center, Take::One, 23),
                record("b", Perspective::Left, Take::One, 23),
                record("a", Perspective::Center, Take::Two, 23),
            ],
        );
        let pairs = ds.pairs().unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].scenario_id, "a");
        assert_eq!(pairs[1].take2, PathBuf::from("/data/b/left/take2"));
    }

    #[test]
    fn missing_take_is_reported() {
        let ds = Dataset::new(
            "".into(),
            vec![record("a", Perspective::Center, Take::One, 23)],
        );
        match ds.pairs() {
            Err(Error::MissingTake {
                scenario_id, take, ..
            }) => assert_eq!((scenario_id.as_str(), take), ("a", 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn switch_mismatch_is_reported() {
        let ds = Dataset::new(
            "".into(),
            vec![
                record("a", Perspective::Center, Take::One, 23),
                record("a", Perspective::Center, Take::Two, 24),
            ],
        );
        assert!(matches!(ds.pairs(), Err(Error::SwitchMismatch(_))));
    }

    #[test]
    fn duplicate_and_conflicting_records() {
        let r = record("a", Perspective::Center, Take::One, 23);
        let ds = Dataset::new("".into(), vec![r.clone(), r.clone()]);
        assert!(matches!(ds.pairs(), Err(Error::InvalidDataset(_))));
        let other = ScenarioRecord {
            category: Category::Magnetism,
            take: Take::Two,
            ..r.clone()
        };
        let ds = Dataset::new("".into(), vec![r, other]);
        assert!(matches!(ds.pairs(), Err(Error::InvalidDataset(_))));
    }

    #[test]
    fn full_rule_rejects_small_dataset() {
        let ds = Dataset::new(
            "".into(),
            vec![
                record("a", Perspective::Center, Take::One, 23),
                record("a", Perspective::Center, Take::Two, 23),
            ],
        );
        let err = ds.validate(false).unwrap_err();
        assert!(err.to_string().contains("66"), "{err}");
    }
}
