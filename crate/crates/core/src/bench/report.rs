use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{mean_rank_reports, Category, EvalReport, Perspective};
use crate::error::{Error, Result};
use crate::metrics::MetricSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl ReportFormat {
    /// Picks CSV for a `.csv` extension and JSON otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ReportFormat::Csv,
            _ => ReportFormat::Json,
        }
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::InvalidParams(format!("unknown report format {s:?}"))),
        }
    }
}

/// One per-pair CSV row. Metric cells are empty when the generated video was missing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub model: String,
    pub scenario_id: String,
    pub category: Category,
    pub perspective: Perspective,
    pub spatial_iou: Option<f64>,
    pub spatiotemporal_iou: Option<f64>,
    pub weighted_spatial_iou: Option<f64>,
    pub mse: Option<f64>,
    pub normalized_mean: f64,
    pub physics_iq: f64,
}

fn csv_rows(report: &EvalReport) -> Vec<CsvRow> {
    report
        .entries
        .iter()
        .map(|e| CsvRow {
            model: report.model.clone(),
            scenario_id: e.scenario_id.clone(),
            category: e.category,
            perspective: e.perspective,
            spatial_iou: e.metrics.map(|m| m.spatial_iou),
            spatiotemporal_iou: e.metrics.map(|m| m.spatiotemporal_iou),
            weighted_spatial_iou: e.metrics.map(|m| m.weighted_spatial_iou),
            mse: e.metrics.map(|m| m.mse),
            normalized_mean: e.normalized_mean,
            physics_iq: e.physics_iq,
        })
        .collect()
}

fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes the full report as JSON, or its per-pair rows as CSV.
pub fn write_report(report: &EvalReport, format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(report, path),
        ReportFormat::Csv => write_csv(&csv_rows(report), path),
    }
}

pub fn load_report(path: &Path) -> Result<EvalReport> {
    EvalReport::load(path)
}

pub fn load_report_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()?;
    Ok(rows)
}

/// One line of the model comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub spatial_iou: f64,
    pub spatiotemporal_iou: f64,
    pub weighted_spatial_iou: f64,
    pub mse: f64,
    pub physics_iq: f64,
    pub mean_rank: Option<f64>,
    pub missing: usize,
}

impl SummaryRow {
    fn new(
        model: &str,
        m: MetricSet,
        physics_iq: f64,
        mean_rank: Option<f64>,
        missing: usize,
    ) -> Self {
        Self {
            model: model.to_owned(),
            spatial_iou: m.spatial_iou,
            spatiotemporal_iou: m.spatiotemporal_iou,
            weighted_spatial_iou: m.weighted_spatial_iou,
            mse: m.mse,
            physics_iq,
            mean_rank,
            missing,
        }
    }
}

pub const VARIANCE_ROW: &str = "Physical Variance";

/// A "Physical Variance" row (mean per-pair baseline of the first report, score 100)
/// followed by one row per model in input order. Mean ranks are filled in when there
/// are at least two models.
pub fn summary_table(reports: &[EvalReport]) -> Result<Vec<SummaryRow>> {
    let first = reports.first().ok_or(Error::EmptyReport)?;
    let variance =
        MetricSet::mean(first.entries.iter().map(|e| &e.baseline)).ok_or(Error::EmptyReport)?;
    let ranks = if reports.len() >= 2 {
        mean_rank_reports(reports)?.into_iter().map(Some).collect()
    } else {
        vec![None; reports.len()]
    };
    let mut rows = vec![SummaryRow::new(VARIANCE_ROW, variance, 100.0, None, 0)];
    for (report, rank) in reports.iter().zip(ranks) {
        let means = report.mean_metrics().unwrap_or_else(MetricSet::zeros);
        rows.push(SummaryRow::new(
            &report.model,
            means,
            report.physics_iq,
            rank,
            report.missing,
        ));
    }
    Ok(rows)
}

pub fn write_summary(rows: &[SummaryRow], format: ReportFormat, path: &Path) -> Result<()> {
    match format {
        ReportFormat::Json => write_json(rows, path),
        ReportFormat::Csv => write_csv(rows, path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{BaselineEntry, ScoredPair, VarianceBaseline};
    use crate::metrics::StMode;
    use crate::motionmask::MaskParams;

    fn report(model: &str, s: f64, missing_b: bool) -> EvalReport {
        let base = MetricSet {
            spatial_iou: 0.6,
            spatiotemporal_iou: 0.5,
            weighted_spatial_iou: 0.4,
            mse: 0.002,
        };
        let entries = ["a", "b"]
            .iter()
            .map(|id| BaselineEntry {
                scenario_id: id.to_string(),
                category: Category::Optics,
                perspective: Perspective::Center,
                metrics: Some(base),
            })
            .collect();
        let baseline =
            VarianceBaseline::from_entries(MaskParams::default(), StMode::Volume, entries).unwrap();
        let m = MetricSet {
            spatial_iou: s,
            spatiotemporal_iou: 0.1 / 3.0,
            weighted_spatial_iou: 0.2,
            mse: 0.004,
        };
        let scored = vec![
            ScoredPair {
                scenario_id: "a".into(),
                category: Category::Optics,
                perspective: Perspective::Center,
                metrics: Some(m),
            },
            ScoredPair {
                scenario_id: "b".into(),
                category: Category::Magnetism,
                perspective: Perspective::Center,
                metrics: (!missing_b).then_some(m),
            },
        ];
        EvalReport::build(model, scored, &baseline).unwrap()
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let dir = tempfile::tempdir().unwrap();
        let r = report("m", 0.3, true);
        let (p1, p2) = (dir.path().join("a.json"), dir.path().join("b.json"));
        write_report(&r, ReportFormat::Json, &p1).unwrap();
        write_report(&r, ReportFormat::Json, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
        assert_eq!(load_report(&p1).unwrap(), r);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let r = report("m", 0.3, true);
        let path = dir.path().join("r.csv");
        write_report(&r, ReportFormat::Csv, &path).unwrap();
        let header = fs::read_to_string(&path)
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_owned();
        assert_eq!(
            header,
            "model,scenario_id,category,perspective,spatial_iou,spatiotemporal_iou,weighted_spatial_iou,mse,normalized_mean,physics_iq"
        );
        let rows = load_report_csv(&path).unwrap();
        assert_eq!(rows, csv_rows(&r));
        assert_eq!(rows[1].mse, None);
        assert!((rows[0].spatiotemporal_iou.unwrap() - 0.1 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn summary_has_variance_row_first() {
        let rows = summary_table(&[report("good", 0.5, false), report("bad", 0.2, false)]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].model, VARIANCE_ROW);
        assert_eq!(rows[0].physics_iq, 100.0);
        assert_eq!(rows[0].spatial_iou, 0.6);
        assert_eq!(rows[1].mean_rank, Some(1.375));
        assert_eq!(rows[2].mean_rank, Some(1.625));
    }

    #[test]
    fn summary_rejects_inconsistent_coverage() {
        let err =
            summary_table(&[report("full", 0.5, false), report("partial", 0.2, true)]).unwrap_err();
        assert!(matches!(err, Error::CoverageMismatch(_)));
    }

    #[test]
    fn format_from_path() {
        assert_eq!(
            ReportFormat::from_path(Path::new("x.CSV")),
            ReportFormat::Csv
        );
        assert_eq!(
            ReportFormat::from_path(Path::new("x.json")),
            ReportFormat::Json
        );
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
