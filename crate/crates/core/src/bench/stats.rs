use std::collections::BTreeSet;

use super::{EvalReport, Perspective};
use crate::error::{Error, Result};
use crate::metrics::{Direction, MetricName, MetricSet};

/// 1-based ranks in ascending order; tied values share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold equal values; ranks i+1..=j average to (i + j + 1) / 2
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn check_lengths(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::Statistics(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::Statistics(format!(
            "need at least 3 observations, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Statistics("zero variance".into()));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Rank correlation: Pearson over average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_lengths(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Mean over the four metrics of each model's rank (1 = best, MSE ranked ascending).
pub fn mean_rank(models: &[MetricSet]) -> Result<Vec<f64>> {
    if models.len() < 2 {
        return Err(Error::Statistics(format!(
            "ranking needs at least 2 models, got {}",
            models.len()
        )));
    }
    let mut total = vec![0.0; models.len()];
    for metric in MetricName::ALL {
        let keyed: Vec<f64> = models
            .iter()
            .map(|m| match metric.direction() {
                Direction::HigherBetter => -m.get(metric),
                Direction::LowerBetter => m.get(metric),
            })
            .collect();
        for (t, r) in total.iter_mut().zip(average_ranks(&keyed)) {
            *t += r;
        }
    }
    Ok(total
        .into_iter()
        .map(|t| t / MetricName::ALL.len() as f64)
        .collect())
}

fn coverage(report: &EvalReport) -> BTreeSet<(&str, Perspective)> {
    report
        .entries
        .iter()
        .filter(|e| e.metrics.is_some())
        .map(|e| (e.scenario_id.as_str(), e.perspective))
        .collect()
}

/// [`mean_rank`] over each report's mean raw metrics. All reports must cover the same pairs.
pub fn mean_rank_reports(reports: &[EvalReport]) -> Result<Vec<f64>> {
    let Some(first) = reports.first() else {
        return Err(Error::Statistics("no reports".into()));
    };
    let reference = coverage(first);
    for r in &reports[1..] {
        let other = coverage(r);
        if other != reference {
            let gap = reference
                .symmetric_difference(&other)
                .next()
                .expect("sets differ");
            return Err(Error::CoverageMismatch(format!(
                "{} and {} differ at {} ({})",
                first.model, r.model, gap.0, gap.1
            )));
        }
    }
    let means = reports
        .iter()
        .map(|r| r.mean_metrics().ok_or(Error::EmptyReport))
        .collect::<Result<Vec<_>>>()?;
    mean_rank(&means)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_with_ties() {
        assert_eq!(average_ranks(&[10.0, 30.0, 20.0]), vec![1.0, 3.0, 2.0]);
        assert_eq!(
            average_ranks(&[5.0, 5.0, 1.0, 5.0]),
            vec![3.0, 3.0, 1.0, 3.0]
        );
    }

    #[test]
    fn pearson_cases() {
        // deviations (-1.5, -0.5, 0.5, 1.5) and (-0.5, -1.5, 1.5, 0.5): 3 / sqrt(5 * 5)
        assert_eq!(
            pearson(&[0.0, 1.0, 2.0, 3.0], &[1.0, 0.0, 3.0, 2.0]).unwrap(),
            0.6
        );
        let x = [1.0, 4.0, 2.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        assert!((pearson(&x, &y).unwrap() - 1.0).abs() < 1e-12);
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn spearman_cases() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        let x = [0.3, 1.5, -2.0, 9.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| v.exp()).collect();
        assert_eq!(spearman(&x, &y).unwrap(), 1.0);
    }

    fn set(s: f64, st: f64, w: f64, mse: f64) -> MetricSet {
        MetricSet {
            spatial_iou: s,
            spatiotemporal_iou: st,
            weighted_spatial_iou: w,
            mse,
        }
    }

    #[test]
    fn dominant_model_ranks_first() {
        let r = mean_rank(&[set(0.2, 0.2, 0.2, 0.02), set(0.5, 0.5, 0.5, 0.01)]).unwrap();
        assert_eq!(r, vec![2.0, 1.0]);
    }

    #[test]
    fn tie_shares_rank() {
        let r = mean_rank(&[
            set(0.5, 0.3, 0.3, 0.01),
            set(0.5, 0.2, 0.2, 0.02),
            set(0.1, 0.1, 0.1, 0.03),
        ])
        .unwrap();
        // spatial: 1.5, 1.5, 3; other metrics: 1, 2, 3
        assert_eq!(r, vec![(1.5 + 3.0) / 4.0, (1.5 + 6.0) / 4.0, 3.0]);
    }

    #[test]
    fn ranking_needs_two_models() {
        assert!(mean_rank(&[set(0.1, 0.1, 0.1, 0.1)]).is_err());
    }
}
