//! Per-point medians, success rates and fitted scaling slopes.

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Metric, Param, SlopeCheck};
use crate::trial::TrialRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub n: usize,
    pub m: f64,
    pub d: f64,
    pub k: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub median_or_queries: f64,
    pub median_parity_queries: f64,
    pub median_copies: f64,
    pub median_charged_quantum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeResult {
    pub metric: Metric,
    pub param: Param,
    pub slope: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Summary {
    pub points: Vec<PointSummary>,
    pub slope: Option<SlopeResult>,
    pub min_success: Option<f64>,
    pub success_pass: bool,
}

impl Summary {
    /// Summarises `records`, which must be in grid-then-trial order.
    pub fn new(config: &ExperimentConfig, records: &[TrialRecord]) -> Self {
        if records.is_empty() {
            return Self {
                success_pass: true,
                slope: config.thresholds.slope.map(|s| SlopeResult {
                    metric: s.metric,
                    param: s.param,
                    slope: None,
                    min: s.min,
                    max: s.max,
                    pass: true,
                }),
                min_success: config.thresholds.min_success,
                points: Vec::new(),
            };
        }
        let groups: Vec<&[TrialRecord]> = records.chunks(config.trials.max(1)).collect();
        let points: Vec<PointSummary> = groups.iter().map(|g| point_summary(g)).collect();
        let min_success = config.thresholds.min_success;
        let success_pass = min_success.is_none_or(|t| points.iter().all(|p| p.success_rate >= t));
        let slope = config.thresholds.slope.map(|check| slope_result(check, &groups));
        Self {
            points,
            slope,
            min_success,
            success_pass,
        }
    }

    /// Whether every configured threshold holds.
    pub fn thresholds_met(&self) -> bool {
        self.success_pass && self.slope.as_ref().is_none_or(|s| s.pass)
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn column(records: &[TrialRecord], f: impl Fn(&TrialRecord) -> f64) -> f64 {
    median(&mut records.iter().map(f).collect::<Vec<_>>())
}

fn point_summary(records: &[TrialRecord]) -> PointSummary {
    let successes = records.iter().filter(|r| r.success).count();
    PointSummary {
        n: records[0].n,
        m: column(records, |r| r.m as f64),
        d: column(records, |r| r.d as f64),
        k: column(records, |r| r.k as f64),
        trials: records.len(),
        success_rate: successes as f64 / records.len() as f64,
        median_or_queries: column(records, |r| r.or_queries as f64),
        median_parity_queries: column(records, |r| r.parity_queries as f64),
        median_copies: column(records, |r| r.copies as f64),
        median_charged_quantum: column(records, |r| r.charged_quantum as f64),
    }
}

pub fn metric_value(metric: Metric, r: &TrialRecord) -> f64 {
    (match metric {
        Metric::OrQueries => r.or_queries,
        Metric::OrCost => r.or_queries + r.charged_quantum,
        Metric::ParityQueries => r.parity_queries,
        Metric::Copies => r.copies,
        Metric::ChargedQuantum => r.charged_quantum,
    }) as f64
}

pub fn param_value(param: Param, r: &TrialRecord) -> f64 {
    (match param {
        Param::N => r.n,
        Param::M => r.m,
        Param::D => r.d,
        Param::K => r.k,
    }) as f64
}

/// Slope of the mean metric against the median parameter, on log-log axes.
fn slope_result(check: SlopeCheck, groups: &[&[TrialRecord]]) -> SlopeResult {
    let pts: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| {
            let x = column(g, |r| param_value(check.param, r));
            let y = g.iter().map(|r| metric_value(check.metric, r)).sum::<f64>() / g.len() as f64;
            (x, y)
        })
        .collect();
    let slope = fit_slope(&pts);
    SlopeResult {
        metric: check.metric,
        param: check.param,
        slope,
        min: check.min,
        max: check.max,
        pass: slope.is_some_and(|s| s >= check.min && s <= check.max),
    }
}

/// Least-squares slope of `ln y` against `ln x`. Needs two distinct positive
/// `x` values; points with non-positive coordinates are skipped.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [4.0, 16.0, 64.0, 256.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.sqrt()))
            .collect();
        assert!((fit_slope(&pts).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(fit_slope(&[(2.0, 1.0)]), None);
        assert_eq!(fit_slope(&[(2.0, 1.0), (2.0, 5.0)]), None);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&mut []).is_nan());
    }
}
