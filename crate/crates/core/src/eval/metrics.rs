//! Confusion-count metrics with binomial confidence intervals.
//!
//! Reports carry one row per class plus a support-weighted overall row,
//! the convention used for cumulative-fold cohort results. Positive
//! class is DM (label 1). Confidence half-widths use the normal
//! binomial approximation; per-class rows use the class support and the
//! overall row the total evaluated count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub true_pos: u64,
    pub false_pos: u64,
    pub true_neg: u64,
    pub false_neg: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }

    pub fn from_predictions(labels: &[u8], predictions: &[u8]) -> Result<ConfusionCounts> {
        if labels.len() != predictions.len() {
            return Err(Error::Shape(format!(
                "{} labels but {} predictions",
                labels.len(),
                predictions.len()
            )));
        }
        let mut c = ConfusionCounts::default();
        for (&y, &p) in labels.iter().zip(predictions.iter()) {
            match (y, p) {
                (1, 1) => c.true_pos += 1,
                (0, 1) => c.false_pos += 1,
                (0, 0) => c.true_neg += 1,
                (1, 0) => c.false_neg += 1,
                _ => return Err(Error::Validation("labels must be binary".into())),
            }
        }
        Ok(c)
    }

    pub fn merge(&mut self, other: &ConfusionCounts) {
        self.true_pos += other.true_pos;
        self.false_pos += other.false_pos;
        self.true_neg += other.true_neg;
        self.false_neg += other.false_neg;
    }

    fn swapped(&self) -> ConfusionCounts {
        ConfusionCounts {
            true_pos: self.true_neg,
            false_pos: self.false_neg,
            true_neg: self.true_pos,
            false_neg: self.false_pos,
        }
    }
}

/// A metric value with its 95% CI half-width; `degenerate` marks a
/// zero-denominator fallback to 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub ci: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub accuracy: MetricValue,
    pub precision: MetricValue,
    pub sensitivity: MetricValue,
    pub specificity: MetricValue,
    pub f1: MetricValue,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub counts: ConfusionCounts,
    pub evaluated: u64,
    /// DM row (label 1 treated as positive).
    pub positive: ClassMetrics,
    /// CG row (label 0 treated as positive).
    pub negative: ClassMetrics,
    /// Support-weighted average of the class rows.
    pub overall: ClassMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
    /// Wall-clock measurement; excluded from serialized reports so
    /// primary outputs stay byte-stable (timings go to sidecars).
    #[serde(skip)]
    pub inference_ms: Option<f64>,
}

/// 95% binomial half-width `1.96 * sqrt(p (1 - p) / n)`.
pub fn confidence_interval(p: f64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

fn class_metrics(c: &ConfusionCounts, ci_n: u64) -> ClassMetrics {
    let total = c.total();
    let (accuracy, acc_deg) = ratio(c.true_pos + c.true_neg, total);
    let (precision, prec_deg) = ratio(c.true_pos, c.true_pos + c.false_pos);
    let (sensitivity, sens_deg) = ratio(c.true_pos, c.true_pos + c.false_neg);
    let (specificity, spec_deg) = ratio(c.true_neg, c.true_neg + c.false_pos);
    let (f1, f1_deg) = if precision + sensitivity > 0.0 {
        (2.0 * precision * sensitivity / (precision + sensitivity), false)
    } else {
        (0.0, true)
    };
    let value = |v: f64, deg: bool| MetricValue {
        value: v,
        ci: confidence_interval(v, ci_n),
        degenerate: deg,
    };
    ClassMetrics {
        accuracy: value(accuracy, acc_deg),
        precision: value(precision, prec_deg),
        sensitivity: value(sensitivity, sens_deg),
        specificity: value(specificity, spec_deg),
        f1: value(f1, f1_deg),
    }
}

fn weighted(a: &ClassMetrics, b: &ClassMetrics, wa: f64, wb: f64, n: u64) -> ClassMetrics {
    let avg = |x: MetricValue, y: MetricValue| {
        let v = (wa * x.value + wb * y.value) / (wa + wb);
        MetricValue {
            value: v,
            ci: confidence_interval(v, n),
            degenerate: x.degenerate || y.degenerate,
        }
    };
    ClassMetrics {
        accuracy: avg(a.accuracy, b.accuracy),
        precision: avg(a.precision, b.precision),
        sensitivity: avg(a.sensitivity, b.sensitivity),
        specificity: avg(a.specificity, b.specificity),
        f1: avg(a.f1, b.f1),
    }
}

/// Evaluates the metric set from pooled confusion counts.
pub fn compute_metrics(counts: &ConfusionCounts) -> Result<MetricsReport> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::InsufficientData("no evaluated samples".into()));
    }
    let n_pos = counts.true_pos + counts.false_neg;
    let n_neg = counts.true_neg + counts.false_pos;
    let positive = class_metrics(counts, n_pos);
    let negative = class_metrics(&counts.swapped(), n_neg);
    let overall = weighted(&positive, &negative, n_pos as f64, n_neg as f64, total);
    Ok(MetricsReport {
        counts: *counts,
        evaluated: total,
        positive,
        negative,
        overall,
        auc: None,
        inference_ms: None,
    })
}

/// Median wall-clock milliseconds per sample of a scoring closure,
/// warm-up excluded.
pub fn time_per_sample_ms<F: FnMut()>(samples: usize, repetitions: usize, mut run: F) -> f64 {
    run(); // warm-up
    let mut timings: Vec<f64> = (0..repetitions.max(1))
        .map(|_| {
            let start = std::time::Instant::now();
            run();
            start.elapsed().as_secs_f64() * 1e3 / samples.max(1) as f64
        })
        .collect();
    timings.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = timings.len();
    if n % 2 == 1 {
        timings[n / 2]
    } else {
        (timings[n / 2 - 1] + timings[n / 2]) / 2.0
    }
}
