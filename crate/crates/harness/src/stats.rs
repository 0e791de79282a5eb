//! Aggregation across trials: means and 0.95 confidence intervals.

/// 0.975 quantiles of the Student-t distribution for 1..=29 degrees of
/// freedom; the normal quantile 1.96 takes over at 30 and beyond.
const T_975: [f64; 29] = [
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160,
    2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056,
    2.052, 2.048, 2.045,
];

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator); NaN below two samples.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let mu = mean(values);
    let ss: f64 = values.iter().map(|v| (v - mu) * (v - mu)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Half-width of the 0.95 confidence interval for the mean: Student-t
/// quantile below 30 trials, normal quantile 1.96 from 30 up, NaN sentinel
/// for a single trial.
pub fn ci_half_width_95(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let quantile = if n >= 30 { 1.96 } else { T_975[n - 2] };
    quantile * sample_std(values) / (n as f64).sqrt()
}

/// Per-checkpoint mean error and confidence band for one method.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub label: String,
    pub checkpoints: Vec<u64>,
    pub mean: Vec<f64>,
    pub ci_half: Vec<f64>,
    pub trials: usize,
}

impl AggregateCurve {
    pub fn ci_low(&self, i: usize) -> f64 {
        self.mean[i] - self.ci_half[i]
    }

    pub fn ci_high(&self, i: usize) -> f64 {
        self.mean[i] + self.ci_half[i]
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("curves are non-empty")
    }
}

/// Aggregates per-trial error rows (all trials share one checkpoint grid).
pub fn aggregate_curve(
    label: &str,
    checkpoints: &[u64],
    per_trial_errors: &[Vec<f64>],
) -> AggregateCurve {
    assert!(!per_trial_errors.is_empty(), "no trials to aggregate");
    for errs in per_trial_errors {
        assert_eq!(errs.len(), checkpoints.len(), "misaligned trial rows");
    }
    let trials = per_trial_errors.len();
    let mut means = Vec::with_capacity(checkpoints.len());
    let mut halves = Vec::with_capacity(checkpoints.len());
    let mut column = vec![0.0; trials];
    for i in 0..checkpoints.len() {
        for (t, errs) in per_trial_errors.iter().enumerate() {
            column[t] = errs[i];
        }
        means.push(mean(&column));
        halves.push(ci_half_width_95(&column));
    }
    AggregateCurve {
        label: label.to_string(),
        checkpoints: checkpoints.to_vec(),
        mean: means,
        ci_half: halves,
        trials,
    }
}
