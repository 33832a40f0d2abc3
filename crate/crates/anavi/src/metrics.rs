//! Evaluation: epsilon-thresholded accuracy curves and distance/label
//! distribution dumps.
//!
//! An epsilon-accuracy curve reports, for each threshold, the fraction of
//! predictions within that threshold of the truth: `(1/N) sum 1(|y - y_hat|
//! <= eps)`. The boundary is inclusive. The default grid runs from 1/128
//! (about one decibel, the just-noticeable difference) to 16/128.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Sample;
use crate::predictor::{PredictorError, PredictorModel};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("y_true has {true_len} entries, y_pred has {pred_len}")]
    LengthMismatch { true_len: usize, pred_len: usize },
    #[error("empty input")]
    Empty,
    #[error("epsilon grid needs at least 2 points")]
    DegenerateGrid,
    #[error(transparent)]
    Predictor(#[from] PredictorError),
}

/// Accuracy as a function of the error threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsCurve {
    pub epsilons: Vec<f64>,
    pub accuracies: Vec<f64>,
    pub n: usize,
}

/// The default threshold grid: k/128 for k = 1..=16.
pub fn default_epsilons() -> Vec<f64> {
    (1..=16).map(|k| k as f64 / 128.0).collect()
}

/// Fraction of `|y_true - y_pred| <= eps` per threshold (inclusive).
pub fn eps_accuracy(
    y_true: &[f64],
    y_pred: &[f64],
    epsilons: &[f64],
) -> Result<EpsCurve, MetricsError> {
    if y_true.is_empty() {
        return Err(MetricsError::Empty);
    }
    if y_true.len() != y_pred.len() {
        return Err(MetricsError::LengthMismatch {
            true_len: y_true.len(),
            pred_len: y_pred.len(),
        });
    }
    let mut epsilons = epsilons.to_vec();
    epsilons.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = y_true.len();
    let accuracies = epsilons
        .iter()
        .map(|&eps| {
            let hits = y_true
                .iter()
                .zip(y_pred)
                .filter(|(t, p)| (*t - *p).abs() <= eps)
                .count();
            hits as f64 / n as f64
        })
        .collect();
    Ok(EpsCurve { epsilons, accuracies, n })
}

impl EpsCurve {
    /// Accuracy at the grid point closest to `eps`.
    pub fn accuracy_at(&self, eps: f64) -> f64 {
        let mut best = 0usize;
        for (i, e) in self.epsilons.iter().enumerate() {
            if (e - eps).abs() < (self.epsilons[best] - eps).abs() {
                best = i;
            }
        }
        self.accuracies[best]
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("epsilon,accuracy\n");
        for (e, a) in self.epsilons.iter().zip(&self.accuracies) {
            out.push_str(&format!("{e},{a}\n"));
        }
        out
    }
}

/// Trapezoidal area under the curve, normalized by the epsilon range so a
/// perfect curve scores 1.
pub fn curve_auc(curve: &EpsCurve) -> Result<f64, MetricsError> {
    if curve.epsilons.len() < 2 {
        return Err(MetricsError::DegenerateGrid);
    }
    let span = curve.epsilons.last().unwrap() - curve.epsilons.first().unwrap();
    if span <= 0.0 {
        return Err(MetricsError::DegenerateGrid);
    }
    let mut area = 0.0;
    for i in 1..curve.epsilons.len() {
        let de = curve.epsilons[i] - curve.epsilons[i - 1];
        area += 0.5 * (curve.accuracies[i] + curve.accuracies[i - 1]) * de;
    }
    Ok(area / span)
}

/// One evaluated sample in a distribution dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub r: f64,
    pub y_true: f64,
    pub y_pred: f64,
    pub map_id: String,
}

/// Evaluate `model` over `samples` and collect `(r, y_true, y_pred, map_id)`
/// rows in dataset order.
pub fn dump_distribution(
    samples: &[Sample],
    model: &PredictorModel,
) -> Result<Vec<DistributionRow>, MetricsError> {
    let preds = model.predict_samples(samples)?;
    Ok(samples
        .iter()
        .zip(preds)
        .map(|(s, y_pred)| DistributionRow {
            r: s.r,
            y_true: s.y,
            y_pred,
            map_id: s.map_id.clone(),
        })
        .collect())
}

pub fn distribution_to_csv(rows: &[DistributionRow]) -> String {
    let mut out = String::from("r,y_true,y_pred,map_id\n");
    for row in rows {
        out.push_str(&format!("{},{},{},{}\n", row.r, row.y_true, row.y_pred, row.map_id));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions_score_one_everywhere() {
        let y = vec![0.1, 0.5, 0.9];
        let curve = eps_accuracy(&y, &y, &default_epsilons()).unwrap();
        assert!(curve.accuracies.iter().all(|&a| a == 1.0));
        assert_eq!(curve_auc(&curve).unwrap(), 1.0);
    }

    #[test]
    fn constant_error_steps_between_thresholds() {
        let y_true = vec![0.5; 4];
        let y_pred = vec![0.51; 4];
        let curve = eps_accuracy(&y_true, &y_pred, &default_epsilons()).unwrap();
        assert_eq!(curve.accuracies[0], 0.0); // 1/128 ~ 0.0078 < 0.01
        assert_eq!(curve.accuracies[1], 1.0); // 2/128 ~ 0.0156 >= 0.01
    }

    #[test]
    fn boundary_is_inclusive() {
        let eps = 1.0 / 128.0;
        let y_true = vec![0.5, 0.5, 0.5];
        let y_pred = vec![0.5, 0.51, 0.6];
        let curve = eps_accuracy(&y_true, &y_pred, &[eps]).unwrap();
        assert!((curve.accuracies[0] - 1.0 / 3.0).abs() < 1e-12);
        // An error of exactly eps counts.
        let curve = eps_accuracy(&[0.5], &[0.5 + eps], &[eps]).unwrap();
        assert_eq!(curve.accuracies[0], 1.0);
    }

    #[test]
    fn errors_on_bad_input() {
        assert!(matches!(
            eps_accuracy(&[], &[], &default_epsilons()),
            Err(MetricsError::Empty)
        ));
        assert!(matches!(
            eps_accuracy(&[0.1], &[0.1, 0.2], &default_epsilons()),
            Err(MetricsError::LengthMismatch { .. })
        ));
        let single = EpsCurve { epsilons: vec![0.1], accuracies: vec![1.0], n: 1 };
        assert!(matches!(curve_auc(&single), Err(MetricsError::DegenerateGrid)));
    }

    #[test]
    fn step_curve_auc_is_half() {
        // 0 on the lower half of the grid, 1 on the upper half.
        let epsilons = default_epsilons();
        let accuracies: Vec<f64> =
            (0..16).map(|i| if i < 8 { 0.0 } else { 1.0 }).collect();
        let curve = EpsCurve { epsilons, accuracies, n: 10 };
        let auc = curve_auc(&curve).unwrap();
        assert!((auc - 0.5).abs() < 0.07, "auc {auc}");
    }

    #[test]
    fn all_zero_curve_scores_zero() {
        let curve = EpsCurve {
            epsilons: default_epsilons(),
            accuracies: vec![0.0; 16],
            n: 3,
        };
        assert_eq!(curve_auc(&curve).unwrap(), 0.0);
    }

    proptest::proptest! {
        /// Accuracy is non-decreasing in epsilon for arbitrary inputs.
        #[test]
        fn monotone_in_epsilon(
            seed in 0u64..1000,
            n in 1usize..40,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let y_true: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let y_pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let curve = eps_accuracy(&y_true, &y_pred, &default_epsilons()).unwrap();
            for pair in curve.accuracies.windows(2) {
                proptest::prop_assert!(pair[0] <= pair[1]);
            }
            // At eps >= 1 every normalized pair is within threshold.
            let wide = eps_accuracy(&y_true, &y_pred, &[0.5, 1.0]).unwrap();
            proptest::prop_assert_eq!(*wide.accuracies.last().unwrap(), 1.0);
        }
    }
}
