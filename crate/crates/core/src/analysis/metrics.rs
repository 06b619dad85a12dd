//! Localization error metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleMetrics {
    pub target: f64,
    pub n: usize,
    pub mean_response: f64,
    /// |mean response − target|.
    pub bias: f64,
    /// Sample standard deviation of the responses; `None` for one trial.
    pub std: Option<f64>,
    /// Root mean squared response error.
    pub rms_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationMetrics {
    pub per_angle: Vec<AngleMetrics>,
    /// Mean of the per-angle RMS errors.
    pub mean_rms: f64,
}

/// Groups `(target, response)` pairs by target, sorted by target.
pub fn localization_metrics(trials: &[(f64, f64)]) -> Result<LocalizationMetrics> {
    if trials.is_empty() {
        return Err(Error::param("no localization trials"));
    }
    if trials.iter().any(|(t, r)| !t.is_finite() || !r.is_finite()) {
        return Err(Error::data("non-finite target or response"));
    }
    let mut sorted = trials.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let per_angle: Vec<AngleMetrics> = sorted
        .chunk_by(|a, b| a.0 == b.0)
        .map(|group| {
            let target = group[0].0;
            let n = group.len();
            let nf = n as f64;
            let mean = group.iter().map(|t| t.1).sum::<f64>() / nf;
            let std = (n > 1).then(|| {
                (group.iter().map(|t| (t.1 - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt()
            });
            let rms = (group.iter().map(|t| (t.1 - t.0).powi(2)).sum::<f64>() / nf).sqrt();
            AngleMetrics {
                target,
                n,
                mean_response: mean,
                bias: (mean - target).abs(),
                std,
                rms_error: rms,
            }
        })
        .collect();
    let mean_rms = per_angle.iter().map(|a| a.rms_error).sum::<f64>() / per_angle.len() as f64;
    Ok(LocalizationMetrics {
        per_angle,
        mean_rms,
    })
}
