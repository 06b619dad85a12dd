//! Reduction of per-band SNRs to one effective SNR per ear.

use serde::{Deserialize, Serialize};

use crate::analysis::snr::BandSnrReport;
use crate::buffer::Ear;
use crate::error::{Error, Result};
use crate::spatial::scene::CiSide;

/// Highest band centre audible through the hearing-aid ear.
pub const HA_MAX_CENTER: f64 = 500.0;

/// Band-importance weights rising with frequency and saturating from 2 kHz:
/// w ∝ min(1 + log2(fc/125), 5), normalised to sum 1.
pub fn default_weights(centers: &[f64]) -> Vec<f64> {
    let raw: Vec<f64> = centers
        .iter()
        .map(|&fc| (1.0 + (fc / 125.0).log2()).clamp(1.0, 5.0))
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.iter().map(|w| w / sum).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveSnr {
    pub left: f64,
    pub right: f64,
    pub better_ear: f64,
}

impl EffectiveSnr {
    pub fn ear(&self, ear: Ear) -> f64 {
        match ear {
            Ear::Left => self.left,
            Ear::Right => self.right,
        }
    }
}

/// Weighted mean band SNR per ear over the bands that ear can use (the
/// hearing-aid ear only hears bands centred at or below 500 Hz; weights are
/// renormalised over them). The better ear is the larger of the two.
pub fn effective_snr(
    report: &BandSnrReport,
    weights: &[f64],
    ci_side: CiSide,
) -> Result<EffectiveSnr> {
    let n = report.centers.len();
    if weights.len() != n || report.snr_left.len() != n || report.snr_right.len() != n {
        return Err(Error::param(format!(
            "{} weights for {} bands",
            weights.len(),
            n
        )));
    }
    if n == 0 {
        return Err(Error::param("no bands"));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-6 || weights.iter().any(|w| *w < 0.0) {
        return Err(Error::param(format!(
            "weights must be non-negative and sum to 1, got {total}"
        )));
    }
    let mean = |ear: Ear| -> Result<f64> {
        let ha = ear == ci_side.ha_ear();
        let (mut acc, mut wsum) = (0.0, 0.0);
        for ((&fc, &snr), &w) in report.centers.iter().zip(report.ear(ear)).zip(weights) {
            if ha && fc > HA_MAX_CENTER * (1.0 + 1e-9) {
                continue;
            }
            acc += w * snr;
            wsum += w;
        }
        if wsum <= 0.0 {
            return Err(Error::param(format!(
                "no weighted bands audible to the {ear} ear"
            )));
        }
        Ok(acc / wsum)
    };
    let left = mean(Ear::Left)?;
    let right = mean(Ear::Right)?;
    Ok(EffectiveSnr {
        left,
        right,
        better_ear: left.max(right),
    })
}
