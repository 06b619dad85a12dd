//! Per-band SNR at each ear for a spatial condition.

use serde::{Deserialize, Serialize};

use crate::analysis::chain::Chain;
use crate::buffer::Ear;
use crate::dsp::spectrum::band_powers_for;
use crate::error::{Error, Result};
use crate::spatial::hrtf::HrtfSet;
use crate::spatial::scene::{render_scene, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub center: f64,
    pub low: f64,
    pub high: f64,
}

/// 1/3-octave bands with centres 125·2^(k/3) Hz, 125 Hz to 8 kHz.
pub fn third_octave_bands() -> Vec<Band> {
    (0..=18)
        .map(|k| {
            let center = 125.0 * 2f64.powf(k as f64 / 3.0);
            let half = 2f64.powf(1.0 / 6.0);
            Band {
                center,
                low: center / half,
                high: center * half,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSnrReport {
    pub centers: Vec<f64>,
    pub snr_left: Vec<f64>,
    pub snr_right: Vec<f64>,
    pub condition: String,
    pub processing: String,
}

impl BandSnrReport {
    pub fn ear(&self, ear: Ear) -> &[f64] {
        match ear {
            Ear::Left => &self.snr_left,
            Ear::Right => &self.snr_right,
        }
    }

    /// Mean SNR over the bands whose centre is below `below` Hz.
    pub fn mean_below(&self, ear: Ear, below: f64) -> f64 {
        let v: Vec<f64> = self
            .centers
            .iter()
            .zip(self.ear(ear))
            .filter(|(c, _)| **c < below)
            .map(|(_, s)| *s)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Renders speech and noise separately, runs both through the linear part
/// of `chain` (enhancement, no bimodal simulation) and subtracts band
/// powers. The vocoder is nonlinear and stochastic, so SNR is taken before
/// it.
pub fn band_snr(
    speech: &Scene,
    noise: &Scene,
    hrtfs: &HrtfSet,
    chain: &Chain,
    bands: &[Band],
) -> Result<BandSnrReport> {
    for scene in [speech, noise] {
        if scene.sources.is_empty() {
            return Err(Error::param(format!(
                "scene {:?} has no sources",
                scene.label
            )));
        }
    }
    if bands.is_empty() {
        return Err(Error::param("no analysis bands"));
    }
    let prepared = chain.prepare(hrtfs.sample_rate())?;
    let edges: Vec<(f64, f64)> = bands.iter().map(|b| (b.low, b.high)).collect();
    let s = prepared.front_end(&render_scene(speech, hrtfs)?)?;
    let n = prepared.front_end(&render_scene(noise, hrtfs)?)?;
    let snr = |ear: Ear| -> Result<Vec<f64>> {
        let ps = band_powers_for(s.ear(ear), &edges)?;
        let pn = band_powers_for(n.ear(ear), &edges)?;
        Ok(ps
            .iter()
            .zip(&pn)
            .map(|(a, b)| 10.0 * a.log10() - 10.0 * b.log10())
            .collect())
    };
    Ok(BandSnrReport {
        centers: bands.iter().map(|b| b.center).collect(),
        snr_left: snr(Ear::Left)?,
        snr_right: snr(Ear::Right)?,
        condition: noise.label.trim_end_matches("-noise").to_string(),
        processing: chain.label().to_string(),
    })
}
