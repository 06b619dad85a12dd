//! Speech reception thresholds from a simulated listener.
//!
//! Each condition is reduced to a better-ear offset: the effective SNR
//! (weighted band SNR at the ears, after enhancement) when speech and noise
//! are presented at equal level. The listener hears presented SNR plus that
//! offset, and the adaptive track reports presented SNR.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::chain::{Chain, Processing};
use crate::analysis::snr::{band_snr, third_octave_bands, BandSnrReport};
use crate::beamformer::BeamformerParams;
use crate::dsp::level::db_to_gain;
use crate::dsp::signals::{rng, speech_shaped_noise};
use crate::error::{Error, Result};
use crate::experiments::adaptive::{AdaptiveTrack, TrackResult};
use crate::experiments::effective::{default_weights, effective_snr, EffectiveSnr};
use crate::experiments::listener::{sentence_score, SimulatedListener};
use crate::spatial::hrtf::HrtfSet;
use crate::spatial::scene::{CiSide, Condition, Scene};

/// One adaptive track against a listener whose effective SNR is the
/// presented SNR plus `offset_db`.
pub fn run_adaptive_srt<R: Rng + ?Sized>(
    track: &AdaptiveTrack,
    listener: &SimulatedListener,
    offset_db: f64,
    rng: &mut R,
) -> Result<TrackResult> {
    listener.validate()?;
    track.run(|snr| sentence_score(listener, snr + offset_db, rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SrtConfig {
    pub conditions: Vec<Condition>,
    pub runs: usize,
    pub listener: SimulatedListener,
    pub track: AdaptiveTrack,
    pub ci_side: CiSide,
    pub beamformer: BeamformerParams,
    /// Length of the speech and noise used to measure band SNRs.
    pub signal_seconds: f64,
    pub seed: u64,
}

impl Default for SrtConfig {
    fn default() -> Self {
        Self {
            conditions: Condition::ALL.to_vec(),
            runs: 200,
            listener: SimulatedListener::default(),
            track: AdaptiveTrack::default(),
            ci_side: CiSide::Left,
            beamformer: BeamformerParams::default(),
            signal_seconds: 2.0,
            seed: 1,
        }
    }
}

impl SrtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.conditions.is_empty() {
            return Err(Error::Config("no conditions".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if !(self.signal_seconds > 0.0) {
            return Err(Error::Config("signal_seconds must be positive".into()));
        }
        self.listener.validate()?;
        self.track.validate()?;
        self.beamformer.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSnr {
    pub condition: Condition,
    pub processing: Processing,
    pub bands: BandSnrReport,
    pub effective: EffectiveSnr,
}

/// Speech-only and noise-only scenes of a condition, each `len` samples at
/// the presentation level. Speech uses `seed`, noise `seed + 1000`.
pub fn condition_scenes(
    condition: Condition,
    ci_side: CiSide,
    sample_rate: u32,
    len: usize,
    seed: u64,
) -> Result<(Scene, Scene)> {
    let rms = db_to_gain(crate::PRESENTATION_LEVEL_DBFS);
    let speech = Scene::frontal_speech(speech_shaped_noise(sample_rate, len, rms, seed)?);
    let noise = Scene::condition_noise(
        condition,
        ci_side,
        None,
        sample_rate,
        len,
        seed.wrapping_add(1000),
    )?;
    Ok((speech, noise))
}

/// Band SNRs and effective SNR of one condition at 0 dB presented SNR.
pub fn condition_snr(
    condition: Condition,
    processing: Processing,
    cfg: &SrtConfig,
    hrtfs: &HrtfSet,
) -> Result<ConditionSnr> {
    let fs = hrtfs.sample_rate();
    let len = (cfg.signal_seconds * fs as f64).round() as usize;
    let (speech, noise) = condition_scenes(condition, cfg.ci_side, fs, len, cfg.seed)?;
    let chain = Chain {
        beamformer: cfg.beamformer,
        ..Chain::natural()
    }
    .with_processing(processing);
    let bands = band_snr(&speech, &noise, hrtfs, &chain, &third_octave_bands())?;
    let effective = effective_snr(&bands, &default_weights(&bands.centers), cfg.ci_side)?;
    Ok(ConditionSnr {
        condition,
        processing,
        bands,
        effective,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrtRun {
    pub run: usize,
    pub condition: Condition,
    pub processing: Processing,
    pub srt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SrtSummary {
    pub condition: Condition,
    pub natural_srt: f64,
    pub enhanced_srt: f64,
    /// Natural minus enhanced SRT; positive means enhancement helps.
    pub improvement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrtResult {
    pub snr: Vec<ConditionSnr>,
    pub runs: Vec<SrtRun>,
    pub summary: Vec<SrtSummary>,
}

impl SrtResult {
    pub fn summary_for(&self, condition: Condition) -> Option<&SrtSummary> {
        self.summary.iter().find(|s| s.condition == condition)
    }
}

/// Measures every condition with and without enhancement, then runs
/// `cfg.runs` adaptive tracks per cell. Run `k` of a condition uses the same
/// RNG stream for both processings.
pub fn run_srt_experiment(cfg: &SrtConfig, hrtfs: &HrtfSet) -> Result<SrtResult> {
    cfg.validate()?;
    let cells: Vec<(usize, Condition, Processing)> = cfg
        .conditions
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| Processing::BOTH.into_iter().map(move |p| (i, c, p)))
        .collect();
    let snr = cells
        .par_iter()
        .map(|&(_, c, p)| condition_snr(c, p, cfg, hrtfs))
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|cell| (0..cfg.runs).map(move |run| (cell, run)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(cell, run)| {
            let (ci, condition, processing) = cells[cell];
            let mut r = rng(cfg.seed);
            r.set_stream((ci * cfg.runs + run) as u64 + 1);
            let offset = snr[cell].effective.better_ear;
            let track = run_adaptive_srt(&cfg.track, &cfg.listener, offset, &mut r)?;
            Ok(SrtRun {
                run,
                condition,
                processing,
                srt: track.srt,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mean = |c: Condition, p: Processing| -> f64 {
        let v: Vec<f64> = runs
            .iter()
            .filter(|r| r.condition == c && r.processing == p)
            .map(|r| r.srt)
            .collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let summary = cfg
        .conditions
        .iter()
        .map(|&c| {
            let natural_srt = mean(c, Processing::Natural);
            let enhanced_srt = mean(c, Processing::Enhanced);
            SrtSummary {
                condition: c,
                natural_srt,
                enhanced_srt,
                improvement: natural_srt - enhanced_srt,
            }
        })
        .collect();
    Ok(SrtResult { snr, runs, summary })
}
