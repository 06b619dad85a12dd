//! Localization with an ideal observer that listens only to broadband ILD.

use rand_distr::{Distribution, Normal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::chain::{Chain, Processing};
use crate::analysis::ild::{broadband_ild, ild_curve, IldCurve};
use crate::analysis::metrics::{localization_metrics, LocalizationMetrics};
use crate::buffer::SampleBuffer;
use crate::dsp::signals::rng;
use crate::error::{Error, Result};
use crate::experiments::observer::ideal_observer_localize;
use crate::spatial::hrtf::HrtfSet;
use crate::spatial::scene::{render_scene, Scene, Source};

/// −90..=90 in 15° steps.
pub fn frontal_grid() -> Vec<i32> {
    (-6..=6).map(|k| 15 * k).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalizationConfig {
    pub angles: Vec<i32>,
    pub trials_per_angle: usize,
    /// Overall level is drawn uniformly from ±`rove_db`.
    pub rove_db: f64,
    /// Standard deviation of the observer's internal ILD noise, dB.
    pub ild_noise_sigma: f64,
    pub processing: Processing,
    pub seed: u64,
}

impl Default for LocalizationConfig {
    fn default() -> Self {
        Self {
            angles: frontal_grid(),
            trials_per_angle: 9,
            rove_db: 10.0,
            ild_noise_sigma: 1.0,
            processing: Processing::Natural,
            seed: 1,
        }
    }
}

impl LocalizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.angles != frontal_grid() {
            return Err(Error::Config(
                "localization angles must be -90..=90 in 15 degree steps".into(),
            ));
        }
        if self.trials_per_angle == 0 {
            return Err(Error::Config("trials_per_angle must be at least 1".into()));
        }
        if !(self.rove_db >= 0.0 && self.rove_db.is_finite()) {
            return Err(Error::Config(
                "rove_db must be a finite non-negative range".into(),
            ));
        }
        if !(self.ild_noise_sigma >= 0.0 && self.ild_noise_sigma.is_finite()) {
            return Err(Error::Config(
                "ild_noise_sigma must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalizationTrial {
    pub target: i32,
    pub trial: usize,
    pub rove_db: f64,
    /// ILD measured at the ears after the chain.
    pub ild: f64,
    /// ILD including the observer's internal noise.
    pub perceived_ild: f64,
    pub response: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub template: IldCurve,
    pub trials: Vec<LocalizationTrial>,
    pub metrics: LocalizationMetrics,
}

/// Runs every trial: render the roved stimulus at the target, process,
/// measure ILD, add observer noise and pick the nearest template angle. The
/// template is built from the same chain without rove. Each trial draws from
/// its own RNG stream so results do not depend on scheduling.
pub fn run_localization_experiment(
    cfg: &LocalizationConfig,
    hrtfs: &HrtfSet,
    chain: &Chain,
    stimulus: &SampleBuffer,
) -> Result<LocalizationResult> {
    cfg.validate()?;
    let chain = chain
        .with_processing(cfg.processing)
        .with_vocoder_seed(cfg.seed);
    let template = ild_curve(stimulus, hrtfs, &chain, &cfg.angles)?;
    let prepared = chain.prepare(hrtfs.sample_rate())?;
    let noise = Normal::new(0.0, cfg.ild_noise_sigma).map_err(|e| Error::Config(e.to_string()))?;
    let rove = Uniform::new_inclusive(-cfg.rove_db, cfg.rove_db)
        .map_err(|e| Error::Config(e.to_string()))?;

    let jobs: Vec<(usize, i32, usize)> = cfg
        .angles
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| (0..cfg.trials_per_angle).map(move |t| (i, a, t)))
        .collect();
    let trials = jobs
        .par_iter()
        .map(|&(i, target, trial)| {
            let mut r = rng(cfg.seed);
            r.set_stream((i * cfg.trials_per_angle + trial) as u64 + 1);
            let rove_db = rove.sample(&mut r);
            let scene = Scene::new(
                "trial",
                vec![Source::new(target, stimulus.clone(), rove_db)],
            );
            let ild = broadband_ild(&prepared.process(&render_scene(&scene, hrtfs)?)?)?;
            let perceived_ild = ild + noise.sample(&mut r);
            Ok(LocalizationTrial {
                target,
                trial,
                rove_db,
                ild,
                perceived_ild,
                response: ideal_observer_localize(&template, perceived_ild),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = trials
        .iter()
        .map(|t| (t.target as f64, t.response as f64))
        .collect();
    let metrics = localization_metrics(&pairs)?;
    Ok(LocalizationResult {
        template,
        trials,
        metrics,
    })
}
