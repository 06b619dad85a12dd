//! Render pipeline config: spatialize, then optionally enhance, then
//! optionally simulate bimodal listening.
//!
//! ```json
//! {
//!   "sample_rate": 44100,
//!   "seed": 1,
//!   "hrtf": "hrtfs/",
//!   "output": "scene.wav",
//!   "stages": [
//!     { "stage": "spatialize", "sources": [
//!         { "azimuth": 0, "input": "speech.wav" },
//!         { "azimuth": -90, "noise": "speech", "seconds": 2.0, "level_db": -5 } ] },
//!     { "stage": "enhance", "crossover": 1500 },
//!     { "stage": "bimodal", "ci_side": "left", "vocoder": { "n_channels": 8 } }
//!   ]
//! }
//! ```
//!
//! Relative paths are taken from the config file's directory.

use std::path::{Path, PathBuf};

use headshadow::analysis::BimodalStage;
use headshadow::buffer::DEFAULT_SAMPLE_RATE;
use headshadow::dsp::level::db_to_gain;
use headshadow::dsp::signals::{speech_shaped_noise, white_noise};
use headshadow::io::wav;
use headshadow::spatial::{load_hrtf_set, render_scene};
use headshadow::{
    head_shadow_enhance, simulate_bimodal, BeamformerParams, BinauralBuffer, Error, HrtfSet,
    Result, Scene, Source, PRESENTATION_LEVEL_DBFS,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub azimuth: i32,
    /// Mono WAV file. Exactly one of `input` and `noise` must be set.
    pub input: Option<PathBuf>,
    /// Generated noise: `speech` (speech-shaped) or `white`.
    pub noise: Option<String>,
    #[serde(default = "default_seconds")]
    pub seconds: f64,
    #[serde(default)]
    pub level_db: f64,
}

fn default_seconds() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "lowercase")]
pub enum Stage {
    Spatialize { sources: Vec<SourceSpec> },
    Enhance(BeamformerParams),
    Bimodal(BimodalStage),
}

impl Stage {
    fn rank(&self) -> usize {
        match self {
            Stage::Spatialize { .. } => 0,
            Stage::Enhance(_) => 1,
            Stage::Bimodal(_) => 2,
        }
    }

    fn name(&self) -> &'static str {
        ["spatialize", "enhance", "bimodal"][self.rank()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_rate")]
    pub sample_rate: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// HRTF directory; the synthetic set when absent.
    pub hrtf: Option<PathBuf>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub stages: Vec<Stage>,
}

fn default_rate() -> u32 {
    DEFAULT_SAMPLE_RATE
}

fn default_seed() -> u64 {
    1
}

fn default_output() -> PathBuf {
    "render.wav".into()
}

impl PipelineConfig {
    /// Resolves relative paths against `base`.
    pub fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(h) = &mut self.hrtf {
            fix(h);
        }
        for stage in &mut self.stages {
            if let Stage::Spatialize { sources } = stage {
                for s in sources {
                    if let Some(p) = &mut s.input {
                        fix(p);
                    }
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Some(Stage::Spatialize { sources }) = self.stages.first() else {
            return Err(Error::Config("the first stage must be spatialize".into()));
        };
        if sources.is_empty() {
            return Err(Error::Config("spatialize stage has no sources".into()));
        }
        for w in self.stages.windows(2) {
            if w[1].rank() <= w[0].rank() {
                return Err(Error::Config(format!(
                    "stage {} cannot follow {}; order is spatialize, enhance, bimodal",
                    w[1].name(),
                    w[0].name()
                )));
            }
        }
        for (i, s) in sources.iter().enumerate() {
            match (&s.input, s.noise.as_deref()) {
                (Some(p), None) if !p.is_file() => {
                    return Err(Error::Config(format!(
                        "source {i}: {} does not exist",
                        p.display()
                    )))
                }
                (Some(_), None) | (None, Some("speech" | "white")) => {}
                (None, Some(other)) => {
                    return Err(Error::Config(format!(
                        "source {i}: unknown noise {other:?}; use \"speech\" or \"white\""
                    )))
                }
                _ => {
                    return Err(Error::Config(format!(
                        "source {i}: set exactly one of input and noise"
                    )))
                }
            }
            if s.input.is_none() && !(s.seconds > 0.0 && s.seconds.is_finite()) {
                return Err(Error::Config(format!(
                    "source {i}: seconds must be positive"
                )));
            }
        }
        if let Some(h) = &self.hrtf {
            if !h.is_dir() {
                return Err(Error::Config(format!(
                    "HRTF directory {} does not exist",
                    h.display()
                )));
            }
        }
        Ok(())
    }

    pub fn hrtfs(&self) -> Result<HrtfSet> {
        match &self.hrtf {
            Some(dir) => load_hrtf_set(dir),
            None => HrtfSet::synthetic(self.sample_rate),
        }
    }

    fn source(&self, index: usize, spec: &SourceSpec, fs: u32) -> Result<Source> {
        let signal = match (&spec.input, spec.noise.as_deref()) {
            (Some(path), _) => wav::read_mono(path)?,
            (None, kind) => {
                let len = (spec.seconds * fs as f64).round() as usize;
                let rms = db_to_gain(PRESENTATION_LEVEL_DBFS);
                let seed = self.seed.wrapping_add(index as u64);
                if kind == Some("white") {
                    white_noise(fs, len, rms, seed)
                } else {
                    speech_shaped_noise(fs, len, rms, seed)?
                }
            }
        };
        Ok(Source::new(spec.azimuth, signal, spec.level_db))
    }

    pub fn run(&self) -> Result<BinauralBuffer> {
        self.validate()?;
        let hrtfs = self.hrtfs()?;
        let mut out: Option<BinauralBuffer> = None;
        for stage in &self.stages {
            out = Some(match (stage, out) {
                (Stage::Spatialize { sources }, _) => {
                    let sources = sources
                        .iter()
                        .enumerate()
                        .map(|(i, s)| self.source(i, s, hrtfs.sample_rate()))
                        .collect::<Result<Vec<_>>>()?;
                    render_scene(&Scene::new("pipeline", sources), &hrtfs)?
                }
                (Stage::Enhance(p), Some(x)) => head_shadow_enhance(&x, p)?,
                (Stage::Bimodal(b), Some(x)) => {
                    let mut voc = b.vocoder;
                    voc.seed = self.seed;
                    simulate_bimodal(&x, b.ci_side, &voc, &b.hearing_loss)?.signal
                }
                (_, None) => unreachable!("validated: spatialize comes first"),
            });
        }
        out.ok_or_else(|| Error::Config("pipeline has no stages".into()))
    }
}
