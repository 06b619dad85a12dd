//! Named figure recipes.
//!
//! Each recipe is a serializable configuration plus the code that turns it
//! into report rows, so a JSON file with any subset of the fields (missing
//! ones take the preset value) reproduces or varies a figure.

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ild_curve, BimodalStage, Chain, IldCurve, Processing};
use crate::beamformer::{
    directivity_pattern, BeamformerParams, DirectivityMode, DirectivityOptions,
};
use crate::bimodal::VocoderParams;
use crate::buffer::{Ear, DEFAULT_SAMPLE_RATE};
use crate::dsp::signals::default_localization_stimulus;
use crate::error::{Error, Result};
use crate::experiments::{
    condition_snr, frontal_grid, run_localization_experiment, ConditionSnr, LocalizationConfig,
    LocalizationResult, SrtConfig,
};
use crate::io::report::{BandSnrRow, DirectivityRow, IldRow, LocalizationRow};
use crate::spatial::{load_hrtf_set, CiSide, HrtfSet, SphericalHeadModel, DEFAULT_BRIGHT_SPOT_DB};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Free-field low/high band directivity.
    Fig1b,
    /// Natural and enhanced ILD curves through the bimodal simulation.
    Fig2a,
    /// Ideal-observer localization with the bright spot.
    Fig2bc,
    /// Band SNRs per condition.
    Fig3a,
    /// Simulated-listener SRTs.
    Fig3b,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig1b,
        Preset::Fig2a,
        Preset::Fig2bc,
        Preset::Fig3a,
        Preset::Fig3b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1b => "fig1b",
            Preset::Fig2a => "fig2a",
            Preset::Fig2bc => "fig2bc",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
        }
    }

    /// Subcommand that runs this recipe.
    pub fn command(self) -> &'static str {
        match self {
            Preset::Fig1b => "directivity",
            Preset::Fig2a => "ild-curve",
            Preset::Fig2bc => "localize",
            Preset::Fig3a => "snr",
            Preset::Fig3b => "srt",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                Error::Config(format!(
                    "unknown preset {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// Where HRTFs come from: an imported directory, or the spherical-head model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HrtfSource {
    pub dir: Option<PathBuf>,
    /// Synthetic sets only.
    pub bright_spot_db: Option<f64>,
    pub sample_rate: u32,
}

impl Default for HrtfSource {
    fn default() -> Self {
        Self {
            dir: None,
            bright_spot_db: None,
            sample_rate: DEFAULT_SAMPLE_RATE,
        }
    }
}

impl HrtfSource {
    pub fn load(&self) -> Result<HrtfSet> {
        match &self.dir {
            Some(dir) if self.bright_spot_db.is_some() => Err(Error::Config(format!(
                "bright_spot_db applies to synthetic HRTFs only, but dir {} was given",
                dir.display()
            ))),
            Some(dir) => load_hrtf_set(dir),
            None => {
                let model = SphericalHeadModel {
                    bright_spot_db: self.bright_spot_db,
                    ..SphericalHeadModel::default()
                };
                model.full_circle(self.sample_rate)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DirectivityRecipe {
    pub beamformer: BeamformerParams,
    pub low_band: (f64, f64),
    pub high_band: (f64, f64),
    pub angles: Vec<f64>,
    pub ear: Ear,
    /// Plane waves at the microphone pair when true, HRTF rendering otherwise.
    pub free_field: bool,
    pub hrtf: HrtfSource,
    pub noise_len: usize,
    pub seed: u64,
}

impl Default for DirectivityRecipe {
    fn default() -> Self {
        fig1b()
    }
}

pub fn fig1b() -> DirectivityRecipe {
    DirectivityRecipe {
        beamformer: BeamformerParams::default(),
        low_band: (100.0, 1500.0),
        high_band: (1500.0, 20_000.0),
        angles: frontal_grid().into_iter().map(f64::from).collect(),
        ear: Ear::Right,
        free_field: true,
        hrtf: HrtfSource::default(),
        noise_len: 1 << 17,
        seed: 1,
    }
}

impl DirectivityRecipe {
    pub fn run(&self) -> Result<Vec<DirectivityRow>> {
        let set;
        let (mode, fs) = if self.free_field {
            (DirectivityMode::FreeField, self.hrtf.sample_rate)
        } else {
            set = self.hrtf.load()?;
            (DirectivityMode::Hrtf(&set), set.sample_rate())
        };
        let opts = DirectivityOptions {
            ear: self.ear,
            sample_rate: fs,
            noise_len: self.noise_len,
            seed: self.seed,
        };
        let mut rows = Vec::new();
        for (label, band) in [("low", self.low_band), ("high", self.high_band)] {
            let points = directivity_pattern(&self.beamformer, band, &self.angles, mode, opts)?;
            for p in points {
                rows.push(DirectivityRow {
                    angle: p.angle,
                    band: label.into(),
                    processing: Processing::Natural.label().into(),
                    gain_db: p.natural_db,
                });
                rows.push(DirectivityRow {
                    angle: p.angle,
                    band: label.into(),
                    processing: Processing::Enhanced.label().into(),
                    gain_db: p.enhanced_db,
                });
            }
        }
        Ok(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IldRecipe {
    pub angles: Vec<i32>,
    pub beamformer: BeamformerParams,
    pub bimodal: Option<BimodalStage>,
    pub hrtf: HrtfSource,
    pub stimulus_seed: u64,
}

impl Default for IldRecipe {
    fn default() -> Self {
        fig2a()
    }
}

pub fn fig2a() -> IldRecipe {
    IldRecipe {
        angles: frontal_grid(),
        beamformer: BeamformerParams::default(),
        bimodal: Some(BimodalStage::new(
            CiSide::Left,
            VocoderParams::localization(),
        )),
        hrtf: HrtfSource::default(),
        stimulus_seed: 7,
    }
}

/// Natural and enhanced curves for one recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IldPair {
    pub natural: IldCurve,
    pub enhanced: IldCurve,
}

impl IldPair {
    pub fn rows(&self) -> Vec<IldRow> {
        self.natural
            .angles
            .iter()
            .zip(self.natural.ild.iter().zip(&self.enhanced.ild))
            .map(|(&angle, (&n, &e))| IldRow {
                angle,
                natural_ild_db: n,
                enhanced_ild_db: e,
            })
            .collect()
    }
}

impl IldRecipe {
    fn chain(&self) -> Chain {
        Chain {
            beamformer: self.beamformer,
            bimodal: self.bimodal,
            ..Chain::natural()
        }
    }

    pub fn run(&self) -> Result<IldPair> {
        let set = self.hrtf.load()?;
        let stim = default_localization_stimulus(set.sample_rate(), self.stimulus_seed)?;
        let curve = |p| ild_curve(&stim, &set, &self.chain().with_processing(p), &self.angles);
        Ok(IldPair {
            natural: curve(Processing::Natural)?,
            enhanced: curve(Processing::Enhanced)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LocalizationRecipe {
    /// `processing` is ignored: both are always run.
    pub experiment: LocalizationConfig,
    pub beamformer: BeamformerParams,
    pub bimodal: Option<BimodalStage>,
    pub hrtf: HrtfSource,
    pub stimulus_seed: u64,
}

impl Default for LocalizationRecipe {
    fn default() -> Self {
        fig2bc()
    }
}

pub fn fig2bc() -> LocalizationRecipe {
    LocalizationRecipe {
        experiment: LocalizationConfig::default(),
        beamformer: BeamformerParams::default(),
        bimodal: Some(BimodalStage::new(
            CiSide::Left,
            VocoderParams::localization(),
        )),
        hrtf: HrtfSource {
            bright_spot_db: Some(DEFAULT_BRIGHT_SPOT_DB),
            ..HrtfSource::default()
        },
        stimulus_seed: 7,
    }
}

impl LocalizationRecipe {
    /// Natural then enhanced.
    pub fn run(&self) -> Result<Vec<LocalizationResult>> {
        let set = self.hrtf.load()?;
        let stim = default_localization_stimulus(set.sample_rate(), self.stimulus_seed)?;
        let chain = Chain {
            beamformer: self.beamformer,
            bimodal: self.bimodal,
            ..Chain::natural()
        };
        Processing::BOTH
            .into_iter()
            .map(|p| {
                let cfg = LocalizationConfig {
                    processing: p,
                    ..self.experiment.clone()
                };
                run_localization_experiment(&cfg, &set, &chain, &stim)
            })
            .collect()
    }
}

pub fn localization_rows(results: &[LocalizationResult]) -> Vec<LocalizationRow> {
    results
        .iter()
        .flat_map(|r| {
            let processing = r.template.processing.clone();
            r.metrics.per_angle.iter().map(move |a| LocalizationRow {
                processing: processing.clone(),
                target: a.target,
                n: a.n,
                mean_response: a.mean_response,
                bias: a.bias,
                std: a.std,
                rms_error: a.rms_error,
            })
        })
        .collect()
}

pub fn fig3a() -> SrtConfig {
    SrtConfig::default()
}

pub fn fig3b() -> SrtConfig {
    SrtConfig::default()
}

/// Band SNRs for every condition and processing in `cfg`.
pub fn band_snr_table(cfg: &SrtConfig, hrtfs: &HrtfSet) -> Result<Vec<ConditionSnr>> {
    cfg.validate()?;
    let cells: Vec<_> = cfg
        .conditions
        .iter()
        .flat_map(|&c| Processing::BOTH.into_iter().map(move |p| (c, p)))
        .collect();
    cells
        .par_iter()
        .map(|&(c, p)| condition_snr(c, p, cfg, hrtfs))
        .collect()
}

pub fn band_snr_rows(table: &[ConditionSnr]) -> Vec<BandSnrRow> {
    table
        .iter()
        .flat_map(|s| {
            let r = &s.bands;
            r.centers.iter().enumerate().map(move |(i, &c)| BandSnrRow {
                condition: s.condition.label().into(),
                processing: s.processing.label().into(),
                center_hz: c,
                snr_left_db: r.snr_left[i],
                snr_right_db: r.snr_right[i],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig9".parse::<Preset>().unwrap_err().is_validation());
    }

    #[test]
    fn partial_json_keeps_preset_values() {
        let r: LocalizationRecipe =
            serde_json::from_str(r#"{"experiment": {"trials_per_angle": 3}}"#).unwrap();
        assert_eq!(r.experiment.trials_per_angle, 3);
        assert_eq!(r.hrtf.bright_spot_db, Some(DEFAULT_BRIGHT_SPOT_DB));
        let d: DirectivityRecipe = serde_json::from_str("{}").unwrap();
        assert_eq!(d, fig1b());
    }

    #[test]
    fn bright_spot_needs_synthetic_set() {
        let s = HrtfSource {
            dir: Some("x".into()),
            bright_spot_db: Some(10.0),
            ..HrtfSource::default()
        };
        assert!(s.load().unwrap_err().is_validation());
    }

    #[test]
    fn fig2a_rows_pair_up_curves() {
        let rows = fig2a().run().unwrap().rows();
        assert_eq!(rows.len(), 13);
        assert!(rows
            .windows(2)
            .all(|w| w[1].enhanced_ild_db > w[0].enhanced_ild_db));
    }
}
