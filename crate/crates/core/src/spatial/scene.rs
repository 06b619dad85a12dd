//! Multi-source scenes and their binaural rendering.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::buffer::{BinauralBuffer, Ear, SampleBuffer};
use crate::dsp::convolve::convolve_slices;
use crate::dsp::level::db_to_gain;
use crate::dsp::signals;
use crate::error::{Error, Result};
use crate::spatial::hrtf::{signed_angle, HrtfSet};

#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    /// Degrees, positive to the right.
    pub azimuth: i32,
    pub signal: SampleBuffer,
    pub level_offset_db: f64,
}

impl Source {
    pub fn new(azimuth: i32, signal: SampleBuffer, level_offset_db: f64) -> Self {
        Self {
            azimuth,
            signal,
            level_offset_db,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub sources: Vec<Source>,
    pub label: String,
}

/// Which ear wears the cochlear implant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CiSide {
    Left,
    Right,
}

impl CiSide {
    pub fn ear(self) -> Ear {
        match self {
            CiSide::Left => Ear::Left,
            CiSide::Right => Ear::Right,
        }
    }

    pub fn ha_ear(self) -> Ear {
        self.ear().opposite()
    }

    /// Azimuth pointing at the CI side (−90 for a left CI).
    pub fn azimuth(self) -> i32 {
        match self {
            CiSide::Left => -90,
            CiSide::Right => 90,
        }
    }
}

/// Spatial listening conditions with speech from the front.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Condition {
    /// Noise from the CI side.
    S0NCI,
    /// Noise from the hearing-aid side.
    S0NHA,
    /// Uncorrelated noise from 24 directions around the head.
    S0N360,
}

impl Condition {
    pub const ALL: [Condition; 3] = [Condition::S0NCI, Condition::S0NHA, Condition::S0N360];

    pub fn label(self) -> &'static str {
        match self {
            Condition::S0NCI => "S0NCI",
            Condition::S0NHA => "S0NHA",
            Condition::S0N360 => "S0N360",
        }
    }
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "S0NCI" => Ok(Condition::S0NCI),
            "S0NHA" => Ok(Condition::S0NHA),
            "S0N360" => Ok(Condition::S0N360),
            _ => Err(Error::Config(format!("unknown condition {s:?}"))),
        }
    }
}

/// Number of surround-noise directions (15° spacing).
pub const SURROUND_SOURCES: usize = 24;

impl Scene {
    pub fn new(label: impl Into<String>, sources: Vec<Source>) -> Self {
        Self {
            sources,
            label: label.into(),
        }
    }

    pub fn single(label: impl Into<String>, azimuth: i32, signal: SampleBuffer) -> Self {
        Self::new(label, vec![Source::new(azimuth, signal, 0.0)])
    }

    /// Speech alone at 0°.
    pub fn frontal_speech(speech: SampleBuffer) -> Self {
        Self::single("S0", 0, speech)
    }

    /// Noise part of a spatial condition.
    ///
    /// S0N360 places one source every 15° around the full circle, each at
    /// −10·log10(24) dB so the summed power matches a single 0 dB source.
    /// The sources are decorrelated with independent seeds when `noise` is
    /// `None` (speech-shaped noise of `len` samples is generated), or with
    /// seeded circular shifts of the supplied noise otherwise.
    pub fn condition_noise(
        condition: Condition,
        ci_side: CiSide,
        noise: Option<&SampleBuffer>,
        sample_rate: u32,
        len: usize,
        seed: u64,
    ) -> Result<Self> {
        let rms = db_to_gain(crate::PRESENTATION_LEVEL_DBFS);
        let make = |k: u64| -> Result<SampleBuffer> {
            match noise {
                Some(n) if k == 0 => Ok(n.clone()),
                Some(n) => {
                    use rand::Rng;
                    let mut r = signals::rng(seed.wrapping_add(k));
                    let shift = r.random_range(0..n.len().max(1));
                    let mut v = n.samples().to_vec();
                    v.rotate_left(shift);
                    SampleBuffer::new(n.sample_rate(), v)
                }
                None => signals::speech_shaped_noise(sample_rate, len, rms, seed.wrapping_add(k)),
            }
        };
        let sources = match condition {
            Condition::S0NCI => vec![Source::new(ci_side.azimuth(), make(0)?, 0.0)],
            Condition::S0NHA => vec![Source::new(-ci_side.azimuth(), make(0)?, 0.0)],
            Condition::S0N360 => {
                let offset = -10.0 * (SURROUND_SOURCES as f64).log10();
                (0..SURROUND_SOURCES)
                    .map(|k| {
                        let az = -180 + 15 * k as i32;
                        Ok(Source::new(az, make(k as u64 + 1)?, offset))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self::new(format!("{}-noise", condition.label()), sources))
    }

    pub fn sample_rate(&self) -> Option<u32> {
        self.sources.first().map(|s| s.signal.sample_rate())
    }

    /// Returns every source gain-shifted by `db`.
    pub fn with_offset_db(&self, db: f64) -> Self {
        let sources = self
            .sources
            .iter()
            .map(|s| Source::new(s.azimuth, s.signal.clone(), s.level_offset_db + db))
            .collect();
        Self::new(self.label.clone(), sources)
    }

    pub fn validate(&self, hrtfs: &HrtfSet) -> Result<()> {
        if self.sources.is_empty() {
            return Err(Error::param(format!(
                "scene {:?} has no sources",
                self.label
            )));
        }
        for s in &self.sources {
            if !hrtfs.contains(s.azimuth) {
                return Err(Error::param(format!(
                    "scene {:?}: HRTF set has no entry for azimuth {}",
                    self.label,
                    signed_angle(s.azimuth)
                )));
            }
            if s.signal.sample_rate() != hrtfs.sample_rate() {
                return Err(Error::param(format!(
                    "scene {:?}: source at {} is {} Hz but HRTFs are {} Hz",
                    self.label,
                    signed_angle(s.azimuth),
                    s.signal.sample_rate(),
                    hrtfs.sample_rate()
                )));
            }
        }
        Ok(())
    }
}

fn canonical_order(a: &Source, b: &Source) -> Ordering {
    a.azimuth
        .cmp(&b.azimuth)
        .then(a.level_offset_db.total_cmp(&b.level_offset_db))
        .then(a.signal.len().cmp(&b.signal.len()))
        .then_with(|| {
            a.signal
                .samples()
                .iter()
                .zip(b.signal.samples())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
}

/// Renders every source through its HRIR pair and sums per ear.
///
/// Output length is the longest source plus the longest IR minus one.
pub fn render_scene(scene: &Scene, hrtfs: &HrtfSet) -> Result<BinauralBuffer> {
    scene.validate(hrtfs)?;
    let fs = hrtfs.sample_rate();
    let max_src = scene
        .sources
        .iter()
        .map(|s| s.signal.len())
        .max()
        .unwrap_or(0);
    let out_len = (max_src + hrtfs.max_ir_len()).saturating_sub(1);

    let mut ordered: Vec<&Source> = scene.sources.iter().collect();
    ordered.sort_by(|a, b| canonical_order(a, b));

    let parts: Vec<(Vec<f64>, Vec<f64>)> = ordered
        .par_iter()
        .map(|s| {
            let pair = hrtfs.get(s.azimuth)?;
            let g = db_to_gain(s.level_offset_db);
            let x: Vec<f64> = s.signal.samples().iter().map(|v| v * g).collect();
            Ok((
                convolve_slices(&x, pair.left.taps()),
                convolve_slices(&x, pair.right.taps()),
            ))
        })
        .collect::<Result<_>>()?;

    let mut left = vec![0.0; out_len];
    let mut right = vec![0.0; out_len];
    for (l, r) in &parts {
        for (o, v) in left.iter_mut().zip(l) {
            *o += v;
        }
        for (o, v) in right.iter_mut().zip(r) {
            *o += v;
        }
    }
    BinauralBuffer::new(
        SampleBuffer::from_parts(fs, left),
        SampleBuffer::from_parts(fs, right),
    )
}
