//! Acoustic simulation of bimodal listening: a noise-band vocoder for the
//! cochlear-implant ear and a steep low-pass for the hearing-aid ear.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::buffer::{BinauralBuffer, Ear, SampleBuffer};
use crate::dsp::iir::{design_butterworth_bandpass, design_butterworth_lowpass, IirFilter};
use crate::dsp::level::mean_square;
use crate::dsp::signals::rng;
use crate::error::{Error, Result};
use crate::spatial::scene::CiSide;

/// Order of each analysis/carrier band-pass: a 4th-order Butterworth
/// prototype transformed to a band-pass.
pub const BAND_ORDER: usize = 8;
/// First RNG stream used for carriers; stream 0 is what the signal
/// generators use.
const CARRIER_STREAM: u64 = 0x766f_6300;
/// Order of the envelope smoothing low-pass.
pub const ENVELOPE_ORDER: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VocoderParams {
    pub n_channels: usize,
    pub f_low: f64,
    pub f_high: f64,
    pub env_cutoff: f64,
    pub seed: u64,
}

impl Default for VocoderParams {
    fn default() -> Self {
        Self::localization()
    }
}

impl VocoderParams {
    /// Eight channels, as used for localization.
    pub fn localization() -> Self {
        Self {
            n_channels: 8,
            f_low: 125.0,
            f_high: 8000.0,
            env_cutoff: 50.0,
            seed: 0,
        }
    }

    /// Five channels, as used for speech in noise.
    pub fn speech() -> Self {
        Self {
            n_channels: 5,
            ..Self::localization()
        }
    }

    pub fn with_channels(self, n_channels: usize) -> Self {
        Self { n_channels, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_channels == 0 {
            return Err(Error::param("vocoder needs at least one channel"));
        }
        if !(self.f_low > 0.0 && self.f_low < self.f_high) {
            return Err(Error::param(format!(
                "vocoder range {}..{} Hz is empty",
                self.f_low, self.f_high
            )));
        }
        if !(self.env_cutoff > 0.0) {
            return Err(Error::param("envelope cutoff must be positive"));
        }
        Ok(())
    }

    /// `n_channels + 1` logarithmically spaced band edges.
    pub fn edges(&self) -> Vec<f64> {
        let n = self.n_channels;
        let ratio = (self.f_high / self.f_low).ln();
        (0..=n)
            .map(|k| match k {
                0 => self.f_low,
                k if k == n => self.f_high,
                k => self.f_low * (ratio * k as f64 / n as f64).exp(),
            })
            .collect()
    }

    /// Unit-variance Gaussian carrier noise for channel `k`, drawn from its
    /// own stream of the seeded generator so it is independent of any signal
    /// generated from the same seed.
    pub fn carrier(&self, k: usize, len: usize) -> Vec<f64> {
        let mut r = rng(self.seed);
        r.set_stream(CARRIER_STREAM + k as u64);
        (0..len).map(|_| StandardNormal.sample(&mut r)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HearingLossParams {
    pub order: usize,
    pub cutoff: f64,
}

impl Default for HearingLossParams {
    fn default() -> Self {
        Self {
            order: 6,
            cutoff: 500.0,
        }
    }
}

type CarrierCache = Arc<RwLock<HashMap<usize, Arc<Vec<Vec<f64>>>>>>;

/// A vocoder bound to one sample rate.
///
/// Band-filtered carriers depend only on the seed and the signal length, so
/// they are computed once per length and shared between clones.
#[derive(Debug, Clone)]
pub struct Vocoder {
    params: VocoderParams,
    bands: Vec<IirFilter>,
    envelope: IirFilter,
    carriers: CarrierCache,
}

impl Vocoder {
    pub fn new(params: VocoderParams, sample_rate: u32) -> Result<Self> {
        params.validate()?;
        let edges = params.edges();
        let bands = edges
            .windows(2)
            .map(|w| design_butterworth_bandpass(BAND_ORDER, w[0], w[1], sample_rate))
            .collect::<Result<Vec<_>>>()?;
        let envelope = design_butterworth_lowpass(ENVELOPE_ORDER, params.env_cutoff, sample_rate)?;
        Ok(Self {
            params,
            bands,
            envelope,
            carriers: CarrierCache::default(),
        })
    }

    fn filtered_carriers(&self, len: usize) -> Arc<Vec<Vec<f64>>> {
        if let Some(c) = self.carriers.read().ok().and_then(|m| m.get(&len).cloned()) {
            return c;
        }
        let made: Vec<Vec<f64>> = self
            .bands
            .par_iter()
            .enumerate()
            .map(|(k, band)| {
                let mut c = self.params.carrier(k, len);
                band.run_in_place(&mut c);
                c
            })
            .collect();
        let made = Arc::new(made);
        if let Ok(mut m) = self.carriers.write() {
            m.insert(len, made.clone());
        }
        made
    }

    pub fn params(&self) -> &VocoderParams {
        &self.params
    }

    pub fn bands(&self) -> &[IirFilter] {
        &self.bands
    }

    fn envelope_of(&self, band: &IirFilter, x: &[f64]) -> (Vec<f64>, f64) {
        let mut analysis = x.to_vec();
        band.run_in_place(&mut analysis);
        let target = mean_square(&analysis);
        let mut env: Vec<f64> = analysis.iter().map(|v| v.max(0.0)).collect();
        self.envelope.run_in_place(&mut env);
        (env, target)
    }

    /// Per-channel envelopes: half-wave rectified band signal, low-passed.
    pub fn envelopes(&self, x: &SampleBuffer) -> Result<Vec<SampleBuffer>> {
        x.check_finite()?;
        Ok(self
            .bands
            .par_iter()
            .map(|band| {
                SampleBuffer::from_parts(x.sample_rate(), self.envelope_of(band, x.samples()).0)
            })
            .collect())
    }

    /// Per-channel outputs before summation.
    pub fn channels(&self, x: &SampleBuffer) -> Result<Vec<SampleBuffer>> {
        if x.is_empty() {
            return Err(Error::param("cannot vocode an empty buffer"));
        }
        x.check_finite()?;
        let fs = x.sample_rate();
        let carriers = self.filtered_carriers(x.len());
        self.bands
            .par_iter()
            .zip(carriers.par_iter())
            .map(|(band, carrier)| {
                let (env, target) = self.envelope_of(band, x.samples());
                let mut y: Vec<f64> = env.iter().zip(carrier).map(|(e, c)| e * c).collect();
                let power = mean_square(&y);
                let gain = if power > 0.0 {
                    (target / power).sqrt()
                } else {
                    0.0
                };
                y.iter_mut().for_each(|v| *v *= gain);
                Ok(SampleBuffer::from_parts(fs, y))
            })
            .collect()
    }

    pub fn process(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        let channels = self.channels(x)?;
        let mut sum = vec![0.0; x.len()];
        for ch in &channels {
            for (s, v) in sum.iter_mut().zip(ch.samples()) {
                *s += v;
            }
        }
        Ok(SampleBuffer::from_parts(x.sample_rate(), sum))
    }
}

/// Noise-band vocoder. Deterministic for a given seed.
pub fn vocode(x: &SampleBuffer, p: &VocoderParams) -> Result<SampleBuffer> {
    Vocoder::new(*p, x.sample_rate())?.process(x)
}

pub fn design_hearing_loss(p: &HearingLossParams, sample_rate: u32) -> Result<IirFilter> {
    design_butterworth_lowpass(p.order, p.cutoff, sample_rate)
}

/// Low-pass simulating a ski-slope audiogram.
pub fn hearing_loss_filter(x: &SampleBuffer, p: &HearingLossParams) -> Result<SampleBuffer> {
    x.check_finite()?;
    design_hearing_loss(p, x.sample_rate())?.apply(x)
}

/// Output of [`simulate_bimodal`] with its channel assignment.
#[derive(Debug, Clone)]
pub struct BimodalSignal {
    pub signal: BinauralBuffer,
    pub ci_ear: Ear,
    pub ha_ear: Ear,
    pub channels: usize,
}

/// Vocodes the CI-side channel and low-passes the other.
pub fn simulate_bimodal(
    x: &BinauralBuffer,
    ci_side: CiSide,
    voc: &VocoderParams,
    hl: &HearingLossParams,
) -> Result<BimodalSignal> {
    let ci_ear = ci_side.ear();
    let ci = vocode(x.ear(ci_ear), voc)?;
    let ha = hearing_loss_filter(x.ear(ci_ear.opposite()), hl)?;
    let signal = match ci_ear {
        Ear::Left => BinauralBuffer::new(ci, ha)?,
        Ear::Right => BinauralBuffer::new(ha, ci)?,
    };
    Ok(BimodalSignal {
        signal,
        ci_ear,
        ha_ear: ci_ear.opposite(),
        channels: voc.n_channels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::signals::{sine, speech_shaped_noise};

    const FS: u32 = 44_100;

    #[test]
    fn edges_are_log_spaced() {
        let e = VocoderParams::localization().edges();
        assert_eq!(e.len(), 9);
        assert_eq!(e[0], 125.0);
        assert_eq!(e[8], 8000.0);
        let r = e[1] / e[0];
        for w in e.windows(2) {
            assert!((w[1] / w[0] - r).abs() < 1e-12);
        }
        assert!((r - 2f64.powf(0.75)).abs() < 1e-12);
    }

    #[test]
    fn silence_stays_silent() {
        let y = vocode(&SampleBuffer::zeros(FS, 4096), &VocoderParams::default()).unwrap();
        assert!(y.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let x = speech_shaped_noise(FS, 8192, 0.1, 3).unwrap();
        let p = VocoderParams::default().with_seed(9);
        let a = vocode(&x, &p).unwrap();
        let b = vocode(&x, &p).unwrap();
        assert_eq!(a, b);
        let c = vocode(&x, &p.with_seed(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_bad_params() {
        let x = sine(FS, 1000.0, 0.1, 1024);
        assert!(vocode(&x, &VocoderParams::default().with_channels(0)).is_err());
        let p = VocoderParams {
            f_low: 4000.0,
            f_high: 2000.0,
            ..VocoderParams::default()
        };
        assert!(vocode(&x, &p).unwrap_err().is_validation());
        assert!(vocode(&SampleBuffer::zeros(FS, 0), &VocoderParams::default()).is_err());
    }

    fn tone_db(freq: f64) -> f64 {
        let len = FS as usize;
        let y =
            hearing_loss_filter(&sine(FS, freq, 1.0, len), &HearingLossParams::default()).unwrap();
        let tail = &y.samples()[len / 2..];
        10.0 * (2.0 * mean_square(tail)).log10()
    }

    #[test]
    fn hearing_loss_cutoff_and_slope() {
        assert!((tone_db(500.0) + 3.01).abs() < 0.1);
        assert!(tone_db(100.0).abs() < 0.2);
        let slope = tone_db(2000.0) - tone_db(1000.0);
        assert!((slope + 36.0).abs() < 2.0, "slope {slope}");
    }

    #[test]
    fn bimodal_assigns_channels() {
        let s = speech_shaped_noise(FS, 4096, 0.1, 1).unwrap();
        let x = BinauralBuffer::diotic(s.clone());
        let voc = VocoderParams::default();
        let hl = HearingLossParams::default();
        let out = simulate_bimodal(&x, CiSide::Left, &voc, &hl).unwrap();
        assert_eq!(out.ci_ear, Ear::Left);
        assert_eq!(out.signal.left(), &vocode(&s, &voc).unwrap());
        assert_eq!(out.signal.right(), &hearing_loss_filter(&s, &hl).unwrap());
        let out = simulate_bimodal(&x, CiSide::Right, &voc, &hl).unwrap();
        assert_eq!(out.ha_ear, Ear::Left);
        assert_eq!(out.signal.right(), &vocode(&s, &voc).unwrap());
    }
}
