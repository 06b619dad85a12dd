//! Head shadow enhancement.
//!
//! Each ear device receives the contralateral microphone's low band over a
//! (lossless, zero-latency) link and forms an end-fire delay-and-subtract
//! beam along the interaural axis with its null toward the far side:
//!
//! ```text
//! low_e'  = g · boost( low_e − delay(low_c, τ) ),   τ = spacing / c
//! out_e   = low_e' + high_e
//! ```
//!
//! `boost` is a DC-normalised Butterworth low-pass at `boost_cutoff` that
//! undoes the 6 dB/octave tilt of the subtraction. `g` is chosen so that a
//! plane wave from the ipsilateral side (±90°) at 200 Hz comes out at the
//! level of a single unprocessed microphone. The band above the crossover is
//! passed through untouched.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::buffer::{BinauralBuffer, Ear, SampleBuffer};
use crate::dsp::crossover::Crossover;
use crate::dsp::delay::{delay_slice, HALF_WIDTH};
use crate::dsp::iir::{design_butterworth_lowpass, IirFilter};
use crate::dsp::level::power_db;
use crate::dsp::signals;
use crate::dsp::spectrum::band_powers_for;
use crate::error::{Error, Result};
use crate::spatial::hrtf::HrtfSet;
use crate::spatial::scene::{render_scene, Scene};

/// Frequency at which the boost is normalised.
pub const BOOST_REFERENCE_HZ: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BeamformerParams {
    pub crossover: f64,
    pub mic_spacing: f64,
    pub speed_of_sound: f64,
    pub boost_cutoff: f64,
    pub boost_order: usize,
    pub enabled: bool,
}

impl Default for BeamformerParams {
    fn default() -> Self {
        Self {
            crossover: 1500.0,
            mic_spacing: 0.20,
            speed_of_sound: 340.0,
            boost_cutoff: 50.0,
            boost_order: 1,
            enabled: true,
        }
    }
}

impl BeamformerParams {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }

    /// Inter-microphone travel time, seconds.
    pub fn tau(&self) -> f64 {
        self.mic_spacing / self.speed_of_sound
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mic_spacing > 0.0 && self.mic_spacing.is_finite()) {
            return Err(Error::param("microphone spacing must be positive"));
        }
        if !(self.speed_of_sound > 0.0 && self.speed_of_sound.is_finite()) {
            return Err(Error::param("speed of sound must be positive"));
        }
        Ok(())
    }
}

/// Nulls of the ipsilateral end-fire response `|1 − e^{−j2ωτ}|`: `k/(2τ)`.
pub fn comb_null_frequencies(p: &BeamformerParams, k_max: usize) -> Vec<f64> {
    let tau = p.tau();
    (1..=k_max).map(|k| k as f64 / (2.0 * tau)).collect()
}

/// All intermediate signals of one enhancement pass, time-aligned with the
/// input.
#[derive(Debug, Clone)]
pub struct EnhancedBands {
    pub output: BinauralBuffer,
    /// Crossover low band of each input channel.
    pub low: BinauralBuffer,
    /// Crossover high band of each input channel (also the output high path).
    pub high: BinauralBuffer,
    /// `low_e − delay(low_c, τ)` before the boost.
    pub difference: BinauralBuffer,
    /// Boosted beamformer output that replaces the low band.
    pub enhanced_low: BinauralBuffer,
}

/// Precomputed filters for one sample rate.
#[derive(Debug, Clone)]
pub struct HeadShadowEnhancer {
    params: BeamformerParams,
    crossover: Crossover,
    boost: IirFilter,
    boost_gain: f64,
    sample_rate: u32,
}

impl HeadShadowEnhancer {
    pub fn new(params: BeamformerParams, sample_rate: u32) -> Result<Self> {
        params.validate()?;
        let crossover = Crossover::new(params.crossover, sample_rate)?;
        let boost =
            design_butterworth_lowpass(params.boost_order, params.boost_cutoff, sample_rate)?;
        let w = 2.0 * PI * BOOST_REFERENCE_HZ;
        let subtractive = 2.0 * (w * params.tau()).sin().abs();
        let boost_gain = 1.0 / (subtractive * boost.response(BOOST_REFERENCE_HZ).norm());
        Ok(Self {
            params,
            crossover,
            boost,
            boost_gain,
            sample_rate,
        })
    }

    pub fn params(&self) -> &BeamformerParams {
        &self.params
    }

    pub fn boost_gain(&self) -> f64 {
        self.boost_gain
    }

    pub fn crossover(&self) -> &Crossover {
        &self.crossover
    }

    pub fn delay_samples(&self) -> f64 {
        self.params.tau() * self.sample_rate as f64
    }

    /// Complex response of one ear to a free-field plane wave from
    /// `azimuth` at `freq`, crossover excluded (ideal low band). Ear
    /// signals are referenced to the array centre.
    pub fn free_field_low_response(&self, azimuth: f64, freq: f64, ear: Ear) -> Complex64 {
        let w = 2.0 * PI * freq;
        let tau = self.params.tau();
        let s = azimuth.to_radians().sin();
        // plane wave: right mic leads by (τ/2)·sinθ
        let (own, other) = match ear {
            Ear::Right => (-0.5 * tau * s, 0.5 * tau * s),
            Ear::Left => (0.5 * tau * s, -0.5 * tau * s),
        };
        let diff =
            Complex64::from_polar(1.0, -w * own) - Complex64::from_polar(1.0, -w * (other + tau));
        diff * self.boost.response(freq) * self.boost_gain
    }

    pub fn process(&self, x: &BinauralBuffer) -> Result<BinauralBuffer> {
        Ok(self.process_bands(x)?.output)
    }

    pub fn process_bands(&self, x: &BinauralBuffer) -> Result<EnhancedBands> {
        if x.sample_rate() != self.sample_rate {
            return Err(Error::param(format!(
                "enhancer built for {} Hz, input is {} Hz",
                self.sample_rate,
                x.sample_rate()
            )));
        }
        let n = x.len();
        let d = self.crossover.delay_samples();
        let pad = |b: &SampleBuffer| b.resized(n + d);
        let (low_l, high_l) = self.crossover.split(&pad(x.left()))?;
        let (low_r, high_r) = self.crossover.split(&pad(x.right()))?;

        let (diff_l, diff_r, enh_l, enh_r) = if self.params.enabled {
            let tau = self.delay_samples();
            let diff = |own: &SampleBuffer, other: &SampleBuffer| -> Vec<f64> {
                let delayed = delay_slice(other.samples(), tau);
                own.samples()
                    .iter()
                    .zip(&delayed)
                    .map(|(a, b)| a - b)
                    .collect()
            };
            let dl = diff(&low_l, &low_r);
            let dr = diff(&low_r, &low_l);
            let boost = |v: &[f64]| -> Vec<f64> {
                let mut y: Vec<f64> = v.iter().map(|s| s * self.boost_gain).collect();
                self.boost.run_in_place(&mut y);
                y
            };
            let el = boost(&dl);
            let er = boost(&dr);
            (dl, dr, el, er)
        } else {
            (
                vec![0.0; n + d],
                vec![0.0; n + d],
                low_l.samples().to_vec(),
                low_r.samples().to_vec(),
            )
        };

        let fs = self.sample_rate;
        let trim = |v: &[f64]| SampleBuffer::from_parts(fs, v[d..].to_vec());
        let sum = |a: &[f64], b: &SampleBuffer| -> Vec<f64> {
            a.iter().zip(b.samples()).map(|(p, q)| p + q).collect()
        };
        let out_l = sum(&enh_l, &high_l);
        let out_r = sum(&enh_r, &high_r);
        Ok(EnhancedBands {
            output: BinauralBuffer::new(trim(&out_l), trim(&out_r))?,
            low: BinauralBuffer::new(trim(low_l.samples()), trim(low_r.samples()))?,
            high: BinauralBuffer::new(trim(high_l.samples()), trim(high_r.samples()))?,
            difference: BinauralBuffer::new(trim(&diff_l), trim(&diff_r))?,
            enhanced_low: BinauralBuffer::new(trim(&enh_l), trim(&enh_r))?,
        })
    }
}

/// Applies head shadow enhancement to a binaural signal. The output has the
/// input's length and timing (the crossover latency is removed).
pub fn head_shadow_enhance(x: &BinauralBuffer, p: &BeamformerParams) -> Result<BinauralBuffer> {
    HeadShadowEnhancer::new(*p, x.sample_rate())?.process(x)
}

/// Two omnidirectional microphones `spacing` apart on the interaural axis
/// receiving a plane wave from `azimuth` (degrees, positive right).
///
/// Both channels carry a common bulk delay of [`HALF_WIDTH`] samples so
/// every fractional delay gets the full interpolator. At −90° the right
/// channel is exactly the left channel delayed by `spacing / c`.
pub fn plane_wave(
    s: &SampleBuffer,
    azimuth: f64,
    spacing: f64,
    speed_of_sound: f64,
) -> Result<BinauralBuffer> {
    let tau = spacing / speed_of_sound;
    let sin = azimuth.to_radians().sin();
    let fs = s.fs();
    let bulk = HALF_WIDTH as f64;
    let dl = bulk + 0.5 * tau * (1.0 + sin) * fs;
    let dr = bulk + 0.5 * tau * (1.0 - sin) * fs;
    // sin(±90°) is not exactly ±1 in floating point
    let snap = |d: f64| if (d - bulk).abs() < 1e-9 { bulk } else { d };
    BinauralBuffer::new(
        SampleBuffer::from_parts(s.sample_rate(), delay_slice(s.samples(), snap(dl))),
        SampleBuffer::from_parts(s.sample_rate(), delay_slice(s.samples(), snap(dr))),
    )
}

#[derive(Debug, Clone, Copy)]
pub enum DirectivityMode<'a> {
    FreeField,
    Hrtf(&'a HrtfSet),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectivityPoint {
    pub angle: f64,
    /// Processed band power re the unprocessed 0° reference, dB.
    pub enhanced_db: f64,
    /// Unprocessed band power re the same reference, dB.
    pub natural_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectivityOptions {
    pub ear: Ear,
    pub sample_rate: u32,
    pub noise_len: usize,
    pub seed: u64,
}

impl Default for DirectivityOptions {
    fn default() -> Self {
        Self {
            ear: Ear::Right,
            sample_rate: crate::buffer::DEFAULT_SAMPLE_RATE,
            noise_len: 1 << 17,
            seed: 1,
        }
    }
}

/// Band-power directivity of one ear for white noise arriving from each
/// angle, processed and unprocessed, relative to the unprocessed 0° level.
pub fn directivity_pattern(
    p: &BeamformerParams,
    band: (f64, f64),
    angles: &[f64],
    mode: DirectivityMode<'_>,
    opts: DirectivityOptions,
) -> Result<Vec<DirectivityPoint>> {
    let fs = match &mode {
        DirectivityMode::FreeField => opts.sample_rate,
        DirectivityMode::Hrtf(set) => set.sample_rate(),
    };
    let enhancer = HeadShadowEnhancer::new(*p, fs)?;
    let noise = signals::white_noise(fs, opts.noise_len, 0.1, opts.seed);
    let input = |angle: f64| -> Result<BinauralBuffer> {
        match &mode {
            DirectivityMode::FreeField => {
                plane_wave(&noise, angle, p.mic_spacing, p.speed_of_sound)
            }
            DirectivityMode::Hrtf(set) => {
                let az = angle.round() as i32;
                if (angle - az as f64).abs() > 1e-9 {
                    return Err(Error::param(format!(
                        "HRTF mode needs integer azimuths, got {angle}"
                    )));
                }
                render_scene(&Scene::single("directivity", az, noise.clone()), set)
            }
        }
    };
    let power = |x: &SampleBuffer| -> Result<f64> { Ok(band_powers_for(x, &[band])?[0]) };

    let reference = power(input(0.0)?.ear(opts.ear))?;
    if reference <= 0.0 {
        return Err(Error::data("reference band power is zero"));
    }
    angles
        .iter()
        .map(|&angle| {
            let x = input(angle)?;
            let natural = power(x.ear(opts.ear))?;
            let enhanced = power(enhancer.process(&x)?.ear(opts.ear))?;
            Ok(DirectivityPoint {
                angle,
                enhanced_db: power_db(enhanced / reference),
                natural_db: power_db(natural / reference),
            })
        })
        .collect()
}
