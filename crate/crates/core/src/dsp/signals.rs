//! Test and stimulus signals. All random generators take an explicit seed.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::buffer::SampleBuffer;
use crate::dsp::iir::{design_butterworth_highpass, design_butterworth_lowpass};
use crate::dsp::level::mean_square;
use crate::error::Result;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sine(sample_rate: u32, freq: f64, amplitude: f64, len: usize) -> SampleBuffer {
    let fs = sample_rate as f64;
    SampleBuffer::from_parts(
        sample_rate,
        (0..len)
            .map(|n| amplitude * (2.0 * PI * freq * n as f64 / fs).sin())
            .collect(),
    )
}

pub fn impulse(sample_rate: u32, at: usize, len: usize) -> SampleBuffer {
    let mut v = vec![0.0; len];
    if at < len {
        v[at] = 1.0;
    }
    SampleBuffer::from_parts(sample_rate, v)
}

/// Gaussian white noise with the given RMS.
pub fn white_noise(sample_rate: u32, len: usize, rms: f64, seed: u64) -> SampleBuffer {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, rms).expect("rms must be finite and >= 0");
    SampleBuffer::from_parts(
        sample_rate,
        (0..len).map(|_| normal.sample(&mut r)).collect(),
    )
}

/// Rescales `x` to the given RMS (no-op for silence).
pub fn normalize_rms(x: &SampleBuffer, rms: f64) -> SampleBuffer {
    let p = mean_square(x.samples());
    if p > 0.0 {
        x.scaled(rms / p.sqrt())
    } else {
        x.clone()
    }
}

/// Stationary speech-shaped noise: white noise through a 2nd-order
/// Butterworth high-pass at 100 Hz and a 1st-order Butterworth low-pass at
/// 500 Hz (flat 100–500 Hz, −6 dB/octave above), normalised to `rms`.
pub fn speech_shaped_noise(
    sample_rate: u32,
    len: usize,
    rms: f64,
    seed: u64,
) -> Result<SampleBuffer> {
    // a short lead-in lets the filters settle before the kept part
    let lead = (sample_rate as usize) / 10;
    let raw = white_noise(sample_rate, len + lead, 1.0, seed);
    let hp = design_butterworth_highpass(2, 100.0, sample_rate)?;
    let lp = design_butterworth_lowpass(1, 500.0, sample_rate)?;
    let mut v = raw.into_samples();
    hp.run_in_place(&mut v);
    lp.run_in_place(&mut v);
    let kept = SampleBuffer::from_parts(sample_rate, v.split_off(lead));
    Ok(normalize_rms(&kept, rms))
}

/// Raised-cosine on/off ramps of `ramp` seconds each.
pub fn apply_ramps(x: &SampleBuffer, ramp: f64) -> SampleBuffer {
    let n = x.len();
    let r = ((ramp * x.fs()).round() as usize).min(n / 2);
    let mut v = x.samples().to_vec();
    for i in 0..r {
        let g = 0.5 - 0.5 * (PI * i as f64 / r as f64).cos();
        v[i] *= g;
        v[n - 1 - i] *= g;
    }
    SampleBuffer::from_parts(x.sample_rate(), v)
}

/// Default localization stimulus: 500 ms of speech-shaped noise with 50 ms
/// raised-cosine ramps at −25 dBFS RMS.
pub fn default_localization_stimulus(sample_rate: u32, seed: u64) -> Result<SampleBuffer> {
    let len = sample_rate as usize / 2;
    let rms = 10f64.powf(crate::PRESENTATION_LEVEL_DBFS / 20.0);
    let noise = speech_shaped_noise(sample_rate, len, rms, seed)?;
    Ok(apply_ramps(&noise, 0.05))
}
