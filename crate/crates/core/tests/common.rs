#![allow(dead_code)]

use std::f64::consts::PI;

use headshadow::SampleBuffer;

pub const FS: u32 = 44_100;

/// Complex amplitude of `freq` in `x[start..]` by projection onto a
/// complex exponential (exact for an integer number of cycles).
pub fn tone_phasor(x: &[f64], fs: f64, freq: f64, start: usize) -> (f64, f64) {
    let n = x.len() - start;
    let (mut re, mut im) = (0.0, 0.0);
    for (i, v) in x[start..].iter().enumerate() {
        let w = 2.0 * PI * freq * (start + i) as f64 / fs;
        re += v * w.cos();
        im -= v * w.sin();
    }
    let amp = 2.0 * (re * re + im * im).sqrt() / n as f64;
    (amp, im.atan2(re))
}

pub fn tone_amplitude(x: &SampleBuffer, freq: f64, start: usize) -> f64 {
    tone_phasor(x.samples(), x.fs(), freq, start).0
}

pub fn energy(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn db(ratio_power: f64) -> f64 {
    10.0 * ratio_power.log10()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Plain LCG so test inputs do not share the library's RNG.
pub fn lcg_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut s = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (0..len)
        .map(|_| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
        .collect()
}
