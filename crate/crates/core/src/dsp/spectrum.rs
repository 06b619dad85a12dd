//! Long-term power spectrum.
//!
//! Welch estimate: Hann window, 4096-sample segments, 50 % overlap, one-sided
//! power per bin scaled so that the bins sum to the mean square of the
//! signal. Signals shorter than one segment are analysed as a single
//! zero-padded segment. Band power is the sum of bins whose centre
//! frequency falls in `[low, high)`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::buffer::SampleBuffer;
use crate::dsp::level::power_db;
use crate::error::{Error, Result};

pub const SEGMENT: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    /// One-sided power per bin, bins `0..=SEGMENT/2`.
    pub power: Vec<f64>,
    pub bin_hz: f64,
}

impl PowerSpectrum {
    pub fn frequency(&self, bin: usize) -> f64 {
        bin as f64 * self.bin_hz
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Linear power in `[low, high)`.
    pub fn band(&self, low: f64, high: f64) -> f64 {
        self.power
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let f = self.frequency(*k);
                f >= low && f < high
            })
            .map(|(_, p)| p)
            .sum()
    }
}

fn hann(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    (0..len)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / len as f64).cos())
        .collect()
}

pub fn welch(x: &SampleBuffer) -> PowerSpectrum {
    let nfft = SEGMENT;
    let bins = nfft / 2 + 1;
    let bin_hz = x.fs() / nfft as f64;
    let data = x.samples();
    if data.is_empty() {
        return PowerSpectrum {
            power: vec![0.0; bins],
            bin_hz,
        };
    }
    let seg = data.len().min(nfft);
    let hop = (seg / 2).max(1);
    let window = hann(seg);
    let wpow: f64 = window.iter().map(|w| w * w).sum();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(nfft);
    let mut acc = vec![0.0; bins];
    let mut count = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); nfft];
    let mut start = 0;
    while start + seg <= data.len() {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = if i < seg {
                Complex64::new(data[start + i] * window[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        fft.process(&mut buf);
        for (k, a) in acc.iter_mut().enumerate() {
            *a += buf[k].norm_sqr();
        }
        count += 1;
        start += hop;
    }
    let scale = 1.0 / (nfft as f64 * wpow * count as f64);
    for (k, a) in acc.iter_mut().enumerate() {
        let one_sided = if k == 0 || k == nfft / 2 { 1.0 } else { 2.0 };
        *a *= scale * one_sided;
    }
    PowerSpectrum { power: acc, bin_hz }
}

fn check_edges(edges: &[f64], fs: f64) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::param("need at least two band edges"));
    }
    if edges.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::param("band edges must be strictly increasing"));
    }
    if edges.iter().any(|&e| !(e > 0.0 && e < fs / 2.0)) {
        return Err(Error::param(format!(
            "band edges must lie in (0, {}) Hz",
            fs / 2.0
        )));
    }
    Ok(())
}

/// Linear power in each band `[edges[i], edges[i+1])`.
pub fn band_powers_linear(x: &SampleBuffer, edges: &[f64]) -> Result<Vec<f64>> {
    check_edges(edges, x.fs())?;
    let spec = welch(x);
    Ok(edges.windows(2).map(|w| spec.band(w[0], w[1])).collect())
}

/// Band power in dB re full scale; silent bands are `-inf`.
pub fn band_powers(x: &SampleBuffer, edges: &[f64]) -> Result<Vec<f64>> {
    Ok(band_powers_linear(x, edges)?
        .into_iter()
        .map(power_db)
        .collect())
}

/// Band power for arbitrary (possibly non-contiguous) `(low, high)` bands.
pub fn band_powers_for(x: &SampleBuffer, bands: &[(f64, f64)]) -> Result<Vec<f64>> {
    for &(lo, hi) in bands {
        check_edges(&[lo, hi], x.fs())?;
    }
    let spec = welch(x);
    Ok(bands.iter().map(|&(lo, hi)| spec.band(lo, hi)).collect())
}
