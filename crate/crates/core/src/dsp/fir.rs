use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::buffer::SampleBuffer;
use crate::dsp::convolve::convolve_slices;
use crate::error::{Error, Result};

/// Finite impulse response filter.
///
/// `group_delay` is set for linear-phase designs (symmetric taps, odd
/// length) and equals `(len - 1) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct FirFilter {
    taps: Vec<f64>,
    group_delay: Option<usize>,
    sample_rate: u32,
}

pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Blackman window evaluated at position `t` in `[0, 1]`.
pub(crate) fn blackman(t: f64) -> f64 {
    0.42 - 0.5 * (2.0 * PI * t).cos() + 0.08 * (4.0 * PI * t).cos()
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= q / (k * k) as f64;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

/// Kaiser window evaluated at position `t` in `[0, 1]`.
pub(crate) fn kaiser(t: f64, beta: f64) -> f64 {
    let r = 2.0 * t - 1.0;
    bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / bessel_i0(beta)
}

/// Kaiser shape used by [`FirFilter::lowpass`]; about 120 dB stop-band.
pub const LOWPASS_KAISER_BETA: f64 = 12.0;

impl FirFilter {
    pub fn new(sample_rate: u32, taps: Vec<f64>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample rate must be positive"));
        }
        if taps.is_empty() {
            return Err(Error::param("FIR filter needs at least one tap"));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::data("non-finite FIR tap"));
        }
        Ok(Self {
            taps,
            group_delay: None,
            sample_rate,
        })
    }

    pub fn identity(sample_rate: u32) -> Self {
        Self {
            taps: vec![1.0],
            group_delay: Some(0),
            sample_rate,
        }
    }

    pub fn from_buffer(ir: &SampleBuffer) -> Result<Self> {
        Self::new(ir.sample_rate(), ir.samples().to_vec())
    }

    /// Kaiser-windowed sinc low-pass with `len` taps (odd), unity DC gain.
    /// The −6 dB point sits at `cutoff`.
    pub fn lowpass(len: usize, cutoff: f64, sample_rate: u32) -> Result<Self> {
        let fs = sample_rate as f64;
        if len.is_multiple_of(2) || len < 3 {
            return Err(Error::param(format!(
                "linear-phase FIR length must be odd and >= 3, got {len}"
            )));
        }
        if !(cutoff > 0.0 && cutoff < fs / 2.0) {
            return Err(Error::param(format!(
                "cutoff {cutoff} Hz must lie in (0, {}) Hz",
                fs / 2.0
            )));
        }
        let centre = (len - 1) / 2;
        let fc = cutoff / fs;
        let mut taps: Vec<f64> = (0..len)
            .map(|n| {
                let m = n as f64 - centre as f64;
                2.0 * fc
                    * sinc(2.0 * fc * m)
                    * kaiser(n as f64 / (len - 1) as f64, LOWPASS_KAISER_BETA)
            })
            .collect();
        let dc: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= dc);
        // enforce exact symmetry after rounding
        for n in 0..centre {
            let avg = 0.5 * (taps[n] + taps[len - 1 - n]);
            taps[n] = avg;
            taps[len - 1 - n] = avg;
        }
        Ok(Self {
            taps,
            group_delay: Some(centre),
            sample_rate,
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn group_delay_samples(&self) -> Option<usize> {
        self.group_delay
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.taps.len();
        (0..n / 2).all(|i| (self.taps[i] - self.taps[n - 1 - i]).abs() <= tol)
    }

    pub fn response(&self, freq: f64) -> Complex64 {
        let omega = 2.0 * PI * freq / self.sample_rate as f64;
        self.taps
            .iter()
            .enumerate()
            .map(|(n, &h)| Complex64::from_polar(h, -omega * n as f64))
            .sum()
    }

    pub fn magnitude_db(&self, freq: f64) -> f64 {
        20.0 * self.response(freq).norm().log10()
    }

    pub fn to_buffer(&self) -> SampleBuffer {
        SampleBuffer::from_parts(self.sample_rate, self.taps.clone())
    }

    /// Causal filtering trimmed to the input length (the first `len(x)`
    /// samples of the full convolution). Use [`crate::dsp::convolve`] for
    /// the untrimmed result.
    pub fn apply(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        if x.sample_rate() != self.sample_rate {
            return Err(Error::param(format!(
                "filter designed for {} Hz applied to {} Hz signal",
                self.sample_rate,
                x.sample_rate()
            )));
        }
        x.check_finite()?;
        let mut y = convolve_slices(x.samples(), &self.taps);
        y.truncate(x.len());
        Ok(SampleBuffer::from_parts(x.sample_rate(), y))
    }
}
