//! Complementary two-band split.
//!
//! The low band is a linear-phase FIR low-pass with integer group delay `D`;
//! the high band is `delay(x, D) - low`. Their sum reproduces the delayed
//! input up to floating-point rounding, whatever the FIR response.

use crate::buffer::SampleBuffer;
use crate::dsp::delay::delay_slice;
use crate::dsp::fir::FirFilter;
use crate::error::{Error, Result};

/// FIR length at 44.1 kHz; scaled with the sample rate elsewhere.
pub const REFERENCE_TAPS: usize = 513;

#[derive(Debug, Clone, PartialEq)]
pub struct Crossover {
    lowpass: FirFilter,
    crossover: f64,
}

impl Crossover {
    pub fn new(crossover: f64, sample_rate: u32) -> Result<Self> {
        let fs = sample_rate as f64;
        if !(crossover > 0.0 && crossover < fs / 2.0) {
            return Err(Error::param(format!(
                "crossover {crossover} Hz must lie in (0, {}) Hz",
                fs / 2.0
            )));
        }
        let half = ((REFERENCE_TAPS / 2) as f64 * fs / 44_100.0)
            .round()
            .max(1.0) as usize;
        let lowpass = FirFilter::lowpass(2 * half + 1, crossover, sample_rate)?;
        Ok(Self { lowpass, crossover })
    }

    pub fn crossover(&self) -> f64 {
        self.crossover
    }

    pub fn lowpass(&self) -> &FirFilter {
        &self.lowpass
    }

    /// Group delay `D` in samples shared by both bands.
    pub fn delay_samples(&self) -> usize {
        self.lowpass.group_delay_samples().unwrap_or(0)
    }

    pub fn split(&self, x: &SampleBuffer) -> Result<(SampleBuffer, SampleBuffer)> {
        let low = self.lowpass.apply(x)?;
        let delayed = delay_slice(x.samples(), self.delay_samples() as f64);
        let high = delayed
            .iter()
            .zip(low.samples())
            .map(|(d, l)| d - l)
            .collect();
        Ok((low, SampleBuffer::from_parts(x.sample_rate(), high)))
    }
}

/// Splits `x` at `crossover` Hz into `(low, high)`.
pub fn band_split(x: &SampleBuffer, crossover: f64) -> Result<(SampleBuffer, SampleBuffer)> {
    Crossover::new(crossover, x.sample_rate())?.split(x)
}
