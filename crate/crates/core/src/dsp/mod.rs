//! Sample-accurate signal operations shared by every other module.

pub mod convolve;
pub mod crossover;
pub mod delay;
pub mod fir;
pub mod iir;
pub mod level;
pub mod signals;
pub mod spectrum;

pub use convolve::{convolve, convolve_direct, convolve_fft};
pub use crossover::{band_split, Crossover};
pub use delay::fractional_delay;
pub use fir::FirFilter;
pub use iir::{
    design_butterworth_bandpass, design_butterworth_highpass, design_butterworth_lowpass, IirFilter,
};
pub use level::{db_to_gain, power_db, rms_level_db};
pub use spectrum::{band_powers, band_powers_linear};

use crate::buffer::SampleBuffer;
use crate::error::Result;

/// A linear time-invariant filter that can be run over a buffer.
pub trait Filter {
    /// Output has the input's length. IIR filters run from rest; FIR
    /// filters return the first `len(x)` samples of the full convolution.
    fn apply(&self, x: &SampleBuffer) -> Result<SampleBuffer>;
}

impl Filter for IirFilter {
    fn apply(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        IirFilter::apply(self, x)
    }
}

impl Filter for FirFilter {
    fn apply(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        FirFilter::apply(self, x)
    }
}

pub fn apply_filter<F: Filter + ?Sized>(filter: &F, x: &SampleBuffer) -> Result<SampleBuffer> {
    filter.apply(x)
}
