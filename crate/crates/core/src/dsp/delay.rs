//! Fractional delay.
//!
//! Integral delays are a plain shift. Non-integral delays use a
//! Blackman-windowed sinc interpolator centred on the requested delay with
//! up to [`HALF_WIDTH`] taps on each side, normalised to unity DC gain. The
//! window is kept symmetric about the delay, so delays shorter than
//! `HALF_WIDTH` samples get a shorter (less accurate) kernel. At 44.1 kHz and
//! delays of 15 samples or more the phase-delay error below 1500 Hz is far
//! inside 1/(8·fs).
//!
//! Output length always equals input length; samples shifted past the end
//! are dropped.

use crate::buffer::SampleBuffer;
use crate::dsp::convolve::convolve_slices;
use crate::dsp::fir::{blackman, sinc};
use crate::error::{Error, Result};

pub const HALF_WIDTH: usize = 16;

/// Delays closer than this to an integer count as integral.
const INTEGER_TOL: f64 = 1e-9;

/// Delay kernel for `delay` samples: `(first_tap_index, taps)`.
pub(crate) fn delay_kernel(delay: f64) -> (usize, Vec<f64>) {
    let whole = delay.floor();
    let frac = delay - whole;
    let whole = whole as usize;
    if frac < INTEGER_TOL || 1.0 - frac < INTEGER_TOL {
        return (delay.round() as usize, vec![1.0]);
    }
    let half = HALF_WIDTH.min(whole + 1);
    let first = whole + 1 - half;
    let span = 2.0 * half as f64;
    let mut taps: Vec<f64> = (0..2 * half)
        .map(|i| {
            let k = (first + i) as f64;
            let t = k - delay;
            // window centred on the delay, zero at ±half
            sinc(t) * blackman((t + half as f64) / span)
        })
        .collect();
    let dc: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= dc);
    (first, taps)
}

pub(crate) fn delay_slice(x: &[f64], delay_samples: f64) -> Vec<f64> {
    let n = x.len();
    let (first, taps) = delay_kernel(delay_samples);
    let mut y = vec![0.0; n];
    if first >= n {
        return y;
    }
    if taps.len() == 1 {
        y[first..].copy_from_slice(&x[..n - first]);
        return y;
    }
    let conv = convolve_slices(&x[..n - first], &taps);
    y[first..].copy_from_slice(&conv[..n - first]);
    y
}

/// Delays `x` by `delay` seconds.
pub fn fractional_delay(x: &SampleBuffer, delay: f64) -> Result<SampleBuffer> {
    if !(delay >= 0.0) || !delay.is_finite() {
        return Err(Error::param(format!("delay must be >= 0 s, got {delay}")));
    }
    x.check_finite()?;
    let d = delay * x.fs();
    Ok(SampleBuffer::from_parts(
        x.sample_rate(),
        delay_slice(x.samples(), d),
    ))
}
