use std::cell::RefCell;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::buffer::SampleBuffer;
use crate::dsp::fir::FirFilter;
use crate::error::{Error, Result};

/// Below this many multiply-adds the direct sum is used.
const DIRECT_LIMIT: usize = 1 << 16;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Full linear convolution, length `len(x) + len(ir) - 1`.
pub fn convolve(x: &SampleBuffer, ir: &FirFilter) -> Result<SampleBuffer> {
    if x.sample_rate() != ir.sample_rate() {
        return Err(Error::param(format!(
            "sample rate mismatch: signal {} Hz, impulse response {} Hz",
            x.sample_rate(),
            ir.sample_rate()
        )));
    }
    x.check_finite()?;
    Ok(SampleBuffer::from_parts(
        x.sample_rate(),
        convolve_slices(x.samples(), ir.taps()),
    ))
}

pub(crate) fn convolve_slices(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    if x.len().min(h.len()) <= 8 || x.len() * h.len() <= DIRECT_LIMIT {
        convolve_direct(x, h)
    } else {
        convolve_fft(x, h)
    }
}

/// O(N·M) reference implementation.
pub fn convolve_direct(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let mut y = vec![0.0; x.len() + h.len() - 1];
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (yj, &hj) in y[i..].iter_mut().zip(h) {
            *yj += xi * hj;
        }
    }
    y
}

/// Single-block FFT convolution.
pub fn convolve_fft(x: &[f64], h: &[f64]) -> Vec<f64> {
    if x.is_empty() || h.is_empty() {
        return Vec::new();
    }
    let out_len = x.len() + h.len() - 1;
    let n = out_len.next_power_of_two();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });

    let mut a: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    a.resize(n, Complex64::new(0.0, 0.0));
    let mut b: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    b.resize(n, Complex64::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (p, q) in a.iter_mut().zip(&b) {
        *p *= q;
    }
    inv.process(&mut a);
    let scale = 1.0 / n as f64;
    a.iter().take(out_len).map(|c| c.re * scale).collect()
}
