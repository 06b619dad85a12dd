//! Butterworth IIR design as cascaded second-order sections.
//!
//! Analog prototype poles sit on a circle of radius `wc` (pre-warped
//! cutoff); each conjugate pair becomes one biquad, an odd order adds one
//! first-order section. Sections are mapped to the z-plane with the bilinear
//! transform and run in transposed direct form II.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::buffer::SampleBuffer;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 8;

/// One second-order section `b(z)/a(z)` with `a0 = 1`.
///
/// A first-order section stores `b2 = a2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 3],
}

impl Biquad {
    /// Bilinear transform of `(n0 + n1 s + n2 s²) / (d0 + d1 s + d2 s²)`.
    fn from_analog(num: [f64; 3], den: [f64; 3], fs: f64) -> Self {
        let k = 2.0 * fs;
        let map = |c: [f64; 3]| {
            let [c0, c1, c2] = c;
            [
                c0 + c1 * k + c2 * k * k,
                2.0 * c0 - 2.0 * c2 * k * k,
                c0 - c1 * k + c2 * k * k,
            ]
        };
        let (bn, an) = if num[2] == 0.0 && den[2] == 0.0 {
            // First order: multiply through by (1 + z^-1) only.
            let [n0, n1, _] = num;
            let [d0, d1, _] = den;
            (
                [n0 + n1 * k, n0 - n1 * k, 0.0],
                [d0 + d1 * k, d0 - d1 * k, 0.0],
            )
        } else {
            (map(num), map(den))
        };
        let a0 = an[0];
        Self {
            b: [bn[0] / a0, bn[1] / a0, bn[2] / a0],
            a: [1.0, an[1] / a0, an[2] / a0],
        }
    }

    pub fn is_first_order(&self) -> bool {
        self.a[2] == 0.0 && self.b[2] == 0.0
    }

    pub fn response(&self, omega: f64) -> Complex64 {
        let z1 = Complex64::from_polar(1.0, -omega);
        let z2 = z1 * z1;
        let num = self.b[0] + z1 * self.b[1] + z2 * self.b[2];
        let den = self.a[0] + z1 * self.a[1] + z2 * self.a[2];
        num / den
    }

    /// Pole magnitudes of this section.
    pub fn pole_radii(&self) -> Vec<f64> {
        let [_, a1, a2] = self.a;
        if self.is_first_order() {
            return vec![a1.abs()];
        }
        let disc = a1 * a1 - 4.0 * a2;
        if disc >= 0.0 {
            let r = disc.sqrt();
            vec![((-a1 + r) / 2.0).abs(), ((-a1 - r) / 2.0).abs()]
        } else {
            // complex pair, |p|² = a2
            let m = a2.sqrt();
            vec![m, m]
        }
    }

    fn run(&self, x: &mut [f64]) {
        let [b0, b1, b2] = self.b;
        let [_, a1, a2] = self.a;
        let (mut z1, mut z2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + z1;
            z1 = b1 * input - a1 * y + z2;
            z2 = b2 * input - a2 * y;
            *v = y;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IirKind {
    Lowpass { cutoff: f64 },
    Highpass { cutoff: f64 },
    Bandpass { low: f64, high: f64 },
}

/// Cascade of second-order sections (at most one first-order).
#[derive(Debug, Clone, PartialEq)]
pub struct IirFilter {
    sections: Vec<Biquad>,
    order: usize,
    kind: IirKind,
    sample_rate: u32,
}

fn check_edge(f: f64, fs: f64, what: &str) -> Result<()> {
    if !(f > 0.0 && f < fs / 2.0) || !f.is_finite() {
        return Err(Error::param(format!(
            "{what} {f} Hz must lie in (0, {}) Hz",
            fs / 2.0
        )));
    }
    Ok(())
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::param(format!(
            "filter order {order} outside 1..={MAX_ORDER}"
        )));
    }
    Ok(())
}

fn prewarp(f: f64, fs: f64) -> f64 {
    2.0 * fs * (PI * f / fs).tan()
}

/// Unit-radius Butterworth poles in the left half plane, upper half first.
fn prototype_poles(order: usize) -> Vec<Complex64> {
    (0..order)
        .map(|k| {
            let phi = PI * (2 * k + order + 1) as f64 / (2 * order) as f64;
            Complex64::from_polar(1.0, phi)
        })
        .collect()
}

/// Analog denominators `[d0, d1, d2]` of the prototype scaled to `wc`.
fn lowpass_denominators(order: usize, wc: f64) -> Vec<[f64; 3]> {
    let poles = prototype_poles(order);
    let mut dens = Vec::with_capacity(order.div_ceil(2));
    for p in poles.iter().take(order / 2) {
        dens.push([wc * wc, -2.0 * p.re * wc, 1.0]);
    }
    if order % 2 == 1 {
        dens.push([wc, 1.0, 0.0]);
    }
    dens
}

/// Low-pass Butterworth of the given order, unity gain at DC.
pub fn design_butterworth_lowpass(
    order: usize,
    cutoff: f64,
    sample_rate: u32,
) -> Result<IirFilter> {
    check_order(order)?;
    let fs = sample_rate as f64;
    check_edge(cutoff, fs, "cutoff")?;
    let wc = prewarp(cutoff, fs);
    let sections = lowpass_denominators(order, wc)
        .into_iter()
        .map(|den| {
            let num = if den[2] == 0.0 {
                [wc, 0.0, 0.0]
            } else {
                [wc * wc, 0.0, 0.0]
            };
            Biquad::from_analog(num, den, fs)
        })
        .collect();
    Ok(IirFilter {
        sections,
        order,
        kind: IirKind::Lowpass { cutoff },
        sample_rate,
    })
}

/// High-pass Butterworth of the given order, unity gain at Nyquist.
pub fn design_butterworth_highpass(
    order: usize,
    cutoff: f64,
    sample_rate: u32,
) -> Result<IirFilter> {
    check_order(order)?;
    let fs = sample_rate as f64;
    check_edge(cutoff, fs, "cutoff")?;
    let wc = prewarp(cutoff, fs);
    let sections = lowpass_denominators(order, wc)
        .into_iter()
        .map(|den| {
            let num = if den[2] == 0.0 {
                [0.0, 1.0, 0.0]
            } else {
                [0.0, 0.0, 1.0]
            };
            Biquad::from_analog(num, den, fs)
        })
        .collect();
    Ok(IirFilter {
        sections,
        order,
        kind: IirKind::Highpass { cutoff },
        sample_rate,
    })
}

/// Band-pass Butterworth; `order` is the band-pass order (even), i.e. twice
/// the low-pass prototype order. Unity gain at the geometric centre.
pub fn design_butterworth_bandpass(
    order: usize,
    low: f64,
    high: f64,
    sample_rate: u32,
) -> Result<IirFilter> {
    if !order.is_multiple_of(2) || order == 0 || order > 2 * MAX_ORDER {
        return Err(Error::param(format!(
            "band-pass order {order} must be even and in 2..={}",
            2 * MAX_ORDER
        )));
    }
    let fs = sample_rate as f64;
    check_edge(low, fs, "lower edge")?;
    check_edge(high, fs, "upper edge")?;
    if low >= high {
        return Err(Error::param(format!(
            "band edges must increase: {low} >= {high}"
        )));
    }
    let wl = prewarp(low, fs);
    let wh = prewarp(high, fs);
    let bw = wh - wl;
    let w0sq = wl * wh;

    // s -> (s² + w0²) / (s·bw): every prototype pole q yields the two roots of
    // s² - q·bw·s + w0² = 0.
    let mut poles = Vec::with_capacity(order);
    for q in prototype_poles(order / 2) {
        let qb = q * bw;
        let disc = (qb * qb - 4.0 * w0sq).sqrt();
        poles.push((qb + disc) / 2.0);
        poles.push((qb - disc) / 2.0);
    }
    let scale = w0sq.sqrt();
    let mut upper: Vec<Complex64> = poles
        .iter()
        .copied()
        .filter(|p| p.im > 1e-9 * scale)
        .collect();
    let mut real: Vec<f64> = poles
        .iter()
        .filter(|p| p.im.abs() <= 1e-9 * scale)
        .map(|p| p.re)
        .collect();
    upper.sort_by(|a, b| a.im.total_cmp(&b.im));
    real.sort_by(f64::total_cmp);

    let mut dens: Vec<[f64; 3]> = upper
        .iter()
        .map(|p| [p.norm_sqr(), -2.0 * p.re, 1.0])
        .collect();
    for pair in real.chunks(2) {
        dens.push([pair[0] * pair[1], -(pair[0] + pair[1]), 1.0]);
    }
    let sections = dens
        .into_iter()
        .map(|den| Biquad::from_analog([0.0, bw, 0.0], den, fs))
        .collect();
    Ok(IirFilter {
        sections,
        order,
        kind: IirKind::Bandpass { low, high },
        sample_rate,
    })
}

impl IirFilter {
    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn kind(&self) -> IirKind {
        self.kind
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Complex response at `freq` Hz.
    pub fn response(&self, freq: f64) -> Complex64 {
        let omega = 2.0 * PI * freq / self.sample_rate as f64;
        self.sections
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s.response(omega))
    }

    pub fn magnitude_db(&self, freq: f64) -> f64 {
        20.0 * self.response(freq).norm().log10()
    }

    pub fn pole_radii(&self) -> Vec<f64> {
        self.sections.iter().flat_map(|s| s.pole_radii()).collect()
    }

    pub fn is_stable(&self) -> bool {
        self.pole_radii().iter().all(|&r| r < 1.0 - 1e-6)
    }

    /// Filters in place; state starts at rest.
    pub fn run_in_place(&self, x: &mut [f64]) {
        for s in &self.sections {
            s.run(x);
        }
    }

    pub fn apply(&self, x: &SampleBuffer) -> Result<SampleBuffer> {
        if x.sample_rate() != self.sample_rate {
            return Err(Error::param(format!(
                "filter designed for {} Hz applied to {} Hz signal",
                self.sample_rate,
                x.sample_rate()
            )));
        }
        x.check_finite()?;
        let mut y = x.samples().to_vec();
        self.run_in_place(&mut y);
        Ok(SampleBuffer::from_parts(x.sample_rate(), y))
    }
}
