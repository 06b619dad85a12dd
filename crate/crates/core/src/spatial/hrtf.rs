//! Head-related impulse responses.
//!
//! The synthetic set is a rigid-sphere approximation. For each ear:
//!
//! * a pure delay from the Woodworth model. With `l` the lateral angle of the
//!   source toward that ear (radians, `[-π/2, π/2]`), the near ear
//!   (`l >= 0`) is delayed by `(a/c)(1 - sin l)` and the far ear by
//!   `(a/c)(1 + |l|)`, so the interaural delay is `(a/c)(sin|l| + |l|)`;
//! * a first-order shelving head-shadow filter
//!   `H(s) = (α s + β) / (s + β)`, `β = 2c/a`, unity at DC and `α` at high
//!   frequencies, mapped with the bilinear transform. With `φ` the angle
//!   between the source and the ear axis (0° = straight at the ear),
//!   `α(φ) = (1 + α_min/2) + (1 - α_min/2)·cos(π·φ/θ_min)`, which runs from
//!   2 (+6 dB) at φ = 0 to `α_min` at φ = θ_min;
//! * the shadow filter's DC group delay `(1 - α)/β` is subtracted from the
//!   pure delay, so the low-frequency ITD equals the Woodworth value;
//! * a common base latency keeps every delay causal with room for the
//!   interpolation kernel.
//!
//! The optional bright-spot emulation multiplies `α` by a gain that ramps in
//! linearly (in dB) for `φ` between 165° and 180°, i.e. for sources beyond
//! ±75° on the far side, reproducing the rise of far-ear level that makes
//! natural ILDs non-monotonic near ±90°.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::buffer::Ear;
use crate::dsp::delay::delay_slice;
use crate::dsp::fir::FirFilter;
use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: f64 = 0.002;

/// Woodworth ear-to-ear path equal to the 20 cm microphone spacing:
/// `0.2 / (1 + π/2)`.
pub const MATCHED_HEAD_RADIUS: f64 = 0.2 / (1.0 + PI / 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SphericalHeadModel {
    pub head_radius: f64,
    pub speed_of_sound: f64,
    /// High-frequency shadow gain (linear) at `theta_min`.
    pub alpha_min: f64,
    /// Incidence angle (degrees) of maximum shadow.
    pub theta_min: f64,
    /// Far-ear high-frequency lift at 180° incidence, dB; `None` disables it.
    pub bright_spot_db: Option<f64>,
    pub ir_len: usize,
    pub base_latency: usize,
}

impl Default for SphericalHeadModel {
    fn default() -> Self {
        Self {
            head_radius: MATCHED_HEAD_RADIUS,
            speed_of_sound: 340.0,
            alpha_min: 0.1,
            theta_min: 180.0,
            bright_spot_db: None,
            ir_len: 256,
            base_latency: 32,
        }
    }
}

/// Default lift used when bright-spot emulation is switched on.
pub const DEFAULT_BRIGHT_SPOT_DB: f64 = 10.0;

/// Wraps degrees into `[-180, 180)`.
pub fn wrap_degrees(deg: f64) -> f64 {
    let w = (deg + 180.0).rem_euclid(360.0) - 180.0;
    if w >= 180.0 {
        w - 360.0
    } else {
        w
    }
}

fn ear_axis(ear: Ear) -> f64 {
    match ear {
        Ear::Left => -90.0,
        Ear::Right => 90.0,
    }
}

impl SphericalHeadModel {
    pub fn with_bright_spot(mut self, db: f64) -> Self {
        self.bright_spot_db = Some(db);
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.head_radius > 0.0) {
            return Err(Error::param("head radius must be positive"));
        }
        if !(self.speed_of_sound > 0.0) {
            return Err(Error::param("speed of sound must be positive"));
        }
        if !(self.alpha_min > 0.0 && self.alpha_min <= 1.0) {
            return Err(Error::param("alpha_min must lie in (0, 1]"));
        }
        if !(self.theta_min > 90.0 && self.theta_min <= 180.0) {
            return Err(Error::param("theta_min must lie in (90, 180]"));
        }
        if self.ir_len == 0 {
            return Err(Error::param("IR length must be positive"));
        }
        Ok(())
    }

    /// Woodworth delay component for `ear`, seconds (without base latency).
    pub fn woodworth_delay(&self, azimuth: f64, ear: Ear) -> f64 {
        let az = azimuth.to_radians();
        let toward = if ear == Ear::Right { 1.0 } else { -1.0 };
        let lateral = az.sin().asin() * toward;
        let l = lateral.abs();
        let a_c = self.head_radius / self.speed_of_sound;
        if lateral >= 0.0 {
            a_c * (1.0 - l.sin())
        } else {
            a_c * (1.0 + l)
        }
    }

    /// Interaural delay (far minus near) from the Woodworth model, seconds.
    pub fn woodworth_itd(&self, azimuth: f64) -> f64 {
        self.woodworth_delay(azimuth, Ear::Left) - self.woodworth_delay(azimuth, Ear::Right)
    }

    /// High-frequency shadow gain `α` for a source at `azimuth` seen from `ear`.
    pub fn shadow_alpha(&self, azimuth: f64, ear: Ear) -> f64 {
        let incidence = wrap_degrees(azimuth - ear_axis(ear)).abs();
        let am = self.alpha_min;
        let mut alpha =
            (1.0 + am / 2.0) + (1.0 - am / 2.0) * (PI * incidence / self.theta_min).cos();
        if let Some(db) = self.bright_spot_db {
            let ramp = ((incidence - 165.0) / 15.0).clamp(0.0, 1.0);
            alpha *= 10f64.powf(db * ramp / 20.0);
        }
        alpha
    }

    /// First-order shelf `(b0 + b1 z⁻¹) / (1 + a1 z⁻¹)` and its DC group
    /// delay in samples.
    fn shadow_section(&self, alpha: f64, fs: f64) -> ([f64; 2], f64, f64) {
        let beta = 2.0 * self.speed_of_sound / self.head_radius;
        let k = 2.0 * fs;
        let a0 = k + beta;
        let b = [(alpha * k + beta) / a0, (beta - alpha * k) / a0];
        let a1 = (beta - k) / a0;
        let gd = b[1] / (b[0] + b[1]) - a1 / (1.0 + a1);
        (b, a1, gd)
    }

    /// Impulse response for one ear.
    pub fn ear_ir(&self, azimuth: f64, ear: Ear, sample_rate: u32) -> Result<FirFilter> {
        self.validate()?;
        let fs = sample_rate as f64;
        let alpha = self.shadow_alpha(azimuth, ear);
        let (b, a1, gd) = self.shadow_section(alpha, fs);
        let delay = self.base_latency as f64 + self.woodworth_delay(azimuth, ear) * fs - gd;
        if delay < 0.0 {
            return Err(Error::param(
                "base latency too small for the requested head model",
            ));
        }
        let mut impulse = vec![0.0; self.ir_len];
        impulse[0] = 1.0;
        let mut ir = delay_slice(&impulse, delay);
        let mut x1 = 0.0;
        let mut y1 = 0.0;
        for v in ir.iter_mut() {
            let x = *v;
            let y = b[0] * x + b[1] * x1 - a1 * y1;
            x1 = x;
            y1 = y;
            *v = y;
        }
        FirFilter::new(sample_rate, ir)
    }

    /// `(left, right)` pair. The left ear is computed as the right ear for
    /// the mirrored azimuth, so the set is exactly symmetric.
    pub fn pair(&self, azimuth: f64, sample_rate: u32) -> Result<HrirPair> {
        let right = self.ear_ir(azimuth, Ear::Right, sample_rate)?;
        let left = self.ear_ir(wrap_degrees(-azimuth), Ear::Right, sample_rate)?;
        Ok(HrirPair { left, right })
    }

    /// Synthetic set on a regular azimuth grid.
    pub fn build_set(&self, angles: &[i32], sample_rate: u32) -> Result<HrtfSet> {
        let mut pairs = BTreeMap::new();
        for &az in angles {
            let key = normalize_angle(az)?;
            pairs.insert(key, self.pair(key as f64, sample_rate)?);
        }
        HrtfSet::new(pairs, sample_rate, HrtfOrigin::Synthetic, false)
    }

    /// Full circle in 15° steps (−180..165).
    pub fn full_circle(&self, sample_rate: u32) -> Result<HrtfSet> {
        let angles: Vec<i32> = (-12..12).map(|k| k * 15).collect();
        self.build_set(&angles, sample_rate)
    }
}

/// Synthetic `(left_ir, right_ir)` for one azimuth with the default shadow
/// model and the given geometry.
pub fn synth_spherical_hrtf(
    azimuth: f64,
    sample_rate: u32,
    head_radius: f64,
    speed_of_sound: f64,
) -> Result<(FirFilter, FirFilter)> {
    if !(-180.0..180.0).contains(&azimuth) {
        return Err(Error::param(format!(
            "azimuth {azimuth} outside [-180, 180)"
        )));
    }
    let model = SphericalHeadModel {
        head_radius,
        speed_of_sound,
        ..Default::default()
    };
    let pair = model.pair(azimuth, sample_rate)?;
    Ok((pair.left, pair.right))
}

#[derive(Debug, Clone, PartialEq)]
pub struct HrirPair {
    pub left: FirFilter,
    pub right: FirFilter,
}

impl HrirPair {
    pub fn ear(&self, ear: Ear) -> &FirFilter {
        match ear {
            Ear::Left => &self.left,
            Ear::Right => &self.right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HrtfOrigin {
    Synthetic,
    Imported,
}

/// Azimuth-indexed impulse-response pairs, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HrtfSet {
    pairs: BTreeMap<i32, HrirPair>,
    sample_rate: u32,
    origin: HrtfOrigin,
    truncated: bool,
}

/// Maps an integer azimuth to `[-180, 180)`; it must be a multiple of 15.
pub fn normalize_angle(az: i32) -> Result<i32> {
    if az % 15 != 0 {
        return Err(Error::param(format!(
            "azimuth {az} is not a multiple of 15 degrees"
        )));
    }
    Ok((az + 180).rem_euclid(360) - 180)
}

/// Formats an azimuth the way errors and file names show it (`+45`, `-90`, `0`).
pub fn signed_angle(az: i32) -> String {
    if az > 0 {
        format!("+{az}")
    } else {
        az.to_string()
    }
}

impl HrtfSet {
    pub fn new(
        pairs: BTreeMap<i32, HrirPair>,
        sample_rate: u32,
        origin: HrtfOrigin,
        truncated: bool,
    ) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::param("HRTF set is empty"));
        }
        for (az, p) in &pairs {
            if p.left.sample_rate() != sample_rate || p.right.sample_rate() != sample_rate {
                return Err(Error::data(format!(
                    "impulse response at {} does not match set sample rate {sample_rate}",
                    signed_angle(*az)
                )));
            }
        }
        Ok(Self {
            pairs,
            sample_rate,
            origin,
            truncated,
        })
    }

    /// Bundled synthetic set: default head model, full circle.
    pub fn synthetic(sample_rate: u32) -> Result<Self> {
        SphericalHeadModel::default().full_circle(sample_rate)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn origin(&self) -> HrtfOrigin {
        self.origin
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn angles(&self) -> Vec<i32> {
        self.pairs.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, az: i32) -> bool {
        normalize_angle(az)
            .map(|a| self.pairs.contains_key(&a))
            .unwrap_or(false)
    }

    pub fn get(&self, az: i32) -> Result<&HrirPair> {
        let key = normalize_angle(az)?;
        self.pairs.get(&key).ok_or_else(|| {
            Error::param(format!(
                "HRTF set has no entry for azimuth {}",
                signed_angle(az)
            ))
        })
    }

    pub fn max_ir_len(&self) -> usize {
        self.pairs
            .values()
            .map(|p| p.left.len().max(p.right.len()))
            .max()
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &HrirPair)> {
        self.pairs.iter().map(|(k, v)| (*k, v))
    }

    /// Every IR cut `window` seconds after its peak.
    pub fn truncated(&self, window: f64) -> Result<Self> {
        let mut pairs = BTreeMap::new();
        for (az, p) in &self.pairs {
            pairs.insert(
                *az,
                HrirPair {
                    left: truncate_ir(&p.left, window)?,
                    right: truncate_ir(&p.right, window)?,
                },
            );
        }
        Self::new(pairs, self.sample_rate, self.origin, true)
    }
}

/// Drops everything later than `window` seconds after the largest tap.
///
/// Taps before the peak are kept. An IR that already ends within the window
/// is returned unchanged.
pub fn truncate_ir(ir: &FirFilter, window: f64) -> Result<FirFilter> {
    if !(window >= 0.0) {
        return Err(Error::param("truncation window must be >= 0"));
    }
    let taps = ir.taps();
    let (peak, max) = taps
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |(bi, bv), (i, &v)| {
            if v.abs() > bv {
                (i, v.abs())
            } else {
                (bi, bv)
            }
        });
    if max == 0.0 {
        return Err(Error::data("cannot truncate an all-zero impulse response"));
    }
    let end = peak + (window * ir.sample_rate() as f64).round() as usize;
    if end + 1 >= taps.len() {
        return Ok(ir.clone());
    }
    FirFilter::new(ir.sample_rate(), taps[..=end].to_vec())
}
