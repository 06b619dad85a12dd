//! Signal carriers.

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE: u32 = 44_100;

/// Mono audio at a fixed sample rate.
///
/// Samples are nominally in `[-1, 1]` (dBFS reference) but clipping is not
/// enforced. Construction through [`SampleBuffer::new`] rejects non-finite
/// samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBuffer {
    sample_rate: u32,
    samples: Vec<f64>,
}

impl SampleBuffer {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::param("sample rate must be positive"));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::data(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    /// Builds a buffer from samples already known to be finite.
    pub(crate) fn from_parts(sample_rate: u32, samples: Vec<f64>) -> Self {
        debug_assert!(sample_rate > 0);
        Self {
            sample_rate,
            samples,
        }
    }

    pub fn zeros(sample_rate: u32, len: usize) -> Self {
        Self::from_parts(sample_rate, vec![0.0; len])
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn fs(&self) -> f64 {
        self.sample_rate as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs()
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self::from_parts(
            self.sample_rate,
            self.samples.iter().map(|s| s * gain).collect(),
        )
    }

    /// Applies a gain given in dB.
    pub fn with_gain_db(&self, db: f64) -> Self {
        self.scaled(10f64.powf(db / 20.0))
    }

    /// Truncates or zero-pads to `len` samples.
    pub fn resized(&self, len: usize) -> Self {
        let mut samples = self.samples.clone();
        samples.resize(len, 0.0);
        Self::from_parts(self.sample_rate, samples)
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        match self.samples.iter().position(|s| !s.is_finite()) {
            Some(i) => Err(Error::data(format!("non-finite sample at index {i}"))),
            None => Ok(()),
        }
    }

    /// Sample-wise sum; the shorter operand is zero-extended.
    pub fn add(&self, other: &SampleBuffer) -> Result<Self> {
        if self.sample_rate != other.sample_rate {
            return Err(Error::param(format!(
                "sample rate mismatch: {} vs {}",
                self.sample_rate, other.sample_rate
            )));
        }
        let n = self.len().max(other.len());
        let mut out = vec![0.0; n];
        for (o, s) in out.iter_mut().zip(&self.samples) {
            *o += s;
        }
        for (o, s) in out.iter_mut().zip(&other.samples) {
            *o += s;
        }
        Ok(Self::from_parts(self.sample_rate, out))
    }
}

/// Which side of the head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ear {
    Left,
    Right,
}

impl Ear {
    pub fn opposite(self) -> Ear {
        match self {
            Ear::Left => Ear::Right,
            Ear::Right => Ear::Left,
        }
    }
}

impl std::fmt::Display for Ear {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Ear::Left => "left",
            Ear::Right => "right",
        })
    }
}

/// Left/right pair of equal length and sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct BinauralBuffer {
    left: SampleBuffer,
    right: SampleBuffer,
}

impl BinauralBuffer {
    pub fn new(left: SampleBuffer, right: SampleBuffer) -> Result<Self> {
        if left.sample_rate() != right.sample_rate() {
            return Err(Error::param(format!(
                "left/right sample rate mismatch: {} vs {}",
                left.sample_rate(),
                right.sample_rate()
            )));
        }
        if left.len() != right.len() {
            return Err(Error::param(format!(
                "left/right length mismatch: {} vs {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Self { left, right })
    }

    /// Same signal in both ears.
    pub fn diotic(x: SampleBuffer) -> Self {
        Self {
            left: x.clone(),
            right: x,
        }
    }

    pub fn left(&self) -> &SampleBuffer {
        &self.left
    }

    pub fn right(&self) -> &SampleBuffer {
        &self.right
    }

    pub fn ear(&self, ear: Ear) -> &SampleBuffer {
        match ear {
            Ear::Left => &self.left,
            Ear::Right => &self.right,
        }
    }

    pub fn sample_rate(&self) -> u32 {
        self.left.sample_rate()
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn into_parts(self) -> (SampleBuffer, SampleBuffer) {
        (self.left, self.right)
    }

    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn scaled(&self, gain: f64) -> Self {
        Self {
            left: self.left.scaled(gain),
            right: self.right.scaled(gain),
        }
    }

    pub fn with_gain_db(&self, db: f64) -> Self {
        self.scaled(10f64.powf(db / 20.0))
    }

    /// Applies `f` to both channels.
    pub fn map<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&SampleBuffer) -> Result<SampleBuffer>,
    {
        Self::new(f(&self.left)?, f(&self.right)?)
    }
}
