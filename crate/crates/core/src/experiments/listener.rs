//! Simulated listener for sentence-in-noise tests.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulatedListener {
    /// SNR with 50% words correct, dB.
    pub srt50: f64,
    /// Slope of the psychometric function at its midpoint, 1/dB.
    pub slope: f64,
    pub words_per_sentence: u64,
}

impl Default for SimulatedListener {
    fn default() -> Self {
        Self {
            srt50: -6.0,
            slope: 0.15,
            words_per_sentence: 5,
        }
    }
}

impl SimulatedListener {
    pub fn validate(&self) -> Result<()> {
        if !(self.slope > 0.0 && self.slope.is_finite()) {
            return Err(Error::param("listener slope must be positive"));
        }
        if self.words_per_sentence == 0 {
            return Err(Error::param("sentences need at least one word"));
        }
        if !self.srt50.is_finite() {
            return Err(Error::param("listener SRT must be finite"));
        }
        Ok(())
    }

    /// Word-correct probability at `snr`.
    pub fn probability(&self, snr: f64) -> f64 {
        1.0 / (1.0 + (-4.0 * self.slope * (snr - self.srt50)).exp())
    }
}

/// Fraction of words correct in one sentence presented at `snr`.
pub fn sentence_score<R: Rng + ?Sized>(listener: &SimulatedListener, snr: f64, rng: &mut R) -> f64 {
    let n = listener.words_per_sentence;
    let p = listener.probability(snr).clamp(0.0, 1.0);
    let correct = Binomial::new(n, p).expect("p in [0, 1]").sample(rng);
    correct as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::signals::rng;

    #[test]
    fn midpoint_and_saturation() {
        let l = SimulatedListener::default();
        assert!((l.probability(l.srt50) - 0.5).abs() < 1e-15);
        let mut r = rng(1);
        let ones = (0..10_000)
            .filter(|_| sentence_score(&l, l.srt50 + 30.0, &mut r) == 1.0)
            .count();
        assert!(ones as f64 / 10_000.0 > 0.999);
    }

    #[test]
    fn slope_is_midpoint_derivative() {
        let l = SimulatedListener::default();
        let h = 1e-5;
        let d = (l.probability(l.srt50 + h) - l.probability(l.srt50 - h)) / (2.0 * h);
        assert!((d - l.slope).abs() < 1e-8);
    }

    #[test]
    fn scores_are_word_fractions() {
        let l = SimulatedListener::default();
        let mut r = rng(2);
        for k in 0..200 {
            let s = sentence_score(&l, -12.0 + k as f64 * 0.06, &mut r);
            assert!((s * 5.0 - (s * 5.0).round()).abs() < 1e-12);
            assert!((0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn rejects_non_positive_slope() {
        let l = SimulatedListener {
            slope: 0.0,
            ..SimulatedListener::default()
        };
        assert!(l.validate().is_err());
    }
}
