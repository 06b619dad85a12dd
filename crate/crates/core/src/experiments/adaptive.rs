//! Adaptive SNR track converging on 50% words correct.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdaptiveTrack {
    pub start_snr: f64,
    /// Step size per sentence; the last value repeats.
    pub steps: Vec<f64>,
    pub n_sentences: usize,
}

impl Default for AdaptiveTrack {
    fn default() -> Self {
        Self {
            start_snr: 0.0,
            steps: vec![5.0, 5.0, 3.0, 3.0, 2.0, 2.0, 1.0],
            n_sentences: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackResult {
    /// SNR that would be presented after the final response.
    pub srt: f64,
    /// `(snr, score)` per sentence.
    pub history: Vec<(f64, f64)>,
}

impl AdaptiveTrack {
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::param("adaptive track needs at least one step size"));
        }
        if self.steps.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::param("step sizes must be positive"));
        }
        if self.steps.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::param("step sizes must not increase"));
        }
        if self.n_sentences == 0 {
            return Err(Error::param("adaptive track needs at least one sentence"));
        }
        if !self.start_snr.is_finite() {
            return Err(Error::param("start SNR must be finite"));
        }
        Ok(())
    }

    pub fn step(&self, k: usize) -> f64 {
        self.steps[k.min(self.steps.len() - 1)]
    }

    /// Runs the track with `respond(snr)` returning the fraction of words
    /// correct.
    pub fn run<F: FnMut(f64) -> f64>(&self, mut respond: F) -> Result<TrackResult> {
        self.validate()?;
        let mut snr = self.start_snr;
        let mut history = Vec::with_capacity(self.n_sentences);
        for k in 0..self.n_sentences {
            let score = respond(snr);
            history.push((snr, score));
            snr -= self.step(k) * (score - 0.5) / 0.25;
        }
        Ok(TrackResult { srt: snr, history })
    }
}
