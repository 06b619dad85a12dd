//! Interaural level differences.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::chain::Chain;
use crate::buffer::{BinauralBuffer, SampleBuffer};
use crate::dsp::level::rms_level_db;
use crate::error::{Error, Result};
use crate::spatial::hrtf::{signed_angle, HrtfSet};
use crate::spatial::scene::{render_scene, Scene};

/// Right-ear level minus left-ear level, dB. A silent channel gives an
/// infinite (or NaN) result; [`ild_curve`] rejects those.
pub fn broadband_ild(x: &BinauralBuffer) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::param("ILD of an empty signal"));
    }
    Ok(rms_level_db(x.right()) - rms_level_db(x.left()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IldCurve {
    pub angles: Vec<i32>,
    pub ild: Vec<f64>,
    pub processing: String,
    pub stimulus: String,
}

impl IldCurve {
    pub fn new(
        angles: Vec<i32>,
        ild: Vec<f64>,
        processing: impl Into<String>,
        stimulus: impl Into<String>,
    ) -> Result<Self> {
        if angles.len() != ild.len() {
            return Err(Error::param(format!(
                "{} angles but {} ILD values",
                angles.len(),
                ild.len()
            )));
        }
        if angles.is_empty() {
            return Err(Error::param("empty ILD curve"));
        }
        Ok(Self {
            angles,
            ild,
            processing: processing.into(),
            stimulus: stimulus.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn at(&self, angle: i32) -> Option<f64> {
        self.angles
            .iter()
            .position(|&a| a == angle)
            .map(|i| self.ild[i])
    }

    /// Strictly increasing in angle order.
    pub fn is_strictly_increasing(&self) -> bool {
        let mut pts: Vec<(i32, f64)> = self
            .angles
            .iter()
            .copied()
            .zip(self.ild.iter().copied())
            .collect();
        pts.sort_by_key(|p| p.0);
        pts.windows(2).all(|w| w[1].1 > w[0].1)
    }

    /// Max minus min ILD.
    pub fn range(&self) -> f64 {
        let max = self.ild.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.ild.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }
}

/// Renders `stimulus` from each angle, runs it through `chain` and measures
/// the broadband ILD.
pub fn ild_curve(
    stimulus: &SampleBuffer,
    hrtfs: &HrtfSet,
    chain: &Chain,
    angles: &[i32],
) -> Result<IldCurve> {
    let prepared = chain.prepare(hrtfs.sample_rate())?;
    let ild = angles
        .par_iter()
        .map(|&az| {
            let x = render_scene(&Scene::single("ild", az, stimulus.clone()), hrtfs)?;
            let ild = broadband_ild(&prepared.process(&x)?)?;
            if !ild.is_finite() {
                return Err(Error::data(format!(
                    "ILD at {} is not finite (silent channel)",
                    signed_angle(az)
                )));
            }
            Ok(ild)
        })
        .collect::<Result<Vec<_>>>()?;
    IldCurve::new(angles.to_vec(), ild, chain.label(), "stimulus")
}
