//! Processing pipelines applied to rendered binaural signals.

use serde::{Deserialize, Serialize};

use crate::beamformer::{BeamformerParams, HeadShadowEnhancer};
use crate::bimodal::{design_hearing_loss, HearingLossParams, Vocoder, VocoderParams};
use crate::buffer::{BinauralBuffer, Ear};
use crate::dsp::iir::IirFilter;
use crate::error::Result;
use crate::spatial::scene::CiSide;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Processing {
    #[default]
    Natural,
    Enhanced,
}

impl Processing {
    pub const BOTH: [Processing; 2] = [Processing::Natural, Processing::Enhanced];

    pub fn label(self) -> &'static str {
        match self {
            Processing::Natural => "natural",
            Processing::Enhanced => "enhanced",
        }
    }
}

impl std::fmt::Display for Processing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Where signals are measured when the chain includes bimodal simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurePoint {
    PreSimulation,
    #[default]
    PostSimulation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BimodalStage {
    pub ci_side: CiSide,
    #[serde(default)]
    pub vocoder: VocoderParams,
    #[serde(default)]
    pub hearing_loss: HearingLossParams,
}

impl BimodalStage {
    pub fn new(ci_side: CiSide, vocoder: VocoderParams) -> Self {
        Self {
            ci_side,
            vocoder,
            hearing_loss: HearingLossParams::default(),
        }
    }
}

/// Optional head shadow enhancement followed by optional bimodal simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Chain {
    pub processing: Processing,
    pub beamformer: BeamformerParams,
    pub bimodal: Option<BimodalStage>,
    pub measure: MeasurePoint,
}

impl Default for Chain {
    fn default() -> Self {
        Self::natural()
    }
}

impl Chain {
    pub fn natural() -> Self {
        Self {
            processing: Processing::Natural,
            beamformer: BeamformerParams::default(),
            bimodal: None,
            measure: MeasurePoint::PostSimulation,
        }
    }

    pub fn enhanced() -> Self {
        Self {
            processing: Processing::Enhanced,
            ..Self::natural()
        }
    }

    pub fn with_processing(self, processing: Processing) -> Self {
        Self { processing, ..self }
    }

    pub fn with_bimodal(self, stage: BimodalStage) -> Self {
        Self {
            bimodal: Some(stage),
            ..self
        }
    }

    pub fn with_measure(self, measure: MeasurePoint) -> Self {
        Self { measure, ..self }
    }

    pub fn with_vocoder_seed(mut self, seed: u64) -> Self {
        if let Some(stage) = &mut self.bimodal {
            stage.vocoder.seed = seed;
        }
        self
    }

    pub fn label(&self) -> &'static str {
        self.processing.label()
    }

    /// True when both ears are processed identically.
    pub fn is_symmetric(&self) -> bool {
        self.bimodal.is_none() || self.measure == MeasurePoint::PreSimulation
    }

    pub fn prepare(&self, sample_rate: u32) -> Result<PreparedChain> {
        let enhancer = match self.processing {
            Processing::Enhanced => Some(HeadShadowEnhancer::new(self.beamformer, sample_rate)?),
            Processing::Natural => None,
        };
        let bimodal = match (self.bimodal, self.measure) {
            (Some(stage), MeasurePoint::PostSimulation) => Some((
                stage.ci_side,
                Vocoder::new(stage.vocoder, sample_rate)?,
                design_hearing_loss(&stage.hearing_loss, sample_rate)?,
            )),
            _ => None,
        };
        Ok(PreparedChain { enhancer, bimodal })
    }

    pub fn process(&self, x: &BinauralBuffer) -> Result<BinauralBuffer> {
        self.prepare(x.sample_rate())?.process(x)
    }
}

/// A [`Chain`] with its filters designed for one sample rate.
#[derive(Debug, Clone)]
pub struct PreparedChain {
    enhancer: Option<HeadShadowEnhancer>,
    bimodal: Option<(CiSide, Vocoder, IirFilter)>,
}

impl PreparedChain {
    /// The linear part of the chain: enhancement only.
    pub fn front_end(&self, x: &BinauralBuffer) -> Result<BinauralBuffer> {
        match &self.enhancer {
            Some(e) => e.process(x),
            None => Ok(x.clone()),
        }
    }

    /// The signal at the chain's measurement point.
    pub fn process(&self, x: &BinauralBuffer) -> Result<BinauralBuffer> {
        let y = self.front_end(x)?;
        let Some((side, vocoder, hl)) = &self.bimodal else {
            return Ok(y);
        };
        let ci = vocoder.process(y.ear(side.ear()))?;
        let ha = hl.apply(y.ear(side.ha_ear()))?;
        match side.ear() {
            Ear::Left => BinauralBuffer::new(ci, ha),
            Ear::Right => BinauralBuffer::new(ha, ci),
        }
    }
}
