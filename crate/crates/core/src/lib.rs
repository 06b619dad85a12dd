//! Low-frequency head shadow enhancement for bimodal cochlear-implant
//! listeners, with the simulation and evaluation tooling around it.
//!
//! All audio is `f64`. Angles are degrees, positive to the right, 0° in
//! front. ILDs are right-ear level minus left-ear level.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod beamformer;
pub mod bimodal;
pub mod buffer;
pub mod dsp;
pub mod error;
pub mod experiments;
pub mod io;
pub mod presets;
pub mod spatial;

/// Digital level used for a 65 dBA presentation.
pub const PRESENTATION_LEVEL_DBFS: f64 = -25.0;

pub use beamformer::{head_shadow_enhance, BeamformerParams, HeadShadowEnhancer};
pub use bimodal::{
    hearing_loss_filter, simulate_bimodal, vocode, HearingLossParams, VocoderParams,
};
pub use buffer::{BinauralBuffer, Ear, SampleBuffer};
pub use error::{Error, Result};
pub use spatial::{CiSide, Condition, HrtfSet, Scene, Source};
