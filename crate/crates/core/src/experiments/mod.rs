//! Simulated localization and speech-in-noise experiments.

pub mod adaptive;
pub mod effective;
pub mod listener;
pub mod localization;
pub mod observer;
pub mod srt;

pub use adaptive::{AdaptiveTrack, TrackResult};
pub use effective::{default_weights, effective_snr, EffectiveSnr};
pub use listener::{sentence_score, SimulatedListener};
pub use localization::{
    frontal_grid, run_localization_experiment, LocalizationConfig, LocalizationResult,
    LocalizationTrial,
};
pub use observer::ideal_observer_localize;
pub use srt::{
    condition_scenes, condition_snr, run_adaptive_srt, run_srt_experiment, ConditionSnr, SrtConfig,
    SrtResult, SrtRun, SrtSummary,
};
