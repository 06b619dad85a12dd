//! ILD curves, per-band SNR and localization metrics.

pub mod chain;
pub mod ild;
pub mod metrics;
pub mod snr;

pub use chain::{BimodalStage, Chain, MeasurePoint, PreparedChain, Processing};
pub use ild::{broadband_ild, ild_curve, IldCurve};
pub use metrics::{localization_metrics, AngleMetrics, LocalizationMetrics};
pub use snr::{band_snr, third_octave_bands, Band, BandSnrReport};
