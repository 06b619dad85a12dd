//! HRTFs and binaural scene rendering.

pub mod hrtf;
pub mod import;
pub mod scene;

pub use hrtf::{
    synth_spherical_hrtf, truncate_ir, HrirPair, HrtfOrigin, HrtfSet, SphericalHeadModel,
    DEFAULT_BRIGHT_SPOT_DB, DEFAULT_TRUNCATION, MATCHED_HEAD_RADIUS,
};
pub use import::{load_hrtf_set, save_hrtf_set};
pub use scene::{render_scene, CiSide, Condition, Scene, Source};
