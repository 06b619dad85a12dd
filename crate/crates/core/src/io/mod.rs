pub mod report;
pub mod wav;

pub use wav::{read_mono, read_stereo, write_mono, write_stereo};
