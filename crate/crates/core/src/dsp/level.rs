use crate::buffer::SampleBuffer;

/// Mean square of the samples; 0 for an empty buffer.
pub fn mean_square(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.iter().map(|s| s * s).sum::<f64>() / x.len() as f64
}

/// RMS level in dB re digital full scale (a constant 1.0 reads 0 dBFS).
///
/// Empty and all-zero buffers return `f64::NEG_INFINITY`.
pub fn rms_level_db(x: &SampleBuffer) -> f64 {
    power_db(mean_square(x.samples()))
}

pub fn power_db(power: f64) -> f64 {
    if power > 0.0 {
        10.0 * power.log10()
    } else {
        f64::NEG_INFINITY
    }
}

pub fn db_to_gain(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}
