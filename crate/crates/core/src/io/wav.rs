//! RIFF WAV I/O. Writes 32-bit float; reads float32 and int16 (scaled by
//! 1/32768).

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use crate::buffer::{BinauralBuffer, SampleBuffer};
use crate::error::{Error, Result};

fn format_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Reads all channels, de-interleaved.
pub fn read_channels(path: &Path) -> Result<(u32, Vec<Vec<f64>>)> {
    let mut reader = WavReader::open(path).map_err(|e| match e {
        hound::Error::IoError(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => format_err(path, other),
    })?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, e))?,
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, e))?,
        (fmt, bits) => {
            return Err(format_err(
                path,
                format!("unsupported sample format {fmt:?} {bits}-bit (need float32 or int16)"),
            ))
        }
    };
    let mut out = vec![Vec::with_capacity(interleaved.len() / channels.max(1)); channels];
    for frame in interleaved.chunks(channels) {
        for (c, v) in frame.iter().enumerate() {
            out[c].push(*v);
        }
    }
    Ok((spec.sample_rate, out))
}

pub fn read_mono(path: &Path) -> Result<SampleBuffer> {
    let (fs, mut chans) = read_channels(path)?;
    if chans.len() != 1 {
        return Err(format_err(
            path,
            format!("expected a mono file, found {} channels", chans.len()),
        ));
    }
    SampleBuffer::new(fs, chans.remove(0))
}

pub fn read_stereo(path: &Path) -> Result<BinauralBuffer> {
    let (fs, mut chans) = read_channels(path)?;
    if chans.len() != 2 {
        return Err(format_err(
            path,
            format!("expected a stereo file, found {} channels", chans.len()),
        ));
    }
    let right = chans.pop().unwrap_or_default();
    let left = chans.pop().unwrap_or_default();
    BinauralBuffer::new(SampleBuffer::new(fs, left)?, SampleBuffer::new(fs, right)?)
}

fn write_frames(path: &Path, sample_rate: u32, channels: &[&[f64]]) -> Result<()> {
    let spec = WavSpec {
        channels: channels.len() as u16,
        sample_rate,
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let mut writer = WavWriter::create(path, spec).map_err(|e| format_err(path, e))?;
    let len = channels.iter().map(|c| c.len()).max().unwrap_or(0);
    for i in 0..len {
        for c in channels {
            let v = c.get(i).copied().unwrap_or(0.0) as f32;
            writer.write_sample(v).map_err(|e| format_err(path, e))?;
        }
    }
    writer.finalize().map_err(|e| format_err(path, e))
}

pub fn write_mono(path: &Path, x: &SampleBuffer) -> Result<()> {
    write_frames(path, x.sample_rate(), &[x.samples()])
}

pub fn write_stereo(path: &Path, x: &BinauralBuffer) -> Result<()> {
    write_frames(
        path,
        x.sample_rate(),
        &[x.left().samples(), x.right().samples()],
    )
}
