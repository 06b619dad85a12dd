//! HRTF directory import/export.
//!
//! Layout: one mono file per angle and ear named `az{angle}_{ear}.wav`
//! (angle in signed degrees, e.g. `az+45_L.wav`, `az-90_R.wav`, `az0_L.wav`;
//! the `+` is optional) or `az{angle}_{ear}.f32` holding raw little-endian
//! 32-bit floats. An optional `manifest.json`
//!
//! ```json
//! { "sample_rate": 44100, "angles": [-90, -45, 0, 45, 90] }
//! ```
//!
//! overrides the convention: its angle list replaces the required
//! −90..+90 grid and its sample rate is required for raw files and checked
//! against WAV headers.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::buffer::Ear;
use crate::dsp::fir::FirFilter;
use crate::error::{Error, Result};
use crate::io::wav;
use crate::spatial::hrtf::{normalize_angle, signed_angle, HrirPair, HrtfOrigin, HrtfSet};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HrtfManifest {
    pub sample_rate: Option<u32>,
    pub angles: Option<Vec<i32>>,
}

/// −90..+90 in 15° steps.
pub fn frontal_angles() -> Vec<i32> {
    (-6..=6).map(|k| k * 15).collect()
}

fn ear_tag(ear: Ear) -> &'static str {
    match ear {
        Ear::Left => "L",
        Ear::Right => "R",
    }
}

fn candidates(dir: &Path, az: i32, ear: Ear) -> Vec<PathBuf> {
    let mut names = vec![signed_angle(az)];
    if az > 0 {
        names.push(az.to_string());
    }
    let mut out = Vec::new();
    for n in names {
        for ext in ["wav", "f32"] {
            out.push(dir.join(format!("az{n}_{}.{ext}", ear_tag(ear))));
        }
    }
    out
}

fn read_ir(path: &Path, manifest_rate: Option<u32>) -> Result<(u32, Vec<f64>)> {
    if path.extension().is_some_and(|e| e == "f32") {
        let rate = manifest_rate.ok_or_else(|| {
            Error::Config(format!(
                "{}: raw float files need a sample_rate in {MANIFEST}",
                path.display()
            ))
        })?;
        let bytes = fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if bytes.len() % 4 != 0 {
            return Err(Error::Format {
                path: path.to_path_buf(),
                message: "raw float file length is not a multiple of 4 bytes".into(),
            });
        }
        let taps = bytes
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64)
            .collect();
        Ok((rate, taps))
    } else {
        let buf = wav::read_mono(path)?;
        let rate = buf.sample_rate();
        Ok((rate, buf.into_samples()))
    }
}

/// Scans `dir` for every `az*_{L,R}` file and returns the angles present.
fn angles_on_disk(dir: &Path) -> Result<Vec<i32>> {
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut angles = Vec::new();
    for entry in entries.flatten() {
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some(rest) = name.strip_prefix("az") else {
            continue;
        };
        let Some((angle, _)) = rest.split_once('_') else {
            continue;
        };
        if let Ok(v) = angle.trim_start_matches('+').parse::<i32>() {
            if let Ok(v) = normalize_angle(v) {
                angles.push(v);
            }
        }
    }
    angles.sort_unstable();
    angles.dedup();
    Ok(angles)
}

/// Path, sample rate and taps of one file.
type LoadedIr = (PathBuf, u32, Vec<f64>);

/// Loads and validates an HRTF directory.
pub fn load_hrtf_set(dir: &Path) -> Result<HrtfSet> {
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let manifest_path = dir.join(MANIFEST);
    let manifest: Option<HrtfManifest> = if manifest_path.exists() {
        let text = fs::read_to_string(&manifest_path).map_err(|source| Error::Io {
            path: manifest_path.clone(),
            source,
        })?;
        Some(serde_json::from_str(&text).map_err(|e| Error::Format {
            path: manifest_path.clone(),
            message: e.to_string(),
        })?)
    } else {
        None
    };
    let manifest_rate = manifest.as_ref().and_then(|m| m.sample_rate);
    let required = match manifest.as_ref().and_then(|m| m.angles.clone()) {
        Some(list) => list
            .into_iter()
            .map(normalize_angle)
            .collect::<Result<Vec<_>>>()?,
        None => frontal_angles(),
    };
    let mut wanted = required.clone();
    wanted.extend(angles_on_disk(dir)?);
    wanted.sort_unstable();
    wanted.dedup();

    let mut missing = Vec::new();
    let mut found: BTreeMap<i32, [Option<LoadedIr>; 2]> = BTreeMap::new();
    for &az in &wanted {
        let mut slot = [None, None];
        for (i, ear) in [Ear::Left, Ear::Right].into_iter().enumerate() {
            match candidates(dir, az, ear).into_iter().find(|p| p.exists()) {
                Some(path) => {
                    let (rate, taps) = read_ir(&path, manifest_rate)?;
                    slot[i] = Some((path, rate, taps));
                }
                None => missing.push(format!("{}/{ear}", signed_angle(az))),
            }
        }
        found.insert(az, slot);
    }
    if !missing.is_empty() {
        return Err(Error::Config(format!(
            "HRTF directory {} is missing: {}",
            dir.display(),
            missing.join(", ")
        )));
    }

    let mut rate = manifest_rate;
    let mut pairs = BTreeMap::new();
    for (az, slot) in found {
        let [Some(l), Some(r)] = slot else { continue };
        for (path, fs, _) in [&l, &r] {
            match rate {
                None => rate = Some(*fs),
                Some(expected) if expected != *fs => {
                    return Err(Error::Data(format!(
                        "sample-rate mismatch: {} is {fs} Hz, expected {expected} Hz",
                        path.display()
                    )))
                }
                _ => {}
            }
        }
        let fs = rate.unwrap_or(l.1);
        let left = FirFilter::new(fs, l.2)?;
        let right = FirFilter::new(fs, r.2)?;
        pairs.insert(az, HrirPair { left, right });
    }
    let fs =
        rate.ok_or_else(|| Error::Config("HRTF directory holds no impulse responses".into()))?;
    HrtfSet::new(pairs, fs, HrtfOrigin::Imported, false)
}

/// Writes `set` as float WAV files plus a manifest.
pub fn save_hrtf_set(set: &HrtfSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for (az, pair) in set.iter() {
        for ear in [Ear::Left, Ear::Right] {
            let path = dir.join(format!("az{}_{}.wav", signed_angle(az), ear_tag(ear)));
            wav::write_mono(&path, &pair.ear(ear).to_buffer())?;
        }
    }
    let manifest = HrtfManifest {
        sample_rate: Some(set.sample_rate()),
        angles: Some(set.angles()),
    };
    let path = dir.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .map_err(|source| Error::Io { path, source })
}
