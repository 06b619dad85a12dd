//! CSV and JSON report writers.
//!
//! CSV files are RFC 4180 with a header row; the column names are the field
//! names of the row structs below and do not change between versions. JSON
//! reports wrap a payload in a `meta` block; `meta.timestamp` is omitted
//! when the caller asks for reproducible output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl ReportMeta {
    pub fn new(command: impl Into<String>, seed: u64, with_timestamp: bool) -> Self {
        let timestamp = with_timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            seed,
            timestamp,
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a ReportMeta,
    #[serde(flatten)]
    body: &'a T,
}

pub fn write_json<T: Serialize>(path: &Path, meta: &ReportMeta, body: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &Envelope { meta, body })?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// `angle, band, processing, gain_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectivityRow {
    pub angle: f64,
    pub band: String,
    pub processing: String,
    pub gain_db: f64,
}

/// `angle, natural_ild_db, enhanced_ild_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IldRow {
    pub angle: i32,
    pub natural_ild_db: f64,
    pub enhanced_ild_db: f64,
}

/// `condition, processing, center_hz, snr_left_db, snr_right_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSnrRow {
    pub condition: String,
    pub processing: String,
    pub center_hz: f64,
    pub snr_left_db: f64,
    pub snr_right_db: f64,
}

/// `processing, target, n, mean_response, bias, std, rms_error`; `std` is
/// empty for a single trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizationRow {
    pub processing: String,
    pub target: f64,
    pub n: usize,
    pub mean_response: f64,
    pub bias: f64,
    pub std: Option<f64>,
    pub rms_error: f64,
}

/// `run, condition, processing, metric, value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub run: usize,
    pub condition: String,
    pub processing: String,
    pub metric: String,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_stable_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        write_csv(
            &p,
            &[LocalizationRow {
                processing: "natural".into(),
                target: 15.0,
                n: 1,
                mean_response: 30.0,
                bias: 15.0,
                std: None,
                rms_error: 15.0,
            }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next(),
            Some("processing,target,n,mean_response,bias,std,rms_error")
        );
        assert_eq!(lines.next(), Some("natural,15.0,1,30.0,15.0,,15.0"));
    }

    #[test]
    fn json_timestamp_is_optional() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/r.json");
        let body = serde_json::json!({"value": 1});
        write_json(&p, &ReportMeta::new("t", 3, false), &body).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert_eq!(v["meta"]["seed"], 3);
        assert!(v["meta"].get("timestamp").is_none());
        assert_eq!(v["value"], 1);
        write_json(&p, &ReportMeta::new("t", 3, true), &body).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
        assert!(v["meta"]["timestamp"].is_u64());
    }
}
