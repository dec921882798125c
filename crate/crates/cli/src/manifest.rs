//! Run manifests: every sweep output is accompanied by a JSON document
//! recording the resolved parameters, input/output digests, calibration
//! residuals, and harness metadata, so published CSVs are traceable to
//! exact inputs.

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use wosa_core::explorer::{CalibrationReport, SweepMeta};

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub timestamp_unix_s: u64,
    pub timestamp_utc: String,
    pub parameters: serde_json::Value,
    pub input_digests: Vec<FileDigest>,
    pub output_digest: FileDigest,
    pub harness: SweepMeta,
    pub calibration: CalibrationReport,
}

impl RunManifest {
    pub fn new(
        command: &str,
        parameters: serde_json::Value,
        input_digests: Vec<FileDigest>,
        output_digest: FileDigest,
        harness: SweepMeta,
        calibration: CalibrationReport,
    ) -> Self {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: "wosa".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp_unix_s: now,
            timestamp_utc: chrono::Utc::now()
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            parameters,
            input_digests,
            output_digest,
            harness,
            calibration,
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

pub fn digest_file(path: &Path) -> std::io::Result<FileDigest> {
    let bytes = std::fs::read(path)?;
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

pub fn digest_content(label: &str, content: &str) -> FileDigest {
    FileDigest {
        path: label.to_string(),
        sha256: sha256_hex(content.as_bytes()),
    }
}
