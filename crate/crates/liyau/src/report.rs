//! Machine-readable outputs: a stable JSON report schema and CSV dumps.
//!
//! Reports are byte-reproducible for identical runs: `wall_time` stays null
//! unless timing is explicitly requested, and all maps serialize with sorted
//! keys. CSV floats carry 17 significant digits so doubles round-trip
//! bit-faithfully.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    /// Seconds of wall time; null by default so identical configurations
    /// produce identical bytes.
    pub wall_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config_echo: serde_json::Value,
    pub results: serde_json::Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(
        command: &str,
        config_echo: serde_json::Value,
        results: serde_json::Value,
        wall_time: Option<f64>,
    ) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config_echo,
            results,
            provenance: Provenance {
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                wall_time,
            },
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Numerical(format!("report serialization failed: {e}")))?;
        let mut file = std::fs::File::create(path)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", path.display())))?;
        file.write_all(body.as_bytes())
            .and_then(|_| file.write_all(b"\n"))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read(path: &Path) -> Result<Report> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&body)
            .map_err(|e| Error::Config(format!("malformed report {}: {e}", path.display())))
    }
}

/// 17-significant-digit scientific form; parses back to the same f64.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a numeric CSV: comma separators, '.' decimals, header row, LF line
/// endings.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut body = String::with_capacity(rows.len() * 24 * header.len() + 64);
    body.push_str(&header.join(","));
    body.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let mut first = true;
        for &x in row {
            if !first {
                body.push(',');
            }
            body.push_str(&csv_float(x));
            first = false;
        }
        body.push('\n');
    }
    std::fs::write(path, body)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip() {
        for &x in &[
            0.0,
            1.0 / 3.0,
            std::f64::consts::PI,
            2.00375,
            1e-300,
            -7.25e17,
        ] {
            let s = csv_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s} -> {back}");
        }
    }

    #[test]
    fn report_round_trips_through_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let rep = Report::new(
            "eval",
            serde_json::json!({"t": 1.0, "n": 2}),
            serde_json::json!({"bound": 3.0}),
            None,
        );
        rep.write(&path).unwrap();
        let back = Report::read(&path).unwrap();
        assert_eq!(back.command, "eval");
        assert_eq!(back.results["bound"], serde_json::json!(3.0));
        assert_eq!(back.provenance.wall_time, None);
        // Byte-identical re-serialization.
        let a = serde_json::to_string_pretty(&rep).unwrap();
        let b = serde_json::to_string_pretty(&back).unwrap();
        assert_eq!(a, b);
    }
}
