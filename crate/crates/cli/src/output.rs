//! CSV and JSON writers.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Fixed 17-significant-digit formatting.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.into_iter().map(num).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunRecord {
    pub scenario: String,
    pub scenario_sha256: String,
    pub code_version: String,
    pub wall_clock_seconds: f64,
    pub master_seed: Option<u64>,
    pub threads: usize,
    pub outputs: Vec<OutputFile>,
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> std::io::Result<OutputFile> {
    std::fs::write(dir.join(name), contents)?;
    Ok(OutputFile { file: name.to_owned(), sha256: sha256_hex(contents.as_bytes()) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(1.0), "1.0000000000000000e0");
        let back: f64 = num(std::f64::consts::PI).parse().unwrap();
        assert_eq!(back, std::f64::consts::PI);
    }

    #[test]
    fn csv_layout() {
        let s = csv(&["time", "A"], vec![vec![0.0, 1.0]].into_iter());
        assert_eq!(s, "time,A\n0.0000000000000000e0,1.0000000000000000e0\n");
    }
}
