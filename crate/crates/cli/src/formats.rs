//! On-disk formats. Every JSON file carries `format_version`; report files
//! wrap their body together with a [`RunManifest`].

use std::fs;
use std::path::Path;

use cpm_core::classical::MatrixBasis;
use cpm_core::linalg::ComplexMatrix;
use cpm_core::metrology::{QuantumMap, TraceMode};
use cpm_core::search::BasisRecord;
use cpm_core::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

/// `matrices[a][i][j] = [re, im]`, `n^2` matrices of size `n x n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub record: BasisRecord,
}

impl BasisFile {
    pub fn new(basis: &MatrixBasis) -> Self {
        Self { format_version: FORMAT_VERSION, record: BasisRecord::from_basis(basis) }
    }

    /// Parses and, unless `validate` is false, checks orthonormality.
    pub fn load(path: &Path, tol: f64, validate: bool) -> CliResult<MatrixBasis> {
        let text = read(path)?;
        let file: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        check_version(file.format_version)?;
        if file.record.matrices.len() != file.record.n * file.record.n {
            return Err(CliError::Malformed(format!(
                "expected {} matrices for n = {}, found {}",
                file.record.n * file.record.n,
                file.record.n,
                file.record.matrices.len()
            )));
        }
        let basis = if validate { file.record.to_basis(tol) } else { file.record.to_basis_unvalidated() };
        basis.map_err(|e| CliError::Data(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        write(path, &to_json(self)?)
    }
}

/// Kraus operators of a custom map: `kraus[s][i][j] = [re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub format_version: u32,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MapFile {
    pub fn load(path: &Path, tol: f64) -> CliResult<QuantumMap> {
        let text = read(path)?;
        let file: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))?;
        check_version(file.format_version)?;
        let ops = file
            .kraus
            .iter()
            .map(|rows| {
                let n = rows.len();
                let data: Vec<C64> = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
                ComplexMatrix::new(n, n, data)
            })
            .collect::<cpm_core::Result<Vec<_>>>()
            .map_err(|e| CliError::Malformed(e.to_string()))?;
        QuantumMap::new(ops, TraceMode::NonIncreasing, tol).map_err(|e| CliError::Data(e.to_string()))
    }
}

fn check_version(v: u32) -> CliResult<()> {
    if v != FORMAT_VERSION {
        return Err(CliError::Malformed(format!("unsupported format_version {v}")));
    }
    Ok(())
}

/// Provenance for one command invocation. The digest covers the serialized
/// body only, so it is stable across worker counts and machines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub params: serde_json::Value,
    pub master_seed: Option<u64>,
    pub tool_version: String,
    pub wall_time_s: f64,
    pub result_digest: String,
}

impl RunManifest {
    pub fn new<P: Serialize>(command: &str, params: &P, seed: Option<u64>, wall_time_s: f64, body: &str) -> CliResult<Self> {
        Ok(Self {
            command: command.to_string(),
            params: serde_json::to_value(params).map_err(|e| CliError::Data(e.to_string()))?,
            master_seed: seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_s,
            result_digest: digest(body),
        })
    }
}

pub fn digest(body: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(body.as_bytes())))
}

/// Report file layout: `{format_version, manifest, body}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub format_version: u32,
    pub manifest: RunManifest,
    pub body: T,
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Data(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Serializes `body`, builds the manifest over it and returns the full file text.
pub fn envelope<T: Serialize, P: Serialize>(
    command: &str,
    params: &P,
    seed: Option<u64>,
    wall_time_s: f64,
    body: &T,
) -> CliResult<String> {
    let body_text = serde_json::to_string(body).map_err(|e| CliError::Data(e.to_string()))?;
    let manifest = RunManifest::new(command, params, seed, wall_time_s, &body_text)?;
    to_json(&Envelope { format_version: FORMAT_VERSION, manifest, body })
}

pub fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))
}

pub fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cpm_core::search::random_orthonormal_basis;

    #[test]
    fn basis_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        for seed in 0..20 {
            let b = random_orthonormal_basis(3, seed).unwrap();
            BasisFile::new(&b).save(&path).unwrap();
            assert_eq!(BasisFile::load(&path, 1e-9, true).unwrap(), b);
        }
    }

    #[test]
    fn truncated_file_is_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.json");
        let b = random_orthonormal_basis(2, 1).unwrap();
        let text = to_json(&BasisFile::new(&b)).unwrap();
        write(&path, &text[..text.len() / 2]).unwrap();
        assert!(matches!(BasisFile::load(&path, 1e-9, true), Err(CliError::Malformed(_))));
    }

    #[test]
    fn digest_ignores_manifest_fields() {
        let a = envelope("x", &1, Some(3), 1.0, &vec![1, 2]).unwrap();
        let b = envelope("x", &1, Some(3), 2.5, &vec![1, 2]).unwrap();
        assert_ne!(a, b);
        let da: Envelope<Vec<i32>> = serde_json::from_str(&a).unwrap();
        let db: Envelope<Vec<i32>> = serde_json::from_str(&b).unwrap();
        assert_eq!(da.manifest.result_digest, db.manifest.result_digest);
    }
}
