//! CSV/JSON serialization of results. Every file starts with a units line:
//! a `# units: …` comment in CSV, a `"units"` field in JSON.

use crate::model::SolutionProfile;
use crate::units::UnitSystem;
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const PROFILE_HEADER: &str = "r,m,u,P,rho,kappa,Q,dPdr";
pub const DIMENSIONLESS: &str = "dimensionless (scaled variables)";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Units description without the comment prefix.
pub fn units_label(units: UnitSystem) -> &'static str {
    units.header_line().trim_start_matches("# units: ")
}

/// Rows as CSV after a `# units:` line; the header follows the field order.
pub fn csv_bytes<T: Serialize>(units: &str, rows: &[T]) -> Result<Vec<u8>, ExportError> {
    let mut buf = format!("# units: {units}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        w.flush().map_err(csv::Error::from)?;
    }
    Ok(buf)
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    units: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON object with a leading `"units"` field; `body` must serialize
/// to an object.
pub fn json_bytes<T: Serialize>(units: &str, body: &T) -> Result<Vec<u8>, ExportError> {
    let mut out = serde_json::to_vec_pretty(&Wrapped { units, body })?;
    out.push(b'\n');
    Ok(out)
}

pub fn profile_csv(profile: &SolutionProfile, units: UnitSystem) -> Result<Vec<u8>, ExportError> {
    let bytes = csv_bytes(units_label(units), &profile.samples)?;
    if profile.samples.is_empty() {
        let mut b = bytes;
        b.extend_from_slice(PROFILE_HEADER.as_bytes());
        b.push(b'\n');
        return Ok(b);
    }
    Ok(bytes)
}

#[derive(Serialize)]
struct ProfileBody<'a> {
    columns: Vec<&'static str>,
    samples: &'a [crate::model::ProfileSample],
}

pub fn profile_json(profile: &SolutionProfile, units: UnitSystem) -> Result<Vec<u8>, ExportError> {
    json_bytes(
        units_label(units),
        &ProfileBody {
            columns: PROFILE_HEADER.split(',').collect(),
            samples: &profile.samples,
        },
    )
}

/// Collects artifacts in memory and writes them from one place once a
/// command has assembled its results.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>, ExportError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| ExportError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io(dir))?;
        let mut written = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(io(&path))?;
            written.push(path);
        }
        Ok(written)
    }
}
