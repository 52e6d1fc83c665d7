//! Scan manifests.
//!
//! One record per line, `<angle_deg> <length_angstrom> <path>`, with paths
//! relative to the manifest's directory. `#` starts a comment. Optional
//! metadata lines use `key = value` with keys `basis`, `frozen` and
//! `removed` (comma-separated orbital indices).

use std::path::{Path, PathBuf};

use super::{build_geometry, read_fcidump, ActiveSpaceSpec, Geometry};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub geometry: Geometry,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanManifest {
    pub entries: Vec<ScanEntry>,
    pub basis: Option<String>,
    pub active_space: Option<ActiveSpaceSpec>,
}

fn parse_indices(value: &str, line: usize) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad orbital index '{t}'"),
            })
        })
        .collect()
}

/// Parses manifest text; relative paths resolve against `base_dir`. Every
/// referenced FCIDUMP must exist and parse.
pub fn load_manifest(text: &str, base_dir: &Path) -> Result<ScanManifest> {
    let mut entries: Vec<ScanEntry> = Vec::new();
    let mut basis = None;
    let mut frozen = None;
    let mut removed = None;

    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim();
            match key.trim() {
                "basis" => basis = Some(value.to_string()),
                "frozen" => frozen = Some(parse_indices(value, no)?),
                "removed" => removed = Some(parse_indices(value, no)?),
                other => {
                    return Err(Error::Parse {
                        line: no,
                        msg: format!("unknown manifest key '{other}'"),
                    })
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: no,
                msg: "expected '<angle_deg> <length_angstrom> <path>'".into(),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: no,
                msg: format!("bad number '{s}'"),
            })
        };
        let geometry = build_geometry(num(fields[0])?, num(fields[1])?)
            .map_err(|e| e.context(format!("manifest line {no}")))?;
        let path = base_dir.join(fields[2]);
        if entries.iter().any(|e| e.geometry.same_point(&geometry)) {
            return Err(Error::Validation(format!(
                "duplicate geometry ({geometry}) at manifest line {no}"
            )));
        }
        if entries.iter().any(|e| e.path == path) {
            return Err(Error::Validation(format!(
                "duplicate path {} at manifest line {no}",
                path.display()
            )));
        }
        entries.push(ScanEntry { geometry, path });
    }

    if entries.is_empty() {
        return Err(Error::Validation("manifest has no entries to scan".into()));
    }
    for entry in &entries {
        if !entry.path.exists() {
            return Err(Error::io(
                &entry.path,
                std::io::Error::new(std::io::ErrorKind::NotFound, "FCIDUMP file not found"),
            ));
        }
        read_fcidump(&entry.path)?;
    }

    let active_space = match (frozen, removed) {
        (None, None) => None,
        (f, r) => Some(ActiveSpaceSpec::new(f.unwrap_or_default(), r.unwrap_or_default())),
    };
    Ok(ScanManifest {
        entries,
        basis,
        active_space,
    })
}

pub fn load_manifest_file(path: impl AsRef<Path>) -> Result<ScanManifest> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    load_manifest(&text, base)
}

impl ScanManifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
