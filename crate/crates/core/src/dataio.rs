//! Dataset manifests, trace file loading, and feature persistence.
//!
//! Two trace file layouts are supported:
//!
//! * `csv_txy`: a `t,x,y` header followed by comma-separated real rows;
//! * `mcyt_like`: whitespace-separated columns `x y p azimuth altitude` (any
//!   column past the second is ignored), a textual stand-in for corpora that
//!   ship pressure and pen-angle channels alongside the coordinates.
//!
//! A dataset is described by a JSON manifest listing, per subject, the genuine
//! and forgery trace files relative to the manifest's directory. All floats
//! are persisted with shortest round-trip formatting, so write-then-load
//! reproduces values bit for bit.

pub mod synth;

pub use synth::{generate_synthetic, write_synthetic_dataset, SynthConfig};

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ordinal::OrdinalConfig;
use crate::preprocess::{Label, SignatureTrace};
use crate::quantifiers::FeatureVector;

/// On-disk layout of a trace file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    CsvTxy,
    McytLike,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv_txy" => Ok(Self::CsvTxy),
            "mcyt_like" => Ok(Self::McytLike),
            other => Err(Error::Parameter(format!("unknown trace format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSubject {
    pub subject_id: String,
    pub genuine_files: Vec<PathBuf>,
    pub forgery_files: Vec<PathBuf>,
}

/// Dataset description: trace format plus per-subject file lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format: TraceFormat,
    pub subjects: Vec<ManifestSubject>,
}

/// One file the manifest points at, with the metadata its trace will carry.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFileRef {
    pub subject_id: String,
    pub label: Label,
    pub sample_index: usize,
    pub path: PathBuf,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let manifest: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        manifest.validate(manifest_root(path))?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    /// Rejects duplicate file entries and missing files.
    pub fn validate(&self, root: &Path) -> Result<()> {
        let mut seen = BTreeSet::new();
        for subject in &self.subjects {
            for file in subject.genuine_files.iter().chain(&subject.forgery_files) {
                if !seen.insert(file.clone()) {
                    return Err(Error::Validation(format!(
                        "file listed twice in manifest: {}",
                        file.display()
                    )));
                }
                let resolved = root.join(file);
                if !resolved.is_file() {
                    return Err(Error::Validation(format!(
                        "missing trace file: {}",
                        resolved.display()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Every file in deterministic order (subjects as listed, genuine before
    /// forgery, sample indices by list position), resolved against `root`.
    pub fn files(&self, root: &Path) -> Vec<TraceFileRef> {
        let mut out = Vec::new();
        for subject in &self.subjects {
            for (i, f) in subject.genuine_files.iter().enumerate() {
                out.push(TraceFileRef {
                    subject_id: subject.subject_id.clone(),
                    label: Label::Genuine,
                    sample_index: i,
                    path: root.join(f),
                });
            }
            for (i, f) in subject.forgery_files.iter().enumerate() {
                out.push(TraceFileRef {
                    subject_id: subject.subject_id.clone(),
                    label: Label::Forgery,
                    sample_index: i,
                    path: root.join(f),
                });
            }
        }
        out
    }
}

/// Directory a manifest's relative paths resolve against.
pub fn manifest_root(manifest_path: &Path) -> &Path {
    manifest_path.parent().unwrap_or_else(|| Path::new("."))
}

/// Parses one trace file.
pub fn load_trace(
    path: &Path,
    format: TraceFormat,
    subject_id: &str,
    label: Label,
    sample_index: usize,
) -> Result<SignatureTrace> {
    let content = std::fs::read_to_string(path)?;
    let display = path.display().to_string();
    let (x, y) = match format {
        TraceFormat::CsvTxy => parse_csv_txy(&content, &display)?,
        TraceFormat::McytLike => parse_mcyt_like(&content, &display)?,
    };
    SignatureTrace::new(x, y, subject_id, label, sample_index)
}

fn parse_csv_txy(content: &str, path: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "t,x,y" => {}
        _ => {
            return Err(Error::Parse {
                path: path.into(),
                line: 1,
                reason: "expected header \"t,x,y\"".into(),
            })
        }
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: path.into(),
                line: idx + 1,
                reason: format!("expected 3 comma-separated fields, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: idx + 1,
                reason: format!("not a real number: {s:?}"),
            })
        };
        parse(fields[0])?; // t column: order is implicit, value unused
        x.push(parse(fields[1])?);
        y.push(parse(fields[2])?);
    }
    Ok((x, y))
}

fn parse_mcyt_like(content: &str, path: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 {
            return Err(Error::Parse {
                path: path.into(),
                line: idx + 1,
                reason: format!("expected at least 2 columns, got {}", fields.len()),
            });
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                path: path.into(),
                line: idx + 1,
                reason: format!("not a real number: {s:?}"),
            })
        };
        // Pressure and pen-angle columns, when present, are ignored.
        x.push(parse(fields[0])?);
        y.push(parse(fields[1])?);
    }
    Ok((x, y))
}

/// Writes a trace in the given format, full float precision.
pub fn write_trace(path: &Path, trace: &SignatureTrace, format: TraceFormat) -> Result<()> {
    let mut out = String::new();
    match format {
        TraceFormat::CsvTxy => {
            out.push_str("t,x,y\n");
            for (i, (x, y)) in trace.x().iter().zip(trace.y()).enumerate() {
                writeln!(out, "{i},{x},{y}").expect("string write");
            }
        }
        TraceFormat::McytLike => {
            for (x, y) in trace.x().iter().zip(trace.y()) {
                writeln!(out, "{x} {y} 0 0 0").expect("string write");
            }
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Loads every trace of a dataset, failing on the first unreadable file.
pub fn load_dataset(manifest_path: &Path) -> Result<Vec<SignatureTrace>> {
    let manifest = DatasetManifest::load(manifest_path)?;
    let root = manifest_root(manifest_path);
    manifest
        .files(root)
        .into_iter()
        .map(|f| {
            load_trace(
                &f.path,
                manifest.format,
                &f.subject_id,
                f.label,
                f.sample_index,
            )
        })
        .collect()
}

/// Feature rows as CSV, one row per signature.
pub fn write_features_csv(path: &Path, features: &[FeatureVector]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for f in features {
        w.serialize(f)?;
    }
    // serde skips the header when the slice is empty; emit it explicitly.
    if features.is_empty() {
        w.write_record([
            "subject_id",
            "sample_index",
            "label",
            "h_x",
            "c_x",
            "f_x",
            "h_y",
            "c_y",
            "f_y",
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureVector>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

/// JSON feature file: the extraction configuration plus the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureFile {
    pub config: OrdinalConfig,
    pub features: Vec<FeatureVector>,
}

pub fn write_features_json(
    path: &Path,
    config: &OrdinalConfig,
    features: &[FeatureVector],
) -> Result<()> {
    let file = FeatureFile {
        config: *config,
        features: features.to_vec(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_features_json(path: &Path) -> Result<FeatureFile> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
