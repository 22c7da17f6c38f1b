//! Trace normalization: unit-square rescaling and fixed-length resampling.
//!
//! Raw tablet traces arrive in device coordinates with wildly varying lengths.
//! [`preprocess`] puts every trace on the same footing: each axis is min-max
//! rescaled into `[0, 1]`, then resampled to a fixed number of points with a
//! piecewise cubic Hermite interpolant over a uniform index parameter, and
//! finally clamped back into `[0, 1]` (the interpolant can overshoot slightly
//! near sharp turns).
//!
//! Tangents use three-point finite differences at interior knots and one-sided
//! differences at the endpoints. The interpolant reproduces the first and last
//! samples exactly and reproduces linear data exactly. Targets shorter than
//! the input are allowed: downsampling evaluates the same interpolant on a
//! coarser parameter grid.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Resample length used throughout the experiments.
pub const DEFAULT_RESAMPLE_LENGTH: usize = 2000;

/// Ground-truth class of a signature sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Genuine,
    Forgery,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Genuine => f.write_str("genuine"),
            Label::Forgery => f.write_str("forgery"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genuine" => Ok(Label::Genuine),
            "forgery" => Ok(Label::Forgery),
            other => Err(Error::Validation(format!(
                "unknown label {other:?} (expected \"genuine\" or \"forgery\")"
            ))),
        }
    }
}

/// A pen trajectory: two equally long coordinate series plus sample metadata.
///
/// `preprocessed` is true only for traces produced by [`preprocess`] (or
/// validated by [`SignatureTrace::preprocessed`]): length equals the target
/// and every value lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureTrace {
    x: Vec<f64>,
    y: Vec<f64>,
    subject_id: String,
    label: Label,
    sample_index: usize,
    preprocessed: bool,
}

impl SignatureTrace {
    /// A raw trace. Axes must have equal length >= 2 and finite values.
    pub fn new(
        x: Vec<f64>,
        y: Vec<f64>,
        subject_id: impl Into<String>,
        label: Label,
        sample_index: usize,
    ) -> Result<Self> {
        validate_axes(&x, &y)?;
        Ok(Self {
            x,
            y,
            subject_id: subject_id.into(),
            label,
            sample_index,
            preprocessed: false,
        })
    }

    /// A trace already in preprocessed form: additionally requires every value
    /// in `[0, 1]`.
    pub fn preprocessed(
        x: Vec<f64>,
        y: Vec<f64>,
        subject_id: impl Into<String>,
        label: Label,
        sample_index: usize,
    ) -> Result<Self> {
        validate_axes(&x, &y)?;
        if x.iter().chain(y.iter()).any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::Validation(
                "preprocessed trace values must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            x,
            y,
            subject_id: subject_id.into(),
            label,
            sample_index,
            preprocessed: true,
        })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn subject_id(&self) -> &str {
        &self.subject_id
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn sample_index(&self) -> usize {
        self.sample_index
    }

    pub fn is_preprocessed(&self) -> bool {
        self.preprocessed
    }

    /// Whether each axis is constant (degenerate for min-max rescaling).
    pub fn constant_axes(&self) -> (bool, bool) {
        (is_constant(&self.x), is_constant(&self.y))
    }

    fn with_axes(&self, x: Vec<f64>, y: Vec<f64>, preprocessed: bool) -> Self {
        Self {
            x,
            y,
            subject_id: self.subject_id.clone(),
            label: self.label,
            sample_index: self.sample_index,
            preprocessed,
        }
    }
}

fn validate_axes(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::InputShape(format!(
            "axis lengths differ: x has {}, y has {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::SeriesTooShort {
            needed: 2,
            got: x.len(),
        });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite coordinate in trace".into()));
    }
    Ok(())
}

fn is_constant(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Min-max rescales each axis into `[0, 1]`.
///
/// A constant axis carries no ordering information; it maps to the constant
/// 0.5 and logs a degeneracy warning.
pub fn rescale_unit_square(trace: &SignatureTrace) -> Result<SignatureTrace> {
    let x = rescale_axis(trace.x(), trace.subject_id(), "x");
    let y = rescale_axis(trace.y(), trace.subject_id(), "y");
    Ok(trace.with_axes(x, y, false))
}

fn rescale_axis(values: &[f64], subject: &str, axis: &str) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if range == 0.0 {
        log::warn!("subject {subject}: degenerate constant {axis}-axis mapped to 0.5");
        return vec![0.5; values.len()];
    }
    values.iter().map(|&v| (v - min) / range).collect()
}

/// Resamples both axes to `target_len` points by piecewise cubic Hermite
/// interpolation over a uniform index parameter.
///
/// Pure interpolation: no clamping and no `preprocessed` flag; use
/// [`preprocess`] for the full pipeline. Endpoints are reproduced exactly, and
/// when `target_len` equals the input length every knot is reproduced exactly.
pub fn hermite_resample(trace: &SignatureTrace, target_len: usize) -> Result<SignatureTrace> {
    if target_len < 2 {
        return Err(Error::Parameter(format!(
            "resample length must be >= 2, got {target_len}"
        )));
    }
    let x = resample_axis(trace.x(), target_len);
    let y = resample_axis(trace.y(), target_len);
    Ok(trace.with_axes(x, y, false))
}

/// Full preprocessing pipeline: rescale, resample, clamp to `[0, 1]`, and mark
/// the trace preprocessed.
pub fn preprocess(trace: &SignatureTrace, target_len: usize) -> Result<SignatureTrace> {
    let rescaled = rescale_unit_square(trace)?;
    let mut resampled = hermite_resample(&rescaled, target_len)?;
    for v in resampled.x.iter_mut().chain(resampled.y.iter_mut()) {
        *v = v.clamp(0.0, 1.0);
    }
    resampled.preprocessed = true;
    Ok(resampled)
}

fn resample_axis(values: &[f64], target_len: usize) -> Vec<f64> {
    let l = values.len();
    debug_assert!(l >= 2 && target_len >= 2);

    let mut tangents = vec![0.0; l];
    tangents[0] = values[1] - values[0];
    tangents[l - 1] = values[l - 1] - values[l - 2];
    for i in 1..l - 1 {
        tangents[i] = 0.5 * (values[i + 1] - values[i - 1]);
    }

    let span = (l - 1) as f64;
    let denom = (target_len - 1) as f64;
    (0..target_len)
        .map(|k| {
            // k * span is an exact integer product, so u hits 0 and span
            // exactly at the ends and the endpoints reproduce exactly.
            let u = (k as f64) * span / denom;
            let i = (u.floor() as usize).min(l - 2);
            let s = u - i as f64;
            let s2 = s * s;
            let s3 = s2 * s;
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            h00 * values[i] + h10 * tangents[i] + h01 * values[i + 1] + h11 * tangents[i + 1]
        })
        .collect()
}
