//! One-class SVM with a Gaussian kernel over six-dimensional feature vectors.
//!
//! Training solves the nu-parameterized one-class dual (minimize
//! `(1/2) a' K a` with `sum(a) = 1`, `0 <= a_i <= 1/(nu N)`) with a
//! self-contained deterministic pairwise solver; see [`solver`]. `nu` upper
//! bounds the fraction of training points scored out-of-class and lower
//! bounds the fraction kept as support vectors.
//!
//! A probe `z` scores `sum_i a_i K(z, z_i) - b`; nonnegative means genuine,
//! with the boundary itself counted genuine. One model is trained per
//! enrolled subject, on that subject's genuine feature vectors only.

pub mod solver;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::quantifiers::FeatureVector;

pub const DEFAULT_NU: f64 = 0.1;
pub const DEFAULT_SIGMA_SQ: f64 = 10.0;
pub const DEFAULT_SOLVER_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_ITERATIONS: u64 = 10_000_000;

/// Model file format version.
const MODEL_VERSION: u32 = 1;
/// Multipliers below this fraction of the box are dropped from the model.
const SV_KEEP_EPS_REL: f64 = 1e-10;
/// Margin for classifying a multiplier as free (strictly inside the box).
const FREE_EPS_REL: f64 = 1e-8;

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcSvmConfig {
    /// Outlier-fraction bound, in `(0, 1]`.
    pub nu: f64,
    /// Gaussian kernel width (squared).
    pub sigma_sq: f64,
    /// KKT violation accepted as converged.
    pub solver_tolerance: f64,
    /// Budget of pair updates.
    pub max_iterations: u64,
}

impl Default for OcSvmConfig {
    fn default() -> Self {
        Self {
            nu: DEFAULT_NU,
            sigma_sq: DEFAULT_SIGMA_SQ,
            solver_tolerance: DEFAULT_SOLVER_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

impl OcSvmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::Parameter(format!(
                "nu must lie in (0, 1], got {}",
                self.nu
            )));
        }
        if !(self.sigma_sq > 0.0 && self.sigma_sq.is_finite()) {
            return Err(Error::Parameter(format!(
                "sigma_sq must be positive, got {}",
                self.sigma_sq
            )));
        }
        if !self.solver_tolerance.is_finite() || self.solver_tolerance <= 0.0 {
            return Err(Error::Parameter("solver tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A trained one-class model. Field order matches the JSON model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcSvmModel {
    pub version: u32,
    pub nu: f64,
    pub sigma_sq: f64,
    pub b: f64,
    pub support_vectors: Vec<[f64; 6]>,
    pub alphas: Vec<f64>,
    pub training_size: usize,
    pub feature_schema: Vec<String>,
}

impl OcSvmModel {
    /// Checks the model is usable for scoring.
    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_VERSION {
            return Err(Error::State(format!(
                "unsupported model version {}",
                self.version
            )));
        }
        if self.support_vectors.is_empty() || self.support_vectors.len() != self.alphas.len() {
            return Err(Error::State(
                "model has no support vectors or mismatched multipliers".into(),
            ));
        }
        if self.feature_schema != FeatureVector::SCHEMA {
            return Err(Error::State(format!(
                "unexpected feature schema {:?}",
                self.feature_schema
            )));
        }
        if !self.sigma_sq.is_finite() || self.sigma_sq <= 0.0 || !self.b.is_finite() {
            return Err(Error::State("model parameters are not finite".into()));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(json)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// Verdict of a single probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Genuine,
    Suspicious,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Genuine => f.write_str("genuine"),
            Verdict::Suspicious => f.write_str("suspicious"),
        }
    }
}

/// Score and verdict for one probe. `raw_score >= 0` is genuine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionResult {
    pub raw_score: f64,
    pub verdict: Verdict,
}

/// Gaussian kernel `exp(-||a - b||^2 / (2 sigma^2))` with Euclidean distance.
pub fn rbf_kernel(a: &[f64; 6], b: &[f64; 6], sigma_sq: f64) -> Result<f64> {
    if !(sigma_sq > 0.0 && sigma_sq.is_finite()) {
        return Err(Error::Parameter(format!(
            "sigma_sq must be positive, got {sigma_sq}"
        )));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite feature vector".into()));
    }
    Ok(rbf(a, b, sigma_sq))
}

fn rbf(a: &[f64; 6], b: &[f64; 6], sigma_sq: f64) -> f64 {
    let d2: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum();
    (-d2 / (2.0 * sigma_sq)).exp()
}

fn gram_matrix(samples: &[[f64; 6]], sigma_sq: f64) -> Vec<Vec<f64>> {
    let n = samples.len();
    let mut gram = vec![vec![0.0; n]; n];
    for i in 0..n {
        gram[i][i] = 1.0;
        for j in 0..i {
            let k = rbf(&samples[i], &samples[j], sigma_sq);
            gram[i][j] = k;
            gram[j][i] = k;
        }
    }
    gram
}

/// Trains a one-class model on genuine feature vectors.
pub fn train(samples: &[[f64; 6]], config: &OcSvmConfig) -> Result<OcSvmModel> {
    config.validate()?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "one-class training needs at least 2 samples, got {n}"
        )));
    }
    if samples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "non-finite feature in training set".into(),
        ));
    }

    let gram = gram_matrix(samples, config.sigma_sq);
    let upper_bound = 1.0 / (config.nu * n as f64);
    let solution = solver::solve(
        &gram,
        upper_bound,
        config.solver_tolerance,
        config.max_iterations,
    )?;
    debug_assert!(solution.residual <= config.solver_tolerance);

    let b = offset(&solution.alpha, &solution.gradient, upper_bound);

    let keep_eps = upper_bound * SV_KEEP_EPS_REL;
    let mut support_vectors = Vec::new();
    let mut alphas = Vec::new();
    for (i, &a) in solution.alpha.iter().enumerate() {
        if a > keep_eps {
            support_vectors.push(samples[i]);
            alphas.push(a);
        }
    }

    Ok(OcSvmModel {
        version: MODEL_VERSION,
        nu: config.nu,
        sigma_sq: config.sigma_sq,
        b,
        support_vectors,
        alphas,
        training_size: n,
        feature_schema: FeatureVector::SCHEMA
            .iter()
            .map(|s| s.to_string())
            .collect(),
    })
}

/// Offset recovery: the gradient equals `b` on free support vectors, so
/// average it there; with none free, take the midpoint of the interval the
/// bound multipliers leave for `b`.
fn offset(alpha: &[f64], gradient: &[f64], upper_bound: f64) -> f64 {
    let free_eps = upper_bound * FREE_EPS_REL;
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY; // from multipliers at the upper bound
    let mut upper = f64::INFINITY; // from multipliers at zero
    for (&a, &g) in alpha.iter().zip(gradient.iter()) {
        if a > free_eps && a < upper_bound - free_eps {
            free_sum += g;
            free_count += 1;
        } else if a >= upper_bound - free_eps {
            lower = lower.max(g);
        } else {
            upper = upper.min(g);
        }
    }
    if free_count > 0 {
        return free_sum / free_count as f64;
    }
    match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    }
}

/// Scores a probe against a trained model.
pub fn decide(model: &OcSvmModel, z: &[f64; 6]) -> Result<DecisionResult> {
    model.validate()?;
    if z.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite probe vector".into()));
    }
    let kernel_sum: f64 = model
        .support_vectors
        .iter()
        .zip(&model.alphas)
        .map(|(sv, &a)| a * rbf(z, sv, model.sigma_sq))
        .sum();
    let raw_score = kernel_sum - model.b;
    let verdict = if raw_score >= 0.0 {
        Verdict::Genuine
    } else {
        Verdict::Suspicious
    };
    Ok(DecisionResult { raw_score, verdict })
}

/// Selects a kernel width by k-fold cross validation on genuine samples.
///
/// Folds are a seeded shuffle striped round-robin. For each candidate width
/// the model is trained on k-1 folds and the held-out acceptance rate
/// (fraction scored genuine) is averaged; the chosen width is the one whose
/// mean acceptance is closest to the target `1 - nu`, first in grid order on
/// ties. The selection rule is a pure function of the fold scores.
pub fn cross_validate_sigma(
    samples: &[[f64; 6]],
    config: &OcSvmConfig,
    sigma_grid: &[f64],
    folds: usize,
    seed: u64,
) -> Result<f64> {
    config.validate()?;
    if sigma_grid.is_empty() {
        return Err(Error::Parameter("empty sigma_sq grid".into()));
    }
    if folds < 2 {
        return Err(Error::Parameter("need at least 2 folds".into()));
    }
    let n = samples.len();
    if n < folds {
        return Err(Error::InsufficientData(format!(
            "{folds}-fold cross validation needs at least {folds} samples, got {n}"
        )));
    }
    if n - n / folds < 2 {
        return Err(Error::InsufficientData(
            "folds leave fewer than 2 training samples".into(),
        ));
    }

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let target = 1.0 - config.nu;
    let mut best: Option<(f64, f64)> = None; // (distance to target, sigma_sq)
    for &sigma_sq in sigma_grid {
        let candidate = OcSvmConfig {
            sigma_sq,
            ..*config
        };
        candidate.validate()?;
        let mut acceptance_sum = 0.0;
        for fold in 0..folds {
            let held_out: Vec<usize> = indices.iter().copied().skip(fold).step_by(folds).collect();
            let train_set: Vec<[f64; 6]> = indices
                .iter()
                .enumerate()
                .filter(|(pos, _)| pos % folds != fold)
                .map(|(_, &i)| samples[i])
                .collect();
            let model = train(&train_set, &candidate)?;
            let accepted = held_out
                .iter()
                .filter(|&&i| {
                    decide(&model, &samples[i])
                        .map(|d| d.verdict == Verdict::Genuine)
                        .unwrap_or(false)
                })
                .count();
            acceptance_sum += accepted as f64 / held_out.len() as f64;
        }
        let distance = (acceptance_sum / folds as f64 - target).abs();
        if best.is_none_or(|(d, _)| distance < d) {
            best = Some((distance, sigma_sq));
        }
    }
    Ok(best.expect("grid nonempty").1)
}
