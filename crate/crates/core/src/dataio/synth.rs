//! Seeded synthetic signature datasets for desk-scale experiments.
//!
//! Each subject gets a smooth base curve per axis, a sum of low-order
//! harmonics with seeded amplitudes and phases. Genuine samples perturb the
//! base gently: small amplitude and phase wobble plus a smooth additive
//! jitter. Forgeries distort harder, with larger amplitude changes, phase
//! noise, and a small white tremor on top; the tremor scrambles local sample
//! orderings the way hesitant copying does, which is what separates the two
//! classes in ordinal-feature space.
//!
//! Generation derives one RNG stream per (kind, subject, sample), so output
//! is a pure function of the configuration and independent of evaluation
//! order. With jitter amplitude zero, all genuine samples of a subject are
//! exactly the base curve.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::preprocess::{Label, SignatureTrace};
use crate::seeding;

use super::{DatasetManifest, ManifestSubject, TraceFormat};

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_subjects: usize,
    pub genuine_per_subject: usize,
    pub forgeries_per_subject: usize,
    /// Harmonics in each base curve.
    pub harmonics: usize,
    /// Amplitude of the smooth perturbation applied to genuine samples.
    pub genuine_jitter: f64,
    /// Amplitude of the distortion (and tremor) applied to forgeries.
    pub forgery_distortion: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_subjects: 20,
            genuine_per_subject: 25,
            forgeries_per_subject: 25,
            harmonics: 4,
            genuine_jitter: 0.012,
            forgery_distortion: 0.08,
            seed: 42,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects < 1 || self.genuine_per_subject < 1 || self.forgeries_per_subject < 1 {
            return Err(Error::Parameter("synthetic counts must be >= 1".into()));
        }
        if self.harmonics < 1 {
            return Err(Error::Parameter("need at least one harmonic".into()));
        }
        if !(self.genuine_jitter >= 0.0 && self.forgery_distortion >= 0.0) {
            return Err(Error::Parameter("amplitudes must be >= 0".into()));
        }
        Ok(())
    }
}

struct BaseCurve {
    /// Per axis, per harmonic: (amplitude, phase).
    harmonics: [Vec<(f64, f64)>; 2],
    length: usize,
}

fn base_curve(config: &SynthConfig, subject: usize) -> BaseCurve {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seeding::stream_seed(config.seed, "base", subject as u64, 0));
    let mut axes: [Vec<(f64, f64)>; 2] = [Vec::new(), Vec::new()];
    for axis in axes.iter_mut() {
        for h in 1..=config.harmonics {
            let amplitude = (0.35 + 0.65 * rng.random::<f64>()) / h as f64;
            let phase = TAU * rng.random::<f64>();
            axis.push((amplitude, phase));
        }
    }
    let length = rng.random_range(350..=650);
    BaseCurve {
        harmonics: axes,
        length,
    }
}

/// A sample's per-harmonic perturbation and additive terms.
struct Perturbation {
    amp_factor: Vec<f64>,
    phase_shift: Vec<f64>,
    /// Extra smooth harmonics: (order, amplitude, phase).
    extra: Vec<(usize, f64, f64)>,
    tremor: f64,
    length: usize,
}

fn genuine_perturbation(
    config: &SynthConfig,
    base: &BaseCurve,
    rng: &mut ChaCha8Rng,
) -> Perturbation {
    let j = config.genuine_jitter;
    let h = config.harmonics;
    let amp_factor = (0..2 * h)
        .map(|_| 1.0 + j * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    let phase_shift = (0..2 * h)
        .map(|_| j * TAU * (2.0 * rng.random::<f64>() - 1.0) * 0.5)
        .collect();
    let extra = (0..2 * h)
        .map(|i| {
            let order = 1 + i % (2 * h);
            (
                order,
                j * rng.random::<f64>() / order as f64,
                TAU * rng.random::<f64>(),
            )
        })
        .collect();
    let delta = (j * 2000.0 * (2.0 * rng.random::<f64>() - 1.0)) as i64;
    let length = (base.length as i64 + delta).max(50) as usize;
    Perturbation {
        amp_factor,
        phase_shift,
        extra,
        tremor: 0.0,
        length,
    }
}

fn forgery_perturbation(
    config: &SynthConfig,
    base: &BaseCurve,
    rng: &mut ChaCha8Rng,
) -> Perturbation {
    let d = config.forgery_distortion;
    let h = config.harmonics;
    let amp_factor = (0..2 * h)
        .map(|_| 1.0 + 2.0 * d * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    let phase_shift = (0..2 * h)
        .map(|_| d * TAU * (2.0 * rng.random::<f64>() - 1.0))
        .collect();
    let extra = (0..2 * h)
        .map(|i| {
            let order = 1 + i % (2 * h);
            (
                order,
                d * rng.random::<f64>() / order as f64,
                TAU * rng.random::<f64>(),
            )
        })
        .collect();
    let delta = (d * 2000.0 * (2.0 * rng.random::<f64>() - 1.0)) as i64;
    let length = (base.length as i64 + delta).max(50) as usize;
    Perturbation {
        amp_factor,
        phase_shift,
        extra,
        tremor: 0.35 * d,
        length,
    }
}

fn render_axis(
    base: &[(f64, f64)],
    perturbation: &Perturbation,
    axis: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let l = perturbation.length;
    let h = base.len();
    (0..l)
        .map(|i| {
            let u = i as f64 / (l - 1) as f64;
            let mut v = 0.0;
            for (k, &(amplitude, phase)) in base.iter().enumerate() {
                let idx = axis * h + k;
                let a = amplitude * perturbation.amp_factor[idx];
                let p = phase + perturbation.phase_shift[idx];
                v += a * ((k + 1) as f64 * TAU * u + p).sin();
            }
            for &(order, amplitude, phase) in &perturbation.extra {
                v += amplitude * (order as f64 * TAU * u + phase).sin();
            }
            if perturbation.tremor > 0.0 {
                v += perturbation.tremor * (2.0 * rng.random::<f64>() - 1.0);
            }
            v
        })
        .collect()
}

fn render_sample(
    config: &SynthConfig,
    base: &BaseCurve,
    subject_id: &str,
    label: Label,
    sample_index: usize,
    seed_tag: &str,
    subject: usize,
) -> Result<SignatureTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::stream_seed(
        config.seed,
        seed_tag,
        subject as u64,
        sample_index as u64,
    ));
    let perturbation = match label {
        Label::Genuine => genuine_perturbation(config, base, &mut rng),
        Label::Forgery => forgery_perturbation(config, base, &mut rng),
    };
    // The jitter terms for both axes come from the same per-sample stream;
    // tremor draws interleave with rendering below.
    let x = render_axis(&base.harmonics[0], &perturbation, 0, &mut rng);
    let y = render_axis(&base.harmonics[1], &perturbation, 1, &mut rng);
    SignatureTrace::new(x, y, subject_id, label, sample_index)
}

/// Subject id used for the k-th synthetic subject.
pub fn subject_id(k: usize) -> String {
    format!("s{k:03}")
}

/// Generates all traces of the configured dataset.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Vec<SignatureTrace>> {
    config.validate()?;
    let mut traces = Vec::new();
    for k in 0..config.n_subjects {
        let base = base_curve(config, k);
        let id = subject_id(k);
        for j in 0..config.genuine_per_subject {
            traces.push(render_sample(
                config,
                &base,
                &id,
                Label::Genuine,
                j,
                "genuine",
                k,
            )?);
        }
        for j in 0..config.forgeries_per_subject {
            traces.push(render_sample(
                config,
                &base,
                &id,
                Label::Forgery,
                j,
                "forgery",
                k,
            )?);
        }
    }
    Ok(traces)
}

/// Writes the dataset as trace files plus `manifest.json` under `dir`;
/// returns the manifest path.
pub fn write_synthetic_dataset(config: &SynthConfig, dir: &Path) -> Result<PathBuf> {
    config.validate()?;
    std::fs::create_dir_all(dir)?;
    let mut subjects = Vec::new();
    for k in 0..config.n_subjects {
        let base = base_curve(config, k);
        let id = subject_id(k);
        let mut genuine_files = Vec::new();
        let mut forgery_files = Vec::new();
        for j in 0..config.genuine_per_subject {
            let trace = render_sample(config, &base, &id, Label::Genuine, j, "genuine", k)?;
            let name = PathBuf::from(format!("{id}_g{j:02}.csv"));
            super::write_trace(&dir.join(&name), &trace, TraceFormat::CsvTxy)?;
            genuine_files.push(name);
        }
        for j in 0..config.forgeries_per_subject {
            let trace = render_sample(config, &base, &id, Label::Forgery, j, "forgery", k)?;
            let name = PathBuf::from(format!("{id}_f{j:02}.csv"));
            super::write_trace(&dir.join(&name), &trace, TraceFormat::CsvTxy)?;
            forgery_files.push(name);
        }
        subjects.push(ManifestSubject {
            subject_id: id,
            genuine_files,
            forgery_files,
        });
    }
    let manifest = DatasetManifest {
        format: TraceFormat::CsvTxy,
        subjects,
    };
    let manifest_path = dir.join("manifest.json");
    manifest.save(&manifest_path)?;
    Ok(manifest_path)
}
