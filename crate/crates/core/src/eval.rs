//! Verification metrics (ACC, AUC, EER, ROC) and the varying-enrollment
//! experiment protocol.
//!
//! Score orientation is fixed throughout: higher raw score means more
//! genuine, and a nonnegative score is a genuine verdict.
//!
//! The protocol samples `n` genuine signatures per subject (seeded), trains a
//! per-subject one-class model, scores the remaining genuine samples and all
//! of that subject's forgeries, and averages the per-subject metrics with
//! equal weight per subject. The report records that aggregation choice; its
//! `roc` field is computed from the pooled scores of all subjects, the only
//! single curve the pooled data defines.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ocsvm::{self, OcSvmConfig};
use crate::preprocess::Label;
use crate::quantifiers::FeatureVector;
use crate::seeding;

/// One scored probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSample {
    pub raw_score: f64,
    pub true_label: Label,
    pub subject_id: String,
}

/// One operating point of the ROC: rates at a given decision threshold,
/// where FAR counts forgeries scoring at or above the threshold and FRR
/// counts genuines scoring below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// Per-subject protocol outcome; one CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectMetrics {
    pub subject_id: String,
    pub acc: f64,
    pub auc: f64,
    pub eer: f64,
    pub n_train: usize,
    pub n_test_genuine: usize,
    pub n_test_forgery: usize,
}

/// Protocol parameters recorded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolParams {
    pub n: usize,
    pub seed: u64,
    pub subjects: Vec<String>,
    pub folds: Option<usize>,
    /// How per-subject metrics were combined.
    pub aggregation: String,
}

/// Full protocol report: unweighted per-subject means, the pooled ROC, and
/// the per-subject breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub acc: f64,
    pub auc: f64,
    pub eer: f64,
    pub roc: Vec<RocPoint>,
    pub protocol: ProtocolParams,
    pub per_subject: Vec<SubjectMetrics>,
}

impl EvaluationReport {
    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// ROC as CSV columns threshold, far, frr.
    pub fn write_roc_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["threshold", "far", "frr"])?;
        for p in &self.roc {
            w.write_record([
                p.threshold.to_string(),
                p.far.to_string(),
                p.frr.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Per-subject rows as CSV.
    pub fn write_per_subject_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for row in &self.per_subject {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Feature vectors grouped per subject and split by label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureDataset {
    subjects: BTreeMap<String, SubjectFeatures>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SubjectFeatures {
    pub genuine: Vec<FeatureVector>,
    pub forgeries: Vec<FeatureVector>,
}

impl FeatureDataset {
    pub fn from_features(features: impl IntoIterator<Item = FeatureVector>) -> Self {
        let mut subjects: BTreeMap<String, SubjectFeatures> = BTreeMap::new();
        for f in features {
            let entry = subjects.entry(f.subject_id.clone()).or_default();
            match f.label {
                Label::Genuine => entry.genuine.push(f),
                Label::Forgery => entry.forgeries.push(f),
            }
        }
        for s in subjects.values_mut() {
            s.genuine.sort_by_key(|f| f.sample_index);
            s.forgeries.sort_by_key(|f| f.sample_index);
        }
        Self { subjects }
    }

    pub fn subjects(&self) -> impl Iterator<Item = (&String, &SubjectFeatures)> {
        self.subjects.iter()
    }

    pub fn subject_ids(&self) -> Vec<String> {
        self.subjects.keys().cloned().collect()
    }

    pub fn get(&self, subject_id: &str) -> Option<&SubjectFeatures> {
        self.subjects.get(subject_id)
    }

    pub fn subject_count(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    /// The subset containing only the listed subjects.
    pub fn restrict(&self, ids: &[String]) -> Self {
        let subjects = ids
            .iter()
            .filter_map(|id| self.subjects.get(id).map(|s| (id.clone(), s.clone())))
            .collect();
        Self { subjects }
    }
}

fn split_scores(scored: &[ScoredSample]) -> (Vec<f64>, Vec<f64>) {
    let mut genuine = Vec::new();
    let mut forgery = Vec::new();
    for s in scored {
        match s.true_label {
            Label::Genuine => genuine.push(s.raw_score),
            Label::Forgery => forgery.push(s.raw_score),
        }
    }
    (genuine, forgery)
}

fn require_both_labels(scored: &[ScoredSample], what: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let (genuine, forgery) = split_scores(scored);
    if genuine.is_empty() || forgery.is_empty() {
        return Err(Error::UndefinedMetric(format!(
            "{what} needs both genuine and forgery samples"
        )));
    }
    Ok((genuine, forgery))
}

/// Fraction of samples whose sign verdict (score >= 0 is genuine) matches the
/// true label.
pub fn accuracy(scored: &[ScoredSample]) -> Result<f64> {
    if scored.is_empty() {
        return Err(Error::InsufficientData("no scored samples".into()));
    }
    let correct = scored
        .iter()
        .filter(|s| {
            let predicted_genuine = s.raw_score >= 0.0;
            predicted_genuine == (s.true_label == Label::Genuine)
        })
        .count();
    Ok(correct as f64 / scored.len() as f64)
}

/// Probability that a random genuine outscores a random forgery, ties counted
/// one half (the rank statistic; equal to the trapezoidal ROC area).
pub fn auc(scored: &[ScoredSample]) -> Result<f64> {
    let (genuine, forgery) = require_both_labels(scored, "AUC")?;
    let mut all: Vec<(f64, bool)> = genuine
        .iter()
        .map(|&s| (s, true))
        .chain(forgery.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Average ranks over tie groups, then the Mann-Whitney statistic.
    let mut genuine_rank_sum = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let mean_rank = (i + 1 + j) as f64 / 2.0; // mean of ranks i+1 ..= j
        genuine_rank_sum += mean_rank * all[i..j].iter().filter(|(_, g)| *g).count() as f64;
        i = j;
    }
    let ng = genuine.len() as f64;
    let nf = forgery.len() as f64;
    Ok((genuine_rank_sum - ng * (ng + 1.0) / 2.0) / (ng * nf))
}

/// False-acceptance and false-rejection rates at each observed score plus a
/// terminal threshold above the maximum (where FAR = 0 and FRR = 1). FAR is
/// nonincreasing and FRR nondecreasing along the returned list.
pub fn roc_curve(scored: &[ScoredSample]) -> Result<Vec<RocPoint>> {
    let (mut genuine, mut forgery) = require_both_labels(scored, "ROC")?;
    genuine.sort_by(f64::total_cmp);
    forgery.sort_by(f64::total_cmp);

    let mut thresholds: Vec<f64> = genuine.iter().chain(forgery.iter()).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(thresholds[thresholds.len() - 1] + 1.0);

    let ng = genuine.len() as f64;
    let nf = forgery.len() as f64;
    Ok(thresholds
        .into_iter()
        .map(|t| {
            let far = (forgery.len() - forgery.partition_point(|&s| s < t)) as f64 / nf;
            let frr = genuine.partition_point(|&s| s < t) as f64 / ng;
            RocPoint {
                threshold: t,
                far,
                frr,
            }
        })
        .collect())
}

/// Equal error rate: the FAR = FRR crossing of the threshold sweep, linearly
/// interpolated between the two thresholds bracketing the first sign change
/// of FAR - FRR.
pub fn eer(scored: &[ScoredSample]) -> Result<f64> {
    let roc = roc_curve(scored)?;
    Ok(eer_from_roc(&roc).expect("sweep brackets a crossing by construction"))
}

/// The crossing rule applied to a precomputed sweep. Returns None when the
/// sweep never reaches FAR <= FRR (cannot happen for a full curve).
pub fn eer_from_roc(roc: &[RocPoint]) -> Option<f64> {
    let k = roc.iter().position(|p| p.far - p.frr <= 0.0)?;
    if k == 0 {
        return Some(0.5 * (roc[0].far + roc[0].frr));
    }
    let (a, b) = (&roc[k - 1], &roc[k]);
    let da = a.far - a.frr;
    let db = b.far - b.frr;
    let lambda = da / (da - db);
    let far = a.far + (b.far - a.far) * lambda;
    let frr = a.frr + (b.frr - a.frr) * lambda;
    Some(0.5 * (far + frr))
}

/// Runs the enrollment protocol for a single subject and scores its test
/// samples. Selection is deterministic given (seed, subject id) and
/// independent of other subjects, so per-subject runs can be distributed
/// without changing results.
fn score_subject(
    subject_id: &str,
    features: &SubjectFeatures,
    n: usize,
    config: &OcSvmConfig,
    seed: u64,
) -> Result<Vec<ScoredSample>> {
    if features.genuine.len() <= n {
        return Err(Error::Protocol {
            subject: subject_id.to_owned(),
            reason: format!(
                "needs more than {n} genuine samples for enrollment, has {}",
                features.genuine.len()
            ),
        });
    }
    if features.forgeries.is_empty() {
        return Err(Error::Protocol {
            subject: subject_id.to_owned(),
            reason: "has no forgeries to test against".into(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::subject_seed(seed, subject_id));
    let mut indices: Vec<usize> = (0..features.genuine.len()).collect();
    indices.shuffle(&mut rng);
    let mut enrollment = indices[..n].to_vec();
    enrollment.sort_unstable();

    let train_set: Vec<[f64; 6]> = enrollment
        .iter()
        .map(|&i| features.genuine[i].values())
        .collect();
    let model = ocsvm::train(&train_set, config)?;

    let mut scored = Vec::new();
    for (i, f) in features.genuine.iter().enumerate() {
        if enrollment.binary_search(&i).is_ok() {
            continue;
        }
        scored.push(ScoredSample {
            raw_score: ocsvm::decide(&model, &f.values())?.raw_score,
            true_label: Label::Genuine,
            subject_id: subject_id.to_owned(),
        });
    }
    for f in &features.forgeries {
        scored.push(ScoredSample {
            raw_score: ocsvm::decide(&model, &f.values())?.raw_score,
            true_label: Label::Forgery,
            subject_id: subject_id.to_owned(),
        });
    }
    Ok(scored)
}

/// Runs the varying-enrollment protocol over every subject of the dataset.
pub fn run_protocol(
    dataset: &FeatureDataset,
    n: usize,
    config: &OcSvmConfig,
    seed: u64,
) -> Result<EvaluationReport> {
    if dataset.is_empty() {
        return Err(Error::InsufficientData("empty dataset".into()));
    }
    if n < 2 {
        return Err(Error::Parameter(format!(
            "enrollment size must be >= 2 to train, got {n}"
        )));
    }

    let mut per_subject = Vec::new();
    let mut pooled: Vec<ScoredSample> = Vec::new();
    for (subject_id, features) in dataset.subjects() {
        let scored = score_subject(subject_id, features, n, config, seed)?;
        per_subject.push(SubjectMetrics {
            subject_id: subject_id.clone(),
            acc: accuracy(&scored)?,
            auc: auc(&scored)?,
            eer: eer(&scored)?,
            n_train: n,
            n_test_genuine: features.genuine.len() - n,
            n_test_forgery: features.forgeries.len(),
        });
        pooled.extend(scored);
    }

    let count = per_subject.len() as f64;
    Ok(EvaluationReport {
        acc: per_subject.iter().map(|s| s.acc).sum::<f64>() / count,
        auc: per_subject.iter().map(|s| s.auc).sum::<f64>() / count,
        eer: per_subject.iter().map(|s| s.eer).sum::<f64>() / count,
        roc: roc_curve(&pooled)?,
        protocol: ProtocolParams {
            n,
            seed,
            subjects: dataset.subject_ids(),
            folds: None,
            aggregation: "mean_over_subjects".into(),
        },
        per_subject,
    })
}

/// Runs the protocol separately for each class of a subject partition.
/// Classes named in the assignment but matching no dataset subject are
/// skipped with a warning.
pub fn run_protocol_by_class(
    dataset: &FeatureDataset,
    assignment: &BTreeMap<String, String>,
    n: usize,
    config: &OcSvmConfig,
    seed: u64,
) -> Result<BTreeMap<String, EvaluationReport>> {
    for subject_id in dataset.subject_ids() {
        if !assignment.contains_key(&subject_id) {
            return Err(Error::Protocol {
                subject: subject_id,
                reason: "missing class assignment".into(),
            });
        }
    }

    let mut classes: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (subject_id, class) in assignment {
        classes
            .entry(class.clone())
            .or_default()
            .push(subject_id.clone());
    }

    let mut reports = BTreeMap::new();
    for (class, ids) in classes {
        let subset = dataset.restrict(&ids);
        if subset.is_empty() {
            log::warn!("class {class} matches no subjects in the dataset; skipped");
            continue;
        }
        reports.insert(class, run_protocol(&subset, n, config, seed)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn scored(genuine: &[f64], forgery: &[f64]) -> Vec<ScoredSample> {
        genuine
            .iter()
            .map(|&s| ScoredSample {
                raw_score: s,
                true_label: Label::Genuine,
                subject_id: "s".into(),
            })
            .chain(forgery.iter().map(|&s| ScoredSample {
                raw_score: s,
                true_label: Label::Forgery,
                subject_id: "s".into(),
            }))
            .collect()
    }

    fn fv(subject: &str, idx: usize, label: Label, v: [f64; 6]) -> FeatureVector {
        FeatureVector {
            subject_id: subject.into(),
            sample_index: idx,
            label,
            h_x: v[0],
            c_x: v[1],
            f_x: v[2],
            h_y: v[3],
            c_y: v[4],
            f_y: v[5],
        }
    }

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&scored(&[1.0, 2.0], &[-1.0, -2.0])).unwrap(), 1.0);
        // 3 genuine scored (+1, +1, -1), 1 forgery scored (-1): 3 of 4 right.
        assert_eq!(accuracy(&scored(&[1.0, 1.0, -1.0], &[-1.0])).unwrap(), 0.75);
        assert!(accuracy(&[]).is_err());
    }

    #[test]
    fn accuracy_at_chance_for_label_independent_verdicts() {
        // Verdict fixed genuine regardless of label on balanced data.
        assert_eq!(accuracy(&scored(&[1.0; 10], &[1.0; 10])).unwrap(), 0.5);
    }

    #[test]
    fn auc_examples() {
        assert_eq!(auc(&scored(&[2.0, 3.0], &[0.0, 1.0])).unwrap(), 1.0);
        assert_eq!(auc(&scored(&[0.5, 0.5], &[0.5, 0.5])).unwrap(), 0.5);
        // Four pairs, one inverted: 3/4.
        assert_eq!(auc(&scored(&[0.9, 0.4], &[0.6, 0.1])).unwrap(), 0.75);
        assert!(auc(&scored(&[1.0], &[])).is_err());
    }

    #[test]
    fn eer_examples() {
        assert_eq!(eer(&scored(&[2.0, 3.0], &[0.0, 1.0])).unwrap(), 0.0);
        // Identical scores for both labels: the crossing interpolates to 0.5.
        assert_eq!(eer(&scored(&[0.5, 0.5], &[0.5, 0.5])).unwrap(), 0.5);
        // Exhaustive threshold sweep by hand for this set: FAR-FRR runs
        // 1, 0.5, 0, -0.5, -1 over thresholds 0.1, 0.3, 0.7, 0.9 and the
        // sentinel; the first nonpositive difference is at 0.7 where
        // FAR = FRR = 0.5 exactly.
        assert_eq!(eer(&scored(&[0.9, 0.3], &[0.7, 0.1])).unwrap(), 0.5);
        assert!(eer(&scored(&[], &[1.0])).is_err());
    }

    #[test]
    fn roc_is_monotone_and_contains_eer() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let genuine: Vec<f64> = (0..40).map(|_| rng.random::<f64>() + 0.2).collect();
        let forgery: Vec<f64> = (0..30).map(|_| rng.random::<f64>() - 0.2).collect();
        let s = scored(&genuine, &forgery);
        let roc = roc_curve(&s).unwrap();
        for w in roc.windows(2) {
            assert!(w[1].threshold > w[0].threshold);
            assert!(w[1].far <= w[0].far);
            assert!(w[1].frr >= w[0].frr);
        }
        assert_eq!(roc[0].far, 1.0);
        assert_eq!(roc[0].frr, 0.0);
        let last = roc.last().unwrap();
        assert_eq!(last.far, 0.0);
        assert_eq!(last.frr, 1.0);
        // The EER point lies on the reported curve under the same
        // interpolation rule.
        let e = eer(&s).unwrap();
        assert!((eer_from_roc(&roc).unwrap() - e).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn rank_auc_and_eer_invariant_under_increasing_transforms() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let genuine: Vec<f64> = (0..25).map(|_| rng.random::<f64>()).collect();
        let forgery: Vec<f64> = (0..25).map(|_| rng.random::<f64>() * 0.8).collect();
        let base = scored(&genuine, &forgery);
        let transformed: Vec<ScoredSample> = base
            .iter()
            .map(|s| ScoredSample {
                raw_score: (s.raw_score * 3.0).exp(),
                ..s.clone()
            })
            .collect();
        assert!((auc(&base).unwrap() - auc(&transformed).unwrap()).abs() < 1e-12);
        assert!((eer(&base).unwrap() - eer(&transformed).unwrap()).abs() < 1e-12);
        // Accuracy is only preserved by sign-preserving transforms.
        let sign_preserving: Vec<ScoredSample> = base
            .iter()
            .map(|s| ScoredSample {
                raw_score: s.raw_score * 7.0,
                ..s.clone()
            })
            .collect();
        assert_eq!(
            accuracy(&base).unwrap(),
            accuracy(&sign_preserving).unwrap()
        );
    }

    fn toy_dataset(subjects: usize, genuine: usize, forgeries: usize) -> FeatureDataset {
        // Genuine features cluster near 0.3, forgeries near 0.8: far outliers
        // in feature space.
        let mut features = Vec::new();
        for s in 0..subjects {
            let id = format!("s{s:02}");
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + s as u64);
            for i in 0..genuine {
                let mut v = [0.0; 6];
                for x in v.iter_mut() {
                    *x = 0.3 + 0.02 * (rng.random::<f64>() - 0.5);
                }
                features.push(fv(&id, i, Label::Genuine, v));
            }
            for i in 0..forgeries {
                let mut v = [0.0; 6];
                for x in v.iter_mut() {
                    *x = 0.8 + 0.02 * (rng.random::<f64>() - 0.5);
                }
                features.push(fv(&id, i, Label::Forgery, v));
            }
        }
        FeatureDataset::from_features(features)
    }

    #[test]
    fn protocol_smoke_and_determinism() {
        let dataset = toy_dataset(2, 6, 3);
        let config = OcSvmConfig {
            sigma_sq: 0.5,
            ..OcSvmConfig::default()
        };
        // n = all genuine - 1 still leaves one test genuine.
        let report = run_protocol(&dataset, 5, &config, 42).unwrap();
        assert!(report.acc.is_finite() && report.auc.is_finite() && report.eer.is_finite());
        assert_eq!(report.per_subject.len(), 2);
        assert_eq!(report.protocol.aggregation, "mean_over_subjects");

        let again = run_protocol(&dataset, 5, &config, 42).unwrap();
        assert_eq!(
            serde_json::to_string(&report).unwrap(),
            serde_json::to_string(&again).unwrap()
        );
    }

    #[test]
    fn protocol_separates_far_outliers_perfectly() {
        let dataset = toy_dataset(3, 8, 4);
        let config = OcSvmConfig {
            sigma_sq: 0.5,
            ..OcSvmConfig::default()
        };
        let report = run_protocol(&dataset, 4, &config, 7).unwrap();
        assert_eq!(report.auc, 1.0);
        assert_eq!(report.eer, 0.0);
        for s in &report.per_subject {
            assert_eq!(s.auc, 1.0);
            assert_eq!(s.eer, 0.0);
        }
    }

    #[test]
    fn protocol_validates_sample_counts() {
        let dataset = toy_dataset(2, 4, 2);
        let config = OcSvmConfig::default();
        let err = run_protocol(&dataset, 4, &config, 1).unwrap_err();
        assert!(matches!(err, Error::Protocol { .. }));

        let mut features = Vec::new();
        for i in 0..5 {
            features.push(fv("lonely", i, Label::Genuine, [0.5; 6]));
        }
        let no_forgeries = FeatureDataset::from_features(features);
        assert!(matches!(
            run_protocol(&no_forgeries, 2, &config, 1),
            Err(Error::Protocol { .. })
        ));
    }

    #[test]
    fn aggregate_means_match_per_subject_rows() {
        let dataset = toy_dataset(4, 7, 3);
        let config = OcSvmConfig {
            sigma_sq: 0.5,
            ..OcSvmConfig::default()
        };
        let report = run_protocol(&dataset, 3, &config, 3).unwrap();
        let mean =
            |f: fn(&SubjectMetrics) -> f64| report.per_subject.iter().map(f).sum::<f64>() / 4.0;
        assert!((report.acc - mean(|s| s.acc)).abs() < 1e-15);
        assert!((report.auc - mean(|s| s.auc)).abs() < 1e-15);
        assert!((report.eer - mean(|s| s.eer)).abs() < 1e-15);
    }

    #[test]
    fn by_class_single_class_matches_plain_protocol() {
        let dataset = toy_dataset(3, 6, 3);
        let config = OcSvmConfig {
            sigma_sq: 0.5,
            ..OcSvmConfig::default()
        };
        let assignment: BTreeMap<String, String> = dataset
            .subject_ids()
            .into_iter()
            .map(|id| (id, "H1".to_string()))
            .collect();
        let by_class = run_protocol_by_class(&dataset, &assignment, 3, &config, 11).unwrap();
        let plain = run_protocol(&dataset, 3, &config, 11).unwrap();
        assert_eq!(by_class.len(), 1);
        assert_eq!(by_class["H1"], plain);
    }

    #[test]
    fn by_class_singleton_class_equals_that_subject() {
        let dataset = toy_dataset(3, 6, 3);
        let config = OcSvmConfig {
            sigma_sq: 0.5,
            ..OcSvmConfig::default()
        };
        let mut assignment = BTreeMap::new();
        assignment.insert("s00".to_string(), "A".to_string());
        assignment.insert("s01".to_string(), "B".to_string());
        assignment.insert("s02".to_string(), "B".to_string());
        let by_class = run_protocol_by_class(&dataset, &assignment, 3, &config, 11).unwrap();
        let a = &by_class["A"];
        assert_eq!(a.per_subject.len(), 1);
        assert_eq!(a.acc, a.per_subject[0].acc);
        // Per-subject sampling only depends on (seed, subject), so the same
        // subject's row matches the full run.
        let plain = run_protocol(&dataset, 3, &config, 11).unwrap();
        assert_eq!(a.per_subject[0], plain.per_subject[0]);
    }

    #[test]
    fn by_class_missing_assignment_is_an_error() {
        let dataset = toy_dataset(2, 6, 3);
        let assignment: BTreeMap<String, String> = [("s00".to_string(), "A".to_string())].into();
        assert!(matches!(
            run_protocol_by_class(&dataset, &assignment, 3, &OcSvmConfig::default(), 1),
            Err(Error::Protocol { .. })
        ));
    }
}
