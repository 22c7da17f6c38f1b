//! Command implementations behind the thin CLI surface.

use anyhow::{anyhow, bail, Context};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use permsig::cluster::{
    cut_dendrogram, hierarchical_cluster, metric_stability, parallelepiped_fit, summarize_subject,
    CutRule, FeatureSelection, Linkage, Metric,
};
use permsig::dataio::{self, SynthConfig};
use permsig::eval::{run_protocol, run_protocol_by_class, EvaluationReport, FeatureDataset};
use permsig::ocsvm::{self, OcSvmConfig, OcSvmModel};
use permsig::ordinal::OrdinalConfig;
use permsig::preprocess::{self, Label};
use permsig::quantifiers::{quantify_signature, FeatureVector};

use crate::{ClusterArgs, EvaluateArgs, FeaturesArgs, SynthArgs, TrainArgs, VerifyArgs};

pub enum Outcome {
    Success,
    PartialFailure,
}

type CmdResult = anyhow::Result<Outcome>;

fn thread_pool(jobs: usize) -> anyhow::Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        builder = builder.num_threads(jobs);
    }
    Ok(builder.build()?)
}

pub fn synth(args: SynthArgs) -> CmdResult {
    let config = SynthConfig {
        n_subjects: args.subjects,
        genuine_per_subject: args.genuine,
        forgeries_per_subject: args.forgeries,
        harmonics: args.harmonics,
        genuine_jitter: args.genuine_jitter,
        forgery_distortion: args.forgery_distortion,
        seed: args.seed,
    };
    let manifest =
        dataio::write_synthetic_dataset(&config, &args.out).context("writing synthetic dataset")?;
    println!("{}", manifest.display());
    Ok(Outcome::Success)
}

pub fn features(args: FeaturesArgs) -> CmdResult {
    let ordinal = OrdinalConfig::new(args.dimension, args.lag)?;
    if args.strict && args.resample_length < ordinal.reliable_series_len() {
        bail!(
            "strict: resample length {} is below the statistical-reliability length {}",
            args.resample_length,
            ordinal.reliable_series_len()
        );
    }
    let manifest = dataio::DatasetManifest::load(&args.manifest).context("loading manifest")?;
    let root = dataio::manifest_root(&args.manifest);
    let refs = manifest.files(root);

    let strict = args.strict;
    let target_len = args.resample_length;
    let pool = thread_pool(args.jobs)?;
    let results: Vec<Result<FeatureVector, (String, String)>> = pool.install(|| {
        refs.par_iter()
            .map(|r| {
                let run = || -> permsig::Result<FeatureVector> {
                    let raw = dataio::load_trace(
                        &r.path,
                        manifest.format,
                        &r.subject_id,
                        r.label,
                        r.sample_index,
                    )?;
                    if strict {
                        let (cx, cy) = raw.constant_axes();
                        if cx || cy {
                            return Err(permsig::Error::Validation(
                                "strict: degenerate constant axis".into(),
                            ));
                        }
                    }
                    let prepped = preprocess::preprocess(&raw, target_len)?;
                    quantify_signature(&prepped, &ordinal)
                };
                run().map_err(|e| (r.path.display().to_string(), e.to_string()))
            })
            .collect()
    });

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for result in results {
        match result {
            Ok(f) => rows.push(f),
            Err(f) => failures.push(f),
        }
    }
    rows.sort_by(|a, b| {
        (
            a.subject_id.as_str(),
            a.label == Label::Forgery,
            a.sample_index,
        )
            .cmp(&(
                b.subject_id.as_str(),
                b.label == Label::Forgery,
                b.sample_index,
            ))
    });

    match args.format.as_str() {
        "csv" => dataio::write_features_csv(&args.out, &rows)?,
        "json" => dataio::write_features_json(&args.out, &ordinal, &rows)?,
        other => bail!("unknown output format {other:?} (expected csv or json)"),
    }

    if failures.is_empty() {
        Ok(Outcome::Success)
    } else {
        eprintln!("{} of {} files failed:", failures.len(), refs.len());
        for (path, reason) in &failures {
            eprintln!("  {path}: {reason}");
        }
        Ok(Outcome::PartialFailure)
    }
}

pub fn train(args: TrainArgs) -> CmdResult {
    let rows = dataio::read_features_csv(&args.features).context("reading features")?;
    let dataset = FeatureDataset::from_features(rows);
    if dataset.is_empty() {
        bail!("feature file contains no subjects");
    }
    std::fs::create_dir_all(&args.out_dir)?;

    let base = OcSvmConfig {
        nu: args.nu,
        sigma_sq: args.sigma_sq,
        solver_tolerance: args.tolerance,
        max_iterations: args.max_iterations,
    };
    base.validate()?;

    let subjects: Vec<(String, Vec<[f64; 6]>)> = dataset
        .subjects()
        .map(|(id, f)| (id.clone(), f.genuine.iter().map(|v| v.values()).collect()))
        .collect();

    let pool = thread_pool(args.jobs)?;
    let results: Vec<(String, Result<OcSvmModel, String>)> = pool.install(|| {
        subjects
            .par_iter()
            .map(|(id, samples)| {
                let run = || -> permsig::Result<OcSvmModel> {
                    let config = match &args.sigma_grid {
                        Some(grid) => {
                            let sigma_sq = ocsvm::cross_validate_sigma(
                                samples, &base, grid, args.folds, args.seed,
                            )?;
                            OcSvmConfig { sigma_sq, ..base }
                        }
                        None => base,
                    };
                    ocsvm::train(samples, &config)
                };
                (id.clone(), run().map_err(|e| e.to_string()))
            })
            .collect()
    });

    let mut failures = 0usize;
    for (id, result) in results {
        match result {
            Ok(model) => {
                let path = args.out_dir.join(format!("model_{id}.json"));
                model.save(&path)?;
                println!("{}", path.display());
            }
            Err(reason) => {
                eprintln!("subject {id}: {reason}");
                failures += 1;
            }
        }
    }
    if failures == 0 {
        Ok(Outcome::Success)
    } else {
        Ok(Outcome::PartialFailure)
    }
}

pub fn verify(args: VerifyArgs) -> CmdResult {
    let model = OcSvmModel::load(&args.model).context("loading model")?;
    let rows = dataio::read_features_csv(&args.features).context("reading features")?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "subject_id,sample_index,label,raw_score,verdict")?;
    for row in &rows {
        let decision = ocsvm::decide(&model, &row.values())?;
        writeln!(
            out,
            "{},{},{},{},{}",
            row.subject_id, row.sample_index, row.label, decision.raw_score, decision.verdict
        )?;
    }
    Ok(Outcome::Success)
}

fn summary_line(report: &EvaluationReport) -> serde_json::Value {
    serde_json::json!({
        "n": report.protocol.n,
        "acc": report.acc,
        "auc": report.auc,
        "eer": report.eer,
    })
}

pub fn evaluate(args: EvaluateArgs) -> CmdResult {
    let rows = dataio::read_features_csv(&args.features).context("reading features")?;
    let dataset = FeatureDataset::from_features(rows);
    let config = OcSvmConfig {
        nu: args.nu,
        sigma_sq: args.sigma_sq,
        ..OcSvmConfig::default()
    };

    match &args.classes {
        None => {
            let report = run_protocol(&dataset, args.train_size, &config, args.seed)?;
            report.save_json(&args.out)?;
            if let Some(path) = &args.roc_out {
                report.write_roc_csv(path)?;
            }
            if let Some(path) = &args.per_subject_out {
                report.write_per_subject_csv(path)?;
            }
            println!("{}", summary_line(&report));
        }
        Some(classes_path) => {
            let assignment = read_class_assignment(classes_path)?;
            if args.strict {
                for class in assignment.values() {
                    let populated = assignment
                        .iter()
                        .any(|(s, c)| c == class && dataset.get(s).is_some());
                    if !populated {
                        bail!("strict: class {class} matches no subject in the feature file");
                    }
                }
            }
            let reports =
                run_protocol_by_class(&dataset, &assignment, args.train_size, &config, args.seed)?;
            std::fs::write(&args.out, serde_json::to_string_pretty(&reports)?)?;
            if args.roc_out.is_some() || args.per_subject_out.is_some() {
                bail!("--roc-out/--per-subject-out apply to single-report runs only");
            }
            let summary: BTreeMap<&String, serde_json::Value> =
                reports.iter().map(|(c, r)| (c, summary_line(r))).collect();
            println!("{}", serde_json::to_value(summary)?);
        }
    }
    Ok(Outcome::Success)
}

fn read_class_assignment(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let content = std::fs::read_to_string(path)?;
    let mut assignment = BTreeMap::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line == "subject_id,class") {
            continue;
        }
        let (subject, class) = line
            .split_once(',')
            .ok_or_else(|| anyhow!("{}:{}: expected subject_id,class", path.display(), i + 1))?;
        assignment.insert(subject.trim().to_string(), class.trim().to_string());
    }
    Ok(assignment)
}

pub fn cluster(args: ClusterArgs) -> CmdResult {
    let selection: FeatureSelection = args.feature_selection.parse()?;
    let metric: Metric = args.metric.parse()?;
    let linkage: Linkage = args.linkage.parse()?;

    let rows = dataio::read_features_csv(&args.features).context("reading features")?;
    let dataset = FeatureDataset::from_features(rows);
    let mut summaries = Vec::new();
    for (id, features) in dataset.subjects() {
        let summary = summarize_subject(&features.genuine, selection)
            .with_context(|| format!("summarizing subject {id}"))?;
        summaries.push(summary);
    }

    let dendrogram = hierarchical_cluster(&summaries, metric, linkage)?;
    dendrogram.save_newick(&args.newick_out)?;

    let cut_rule = match (args.k, args.height_fraction) {
        (Some(_), Some(_)) => bail!("--k and --height-fraction are mutually exclusive"),
        (Some(k), None) => Some(CutRule::Clusters(k)),
        (None, Some(f)) => Some(CutRule::HeightFraction(f)),
        (None, None) => None,
    };

    if let Some(rule) = cut_rule {
        let assignment = cut_dendrogram(&dendrogram, rule)?;
        if let Some(path) = &args.assignments_out {
            let mut out = String::from("subject_id,cluster\n");
            for (subject, label) in &assignment {
                out.push_str(&format!("{subject},{label}\n"));
            }
            std::fs::write(path, out)?;
        }
        if let Some(path) = &args.boxes_out {
            let labeled: Vec<(String, _)> = summaries
                .iter()
                .map(|s| (format!("C{}", assignment[&s.subject_id]), s.clone()))
                .collect();
            let model = parallelepiped_fit(&labeled, selection.dimension_names())?;
            model.save_json(path)?;
        }
    } else if args.assignments_out.is_some() || args.boxes_out.is_some() {
        bail!("--assignments-out/--boxes-out need a cut (--k or --height-fraction)");
    }

    if args.stability {
        let k = args.k.ok_or_else(|| anyhow!("--stability needs --k"))?;
        let report = metric_stability(&summaries, linkage, k)?;
        println!("{}", serde_json::to_string(&report)?);
    }
    Ok(Outcome::Success)
}
