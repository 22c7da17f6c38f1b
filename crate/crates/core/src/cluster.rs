//! Subject grouping by genuine-signature feature statistics: agglomerative
//! clustering with Newick export, plus the axis-aligned box (parallelepiped)
//! classifier.
//!
//! Each subject is summarized by the mean and sample standard deviation of a
//! chosen quantifier pair (or of all six features) over its genuine
//! signatures. Summaries are clustered bottom-up under a selectable distance
//! and linkage; merges at equal distance are broken deterministically toward
//! the pair with lexicographically smallest subject ids, so identical inputs
//! always produce the identical merge sequence.
//!
//! Cut levels can be given as a cluster count or as a fraction of the root
//! merge height, so percentage levels ("formed below the 25% level") are
//! expressible directly.
//!
//! Only rooted agglomerative trees are built here; unrooted additive-tree
//! methods such as neighbor joining are out of scope.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quantifiers::FeatureVector;

/// Which features feed the summary statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSelection {
    /// Mean and SD of the entropy of each axis (4 values). The default:
    /// each quantifier is treated independently.
    #[default]
    Entropy,
    /// Mean and SD of the complexity of each axis.
    Complexity,
    /// Mean and SD of the Fisher information of each axis.
    Fisher,
    /// Mean and SD of all six features (12 values).
    All,
}

impl FeatureSelection {
    /// Indices into [`FeatureVector::values`] used by this selection.
    fn feature_indices(&self) -> &'static [usize] {
        match self {
            FeatureSelection::Entropy => &[0, 3],
            FeatureSelection::Complexity => &[1, 4],
            FeatureSelection::Fisher => &[2, 5],
            FeatureSelection::All => &[0, 1, 2, 3, 4, 5],
        }
    }

    /// Names of the summary dimensions, mean before SD per feature.
    pub fn dimension_names(&self) -> Vec<String> {
        self.feature_indices()
            .iter()
            .flat_map(|&i| {
                let f = FeatureVector::SCHEMA[i];
                [format!("mean_{f}"), format!("sd_{f}")]
            })
            .collect()
    }
}

impl FromStr for FeatureSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(Self::Entropy),
            "complexity" => Ok(Self::Complexity),
            "fisher" => Ok(Self::Fisher),
            "all" => Ok(Self::All),
            other => Err(Error::Parameter(format!(
                "unknown feature selection {other:?}"
            ))),
        }
    }
}

/// Distance between subject summaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Maximum,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            "maximum" => Ok(Self::Maximum),
            other => Err(Error::Parameter(format!("unknown metric {other:?}"))),
        }
    }
}

impl Metric {
    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
            Metric::Maximum => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        }
    }
}

/// Cluster-to-cluster dissimilarity update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    #[default]
    Average,
    Complete,
    Single,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "average" => Ok(Self::Average),
            "complete" => Ok(Self::Complete),
            "single" => Ok(Self::Single),
            other => Err(Error::Parameter(format!("unknown linkage {other:?}"))),
        }
    }
}

/// Per-subject summary statistics in a fixed dimension order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectSummary {
    pub subject_id: String,
    pub values: Vec<f64>,
}

/// Elementwise mean and sample standard deviation (n-1 denominator) of a
/// subject's feature vectors. Callers pass the genuine vectors only.
pub fn summarize_subject(
    features: &[FeatureVector],
    selection: FeatureSelection,
) -> Result<SubjectSummary> {
    if features.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "subject summary needs at least 2 feature vectors, got {}",
            features.len()
        )));
    }
    let subject_id = features[0].subject_id.clone();
    if features.iter().any(|f| f.subject_id != subject_id) {
        return Err(Error::Validation(
            "summarize_subject received mixed subject ids".into(),
        ));
    }

    let n = features.len() as f64;
    let mut values = Vec::new();
    for &idx in selection.feature_indices() {
        let column: Vec<f64> = features.iter().map(|f| f.values()[idx]).collect();
        let mean = column.iter().sum::<f64>() / n;
        let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        values.push(mean);
        values.push(var.sqrt());
    }
    Ok(SubjectSummary { subject_id, values })
}

/// One agglomeration step. Node ids: `0..leaves` are leaves in input order;
/// `leaves + k` is the cluster created by `merges[k]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

/// Stepwise dendrogram: the full merge sequence over the input summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    leaves: Vec<String>,
    merges: Vec<Merge>,
}

impl Dendrogram {
    pub fn leaves(&self) -> &[String] {
        &self.leaves
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn root_height(&self) -> f64 {
        self.merges.last().map_or(0.0, |m| m.height)
    }

    /// Newick text with branch lengths; a child's branch spans the height
    /// difference to its parent merge.
    pub fn to_newick(&self) -> String {
        let n = self.leaves.len();
        if n == 1 {
            return format!("{};", newick_name(&self.leaves[0]));
        }
        let root = n + self.merges.len() - 1;
        format!("{};", self.render(root, None))
    }

    fn render(&self, node: usize, parent_height: Option<f64>) -> String {
        let n = self.leaves.len();
        if node < n {
            let h = parent_height.unwrap_or(0.0);
            return format!("{}:{}", newick_name(&self.leaves[node]), h);
        }
        let merge = &self.merges[node - n];
        let body = format!(
            "({},{})",
            self.render(merge.left, Some(merge.height)),
            self.render(merge.right, Some(merge.height))
        );
        match parent_height {
            None => body,
            Some(h) => format!("{body}:{}", h - merge.height),
        }
    }

    pub fn save_newick(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_newick() + "\n")?;
        Ok(())
    }
}

fn newick_name(name: &str) -> String {
    if name
        .chars()
        .any(|c| c.is_whitespace() || "()[]:;,'".contains(c))
    {
        format!("'{}'", name.replace('\'', "''"))
    } else {
        name.to_string()
    }
}

/// Bottom-up clustering of subject summaries.
///
/// Merge heights are nondecreasing for all three linkages. Equal-distance
/// candidates are ordered by the lexicographically smallest pair of cluster
/// representative ids (the minimal subject id of each side).
#[allow(clippy::needless_range_loop)] // rows and columns of one matrix
pub fn hierarchical_cluster(
    summaries: &[SubjectSummary],
    metric: Metric,
    linkage: Linkage,
) -> Result<Dendrogram> {
    if summaries.len() < 2 {
        return Err(Error::InsufficientData(
            "clustering needs at least 2 summaries".into(),
        ));
    }
    let dim = summaries[0].values.len();
    if dim == 0 || summaries.iter().any(|s| s.values.len() != dim) {
        return Err(Error::InputShape(
            "summaries must share a nonzero dimension".into(),
        ));
    }
    {
        let mut ids: Vec<&str> = summaries.iter().map(|s| s.subject_id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Validation("duplicate subject ids".into()));
        }
    }

    let n = summaries.len();
    struct Active {
        node: usize,
        size: usize,
        min_id: String,
    }
    let mut active: Vec<Active> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| Active {
            node: i,
            size: 1,
            min_id: s.subject_id.clone(),
        })
        .collect();
    let mut dist: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| metric.distance(&summaries[i].values, &summaries[j].values))
                .collect()
        })
        .collect();

    let mut merges = Vec::with_capacity(n - 1);
    while active.len() > 1 {
        // Nearest active pair; ties resolved by representative ids.
        let mut best: Option<(usize, usize)> = None;
        for a in 0..active.len() {
            for b in (a + 1)..active.len() {
                let better = match best {
                    None => true,
                    Some((pa, pb)) => {
                        let (d_new, d_old) = (dist[a][b], dist[pa][pb]);
                        d_new < d_old
                            || (d_new == d_old
                                && ordered_pair(&active[a].min_id, &active[b].min_id)
                                    < ordered_pair(&active[pa].min_id, &active[pb].min_id))
                    }
                };
                if better {
                    best = Some((a, b));
                }
            }
        }
        let (a, b) = best.expect("at least two active clusters");
        let height = dist[a][b];
        debug_assert!(merges
            .last()
            .is_none_or(|m: &Merge| m.height <= height + 1e-12));

        let size = active[a].size + active[b].size;
        merges.push(Merge {
            left: active[a].node,
            right: active[b].node,
            height,
            size,
        });

        // Lance-Williams update of row a, then drop row b.
        let (sa, sb) = (active[a].size as f64, active[b].size as f64);
        for k in 0..active.len() {
            if k == a || k == b {
                continue;
            }
            let dak = dist[a][k];
            let dbk = dist[b][k];
            let updated = match linkage {
                Linkage::Average => (sa * dak + sb * dbk) / (sa + sb),
                Linkage::Complete => dak.max(dbk),
                Linkage::Single => dak.min(dbk),
            };
            dist[a][k] = updated;
            dist[k][a] = updated;
        }
        active[a].node = n + merges.len() - 1;
        active[a].size = size;
        if active[b].min_id < active[a].min_id {
            active[a].min_id = active[b].min_id.clone();
        }
        active.swap_remove(b);
        let last = active.len();
        if b < last {
            // swap_remove moved the former last cluster into slot b; relocate
            // its distances using the still-untouched source row.
            for k in 0..last {
                dist[b][k] = dist[last][k];
                dist[k][b] = dist[last][k];
            }
            dist[b][b] = 0.0;
        }
    }

    Ok(Dendrogram {
        leaves: summaries.iter().map(|s| s.subject_id.clone()).collect(),
        merges,
    })
}

fn ordered_pair<'a>(x: &'a str, y: &'a str) -> (&'a str, &'a str) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Where to cut the dendrogram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutRule {
    /// Stop at exactly this many clusters.
    Clusters(usize),
    /// Keep merges whose height is at most this fraction of the root height.
    HeightFraction(f64),
}

/// Cuts the tree into flat clusters. Returned labels are 0-based, assigned in
/// order of each cluster's smallest subject id.
pub fn cut_dendrogram(dendrogram: &Dendrogram, rule: CutRule) -> Result<BTreeMap<String, usize>> {
    let n = dendrogram.leaves.len();
    let applied = match rule {
        CutRule::Clusters(k) => {
            if k < 1 || k > n {
                return Err(Error::Parameter(format!(
                    "cluster count {k} outside 1..={n}"
                )));
            }
            n - k
        }
        CutRule::HeightFraction(f) => {
            if !(0.0..).contains(&f) || !f.is_finite() {
                return Err(Error::Parameter(format!(
                    "height fraction must be finite and >= 0, got {f}"
                )));
            }
            let cutoff = f * dendrogram.root_height();
            // Heights are nondecreasing, so the kept merges are a prefix.
            dendrogram.merges.partition_point(|m| m.height <= cutoff)
        }
    };

    // Union-find over the first `applied` merges.
    let mut parent: Vec<usize> = (0..n + applied).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for (k, m) in dendrogram.merges[..applied].iter().enumerate() {
        let target = n + k;
        let l = find(&mut parent, m.left);
        let r = find(&mut parent, m.right);
        parent[l] = target;
        parent[r] = target;
    }

    let mut groups: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
    for (leaf, id) in dendrogram.leaves.iter().enumerate() {
        let root = find(&mut parent, leaf);
        groups.entry(root).or_default().push(id);
    }
    let mut clusters: Vec<Vec<&str>> = groups.into_values().collect();
    for c in clusters.iter_mut() {
        c.sort_unstable();
    }
    clusters.sort_by(|a, b| a[0].cmp(b[0]));

    let mut assignment = BTreeMap::new();
    for (label, members) in clusters.iter().enumerate() {
        for &m in members {
            assignment.insert(m.to_string(), label);
        }
    }
    Ok(assignment)
}

/// Whether cluster memberships at a fixed k agree across the three metrics.
/// Informational: on arbitrary data the metrics may legitimately disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricStabilityReport {
    pub k: usize,
    pub euclidean_vs_manhattan: bool,
    pub euclidean_vs_maximum: bool,
    pub manhattan_vs_maximum: bool,
}

pub fn metric_stability(
    summaries: &[SubjectSummary],
    linkage: Linkage,
    k: usize,
) -> Result<MetricStabilityReport> {
    let mut cuts = Vec::new();
    for metric in [Metric::Euclidean, Metric::Manhattan, Metric::Maximum] {
        let tree = hierarchical_cluster(summaries, metric, linkage)?;
        cuts.push(cut_dendrogram(&tree, CutRule::Clusters(k))?);
    }
    Ok(MetricStabilityReport {
        k,
        euclidean_vs_manhattan: cuts[0] == cuts[1],
        euclidean_vs_maximum: cuts[0] == cuts[2],
        manhattan_vs_maximum: cuts[1] == cuts[2],
    })
}

/// Axis-aligned min-max box per class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelepipedModel {
    pub dimension_names: Vec<String>,
    /// Per class, per dimension: closed interval [min, max].
    pub classes: BTreeMap<String, Vec<[f64; 2]>>,
}

impl ParallelepipedModel {
    /// JSON of shape `{class: {dim: [min, max]}}`.
    pub fn to_json_string(&self) -> Result<String> {
        let mut out: BTreeMap<&str, BTreeMap<&str, [f64; 2]>> = BTreeMap::new();
        for (class, dims) in &self.classes {
            let entry = out.entry(class).or_default();
            for (name, interval) in self.dimension_names.iter().zip(dims) {
                entry.insert(name, *interval);
            }
        }
        Ok(serde_json::to_string_pretty(&out)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string()?)?;
        Ok(())
    }
}

/// Fits one box per class over the labeled training summaries. Every training
/// point is inside its own class box by construction.
pub fn parallelepiped_fit(
    labeled: &[(String, SubjectSummary)],
    dimension_names: Vec<String>,
) -> Result<ParallelepipedModel> {
    if labeled.is_empty() {
        return Err(Error::InsufficientData("no labeled summaries".into()));
    }
    let dim = labeled[0].1.values.len();
    if dim == 0
        || labeled.iter().any(|(_, s)| s.values.len() != dim)
        || dimension_names.len() != dim
    {
        return Err(Error::InputShape(
            "summaries and dimension names must share a nonzero dimension".into(),
        ));
    }
    let mut classes: BTreeMap<String, Vec<[f64; 2]>> = BTreeMap::new();
    for (class, summary) in labeled {
        let box_ = classes
            .entry(class.clone())
            .or_insert_with(|| vec![[f64::INFINITY, f64::NEG_INFINITY]; dim]);
        for (interval, &v) in box_.iter_mut().zip(&summary.values) {
            interval[0] = interval[0].min(v);
            interval[1] = interval[1].max(v);
        }
    }
    Ok(ParallelepipedModel {
        dimension_names,
        classes,
    })
}

/// Assignment produced by the box classifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxAssignment {
    Class(String),
    Unassigned,
}

impl fmt::Display for BoxAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxAssignment::Class(c) => f.write_str(c),
            BoxAssignment::Unassigned => f.write_str("unassigned"),
        }
    }
}

/// Classifies a point by box containment. Overlapping boxes are disambiguated
/// toward the smallest volume (then the lexicographically first class name);
/// a point outside every box is unassigned.
pub fn parallelepiped_classify(
    model: &ParallelepipedModel,
    point: &[f64],
) -> Result<BoxAssignment> {
    if point.len() != model.dimension_names.len() {
        return Err(Error::InputShape(format!(
            "point has {} dimensions, model expects {}",
            point.len(),
            model.dimension_names.len()
        )));
    }
    let mut best: Option<(f64, &str)> = None;
    for (class, dims) in &model.classes {
        let inside = dims
            .iter()
            .zip(point)
            .all(|(interval, &v)| interval[0] <= v && v <= interval[1]);
        if !inside {
            continue;
        }
        let volume: f64 = dims
            .iter()
            .map(|interval| interval[1] - interval[0])
            .product();
        if best.is_none_or(|(bv, _)| volume < bv) {
            best = Some((volume, class));
        }
    }
    Ok(match best {
        Some((_, class)) => BoxAssignment::Class(class.to_string()),
        None => BoxAssignment::Unassigned,
    })
}
