//! Ordinal-pattern symbolization of scalar time series.
//!
//! A window of `D` samples taken at lag `tau` is reduced to the permutation
//! describing the relative ordering of its values; counting how often each of
//! the `D!` permutations occurs across a series yields a probability
//! distribution that depends only on comparisons between samples, never on
//! their amplitudes.
//!
//! # Pattern convention
//!
//! A window `(w[0], ..., w[D-1])` is stored oldest sample first, most recent
//! last. Its pattern assigns each position the ascending rank of its value,
//! `0` for the smallest up to `D-1` for the largest:
//!
//! ```text
//! window  (1, 4, 3, 2)   ranks by value: 1 -> 0, 2 -> 1, 3 -> 2, 4 -> 3
//! pattern [0, 3, 2, 1]
//! ```
//!
//! Equal values are ranked most recent first, so the window `(2, 2)` maps to
//! `[1, 0]`, never `[0, 1]`. The rule is deterministic rather than randomized:
//! ties have measure zero on continuous data but are common on quantized
//! tablet coordinates.
//!
//! # Index order
//!
//! Distributions are indexed by the lexicographic (Lehmer) rank of the
//! pattern. The all-ascending pattern `[0, 1, ..., D-1]` is the identity
//! permutation and occupies rank 0; the all-descending pattern occupies rank
//! `D! - 1`. A strictly monotone series therefore concentrates all probability
//! mass at an extreme index. Downstream Fisher information sums over
//! *contiguous* indices in exactly this order, so the convention here is part
//! of the feature definition, not an implementation detail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest supported embedding dimension.
pub const MIN_DIMENSION: usize = 2;
/// Largest supported embedding dimension (8! = 40320 patterns).
pub const MAX_DIMENSION: usize = 8;

/// `FACTORIAL[d]` = d! for d <= 8.
const FACTORIAL: [usize; 9] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320];

/// Embedding dimension and time lag for pattern extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrdinalConfig {
    embedding_dimension: usize,
    time_lag: usize,
}

impl OrdinalConfig {
    pub fn new(embedding_dimension: usize, time_lag: usize) -> Result<Self> {
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&embedding_dimension) {
            return Err(Error::Parameter(format!(
                "embedding dimension {embedding_dimension} outside {MIN_DIMENSION}..={MAX_DIMENSION}"
            )));
        }
        if time_lag < 1 {
            return Err(Error::Parameter("time lag must be >= 1".into()));
        }
        Ok(Self {
            embedding_dimension,
            time_lag,
        })
    }

    pub fn embedding_dimension(&self) -> usize {
        self.embedding_dimension
    }

    pub fn time_lag(&self) -> usize {
        self.time_lag
    }

    /// Number of distinct patterns, `D!`.
    pub fn pattern_count(&self) -> usize {
        FACTORIAL[self.embedding_dimension]
    }

    /// Shortest series that yields at least one window: `(D-1)*tau + 1`.
    pub fn min_series_len(&self) -> usize {
        (self.embedding_dimension - 1) * self.time_lag + 1
    }

    /// Length below which pattern statistics are flagged as unreliable,
    /// `10 * D!`.
    pub fn reliable_series_len(&self) -> usize {
        10 * self.pattern_count()
    }
}

/// The ordinal pattern of one window: `ranks()[j]` is the ascending rank of
/// the j-th window sample (see the module docs for the tie rule).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdinalPattern {
    ranks: Vec<u8>,
}

impl OrdinalPattern {
    /// Builds a pattern from an explicit rank vector, validating that it is a
    /// permutation of `0..len`.
    pub fn from_ranks(ranks: Vec<u8>) -> Result<Self> {
        validate_permutation(&ranks)?;
        Ok(Self { ranks })
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn dimension(&self) -> usize {
        self.ranks.len()
    }

    /// Lexicographic rank of this pattern among all permutations of the same
    /// dimension.
    pub fn lehmer_rank(&self) -> usize {
        lehmer_rank_unchecked(&self.ranks)
    }
}

/// Bandt-Pompe probability distribution over the `D!` ordinal patterns of a
/// series, indexed by Lehmer rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrdinalDistribution {
    probabilities: Vec<f64>,
    config: OrdinalConfig,
    window_count: usize,
}

impl OrdinalDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn config(&self) -> &OrdinalConfig {
        &self.config
    }

    /// Number of windows evaluated, `M - (D-1)*tau`.
    pub fn window_count(&self) -> usize {
        self.window_count
    }
}

/// Computes the ordinal pattern of a single window.
///
/// The window length is the embedding dimension and must lie in
/// [`MIN_DIMENSION`]..=[`MAX_DIMENSION`].
pub fn pattern_of_window(window: &[f64]) -> Result<OrdinalPattern> {
    let d = window.len();
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        return Err(Error::InputShape(format!(
            "window length {d} outside {MIN_DIMENSION}..={MAX_DIMENSION}"
        )));
    }
    if window.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite sample in window".into()));
    }
    let mut order = [0u8; MAX_DIMENSION];
    let mut ranks = [0u8; MAX_DIMENSION];
    fill_ranks(window, &mut order, &mut ranks);
    Ok(OrdinalPattern {
        ranks: ranks[..d].to_vec(),
    })
}

/// Lexicographic rank of a permutation of `{0..D-1}` (identity -> 0, reversed
/// -> D!-1). Errors if the input is not a permutation.
pub fn lehmer_rank(perm: &[u8]) -> Result<usize> {
    validate_permutation(perm)?;
    Ok(lehmer_rank_unchecked(perm))
}

/// Extracts every lag-`tau` window of length `D` from the series and returns
/// the relative frequency of each pattern.
///
/// Errors when the series is shorter than `(D-1)*tau + 1`; logs a warning (but
/// proceeds) when it is shorter than `10 * D!`, where frequencies become
/// statistically unreliable.
pub fn bandt_pompe_pdf(series: &[f64], config: &OrdinalConfig) -> Result<OrdinalDistribution> {
    let d = config.embedding_dimension();
    let tau = config.time_lag();
    let m = series.len();
    let needed = config.min_series_len();
    if m < needed {
        return Err(Error::SeriesTooShort { needed, got: m });
    }
    if m < config.reliable_series_len() {
        log::warn!(
            "series length {m} is below 10*D! = {}; pattern frequencies may be unreliable",
            config.reliable_series_len()
        );
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("non-finite sample in series".into()));
    }

    let span = (d - 1) * tau;
    let mut counts = vec![0u64; config.pattern_count()];
    let mut window = [0f64; MAX_DIMENSION];
    let mut order = [0u8; MAX_DIMENSION];
    let mut ranks = [0u8; MAX_DIMENSION];
    for s in span..m {
        for (j, w) in window[..d].iter_mut().enumerate() {
            *w = series[s - (d - 1 - j) * tau];
        }
        fill_ranks(&window[..d], &mut order, &mut ranks);
        counts[lehmer_rank_unchecked(&ranks[..d])] += 1;
    }

    let window_count = m - span;
    debug_assert_eq!(counts.iter().sum::<u64>(), window_count as u64);
    let probabilities = counts
        .iter()
        .map(|&c| c as f64 / window_count as f64)
        .collect();
    Ok(OrdinalDistribution {
        probabilities,
        config: *config,
        window_count,
    })
}

/// Sorts window positions by (value ascending, position descending) and
/// inverts the result into ranks. The descending position comparison is the
/// tie rule: among equal values the most recent sample gets the lower rank.
fn fill_ranks(window: &[f64], order: &mut [u8; MAX_DIMENSION], ranks: &mut [u8; MAX_DIMENSION]) {
    let d = window.len();
    for (j, o) in order[..d].iter_mut().enumerate() {
        *o = j as u8;
    }
    order[..d].sort_unstable_by(|&a, &b| {
        window[a as usize]
            .partial_cmp(&window[b as usize])
            .expect("samples validated finite")
            .then(b.cmp(&a))
    });
    for (rank, &pos) in order[..d].iter().enumerate() {
        ranks[pos as usize] = rank as u8;
    }
}

fn lehmer_rank_unchecked(perm: &[u8]) -> usize {
    let d = perm.len();
    let mut rank = 0usize;
    for i in 0..d {
        let smaller_after = perm[i + 1..].iter().filter(|&&x| x < perm[i]).count();
        rank += smaller_after * FACTORIAL[d - 1 - i];
    }
    rank
}

fn validate_permutation(perm: &[u8]) -> Result<()> {
    let d = perm.len();
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&d) {
        return Err(Error::InputShape(format!(
            "permutation length {d} outside {MIN_DIMENSION}..={MAX_DIMENSION}"
        )));
    }
    let mut seen = [false; MAX_DIMENSION];
    for &r in perm {
        let r = r as usize;
        if r >= d || seen[r] {
            return Err(Error::Validation(format!(
                "not a permutation of 0..{d}: {perm:?}"
            )));
        }
        seen[r] = true;
    }
    Ok(())
}
