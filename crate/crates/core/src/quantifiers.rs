//! Information quantifiers over discrete probability distributions, and the
//! six-dimensional feature vector of a signature.
//!
//! Three functionals of a distribution `P` over `N` states, each normalized
//! into `[0, 1]`:
//!
//! * normalized Shannon entropy `H = S[P] / ln N` with `S[P] = -sum p ln p`;
//! * statistical complexity `C = Q_J[P, P_e] * H`, where `Q_J` is the
//!   Jensen-Shannon disequilibrium against the uniform distribution `P_e`,
//!   normalized so a point mass maps to exactly 1;
//! * normalized Fisher information `F = F0 * sum (sqrt(p[i+1]) - sqrt(p[i]))^2`
//!   over contiguous index pairs, with `F0 = 1` for a point mass at either end
//!   of the index range and `F0 = 1/2` otherwise.
//!
//! Entropy and complexity are invariant under index permutations; Fisher
//! information is not. `F` sums over *adjacent* indices, so it inherits the
//! Lehmer ordering fixed by the [`crate::ordinal`] module.
//!
//! The disequilibrium normalizer is computed from its defining property,
//! `Q0 = 1 / J[P_delta, P_e]`, by direct evaluation at a point mass rather
//! than from a closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{self, OrdinalConfig};
use crate::preprocess::{Label, SignatureTrace};

/// Sum-to-one tolerance accepted for input distributions.
const PROB_SUM_TOLERANCE: f64 = 1e-9;
/// Below this, `p ln p` is taken as 0 to avoid underflow artifacts.
const UNDERFLOW_GUARD: f64 = 1e-300;

/// Entropy, complexity, and Fisher information of one distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantifierTriple {
    pub entropy: f64,
    pub complexity: f64,
    pub fisher: f64,
}

/// The six quantifiers of a signature plus its identity.
///
/// Field order matches the feature CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub subject_id: String,
    pub sample_index: usize,
    pub label: Label,
    pub h_x: f64,
    pub c_x: f64,
    pub f_x: f64,
    pub h_y: f64,
    pub c_y: f64,
    pub f_y: f64,
}

impl FeatureVector {
    /// Column names of [`FeatureVector::values`], in order.
    pub const SCHEMA: [&'static str; 6] = ["h_x", "c_x", "f_x", "h_y", "c_y", "f_y"];

    /// The six quantifiers as a fixed-size vector in schema order.
    pub fn values(&self) -> [f64; 6] {
        [self.h_x, self.c_x, self.f_x, self.h_y, self.c_y, self.f_y]
    }
}

fn validate_pdf(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InputShape("empty probability vector".into()));
    }
    for &v in p {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Validation(format!(
                "probability entries must be finite and nonnegative, got {v}"
            )));
        }
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(Error::Validation(format!(
            "probabilities sum to {sum}, expected 1 within {PROB_SUM_TOLERANCE}"
        )));
    }
    Ok(())
}

fn require_multi_state(p: &[f64], what: &str) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::DegenerateSupport(format!(
            "{what} needs at least two states"
        )));
    }
    Ok(())
}

fn plogp(p: f64) -> f64 {
    if p < UNDERFLOW_GUARD {
        0.0
    } else {
        p * p.ln()
    }
}

fn entropy_unchecked(p: &[f64]) -> f64 {
    -p.iter().copied().map(plogp).sum::<f64>()
}

/// Shannon entropy `-sum p ln p`, in nats; lies in `[0, ln N]`.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    validate_pdf(p)?;
    Ok(entropy_unchecked(p))
}

/// Shannon entropy divided by its maximum `ln N`; lies in `[0, 1]`.
pub fn normalized_entropy(p: &[f64]) -> Result<f64> {
    validate_pdf(p)?;
    require_multi_state(p, "normalized entropy")?;
    Ok(entropy_unchecked(p) / (p.len() as f64).ln())
}

/// Whether `p` is exactly a point mass at the first or last index.
///
/// Exact comparison is intentional: ordinal frequencies are rationals
/// `count / window_count`, and a lone pattern yields exactly 1.0.
fn is_endpoint_delta(p: &[f64]) -> bool {
    let n = p.len();
    (p[0] == 1.0 && p[1..].iter().all(|&v| v == 0.0))
        || (p[n - 1] == 1.0 && p[..n - 1].iter().all(|&v| v == 0.0))
}

/// Discrete normalized Fisher information over contiguous index pairs.
///
/// The input must be indexed in the Lehmer order established by
/// [`crate::ordinal::bandt_pompe_pdf`]; a different index order gives a
/// different value.
pub fn fisher_information(p: &[f64]) -> Result<f64> {
    validate_pdf(p)?;
    require_multi_state(p, "fisher information")?;
    let f0 = if is_endpoint_delta(p) { 1.0 } else { 0.5 };
    let sum: f64 = p
        .windows(2)
        .map(|w| {
            let d = w[1].sqrt() - w[0].sqrt();
            d * d
        })
        .sum();
    Ok(f0 * sum)
}

/// Jensen-Shannon divergence of `p` from the uniform distribution, unscaled.
fn raw_jensen_shannon(p: &[f64]) -> f64 {
    let n = p.len() as f64;
    let pe = 1.0 / n;
    let mix_entropy = -p.iter().map(|&v| plogp(0.5 * (v + pe))).sum::<f64>();
    mix_entropy - 0.5 * entropy_unchecked(p) - 0.5 * n.ln()
}

/// Largest attainable divergence from uniform: a point mass. Evaluated
/// directly so the normalizer satisfies its defining property by
/// construction.
fn max_jensen_shannon(n: usize) -> f64 {
    let mut delta = vec![0.0; n];
    delta[0] = 1.0;
    raw_jensen_shannon(&delta)
}

/// Normalized Jensen-Shannon disequilibrium from the uniform distribution;
/// 0 at uniform, exactly 1 at any point mass.
pub fn jensen_shannon_disequilibrium(p: &[f64]) -> Result<f64> {
    validate_pdf(p)?;
    require_multi_state(p, "disequilibrium")?;
    Ok(raw_jensen_shannon(p) / max_jensen_shannon(p.len()))
}

/// Statistical complexity: disequilibrium times normalized entropy. Vanishes
/// both at a point mass (zero entropy) and at the uniform distribution (zero
/// disequilibrium).
pub fn statistical_complexity(p: &[f64]) -> Result<f64> {
    let q = jensen_shannon_disequilibrium(p)?;
    let h = normalized_entropy(p)?;
    Ok(q * h)
}

/// All three quantifiers of one distribution.
pub fn quantifier_triple(p: &[f64]) -> Result<QuantifierTriple> {
    Ok(QuantifierTriple {
        entropy: normalized_entropy(p)?,
        complexity: statistical_complexity(p)?,
        fisher: fisher_information(p)?,
    })
}

/// Computes the six-dimensional feature vector of a preprocessed trace: the
/// ordinal distribution of each coordinate axis, reduced by the three
/// quantifiers.
pub fn quantify_signature(trace: &SignatureTrace, config: &OrdinalConfig) -> Result<FeatureVector> {
    if !trace.is_preprocessed() {
        return Err(Error::Validation(
            "trace must be preprocessed (rescaled to the unit square and resampled)".into(),
        ));
    }
    let px = ordinal::bandt_pompe_pdf(trace.x(), config)?;
    let py = ordinal::bandt_pompe_pdf(trace.y(), config)?;
    let qx = quantifier_triple(px.probabilities())?;
    let qy = quantifier_triple(py.probabilities())?;
    Ok(FeatureVector {
        subject_id: trace.subject_id().to_owned(),
        sample_index: trace.sample_index(),
        label: trace.label(),
        h_x: qx.entropy,
        c_x: qx.complexity,
        f_x: qx.fisher,
        h_y: qy.entropy,
        c_y: qy.complexity,
        f_y: qy.fisher,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn delta(n: usize, at: usize) -> Vec<f64> {
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        p
    }

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn shannon_entropy_limits() {
        assert_eq!(shannon_entropy(&delta(6, 0)).unwrap(), 0.0);
        let n = 24;
        let s = shannon_entropy(&uniform(n)).unwrap();
        assert!((s - (n as f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn shannon_entropy_two_thirds() {
        let p = [2.0 / 3.0, 1.0 / 3.0];
        let expected = -(2.0 / 3.0) * (2.0f64 / 3.0).ln() - (1.0 / 3.0) * (1.0f64 / 3.0).ln();
        let s = shannon_entropy(&p).unwrap();
        assert!((s - expected).abs() < 1e-15);
        assert!((s - 0.63651).abs() < 1e-5);
    }

    #[test]
    fn pdf_validation() {
        assert!(matches!(
            shannon_entropy(&[0.5, -0.5, 1.0]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            shannon_entropy(&[0.3, 0.3]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(shannon_entropy(&[]), Err(Error::InputShape(_))));
        assert!(matches!(
            normalized_entropy(&[1.0]),
            Err(Error::DegenerateSupport(_))
        ));
    }

    #[test]
    fn normalized_entropy_limits() {
        assert_eq!(normalized_entropy(&delta(5, 2)).unwrap(), 0.0);
        assert!((normalized_entropy(&uniform(7)).unwrap() - 1.0).abs() < 1e-12);
        assert!((normalized_entropy(&[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fisher_deltas_and_uniform() {
        // Endpoint point mass takes the F0 = 1 branch.
        assert_eq!(fisher_information(&delta(6, 0)).unwrap(), 1.0);
        assert_eq!(fisher_information(&delta(6, 5)).unwrap(), 1.0);
        // Interior point mass: F0 = 1/2, two unit jumps.
        assert_eq!(fisher_information(&delta(3, 1)).unwrap(), 1.0);
        assert_eq!(fisher_information(&uniform(10)).unwrap(), 0.0);
    }

    #[test]
    fn fisher_depends_on_index_order() {
        let p = [0.5, 0.3, 0.15, 0.05];
        let permuted = [0.3, 0.05, 0.5, 0.15];
        let a = fisher_information(&p).unwrap();
        let b = fisher_information(&permuted).unwrap();
        assert!(
            (a - b).abs() > 1e-3,
            "expected order sensitivity, {a} vs {b}"
        );
    }

    #[test]
    fn disequilibrium_limits() {
        assert!(jensen_shannon_disequilibrium(&uniform(12)).unwrap().abs() < 1e-12);
        for n in [2usize, 6, 24, 120] {
            for at in [0, n - 1, n / 2] {
                let q = jensen_shannon_disequilibrium(&delta(n, at)).unwrap();
                assert!((q - 1.0).abs() < 1e-12, "delta at {at} of {n}: {q}");
            }
        }
    }

    #[test]
    fn disequilibrium_normalizer_for_two_states() {
        // Direct evaluation at the N=2 point mass: the mixture with uniform is
        // (3/4, 1/4), so J = S[(3/4, 1/4)] - ln(2)/2.
        let mix = [0.75f64, 0.25];
        let s_mix = -(mix[0] * mix[0].ln() + mix[1] * mix[1].ln());
        let j_max = s_mix - 0.5 * 2.0f64.ln();
        assert!((j_max - 0.21576).abs() < 1e-5);
        let q0 = 1.0 / j_max;
        // The implementation's internal normalizer must reproduce this value:
        // scaling the raw divergence of the delta by it yields exactly 1.
        let q = jensen_shannon_disequilibrium(&[1.0, 0.0]).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
        assert!((q0 * raw_jensen_shannon(&[1.0, 0.0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complexity_vanishes_at_both_extremes() {
        assert!(statistical_complexity(&uniform(120)).unwrap().abs() < 1e-12);
        assert_eq!(statistical_complexity(&delta(120, 0)).unwrap(), 0.0);
    }

    #[test]
    fn complexity_matches_brute_force_product() {
        // Independent arithmetic route: every factor evaluated from scratch.
        let p = [2.0 / 3.0f64, 1.0 / 3.0];
        let s = |q: &[f64]| {
            -q.iter()
                .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
                .sum::<f64>()
        };
        let mix: Vec<f64> = p.iter().map(|&v| 0.5 * (v + 0.5)).collect();
        let j = s(&mix) - 0.5 * s(&p) - 0.5 * 2.0f64.ln();
        let j_max = {
            let dm = [0.75f64, 0.25];
            s(&dm) - 0.5 * 2.0f64.ln()
        };
        let h = s(&p) / 2.0f64.ln();
        let expected = (j / j_max) * h;
        let c = statistical_complexity(&p).unwrap();
        assert!((c - expected).abs() < 1e-12, "{c} vs {expected}");
        assert!((c - 0.0611282).abs() < 1e-6);
    }

    #[test]
    fn monotone_ramp_features() {
        let x: Vec<f64> = (0..50).map(|i| i as f64).collect();
        let y = x.clone();
        let raw = SignatureTrace::new(x, y, "ramp", Label::Genuine, 0).unwrap();
        let prepped = preprocess::preprocess(&raw, 2000).unwrap();
        let config = OrdinalConfig::new(5, 1).unwrap();
        let f = quantify_signature(&prepped, &config).unwrap();
        // Both axes are strictly monotone, so each ordinal distribution is a
        // point mass at the extreme (all-ascending) index: H = C = 0, F = 1
        // through the F0 = 1 branch.
        assert_eq!(f.values(), [0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn equal_axes_give_equal_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let x: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let raw = SignatureTrace::new(x.clone(), x, "xy", Label::Genuine, 0).unwrap();
        let prepped = preprocess::preprocess(&raw, 2000).unwrap();
        let config = OrdinalConfig::new(5, 1).unwrap();
        let f = quantify_signature(&prepped, &config).unwrap();
        assert_eq!(f.h_x, f.h_y);
        assert_eq!(f.c_x, f.c_y);
        assert_eq!(f.f_x, f.f_y);
    }

    #[test]
    fn white_noise_features_are_near_disorder_corner() {
        let mut rng = ChaCha8Rng::seed_from_u64(4242);
        let x: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..2000).map(|_| rng.random::<f64>()).collect();
        let t = SignatureTrace::preprocessed(x, y, "noise", Label::Genuine, 0).unwrap();
        let config = OrdinalConfig::new(5, 1).unwrap();
        let f = quantify_signature(&t, &config).unwrap();
        for (h, c, fi) in [(f.h_x, f.c_x, f.f_x), (f.h_y, f.c_y, f.f_y)] {
            assert!(h > 0.95 && h < 1.0, "entropy {h}");
            assert!(c < 0.05, "complexity {c}");
            assert!(fi < 0.05, "fisher {fi}");
        }
    }

    #[test]
    fn unpreprocessed_trace_is_rejected() {
        let t = SignatureTrace::new(
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0, 2.0],
            "s",
            Label::Genuine,
            0,
        )
        .unwrap();
        let config = OrdinalConfig::new(2, 1).unwrap();
        assert!(matches!(
            quantify_signature(&t, &config),
            Err(Error::Validation(_))
        ));
    }

    proptest! {
        #[test]
        fn quantifiers_bounded_and_complexity_below_entropy(
            raw in prop::collection::vec(0.0f64..1.0, 2..130),
        ) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 1e-6);
            let p: Vec<f64> = raw.iter().map(|&v| v / total).collect();
            let t = quantifier_triple(&p).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&t.entropy));
            prop_assert!((0.0..=1.0 + 1e-12).contains(&t.complexity));
            prop_assert!((-1e-15..=1.0 + 1e-12).contains(&t.fisher));
            // Q_J <= 1, so C <= H.
            prop_assert!(t.complexity <= t.entropy + 1e-12);
        }

        #[test]
        fn features_invariant_under_affine_scaling(seed in 0u64..1_000_000) {
            // Values on a coarse grid and power-of-two scales keep every
            // comparison exact in floating point.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..500)
                .map(|_| (rng.random::<f64>() * 1048576.0).round() / 1048576.0)
                .collect();
            let y: Vec<f64> = (0..500)
                .map(|_| (rng.random::<f64>() * 1048576.0).round() / 1048576.0)
                .collect();
            let scale = 4.0;
            let offset = 0.4375;
            let xs: Vec<f64> = x.iter().map(|&v| scale * v + offset).collect();
            let ys: Vec<f64> = y.iter().map(|&v| scale * v + offset).collect();
            let config = OrdinalConfig::new(4, 1).unwrap();
            let a = quantify_signature(
                &SignatureTrace::preprocessed(
                    x.clone(), y.clone(), "s", Label::Genuine, 0).unwrap(),
                &config,
            ).unwrap();
            // The scaled trace is no longer in the unit square; compare at the
            // distribution level, which is what scaling must leave unchanged.
            let pdf_x = ordinal::bandt_pompe_pdf(&xs, &config).unwrap();
            let pdf_y = ordinal::bandt_pompe_pdf(&ys, &config).unwrap();
            let qx = quantifier_triple(pdf_x.probabilities()).unwrap();
            let qy = quantifier_triple(pdf_y.probabilities()).unwrap();
            prop_assert_eq!(a.values(), [
                qx.entropy, qx.complexity, qx.fisher,
                qy.entropy, qy.complexity, qy.fisher,
            ]);
        }
    }
}
