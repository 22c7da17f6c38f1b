//! Online handwritten signature verification and classification from pen
//! trajectories, using ordinal-pattern information quantifiers.
//!
//! A signature is two scalar time series, the horizontal and vertical pen
//! coordinates. The pipeline:
//!
//! 1. [`preprocess`] rescales each trace into the unit square and resamples it
//!    to a fixed length with a cubic Hermite interpolant.
//! 2. [`ordinal`] symbolizes each coordinate series into a probability
//!    distribution over ordinal patterns (relative orderings of lagged
//!    samples), which depends only on comparisons, never on amplitudes.
//! 3. [`quantifiers`] reduces each distribution to three numbers in `[0, 1]`:
//!    normalized Shannon entropy, statistical complexity, and normalized
//!    Fisher information. Both axes together give a six-dimensional
//!    [`quantifiers::FeatureVector`].
//! 4. [`ocsvm`] trains a one-class SVM with a Gaussian kernel on a subject's
//!    genuine feature vectors and scores probes as genuine or suspicious.
//! 5. [`eval`] measures verification quality (ACC, AUC, EER, ROC) under an
//!    enrollment protocol with a varying number of training signatures.
//! 6. [`cluster`] groups subjects by the statistics of their genuine-signature
//!    features (agglomerative clustering, Newick export) and classifies them
//!    with axis-aligned boxes.
//! 7. [`dataio`] loads trace files, persists features and models, and
//!    generates seeded synthetic datasets for desk-scale experiments.
//!
//! All operations are pure functions of their inputs plus explicit seeds;
//! nothing here keeps shared mutable state, so everything can be called
//! concurrently.

pub mod cluster;
pub mod dataio;
pub mod error;
pub mod eval;
pub mod ocsvm;
pub mod ordinal;
pub mod preprocess;
pub mod quantifiers;

mod seeding;

pub use error::{Error, Result};
