//! Two-variable coordinate descent on the one-class dual.
//!
//! The problem: minimize `(1/2) a' K a` subject to `sum(a) = 1` and
//! `0 <= a_i <= c`. Every update moves mass between the maximal violating
//! pair of the KKT conditions, so the equality constraint is preserved
//! exactly and the box is re-clamped after each step.
//!
//! Pair selection scans indices in ascending order with strict improvement,
//! which makes the whole optimization deterministic: identical inputs produce
//! bit-identical multipliers.

use crate::error::{Error, Result};

/// Relative margin for deciding whether a multiplier sits at a bound.
const BOUND_EPS_REL: f64 = 1e-12;
/// Curvature below this is treated as flat (duplicate training points).
const FLAT_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DualSolution {
    /// Optimal multipliers, one per training point.
    pub alpha: Vec<f64>,
    /// Objective gradient `K a` at the solution.
    pub gradient: Vec<f64>,
    /// Pair updates performed.
    pub iterations: u64,
    /// Final KKT violation `max_{a_j > 0} g_j - min_{a_i < c} g_i`.
    pub residual: f64,
}

/// Solves the dual to the requested tolerance.
///
/// `gram` must be a symmetric positive semidefinite kernel matrix. Feasibility
/// requires `c * n >= 1`, which holds for `c = 1 / (nu * n)` with `nu <= 1`.
pub fn solve(
    gram: &[Vec<f64>],
    upper_bound: f64,
    tolerance: f64,
    max_iterations: u64,
) -> Result<DualSolution> {
    let n = gram.len();
    debug_assert!(gram.iter().all(|row| row.len() == n));
    if n == 0 {
        return Err(Error::InsufficientData("empty training set".into()));
    }
    if upper_bound * (n as f64) < 1.0 {
        return Err(Error::Parameter(format!(
            "infeasible box: {n} multipliers bounded by {upper_bound} cannot sum to 1"
        )));
    }
    if tolerance <= 0.0 {
        return Err(Error::Parameter("solver tolerance must be positive".into()));
    }

    let bound_eps = upper_bound * BOUND_EPS_REL;

    // Feasible start: fill multipliers to the bound in index order until the
    // total reaches 1.
    let mut alpha = vec![0.0; n];
    let mut remaining = 1.0f64;
    for a in alpha.iter_mut() {
        let v = remaining.min(upper_bound);
        *a = v;
        remaining -= v;
        if remaining <= 0.0 {
            break;
        }
    }

    let mut gradient: Vec<f64> = (0..n)
        .map(|i| {
            alpha
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0.0)
                .map(|(j, &a)| a * gram[i][j])
                .sum()
        })
        .collect();

    let mut iterations = 0u64;
    loop {
        // Maximal violating pair: the best direction moves mass from the
        // largest gradient among raisable-down multipliers to the smallest
        // gradient among raisable-up ones.
        let mut up: Option<usize> = None;
        let mut down: Option<usize> = None;
        for i in 0..n {
            if alpha[i] < upper_bound - bound_eps && up.is_none_or(|u| gradient[i] < gradient[u]) {
                up = Some(i);
            }
            if alpha[i] > bound_eps && down.is_none_or(|d| gradient[i] > gradient[d]) {
                down = Some(i);
            }
        }
        let (i, j) = match (up, down) {
            (Some(i), Some(j)) => (i, j),
            // Every multiplier pinned at a bound (nu = 1): nothing movable.
            _ => {
                return Ok(DualSolution {
                    alpha,
                    gradient,
                    iterations,
                    residual: 0.0,
                })
            }
        };

        let residual = gradient[j] - gradient[i];
        if residual <= tolerance {
            return Ok(DualSolution {
                alpha,
                gradient,
                iterations,
                residual: residual.max(0.0),
            });
        }
        if iterations >= max_iterations {
            return Err(Error::Convergence {
                iterations,
                residual,
            });
        }

        let curvature = gram[i][i] + gram[j][j] - 2.0 * gram[i][j];
        let unconstrained = if curvature > FLAT_CURVATURE {
            residual / curvature
        } else {
            f64::INFINITY
        };
        let step = unconstrained.min(upper_bound - alpha[i]).min(alpha[j]);

        alpha[i] = (alpha[i] + step).min(upper_bound);
        alpha[j] = (alpha[j] - step).max(0.0);
        for k in 0..n {
            gradient[k] += step * (gram[k][i] - gram[k][j]);
        }
        iterations += 1;
    }
}

/// KKT violation of an arbitrary feasible point, for post-hoc audits.
pub fn kkt_residual(gram: &[Vec<f64>], alpha: &[f64], upper_bound: f64) -> f64 {
    let n = alpha.len();
    let bound_eps = upper_bound * BOUND_EPS_REL;
    let mut min_up = f64::INFINITY;
    let mut max_down = f64::NEG_INFINITY;
    for i in 0..n {
        let g: f64 = (0..n).map(|j| alpha[j] * gram[i][j]).sum();
        if alpha[i] < upper_bound - bound_eps {
            min_up = min_up.min(g);
        }
        if alpha[i] > bound_eps {
            max_down = max_down.max(g);
        }
    }
    (max_down - min_up).max(0.0)
}
