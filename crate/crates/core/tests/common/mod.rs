//! Independent oracles for the acceptance suite.
//!
//! Everything here reimplements a result from first principles along a
//! different algorithmic route than the library: ordinal distributions by
//! window enumeration against an explicit permutation list, the one-class
//! dual by exhaustive active-set enumeration, metrics by naive counting, and
//! average-linkage clustering from raw pairwise distances instead of the
//! recursive update. None of it calls into the code paths under test.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)] // index style mirrors the math throughout

/// All permutations of (0..d) in lexicographic order, generated recursively.
pub fn enumerate_permutations(d: usize) -> Vec<Vec<u8>> {
    fn visit(prefix: &mut Vec<u8>, left: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if left.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..left.len() {
            let v = left.remove(i);
            prefix.push(v);
            visit(prefix, left, out);
            prefix.pop();
            left.insert(i, v);
        }
    }
    let mut out = Vec::new();
    visit(
        &mut Vec::new(),
        &mut (0..d as u8).collect::<Vec<u8>>(),
        &mut out,
    );
    out
}

/// Rank of window sample `j` by the counting rule: the number of samples that
/// are strictly smaller, plus equal samples that are more recent.
fn naive_rank(window: &[f64], j: usize) -> u8 {
    let mut rank = 0u8;
    for (i, &v) in window.iter().enumerate() {
        if i == j {
            continue;
        }
        if v < window[j] || (v == window[j] && i > j) {
            rank += 1;
        }
    }
    rank
}

/// Ordinal distribution by direct window enumeration and linear pattern
/// lookup. Returns None when the series is too short.
pub fn naive_bandt_pompe(series: &[f64], d: usize, tau: usize) -> Option<Vec<f64>> {
    let span = (d - 1) * tau;
    if series.len() <= span {
        return None;
    }
    let patterns = enumerate_permutations(d);
    let mut counts = vec![0u64; patterns.len()];
    for s in span..series.len() {
        let window: Vec<f64> = (0..d).map(|j| series[s - (d - 1 - j) * tau]).collect();
        let ranks: Vec<u8> = (0..d).map(|j| naive_rank(&window, j)).collect();
        let idx = patterns
            .iter()
            .position(|p| p == &ranks)
            .expect("rank vector is a permutation");
        counts[idx] += 1;
    }
    let total = (series.len() - span) as f64;
    Some(counts.iter().map(|&c| c as f64 / total).collect())
}

/// Gaussian elimination with partial pivoting; None on a singular system.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut v = b[row];
        for k in row + 1..n {
            v -= a[row][k] * x[k];
        }
        x[row] = v / a[row][row];
    }
    Some(x)
}

/// Exhaustive active-set solution of the one-class dual: minimize
/// `(1/2) a' K a` over `sum(a) = 1`, `0 <= a_i <= c`. Every assignment of
/// each variable to {lower, upper, free} is tried; KKT-feasible candidates
/// are collected and the best objective wins.
pub fn ocsvm_dual_oracle(gram: &[Vec<f64>], c: f64) -> Option<(Vec<f64>, f64)> {
    let n = gram.len();
    let tol = 1e-9;
    let mut best: Option<(Vec<f64>, f64)> = None;
    // Ternary counter over assignments: 0 = at zero, 1 = at c, 2 = free.
    let mut assignment = vec![0u8; n];
    loop {
        'candidate: {
            let free: Vec<usize> = (0..n).filter(|&i| assignment[i] == 2).collect();
            let upper: Vec<usize> = (0..n).filter(|&i| assignment[i] == 1).collect();
            let mut alpha = vec![0.0; n];
            for &i in &upper {
                alpha[i] = c;
            }
            if free.is_empty() {
                if (upper.len() as f64 * c - 1.0).abs() > 1e-9 {
                    break 'candidate;
                }
                // Some b must fit between the bound gradients.
                let g = |i: usize| -> f64 { (0..n).map(|j| alpha[j] * gram[i][j]).sum() };
                let lo = upper
                    .iter()
                    .map(|&i| g(i))
                    .fold(f64::NEG_INFINITY, f64::max);
                let hi = (0..n)
                    .filter(|i| assignment[*i] == 0)
                    .map(g)
                    .fold(f64::INFINITY, f64::min);
                if lo > hi + tol {
                    break 'candidate;
                }
            } else {
                // Stationarity on the free set plus the sum constraint.
                let f = free.len();
                let mut a = vec![vec![0.0; f + 1]; f + 1];
                let mut rhs = vec![0.0; f + 1];
                for (r, &i) in free.iter().enumerate() {
                    for (col, &j) in free.iter().enumerate() {
                        a[r][col] = gram[i][j];
                    }
                    a[r][f] = -1.0; // coefficient of b
                    rhs[r] = -c * upper.iter().map(|&j| gram[i][j]).sum::<f64>();
                }
                for col in 0..f {
                    a[f][col] = 1.0;
                }
                rhs[f] = 1.0 - c * upper.len() as f64;
                let Some(solution) = solve_linear(a, rhs) else {
                    break 'candidate;
                };
                for (k, &i) in free.iter().enumerate() {
                    alpha[i] = solution[k];
                }
                let b = solution[f];
                if free.iter().any(|&i| alpha[i] < -tol || alpha[i] > c + tol) {
                    break 'candidate;
                }
                // KKT signs at the bounds.
                let g = |i: usize| -> f64 { (0..n).map(|j| alpha[j] * gram[i][j]).sum() };
                if (0..n)
                    .filter(|i| assignment[*i] == 0)
                    .any(|i| g(i) < b - tol)
                {
                    break 'candidate;
                }
                if upper.iter().any(|&i| g(i) > b + tol) {
                    break 'candidate;
                }
            }
            let objective = 0.5
                * (0..n)
                    .map(|i| alpha[i] * (0..n).map(|j| alpha[j] * gram[i][j]).sum::<f64>())
                    .sum::<f64>();
            let better = best.as_ref().is_none_or(|(_, obj)| objective < *obj);
            if better {
                best = Some((alpha, objective));
            }
        }

        // Next assignment.
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            if assignment[pos] < 2 {
                assignment[pos] += 1;
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Trapezoidal area under the ROC built by a naive threshold sweep.
pub fn naive_trapezoid_auc(genuine: &[f64], forgery: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = genuine.iter().chain(forgery.iter()).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let count_ge = |scores: &[f64], t: f64| scores.iter().filter(|&&s| s >= t).count() as f64;
    // Sweep from above the maximum down to the minimum: (fpr, tpr) runs from
    // (0, 0) to (1, 1).
    let mut points = vec![(0.0, 0.0)];
    for &t in thresholds.iter().rev() {
        points.push((
            count_ge(forgery, t) / forgery.len() as f64,
            count_ge(genuine, t) / genuine.len() as f64,
        ));
    }
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Equal error rate by a naive exhaustive sweep: rates recounted from scratch
/// at every observed score (the exhaustive set of change points of the two
/// step functions) plus a terminal threshold, then the stated interpolation
/// rule at the first sign change.
pub fn naive_eer(genuine: &[f64], forgery: &[f64]) -> f64 {
    let mut thresholds: Vec<f64> = genuine.iter().chain(forgery.iter()).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(thresholds[thresholds.len() - 1] + 1.0);

    let far = |t: f64| forgery.iter().filter(|&&s| s >= t).count() as f64 / forgery.len() as f64;
    let frr = |t: f64| genuine.iter().filter(|&&s| s < t).count() as f64 / genuine.len() as f64;

    let mut prev: Option<(f64, f64)> = None;
    for &t in &thresholds {
        let (fa, fr) = (far(t), frr(t));
        if fa - fr <= 0.0 {
            return match prev {
                None => 0.5 * (fa + fr),
                Some((pfa, pfr)) => {
                    let da = pfa - pfr;
                    let db = fa - fr;
                    let lambda = da / (da - db);
                    let far_x = pfa + (fa - pfa) * lambda;
                    let frr_x = pfr + (fr - pfr) * lambda;
                    0.5 * (far_x + frr_x)
                }
            };
        }
        prev = Some((fa, fr));
    }
    unreachable!("terminal threshold forces FAR <= FRR");
}

/// Average-linkage agglomeration computed directly from raw point distances
/// (mean over member pairs at every step), with the same id tie-break.
/// Returns the merge sequence as (member ids of side A, of side B, height).
pub fn naive_average_linkage(
    ids: &[String],
    points: &[Vec<f64>],
) -> Vec<(Vec<String>, Vec<String>, f64)> {
    let euclid = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    let mut clusters: Vec<Vec<usize>> = (0..ids.len()).map(|i| vec![i]).collect();
    let mut merges = Vec::new();
    while clusters.len() > 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut sum = 0.0;
                for &i in &clusters[a] {
                    for &j in &clusters[b] {
                        sum += euclid(&points[i], &points[j]);
                    }
                }
                let d = sum / (clusters[a].len() * clusters[b].len()) as f64;
                let key = |c: &[usize]| c.iter().map(|&i| ids[i].as_str()).min().unwrap();
                let better = match &best {
                    None => true,
                    Some((pa, pb, pd)) => {
                        d < *pd
                            || (d == *pd && {
                                let (x, y) = ordered(key(&clusters[a]), key(&clusters[b]));
                                let (px, py) = ordered(key(&clusters[*pa]), key(&clusters[*pb]));
                                (x, y) < (px, py)
                            })
                    }
                };
                if better {
                    best = Some((a, b, d));
                }
            }
        }
        let (a, b, d) = best.unwrap();
        let mut names_a: Vec<String> = clusters[a].iter().map(|&i| ids[i].clone()).collect();
        let mut names_b: Vec<String> = clusters[b].iter().map(|&i| ids[i].clone()).collect();
        names_a.sort();
        names_b.sort();
        merges.push((names_a, names_b, d));
        let merged = [clusters[a].clone(), clusters[b].clone()].concat();
        clusters.remove(b);
        clusters.remove(a);
        clusters.push(merged);
    }
    merges
}

fn ordered<'a>(x: &'a str, y: &'a str) -> (&'a str, &'a str) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}
