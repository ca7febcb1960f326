//! Target discretization: 1-D k-means over the real targets gives the map
//! from a value to one of K ordered classes, plus per-class statistics that
//! back the inverse map from a posterior to a regression value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Posterior;

/// Which per-class statistic the inverse map returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseMode {
    /// Class mean; minimizes within-class squared error.
    #[default]
    Mean,
    Median,
}

/// Fitted 1-D k-means discretizer. Centers are strictly ascending and the
/// class partition is the contiguous intervals between midpoint boundaries,
/// so the class index is monotone in the target value.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretizer {
    k: usize,
    centers: Vec<f64>,
    boundaries: Vec<f64>,
    class_means: Vec<f64>,
    class_medians: Vec<f64>,
    class_counts: Vec<usize>,
}

impl Discretizer {
    /// Fit on the 1-D targets. Optimal clusters of sorted 1-D data are
    /// contiguous intervals, so the exact within-class-SSE optimum is found
    /// by dynamic programming over interval partitions (divide-and-conquer
    /// on the monotone split points). The result is a fixed point of Lloyd
    /// iteration and fully deterministic.
    pub fn fit(targets: &[f64], k: usize) -> Result<Self> {
        assert!(k >= 2, "need at least two classes");
        if targets.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFiniteTarget);
        }
        if targets.len() < k {
            return Err(Error::TooFewSamples {
                needed: k,
                got: targets.len(),
            });
        }
        let mut sorted = targets.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut distinct = sorted.clone();
        distinct.dedup();
        if distinct.len() < k {
            return Err(Error::TooFewDistinctValues {
                needed: k,
                found: distinct.len(),
            });
        }

        let starts = optimal_partition(&sorted, k);
        let mut centers = Vec::with_capacity(k);
        let mut class_means = Vec::with_capacity(k);
        let mut class_medians = Vec::with_capacity(k);
        let mut class_counts = Vec::with_capacity(k);
        for c in 0..k {
            let lo = starts[c];
            let hi = if c + 1 < k { starts[c + 1] } else { sorted.len() };
            let members = &sorted[lo..hi];
            let m = members.len();
            debug_assert!(m >= 1);
            let mean = members.iter().sum::<f64>() / m as f64;
            centers.push(mean);
            class_means.push(mean);
            class_counts.push(m);
            class_medians.push(if m % 2 == 1 {
                members[m / 2]
            } else {
                0.5 * (members[m / 2 - 1] + members[m / 2])
            });
        }
        debug_assert!(centers.windows(2).all(|w| w[0] < w[1]));

        let boundaries = centers
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect::<Vec<_>>();

        Ok(Self {
            k,
            centers,
            boundaries,
            class_means,
            class_medians,
            class_counts,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn class_means(&self) -> &[f64] {
        &self.class_means
    }

    pub fn class_medians(&self) -> &[f64] {
        &self.class_medians
    }

    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    /// Class index of `y`: the number of boundaries strictly below `y`.
    /// A value exactly on a boundary goes to the lower class.
    pub fn discretize(&self, y: f64) -> Result<usize> {
        if !y.is_finite() {
            return Err(Error::NonFiniteTarget);
        }
        Ok(self.boundaries.iter().filter(|&&b| b < y).count())
    }

    /// Map a posterior back to a regression value: the stored statistic of
    /// the most probable class. Argmax ties break to the lowest index.
    pub fn inverse(&self, p: &Posterior, mode: InverseMode) -> Result<f64> {
        if p.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                got: p.len(),
            });
        }
        let best = p.argmax();
        Ok(match mode {
            InverseMode::Mean => self.class_means[best],
            InverseMode::Median => self.class_medians[best],
        })
    }

    /// Within-class sum of squared errors on a dataset, for diagnostics.
    pub fn sse(&self, targets: &[f64]) -> f64 {
        targets
            .iter()
            .map(|&y| {
                let c = self.boundaries.iter().filter(|&&b| b < y).count();
                let d = y - self.centers[c];
                d * d
            })
            .sum()
    }
}

/// Start index of each cluster in the SSE-optimal contiguous partition of
/// `sorted` into `k` non-empty intervals. Row-by-row DP; each row's split
/// points are monotone in the right endpoint, so every row is filled by
/// divide and conquer in O(n log n).
fn optimal_partition(sorted: &[f64], k: usize) -> Vec<usize> {
    let n = sorted.len();
    let mut pre = vec![0.0f64; n + 1];
    let mut pre2 = vec![0.0f64; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        pre[i + 1] = pre[i] + v;
        pre2[i + 1] = pre2[i] + v * v;
    }
    // SSE of one cluster covering sorted[i..=j]
    let cost = |i: usize, j: usize| -> f64 {
        let m = (j - i + 1) as f64;
        let s = pre[j + 1] - pre[i];
        let s2 = pre2[j + 1] - pre2[i];
        (s2 - s * s / m).max(0.0)
    };

    let mut prev: Vec<f64> = (0..n).map(|j| cost(0, j)).collect();
    let mut backs: Vec<Vec<usize>> = Vec::with_capacity(k.saturating_sub(1));

    for c in 1..k {
        let mut cur = vec![f64::INFINITY; n];
        let mut back = vec![0usize; n];
        // solve for j in [jlo, jhi] knowing the optimal split lies in
        // [slo, shi]; splits are the start index of the last cluster
        let mut stack = vec![(c, n - 1, c, n - 1)];
        while let Some((jlo, jhi, slo, shi)) = stack.pop() {
            if jlo > jhi {
                continue;
            }
            let j = (jlo + jhi) / 2;
            let mut best = f64::INFINITY;
            let mut best_s = slo;
            for s in slo..=shi.min(j) {
                let v = prev[s - 1] + cost(s, j);
                if v < best {
                    best = v;
                    best_s = s;
                }
            }
            cur[j] = best;
            back[j] = best_s;
            if j > jlo {
                stack.push((jlo, j - 1, slo, best_s));
            }
            if j < jhi {
                stack.push((j + 1, jhi, best_s, shi));
            }
        }
        prev = cur;
        backs.push(back);
    }

    let mut starts = vec![0usize; k];
    let mut j = n - 1;
    for c in (1..k).rev() {
        let s = backs[c - 1][j];
        starts[c] = s;
        j = s - 1;
    }
    starts
}
