//! Evaluation metrics: RMSE, Spearman rank correlation, percentile ranks,
//! and binned statistics for the utility-vs-error plots.

use crate::error::{Error, Result};

/// Root mean squared error of a list of residuals.
pub fn rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok((errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64).sqrt())
}

/// Average ranks in [1, n]; ties receive the mean of their rank range.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rank correlation with average-rank tie handling.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            a: a.len(),
            b: b.len(),
        });
    }
    let ra = average_ranks(a);
    let rb = average_ranks(b);
    Ok(pearson(&ra, &rb))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Percentile rank of each value in [0, 100]: the minimum maps to 0, the
/// maximum to 100, ties share the average rank.
pub fn percentile_rank(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = values.len();
    if n == 1 {
        return Ok(vec![50.0]);
    }
    let ranks = average_ranks(values);
    Ok(ranks
        .iter()
        .map(|&r| 100.0 * (r - 1.0) / (n as f64 - 1.0))
        .collect())
}

/// Mean/std/count of the second coordinate per equal-width bin over the
/// first coordinate's [0, 100] range. The last bin includes 100.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStat {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
}

pub fn binned_stats(pairs: &[(f64, f64)], bins: usize) -> Result<Vec<BinStat>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    assert!(bins > 0);
    let width = 100.0 / bins as f64;
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for &(rank, value) in pairs {
        let mut i = (rank / width) as usize;
        if i >= bins {
            i = bins - 1;
        }
        buckets[i].push(value);
    }
    Ok(buckets
        .into_iter()
        .enumerate()
        .map(|(i, vals)| {
            let count = vals.len();
            let (mean, std) = if count == 0 {
                (f64::NAN, f64::NAN)
            } else {
                let m = vals.iter().sum::<f64>() / count as f64;
                let v = vals.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / count as f64;
                (m, v.sqrt())
            };
            BinStat {
                lo: i as f64 * width,
                hi: (i + 1) as f64 * width,
                count,
                mean,
                std,
            }
        })
        .collect())
}
