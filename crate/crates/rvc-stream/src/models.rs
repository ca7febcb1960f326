//! Probabilistic classifiers and regressors, refit from the sliding window.
//! Self-contained learners: multinomial logistic regression, distance-weighted
//! k-NN (classifier and regressor), and ridge regression.

use serde::{Deserialize, Serialize};

use crate::core::{LabeledWindow, RngSeed, Sample};
use crate::discretize::Discretizer;
use crate::error::{Error, Result};

/// Class-probability vector. Entries are in [0,1] and sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    probs: Vec<f64>,
}

impl Posterior {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(0.0..=1.0 + 1e-9).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("invalid posterior: {probs:?}")));
        }
        Ok(Self { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index of the largest probability; ties break to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = i;
            }
        }
        best
    }
}

/// Per-feature z-score statistics, refit from the current window.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Normalizer {
    pub fn fit(data: &LabeledWindow) -> Self {
        let n = data.len() as f64;
        let dim = data.iter().next().map_or(0, |s| s.sample.dim());
        let mut mean = vec![0.0; dim];
        for s in data.iter() {
            for (m, &x) in mean.iter_mut().zip(&s.sample.features) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for s in data.iter() {
            for ((v, &m), &x) in var.iter_mut().zip(&mean).zip(&s.sample.features) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Self { mean, std }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &Sample) -> Result<Vec<f64>> {
        if x.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.dim(),
            });
        }
        Ok(x.features
            .iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect())
    }
}

/// Which classifier backs `train_classifier`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifierKind {
    #[default]
    MultinomialLogistic,
    KnnClassifier,
}

/// Which regressor backs `train_regressor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegressorKind {
    #[default]
    Ridge,
    KnnRegressor,
}

/// Learner hyperparameters shared across the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub classifier: ClassifierKind,
    pub regressor: RegressorKind,
    pub logistic_learning_rate: f64,
    pub logistic_iterations: usize,
    pub logistic_l2: f64,
    pub logistic_grad_tol: f64,
    pub ridge_lambda: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            classifier: ClassifierKind::MultinomialLogistic,
            regressor: RegressorKind::Ridge,
            logistic_learning_rate: 0.1,
            logistic_iterations: 500,
            logistic_l2: 1e-3,
            logistic_grad_tol: 1e-6,
            ridge_lambda: 1e-3,
        }
    }
}

const KNN_EPS: f64 = 1e-12;

/// k = max(1, round(sqrt(n))) neighbors, adapting to the window size.
fn knn_neighbors(n: usize) -> usize {
    ((n as f64).sqrt().round() as usize).max(1)
}

/// Trained probabilistic classifier.
#[derive(Debug, Clone)]
pub enum ClassifierModel {
    Logistic {
        /// (dim + 1) x k, intercept row last.
        weights: Vec<Vec<f64>>,
        k_classes: usize,
        normalizer: Normalizer,
    },
    Knn {
        train: Vec<Vec<f64>>,
        labels: Vec<usize>,
        k_classes: usize,
        neighbors: usize,
        normalizer: Normalizer,
    },
}

impl ClassifierModel {
    pub fn k_classes(&self) -> usize {
        match self {
            Self::Logistic { k_classes, .. } | Self::Knn { k_classes, .. } => *k_classes,
        }
    }

    pub fn predict_posterior(&self, x: &Sample) -> Result<Posterior> {
        match self {
            Self::Logistic {
                weights,
                k_classes,
                normalizer,
            } => {
                let z = normalizer.apply(x)?;
                let mut logits = vec![0.0; *k_classes];
                for (c, logit) in logits.iter_mut().enumerate() {
                    let mut acc = weights[z.len()][c]; // intercept
                    for (d, &v) in z.iter().enumerate() {
                        acc += weights[d][c] * v;
                    }
                    *logit = acc;
                }
                Posterior::new(softmax(&logits))
            }
            Self::Knn {
                train,
                labels,
                k_classes,
                neighbors,
                normalizer,
            } => {
                let z = normalizer.apply(x)?;
                let chosen =
                    nearest_neighbors(train, &z, labels.iter().map(|&l| l as f64), *neighbors);
                let mut mass = vec![0.0; *k_classes];
                for (i, d) in chosen {
                    mass[labels[i]] += 1.0 / (d + KNN_EPS);
                }
                let total: f64 = mass.iter().sum();
                Posterior::new(mass.iter().map(|&m| m / total).collect())
            }
        }
    }
}

/// Trained regressor.
#[derive(Debug, Clone)]
pub enum RegressorModel {
    Ridge {
        /// Coefficients on standardized features; intercept last.
        beta: Vec<f64>,
        normalizer: Normalizer,
    },
    Knn {
        train: Vec<Vec<f64>>,
        targets: Vec<f64>,
        neighbors: usize,
        normalizer: Normalizer,
    },
}

impl RegressorModel {
    pub fn predict(&self, x: &Sample) -> Result<f64> {
        match self {
            Self::Ridge { beta, normalizer } => {
                let z = normalizer.apply(x)?;
                let mut acc = beta[z.len()];
                for (d, &v) in z.iter().enumerate() {
                    acc += beta[d] * v;
                }
                Ok(acc)
            }
            Self::Knn {
                train,
                targets,
                neighbors,
                normalizer,
            } => {
                let z = normalizer.apply(x)?;
                let chosen = nearest_neighbors(train, &z, targets.iter().copied(), *neighbors);
                let mut wsum = 0.0;
                let mut acc = 0.0;
                for (i, d) in chosen {
                    let w = 1.0 / (d + KNN_EPS);
                    wsum += w;
                    acc += w * targets[i];
                }
                Ok(acc / wsum)
            }
        }
    }
}

/// Fit a classifier on the window with targets discretized by `disc`.
/// Every class must have at least one training point under `disc`.
pub fn train_classifier(
    data: &LabeledWindow,
    disc: &Discretizer,
    config: &ModelConfig,
    _seed: RngSeed,
) -> Result<ClassifierModel> {
    let k = disc.k();
    if data.len() < k {
        return Err(Error::TooFewSamples {
            needed: k,
            got: data.len(),
        });
    }
    let labels: Vec<usize> = data
        .iter()
        .map(|s| disc.discretize(s.target))
        .collect::<Result<_>>()?;
    let mut counts = vec![0usize; k];
    for &l in &labels {
        counts[l] += 1;
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(Error::MissingClass { class });
    }

    let normalizer = Normalizer::fit(data);
    let train: Vec<Vec<f64>> = data
        .iter()
        .map(|s| normalizer.apply(&s.sample))
        .collect::<Result<_>>()?;

    match config.classifier {
        ClassifierKind::KnnClassifier => Ok(ClassifierModel::Knn {
            neighbors: knn_neighbors(train.len()),
            train,
            labels,
            k_classes: k,
            normalizer,
        }),
        ClassifierKind::MultinomialLogistic => {
            let weights = fit_logistic(&train, &labels, k, config);
            Ok(ClassifierModel::Logistic {
                weights,
                k_classes: k,
                normalizer,
            })
        }
    }
}

/// Fit a regressor on the raw (feature, target) pairs in the window.
pub fn train_regressor(
    data: &LabeledWindow,
    config: &ModelConfig,
    _seed: RngSeed,
) -> Result<RegressorModel> {
    train_regressor_on(
        &data.iter().cloned().collect::<Vec<_>>(),
        config.regressor,
        config.ridge_lambda,
    )
}

/// Fit a regressor on an explicit sample slice (used by QBC subsampling).
pub fn train_regressor_on(
    data: &[crate::core::LabeledSample],
    kind: RegressorKind,
    ridge_lambda: f64,
) -> Result<RegressorModel> {
    if data.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: data.len(),
        });
    }
    let mut window = LabeledWindow::new(data.len());
    for s in data {
        window.push(s.clone());
    }
    let normalizer = Normalizer::fit(&window);
    let train: Vec<Vec<f64>> = data
        .iter()
        .map(|s| normalizer.apply(&s.sample))
        .collect::<Result<_>>()?;
    let targets: Vec<f64> = data.iter().map(|s| s.target).collect();

    match kind {
        RegressorKind::KnnRegressor => Ok(RegressorModel::Knn {
            neighbors: knn_neighbors(train.len()),
            train,
            targets,
            normalizer,
        }),
        RegressorKind::Ridge => {
            let beta = fit_ridge(&train, &targets, ridge_lambda);
            Ok(RegressorModel::Ridge { beta, normalizer })
        }
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - m).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// The `k` training points nearest to `query`, selected by the total order
/// (distance, tiebreak value) so the chosen multiset of (distance, value)
/// pairs is invariant to training order. Zero-distance matches take over
/// completely (an exact match dominates the weighting anyway).
fn nearest_neighbors(
    train: &[Vec<f64>],
    query: &[f64],
    tiebreak: impl Iterator<Item = f64>,
    k: usize,
) -> Vec<(usize, f64)> {
    let mut cand: Vec<(f64, f64, usize)> = train
        .iter()
        .zip(tiebreak)
        .enumerate()
        .map(|(i, (t, tb))| {
            let d2: f64 = t.iter().zip(query).map(|(&a, &b)| (a - b) * (a - b)).sum();
            (d2.sqrt(), tb, i)
        })
        .collect();
    let zero: Vec<(usize, f64)> = cand
        .iter()
        .filter(|&&(d, _, _)| d <= KNN_EPS)
        .map(|&(d, _, i)| (i, d))
        .collect();
    if !zero.is_empty() {
        return zero;
    }
    let k = k.min(cand.len());
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, |a, b| {
            (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap()
        });
        cand.truncate(k);
    }
    cand.into_iter().map(|(d, _, i)| (i, d)).collect()
}

/// Full-batch gradient descent on the L2-penalized multinomial logistic
/// loss. The intercept row is not penalized.
fn fit_logistic(
    train: &[Vec<f64>],
    labels: &[usize],
    k: usize,
    config: &ModelConfig,
) -> Vec<Vec<f64>> {
    let n = train.len();
    let dim = train[0].len();
    let mut weights = vec![vec![0.0; k]; dim + 1];
    let inv_n = 1.0 / n as f64;

    for _ in 0..config.logistic_iterations {
        let mut grad = vec![vec![0.0; k]; dim + 1];
        for (x, &label) in train.iter().zip(labels) {
            let mut logits = vec![0.0; k];
            for (c, logit) in logits.iter_mut().enumerate() {
                let mut acc = weights[dim][c];
                for (d, &v) in x.iter().enumerate() {
                    acc += weights[d][c] * v;
                }
                *logit = acc;
            }
            let p = softmax(&logits);
            for c in 0..k {
                let err = p[c] - if c == label { 1.0 } else { 0.0 };
                for (d, &v) in x.iter().enumerate() {
                    grad[d][c] += err * v;
                }
                grad[dim][c] += err;
            }
        }
        let mut norm2 = 0.0;
        for d in 0..=dim {
            for c in 0..k {
                let mut g = grad[d][c] * inv_n;
                if d < dim {
                    g += config.logistic_l2 * weights[d][c];
                }
                grad[d][c] = g;
                norm2 += g * g;
            }
        }
        if norm2.sqrt() < config.logistic_grad_tol {
            break;
        }
        for d in 0..=dim {
            for c in 0..k {
                weights[d][c] -= config.logistic_learning_rate * grad[d][c];
            }
        }
    }
    weights
}

/// Penalized training loss, exposed for the monotonicity check in tests.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn logistic_loss(
    weights: &[Vec<f64>],
    train: &[Vec<f64>],
    labels: &[usize],
    l2: f64,
) -> f64 {
    let n = train.len();
    let dim = train[0].len();
    let k = weights[0].len();
    let mut loss = 0.0;
    for (x, &label) in train.iter().zip(labels) {
        let mut logits = vec![0.0; k];
        for (c, logit) in logits.iter_mut().enumerate() {
            let mut acc = weights[dim][c];
            for (d, &v) in x.iter().enumerate() {
                acc += weights[d][c] * v;
            }
            *logit = acc;
        }
        let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + logits.iter().map(|&l| (l - m).exp()).sum::<f64>().ln();
        loss += lse - logits[label];
    }
    loss /= n as f64;
    for row in weights.iter().take(dim) {
        for &w in row {
            loss += 0.5 * l2 * w * w;
        }
    }
    loss
}

/// Solve the ridge normal equations (Z'Z + lambda I)b = Z'y on standardized
/// features with an unpenalized intercept column appended.
fn fit_ridge(train: &[Vec<f64>], targets: &[f64], lambda: f64) -> Vec<f64> {
    let n = train.len();
    let dim = train[0].len();
    let p = dim + 1;
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for (x, &y) in train.iter().zip(targets) {
        for i in 0..p {
            let xi = if i < dim { x[i] } else { 1.0 };
            aty[i] += xi * y;
            for j in 0..p {
                let xj = if j < dim { x[j] } else { 1.0 };
                ata[i][j] += xi * xj;
            }
        }
    }
    let scaled_lambda = lambda * n as f64;
    for (i, row) in ata.iter_mut().enumerate().take(dim) {
        row[i] += scaled_lambda;
    }
    solve_linear(ata, aty)
}

/// Gaussian elimination with partial pivoting. Singular systems fall back
/// to a tiny diagonal boost, which only arises for degenerate windows.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for i in 0..n {
        let mut piv = i;
        for r in i + 1..n {
            if a[r][i].abs() > a[piv][i].abs() {
                piv = r;
            }
        }
        if a[piv][i].abs() < 1e-12 {
            a[i][i] += 1e-8;
        } else if piv != i {
            a.swap(i, piv);
            b.swap(i, piv);
        }
        let d = a[i][i];
        for r in i + 1..n {
            let f = a[r][i] / d;
            if f == 0.0 {
                continue;
            }
            for c in i..n {
                a[r][c] -= f * a[i][c];
            }
            b[r] -= f * b[i];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for c in i + 1..n {
            acc -= a[i][c] * x[c];
        }
        x[i] = acc / a[i][i];
    }
    x
}
