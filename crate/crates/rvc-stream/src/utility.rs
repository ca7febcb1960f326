//! Utility (informativeness) estimators: the RvC ensemble uncertainty, the
//! query-by-committee disagreement baseline, and the random baseline.

use rand::seq::index::sample as index_sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::core::{LabeledWindow, RngSeed, Sample};
use crate::discretize::Discretizer;
use crate::error::{Error, Result};
use crate::models::{
    train_classifier, train_regressor_on, ClassifierModel, ModelConfig, Posterior, RegressorKind,
};

/// Default ladder of class counts, coarse to fine.
pub const DEFAULT_CLASS_COUNTS: [usize; 4] = [2, 4, 8, 16];

/// Uncertainty of one RvC member: 1 minus the top class probability.
pub fn rvc_member_uncertainty(p: &Posterior) -> f64 {
    1.0 - p.max_prob()
}

/// RvC ensemble: one (discretizer, classifier) pair per class count; the
/// utility is the mean member uncertainty. Class counts that are infeasible
/// on the current window are dropped, down to an empty ensemble whose
/// utility is 0 (a window with one distinct target ranks nothing).
#[derive(Debug, Clone)]
pub struct RvcUtilityEstimator {
    members: Vec<(Discretizer, ClassifierModel)>,
}

impl RvcUtilityEstimator {
    /// Fit one member per feasible class count. Discretizers are refit on
    /// the same window as the classifiers, so MissingClass cannot occur.
    pub fn train(
        data: &LabeledWindow,
        class_counts: &[usize],
        config: &ModelConfig,
        seed: RngSeed,
    ) -> Result<Self> {
        let targets = data.targets();
        let mut distinct = targets.clone();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        let mut members = Vec::new();
        for (i, &k) in class_counts.iter().enumerate() {
            if k < 2 || distinct.len() < k || data.len() < k {
                continue;
            }
            let disc = Discretizer::fit(&targets, k)?;
            let cls = train_classifier(data, &disc, config, seed.child(i as u64))?;
            members.push((disc, cls));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(Discretizer, ClassifierModel)] {
        &self.members
    }

    /// Mean member uncertainty; 0 for an empty ensemble.
    pub fn utility(&self, x: &Sample) -> Result<f64> {
        if self.members.is_empty() {
            return Ok(0.0);
        }
        let mut sum = 0.0;
        for (_, cls) in &self.members {
            sum += rvc_member_uncertainty(&cls.predict_posterior(x)?);
        }
        Ok(sum / self.members.len() as f64)
    }
}

/// Query-by-committee: L regressors, each trained on an independent seeded
/// subsample; utility is the population standard deviation of their
/// predictions.
#[derive(Debug, Clone)]
pub struct QbcUtilityEstimator {
    members: Vec<crate::models::RegressorModel>,
    train_sizes: Vec<usize>,
}

impl QbcUtilityEstimator {
    pub fn train(
        data: &LabeledWindow,
        committee_size: usize,
        subsample_fraction: f64,
        kind: RegressorKind,
        ridge_lambda: f64,
        seed: RngSeed,
    ) -> Result<Self> {
        assert!(committee_size >= 2, "committee needs at least two members");
        assert!(
            subsample_fraction > 0.0 && subsample_fraction <= 1.0,
            "subsample fraction must be in (0,1]"
        );
        if data.len() < 3 {
            return Err(Error::TooFewSamples {
                needed: 3,
                got: data.len(),
            });
        }
        let all: Vec<_> = data.iter().cloned().collect();
        let m = ((all.len() as f64 * subsample_fraction).floor() as usize)
            .max(2)
            .min(all.len());
        let mut members = Vec::with_capacity(committee_size);
        let mut train_sizes = Vec::with_capacity(committee_size);
        for l in 0..committee_size {
            let mut rng = seed.stream(0x51bc_0000 + l as u64);
            let mut idx: Vec<usize> = index_sample(&mut rng, all.len(), m).into_vec();
            idx.sort_unstable();
            let subset: Vec<_> = idx.iter().map(|&i| all[i].clone()).collect();
            train_sizes.push(subset.len());
            members.push(train_regressor_on(&subset, kind, ridge_lambda)?);
        }
        Ok(Self {
            members,
            train_sizes,
        })
    }

    /// Subsample size each member was trained on.
    pub fn train_sizes(&self) -> &[usize] {
        &self.train_sizes
    }

    pub fn committee_size(&self) -> usize {
        self.members.len()
    }

    pub fn member_predictions(&self, x: &Sample) -> Result<Vec<f64>> {
        self.members.iter().map(|m| m.predict(x)).collect()
    }

    /// Population standard deviation of the committee predictions.
    pub fn utility(&self, x: &Sample) -> Result<f64> {
        let preds = self.member_predictions(x)?;
        Ok(committee_stddev(&preds))
    }
}

/// sqrt((1/L) sum (y_l - mean)^2) over the member predictions.
pub fn committee_stddev(predictions: &[f64]) -> f64 {
    let l = predictions.len() as f64;
    let mean = predictions.iter().sum::<f64>() / l;
    (predictions.iter().map(|&p| (p - mean) * (p - mean)).sum::<f64>() / l).sqrt()
}

/// Next uniform draw in [0,1) from the trial's generator; independent of
/// the input sample by construction.
pub fn random_utility(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen::<f64>()
}
