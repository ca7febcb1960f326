//! The streaming active-learning loop, the budgeted prequential streaming
//! evaluation, and the offline sequential-CV evaluation.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::budget::{
    quantile_decide, random_decide, split_decide, varun_decide, QuantileFilterState, SpentState,
    VarUnState, DEFAULT_QUANTILE_WINDOW, DEFAULT_SPLIT_NU, DEFAULT_STEP, DEFAULT_WINDOW,
};
use crate::core::{LabeledSample, LabeledWindow, RngSeed, Sample};
use crate::discretize::{Discretizer, InverseMode};
use crate::error::{Error, Result};
use crate::metrics::{average_ranks, binned_stats, percentile_rank, rmse, spearman_rho, BinStat};
use crate::models::{
    train_classifier, train_regressor, ClassifierModel, ModelConfig, RegressorKind, RegressorModel,
};
use crate::utility::{random_utility, QbcUtilityEstimator, RvcUtilityEstimator};

const TAG_SEGMENT: u64 = 0x5e6;
const TAG_UTIL_RNG: u64 = 0x07ff;
const TAG_MANAGER_RNG: u64 = 0xb0d6;
const TAG_ESTIMATOR: u64 = 0xe571;
const TAG_PREDICTOR: u64 = 0x9ed;

fn default_committee_size() -> usize {
    10
}
fn default_subsample_fraction() -> f64 {
    0.9
}
fn default_step() -> f64 {
    DEFAULT_STEP
}
fn default_window() -> usize {
    DEFAULT_WINDOW
}
fn default_nu() -> f64 {
    DEFAULT_SPLIT_NU
}
fn default_quantile_buffer() -> usize {
    DEFAULT_QUANTILE_WINDOW
}
fn default_class_counts() -> Vec<usize> {
    crate::utility::DEFAULT_CLASS_COUNTS.to_vec()
}

/// Which utility estimator a strategy uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum UtilityKind {
    Rvc {
        #[serde(default = "default_class_counts")]
        class_counts: Vec<usize>,
    },
    Qbc {
        #[serde(default = "default_committee_size")]
        committee_size: usize,
        #[serde(default = "default_subsample_fraction")]
        subsample_fraction: f64,
        #[serde(default = "default_member_regressor")]
        member_regressor: RegressorKind,
    },
    Random,
}

fn default_member_regressor() -> RegressorKind {
    RegressorKind::KnnRegressor
}

/// Which budget manager a strategy uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ManagerKind {
    VarUn {
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default = "default_window")]
        window: usize,
    },
    Split {
        #[serde(default = "default_step")]
        step: f64,
        #[serde(default = "default_window")]
        window: usize,
        #[serde(default = "default_nu")]
        nu: f64,
    },
    Random {
        #[serde(default = "default_window")]
        window: usize,
    },
    Quantile {
        #[serde(default = "default_quantile_buffer")]
        buffer: usize,
        #[serde(default = "default_window")]
        spend_window: usize,
    },
}

/// A full streaming strategy: utility estimator + budget manager + learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub name: String,
    pub utility: UtilityKind,
    pub manager: ManagerKind,
    #[serde(default)]
    pub models: ModelConfig,
    /// When set, the main predictor is the RvC regressor with this many
    /// classes (class statistic of the argmax posterior) instead of a
    /// direct regressor.
    #[serde(default)]
    pub rvc_regressor_classes: Option<usize>,
    #[serde(default)]
    pub inverse_mode: InverseMode,
}

/// Protocol parameters of one streaming experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentPlan {
    pub segment_length: usize,
    pub warmup_labeled: usize,
    pub eval_length: usize,
    pub window_capacity: usize,
    pub retrain_every_acquisition: bool,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            segment_length: 2100,
            warmup_labeled: 100,
            eval_length: 2000,
            window_capacity: 500,
            retrain_every_acquisition: true,
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        if self.warmup_labeled + self.eval_length != self.segment_length {
            return Err(Error::Config(format!(
                "warmup ({}) + eval ({}) must equal segment length ({})",
                self.warmup_labeled, self.eval_length, self.segment_length
            )));
        }
        if self.window_capacity == 0 || self.warmup_labeled == 0 {
            return Err(Error::Config("window capacity and warmup must be positive".into()));
        }
        Ok(())
    }
}

/// One evaluated stream step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub prediction: f64,
    pub groundtruth: f64,
    pub abs_error: f64,
    pub utility: f64,
    pub labeled: bool,
    pub theta: f64,
    pub spent: f64,
}

/// Full per-step log of one stream run plus its metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamRunRecord {
    pub strategy: String,
    pub budget: f64,
    pub seed: u64,
    pub dataset_id: String,
    pub segment_start: usize,
    pub steps: Vec<StepRecord>,
}

impl StreamRunRecord {
    pub fn rmse(&self) -> Result<f64> {
        rmse(&self.steps.iter().map(|s| s.abs_error).collect::<Vec<_>>())
    }

    pub fn realized_labeling_rate(&self) -> f64 {
        self.steps.iter().filter(|s| s.labeled).count() as f64 / self.steps.len() as f64
    }
}

enum MainPredictor {
    Direct(RegressorModel),
    Rvc {
        disc: Discretizer,
        cls: ClassifierModel,
        mode: InverseMode,
    },
}

impl MainPredictor {
    fn train(window: &LabeledWindow, strategy: &StrategyConfig, seed: RngSeed) -> Result<Self> {
        match strategy.rvc_regressor_classes {
            None => Ok(Self::Direct(train_regressor(window, &strategy.models, seed)?)),
            Some(k) => {
                let disc = Discretizer::fit(&window.targets(), k)?;
                let cls = train_classifier(window, &disc, &strategy.models, seed)?;
                Ok(Self::Rvc {
                    disc,
                    cls,
                    mode: strategy.inverse_mode,
                })
            }
        }
    }

    fn predict(&self, x: &Sample) -> Result<f64> {
        match self {
            Self::Direct(m) => m.predict(x),
            Self::Rvc { disc, cls, mode } => disc.inverse(&cls.predict_posterior(x)?, *mode),
        }
    }
}

enum Estimator {
    Rvc(RvcUtilityEstimator),
    Qbc(QbcUtilityEstimator),
    Random,
}

impl Estimator {
    fn train(window: &LabeledWindow, strategy: &StrategyConfig, seed: RngSeed) -> Result<Self> {
        match &strategy.utility {
            UtilityKind::Rvc { class_counts } => Ok(Self::Rvc(RvcUtilityEstimator::train(
                window,
                class_counts,
                &strategy.models,
                seed,
            )?)),
            UtilityKind::Qbc {
                committee_size,
                subsample_fraction,
                member_regressor,
            } => Ok(Self::Qbc(QbcUtilityEstimator::train(
                window,
                *committee_size,
                *subsample_fraction,
                *member_regressor,
                strategy.models.ridge_lambda,
                seed,
            )?)),
            UtilityKind::Random => Ok(Self::Random),
        }
    }

    fn utility(&self, x: &Sample, util_rng: &mut ChaCha8Rng) -> Result<f64> {
        match self {
            Self::Rvc(e) => e.utility(x),
            Self::Qbc(e) => e.utility(x),
            Self::Random => Ok(random_utility(util_rng)),
        }
    }
}

enum ManagerState {
    VarUn(VarUnState),
    Split { state: VarUnState, nu: f64 },
    Random(SpentState),
    Quantile(QuantileFilterState),
}

impl ManagerState {
    fn new(kind: &ManagerKind) -> Self {
        match kind {
            ManagerKind::VarUn { step, window } => Self::VarUn(VarUnState::new(*step, *window)),
            ManagerKind::Split { step, window, nu } => Self::Split {
                state: VarUnState::new(*step, *window),
                nu: *nu,
            },
            ManagerKind::Random { window } => Self::Random(SpentState::new(*window)),
            ManagerKind::Quantile {
                buffer,
                spend_window,
            } => Self::Quantile(QuantileFilterState::new(*buffer, *spend_window)),
        }
    }

    /// Decide, mutate in place, and return (labeled, theta snapshot,
    /// spent snapshot) for the run log.
    fn decide(&mut self, u: f64, b: f64, mgr_rng: &mut ChaCha8Rng) -> (bool, f64, f64) {
        match self {
            Self::VarUn(state) => {
                let (l, next) = varun_decide(state.clone(), u, b);
                *state = next;
                (l, state.theta, state.spent)
            }
            Self::Split { state, nu } => {
                let eta = random_utility(mgr_rng);
                let (l, next) = split_decide(state.clone(), u, b, *nu, eta, mgr_rng);
                *state = next;
                (l, state.theta, state.spent)
            }
            Self::Random(state) => {
                let (l, next) = random_decide(state.clone(), u, b);
                *state = next;
                (l, b, state.spent)
            }
            Self::Quantile(state) => {
                let (l, next) = quantile_decide(state.clone(), u, b);
                *state = next;
                (l, state.threshold(b), state.spent)
            }
        }
    }
}

/// Run one stream segment: warm-start on the first `warmup_labeled` samples,
/// then evaluate prequentially over the rest. The prediction at each step is
/// logged before any label acquisition at that step.
pub fn run_stream(
    plan: &ExperimentPlan,
    segment: &[LabeledSample],
    strategy: &StrategyConfig,
    budget: f64,
    seed: RngSeed,
    dataset_id: &str,
    segment_start: usize,
) -> Result<StreamRunRecord> {
    plan.validate()?;
    if segment.len() < plan.segment_length {
        return Err(Error::DatasetTooShort {
            needed: plan.segment_length,
            got: segment.len(),
        });
    }
    let (warm, eval) = segment.split_at(plan.warmup_labeled);
    let eval = &eval[..plan.eval_length];

    let mut window = LabeledWindow::new(plan.window_capacity);
    for s in warm {
        window.push(s.clone());
    }
    let mut retrains: u64 = 0;
    let mut predictor = MainPredictor::train(&window, strategy, seed.child(TAG_PREDICTOR))?;
    let mut estimator = Estimator::train(&window, strategy, seed.child(TAG_ESTIMATOR))?;
    let mut manager = ManagerState::new(&strategy.manager);
    let mut util_rng = seed.stream(TAG_UTIL_RNG);
    let mut mgr_rng = seed.stream(TAG_MANAGER_RNG);

    let mut steps = Vec::with_capacity(eval.len());
    for (i, s) in eval.iter().enumerate() {
        let prediction = predictor.predict(&s.sample)?;
        let utility = estimator.utility(&s.sample, &mut util_rng)?;
        let (labeled, theta, spent) = manager.decide(utility, budget, &mut mgr_rng);
        steps.push(StepRecord {
            step: i,
            prediction,
            groundtruth: s.target,
            abs_error: (prediction - s.target).abs(),
            utility,
            labeled,
            theta,
            spent,
        });
        if labeled {
            window.push(s.clone());
            if plan.retrain_every_acquisition {
                retrains += 1;
                predictor =
                    MainPredictor::train(&window, strategy, seed.child(TAG_PREDICTOR + retrains))?;
                estimator =
                    Estimator::train(&window, strategy, seed.child(TAG_ESTIMATOR + retrains))?;
            }
        }
    }

    Ok(StreamRunRecord {
        strategy: strategy.name.clone(),
        budget,
        seed: seed.0,
        dataset_id: dataset_id.to_string(),
        segment_start,
        steps,
    })
}

/// Aggregated result of a full experiment grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryTable {
    pub dataset_id: String,
    pub strategies: Vec<String>,
    pub budgets: Vec<f64>,
    /// mean_rmse[strategy][budget]
    pub mean_rmse: Vec<Vec<f64>>,
    /// Mean over budgets of the per-budget means.
    pub budget_averaged_rmse: Vec<f64>,
    /// Rank of each strategy by budget-averaged RMSE; 1 is best, ties
    /// share the average rank.
    pub ranks: Vec<f64>,
    pub trials: usize,
    pub segment_starts: Vec<usize>,
}

/// Run the full (strategy, budget, trial) grid. Trials are paired: trial i
/// uses the same segment start for every strategy and budget. `on_run`
/// receives every raw run record as it completes.
pub fn run_experiment(
    plan: &ExperimentPlan,
    dataset: &[LabeledSample],
    dataset_id: &str,
    strategies: &[StrategyConfig],
    budgets: &[f64],
    trials: usize,
    seed: RngSeed,
    mut on_run: impl FnMut(&StreamRunRecord) -> Result<()>,
) -> Result<SummaryTable> {
    plan.validate()?;
    assert!(trials >= 1);
    if dataset.len() < plan.segment_length {
        return Err(Error::DatasetTooShort {
            needed: plan.segment_length,
            got: dataset.len(),
        });
    }
    let max_start = dataset.len() - plan.segment_length;
    let mut segment_starts = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = seed.child(trial as u64).stream(TAG_SEGMENT);
        segment_starts.push(if max_start == 0 {
            0
        } else {
            rng.gen_range(0..=max_start)
        });
    }

    let mut sums = vec![vec![0.0f64; budgets.len()]; strategies.len()];
    for (trial, &start) in segment_starts.iter().enumerate() {
        let trial_seed = seed.child(trial as u64);
        let segment = &dataset[start..start + plan.segment_length];
        for (si, strategy) in strategies.iter().enumerate() {
            for (bi, &budget) in budgets.iter().enumerate() {
                let cell_seed = trial_seed.child(((si as u64) << 20) | bi as u64);
                let record = run_stream(
                    plan,
                    segment,
                    strategy,
                    budget,
                    cell_seed,
                    dataset_id,
                    start,
                )?;
                sums[si][bi] += record.rmse()?;
                on_run(&record)?;
            }
        }
    }

    let mean_rmse: Vec<Vec<f64>> = sums
        .iter()
        .map(|row| row.iter().map(|s| s / trials as f64).collect())
        .collect();
    let budget_averaged_rmse: Vec<f64> = mean_rmse
        .iter()
        .map(|row| row.iter().sum::<f64>() / row.len() as f64)
        .collect();
    let ranks = average_ranks(&budget_averaged_rmse);

    Ok(SummaryTable {
        dataset_id: dataset_id.to_string(),
        strategies: strategies.iter().map(|s| s.name.clone()).collect(),
        budgets: budgets.to_vec(),
        mean_rmse,
        budget_averaged_rmse,
        ranks,
        trials,
        segment_starts,
    })
}

/// Offline evaluation settings (sequential cross-validation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OfflineConfig {
    pub folds: usize,
    pub class_counts: Vec<usize>,
    pub committee_size: usize,
    pub subsample_fraction: f64,
    pub qbc_member_regressor: RegressorKind,
    pub models: ModelConfig,
    pub bins: usize,
}

impl Default for OfflineConfig {
    fn default() -> Self {
        Self {
            folds: 5,
            class_counts: default_class_counts(),
            committee_size: 10,
            subsample_fraction: 0.9,
            qbc_member_regressor: RegressorKind::KnnRegressor,
            models: ModelConfig::default(),
            bins: 10,
        }
    }
}

/// Offline outcome for one utility estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineEstimatorResult {
    /// (percentile rank of utility, absolute error), one pair per sample.
    pub pairs: Vec<(f64, f64)>,
    pub rho: f64,
    pub bins: Vec<BinStat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineResult {
    pub rvc: OfflineEstimatorResult,
    pub qbc: OfflineEstimatorResult,
}

/// Contiguous fold boundaries in time order; sizes differ by at most one.
pub fn sequential_folds(n: usize, folds: usize) -> Vec<(usize, usize)> {
    assert!(folds >= 2 && n >= folds);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        out.push((start, start + len));
        start += len;
    }
    out
}

/// Sequential k-fold offline evaluation: for each fold, train the regressor
/// and both utility estimators on the remaining folds, then score utilities
/// against absolute regression errors on the held-out fold.
pub fn run_offline_eval(
    dataset: &[LabeledSample],
    config: &OfflineConfig,
    seed: RngSeed,
) -> Result<OfflineResult> {
    let n = dataset.len();
    let min_train = config
        .class_counts
        .iter()
        .copied()
        .max()
        .unwrap_or(2)
        .max(3);
    if n < config.folds * min_train.max(2) {
        return Err(Error::TooFewSamples {
            needed: config.folds * min_train.max(2),
            got: n,
        });
    }

    let mut errors = Vec::with_capacity(n);
    let mut u_rvc = Vec::with_capacity(n);
    let mut u_qbc = Vec::with_capacity(n);

    for (fi, &(lo, hi)) in sequential_folds(n, config.folds).iter().enumerate() {
        let train: Vec<LabeledSample> = dataset[..lo]
            .iter()
            .chain(dataset[hi..].iter())
            .cloned()
            .collect();
        let mut window = LabeledWindow::new(train.len());
        for s in &train {
            window.push(s.clone());
        }
        let fold_seed = seed.child(fi as u64);
        let regressor = train_regressor(&window, &config.models, fold_seed.child(1))?;
        let rvc = RvcUtilityEstimator::train(
            &window,
            &config.class_counts,
            &config.models,
            fold_seed.child(2),
        )?;
        let qbc = QbcUtilityEstimator::train(
            &window,
            config.committee_size,
            config.subsample_fraction,
            config.qbc_member_regressor,
            config.models.ridge_lambda,
            fold_seed.child(3),
        )?;
        for s in &dataset[lo..hi] {
            let pred = regressor.predict(&s.sample)?;
            errors.push((pred - s.target).abs());
            u_rvc.push(rvc.utility(&s.sample)?);
            u_qbc.push(qbc.utility(&s.sample)?);
        }
    }

    let build = |utilities: &[f64]| -> Result<OfflineEstimatorResult> {
        let ranks = percentile_rank(utilities)?;
        let pairs: Vec<(f64, f64)> = ranks.iter().copied().zip(errors.iter().copied()).collect();
        Ok(OfflineEstimatorResult {
            rho: spearman_rho(utilities, &errors)?,
            bins: binned_stats(&pairs, config.bins)?,
            pairs,
        })
    };

    Ok(OfflineResult {
        rvc: build(&u_rvc)?,
        qbc: build(&u_qbc)?,
    })
}
