//! Compare the four streaming strategies on an abrupt-drift synthetic
//! stream and print per-budget mean RMSE and realized labeling rates.
//! All strategies share the 16-class discretized regressor as main
//! predictor, so the table isolates the labeling decisions.
//!
//! Usage: cargo run --release --example streaming_benchmark [trials] [dataset_seed]

use std::collections::HashMap;

use rvc_stream::core::RngSeed;
use rvc_stream::data::{generate_synthetic, DriftKind, SyntheticDriftSpec};
use rvc_stream::models::{ClassifierKind, ModelConfig, RegressorKind};
use rvc_stream::stream::{
    run_experiment, ExperimentPlan, ManagerKind, StrategyConfig, UtilityKind,
};

fn models() -> ModelConfig {
    ModelConfig {
        classifier: ClassifierKind::KnnClassifier,
        regressor: RegressorKind::Ridge,
        ..ModelConfig::default()
    }
}

fn main() {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().map_or(10, |a| a.parse().unwrap());
    let dataset_seed: u64 = args.next().map_or(99, |a| a.parse().unwrap());

    let dataset = generate_synthetic(&SyntheticDriftSpec {
        kind: DriftKind::Abrupt,
        length: 4200,
        dimension: 4,
        drift_position: 2100,
        drift_width: 0,
        noise_scale: 0.1,
        seed: dataset_seed,
    })
    .unwrap();

    let strategies = [
        StrategyConfig {
            name: "rvc-varun".into(),
            utility: UtilityKind::Rvc {
                class_counts: vec![2, 4, 8, 16],
            },
            manager: ManagerKind::VarUn {
                step: 0.01,
                window: 256,
            },
            models: models(),
            rvc_regressor_classes: Some(16),
            inverse_mode: Default::default(),
        },
        StrategyConfig {
            name: "rvc-split".into(),
            utility: UtilityKind::Rvc {
                class_counts: vec![2, 4, 8, 16],
            },
            manager: ManagerKind::Split {
                step: 0.01,
                window: 256,
                nu: 0.5,
            },
            models: models(),
            rvc_regressor_classes: Some(16),
            inverse_mode: Default::default(),
        },
        StrategyConfig {
            name: "random".into(),
            utility: UtilityKind::Random,
            manager: ManagerKind::Random { window: 256 },
            models: models(),
            rvc_regressor_classes: Some(16),
            inverse_mode: Default::default(),
        },
        StrategyConfig {
            name: "qbc-quantile".into(),
            utility: UtilityKind::Qbc {
                committee_size: 10,
                subsample_fraction: 0.9,
                member_regressor: RegressorKind::Ridge,
            },
            manager: ManagerKind::Quantile {
                buffer: 256,
                spend_window: 256,
            },
            models: models(),
            rvc_regressor_classes: Some(16),
            inverse_mode: Default::default(),
        },
    ];
    let budgets = [0.05, 0.1, 0.2];

    let mut rates: HashMap<(String, String), (f64, usize)> = HashMap::new();
    let summary = run_experiment(
        &ExperimentPlan::default(),
        &dataset,
        "synthetic-abrupt",
        &strategies,
        &budgets,
        trials,
        RngSeed(77),
        |record| {
            let key = (record.strategy.clone(), format!("{:.2}", record.budget));
            let entry = rates.entry(key).or_insert((0.0, 0));
            entry.0 += record.realized_labeling_rate();
            entry.1 += 1;
            Ok(())
        },
    )
    .unwrap();

    println!(
        "{} trials, dataset seed {dataset_seed}, segment starts {:?}...",
        summary.trials,
        &summary.segment_starts[..summary.segment_starts.len().min(5)]
    );
    println!("{:<14} {:>8} {:>12} {:>12}", "strategy", "budget", "mean_rmse", "label_rate");
    for (si, name) in summary.strategies.iter().enumerate() {
        for (bi, b) in summary.budgets.iter().enumerate() {
            let (sum, n) = rates[&(name.clone(), format!("{b:.2}"))];
            println!(
                "{name:<14} {b:>8.2} {:>12.4} {:>12.4}",
                summary.mean_rmse[si][bi],
                sum / n as f64
            );
        }
    }
    println!("budget-averaged RMSE: {:?}", summary.budget_averaged_rmse);
    println!("ranks: {:?}", summary.ranks);
}
