//! One prequential streaming run: predict, score utility, decide, learn.

use rvc_stream::core::RngSeed;
use rvc_stream::data::{generate_synthetic, DriftKind, SyntheticDriftSpec};
use rvc_stream::models::{ClassifierKind, ModelConfig, RegressorKind};
use rvc_stream::stream::{run_stream, ExperimentPlan, ManagerKind, StrategyConfig, UtilityKind};

fn main() {
    let data = generate_synthetic(&SyntheticDriftSpec {
        kind: DriftKind::Abrupt,
        length: 2100,
        dimension: 2,
        drift_position: 1100,
        drift_width: 0,
        noise_scale: 0.1,
        seed: 9,
    })
    .unwrap();
    let strategy = StrategyConfig {
        name: "rvc-varun".into(),
        utility: UtilityKind::Rvc {
            class_counts: vec![2, 4, 8, 16],
        },
        manager: ManagerKind::VarUn {
            step: 0.01,
            window: 256,
        },
        models: ModelConfig {
            classifier: ClassifierKind::KnnClassifier,
            regressor: RegressorKind::Ridge,
            ..ModelConfig::default()
        },
        rvc_regressor_classes: None,
        inverse_mode: Default::default(),
    };
    let plan = ExperimentPlan::default();
    let run = run_stream(&plan, &data, &strategy, 0.1, RngSeed(1), "abrupt", 0).unwrap();

    println!(
        "strategy {} at budget 0.10: rmse {:.4}, realized labeling rate {:.4}",
        run.strategy,
        run.rmse().unwrap(),
        run.realized_labeling_rate()
    );
    println!("first evaluation steps:");
    println!(
        "{:>5} {:>10} {:>10} {:>8} {:>8}",
        "step", "pred", "truth", "utility", "labeled"
    );
    for s in run.steps.iter().take(10) {
        println!(
            "{:>5} {:>10.4} {:>10.4} {:>8.4} {:>8}",
            s.step, s.prediction, s.groundtruth, s.utility, s.labeled
        );
    }
}
