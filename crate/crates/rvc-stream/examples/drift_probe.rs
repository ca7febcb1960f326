//! Inspect drift recovery: per-100-step label counts and RMSE for each
//! strategy on a stream whose drift lands mid-evaluation.

use rvc_stream::core::RngSeed;
use rvc_stream::data::{generate_synthetic, DriftKind, SyntheticDriftSpec};
use rvc_stream::models::{ClassifierKind, ModelConfig, RegressorKind};
use rvc_stream::stream::{run_stream, ExperimentPlan, ManagerKind, StrategyConfig, UtilityKind};

fn main() {
    let trials: u64 = std::env::args()
        .nth(1)
        .map_or(10, |a| a.parse().unwrap());
    let models = ModelConfig {
        classifier: ClassifierKind::KnnClassifier,
        regressor: RegressorKind::Ridge,
        ..ModelConfig::default()
    };
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
            models: models.clone(),
            rvc_regressor_classes: None,
            inverse_mode: Default::default(),
        },
        StrategyConfig {
            name: "random".into(),
            utility: UtilityKind::Random,
            manager: ManagerKind::Random { window: 256 },
            models: models.clone(),
            rvc_regressor_classes: None,
            inverse_mode: Default::default(),
        },
    ];
    let plan = ExperimentPlan::default();
    let buckets = plan.eval_length / 100;
    for strategy in &strategies {
        let mut labels = vec![0.0f64; buckets];
        let mut sq = vec![0.0f64; buckets];
        let mut util = vec![0.0f64; buckets];
        for trial in 0..trials {
            // drift lands at eval step 1000 of this segment
            let data = generate_synthetic(&SyntheticDriftSpec {
                kind: DriftKind::Abrupt,
                length: 2100,
                dimension: 2,
                drift_position: 1100,
                drift_width: 0,
                noise_scale: 0.1,
                seed: trial,
            })
            .unwrap();
            let run =
                run_stream(&plan, &data, strategy, 0.1, RngSeed(trial), "probe", 0).unwrap();
            for (i, s) in run.steps.iter().enumerate() {
                labels[i / 100] += f64::from(u8::from(s.labeled)) / trials as f64;
                sq[i / 100] += s.abs_error * s.abs_error / (100.0 * trials as f64);
                util[i / 100] += s.utility / (100.0 * trials as f64);
            }
        }
        println!("strategy {} (drift at eval step 1000)", strategy.name);
        println!("{:>6} {:>8} {:>8} {:>8}", "step", "labels", "rmse", "utility");
        for i in 0..buckets {
            println!(
                "{:>6} {:>8.1} {:>8.3} {:>8.3}",
                i * 100,
                labels[i],
                sq[i].sqrt(),
                util[i]
            );
        }
    }
}
