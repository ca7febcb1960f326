//! Offline evaluation on a heteroscedastic dataset: does high utility
//! predict high regression error?

use rvc_stream::core::RngSeed;
use rvc_stream::data::{generate_synthetic, DriftKind, SyntheticDriftSpec};
use rvc_stream::models::{ClassifierKind, ModelConfig, RegressorKind};
use rvc_stream::stream::{run_offline_eval, OfflineConfig};

fn main() {
    let data = generate_synthetic(&SyntheticDriftSpec {
        kind: DriftKind::HeteroscedasticStatic,
        length: 5000,
        dimension: 1,
        drift_position: 0,
        drift_width: 0,
        noise_scale: 1.0,
        seed: 0,
    })
    .unwrap();
    let config = OfflineConfig {
        qbc_member_regressor: RegressorKind::Ridge,
        models: ModelConfig {
            classifier: ClassifierKind::KnnClassifier,
            regressor: RegressorKind::Ridge,
            ..ModelConfig::default()
        },
        ..OfflineConfig::default()
    };
    let result = run_offline_eval(&data, &config, RngSeed(0)).unwrap();

    println!("Spearman rho (utility rank vs abs error):");
    println!("  rvc: {:+.4}", result.rvc.rho);
    println!("  qbc: {:+.4}", result.qbc.rho);
    println!();
    println!("mean abs error per utility-percentile bin (rvc):");
    for bin in &result.rvc.bins {
        println!(
            "  [{:>5.1}, {:>5.1})  n={:<4}  mean={:.4}",
            bin.lo, bin.hi, bin.count, bin.mean
        );
    }
}
