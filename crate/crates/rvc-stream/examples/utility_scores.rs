//! Score a grid of query points with both utility estimators trained on a
//! noisy sine, showing where each estimator wants labels.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use rvc_stream::core::{LabeledSample, LabeledWindow, RngSeed, Sample};
use rvc_stream::models::{ClassifierKind, ModelConfig, RegressorKind};
use rvc_stream::utility::{QbcUtilityEstimator, RvcUtilityEstimator};

fn main() {
    let seed = RngSeed(3);
    let mut rng = seed.stream(0);
    let mut window = LabeledWindow::new(400);
    for _ in 0..400 {
        let x: f64 = rng.gen_range(-3.0..3.0);
        // noise grows with |x|: utilities should too
        let noise: f64 = StandardNormal.sample(&mut rng);
        let y = (2.0 * x).sin() + 0.3 * x.abs() * noise;
        window.push(LabeledSample {
            sample: Sample::new(vec![x]),
            target: y,
        });
    }

    let config = ModelConfig {
        classifier: ClassifierKind::KnnClassifier,
        regressor: RegressorKind::KnnRegressor,
        ..ModelConfig::default()
    };
    let rvc =
        RvcUtilityEstimator::train(&window, &[2, 4, 8, 16], &config, seed.child(1)).unwrap();
    let qbc = QbcUtilityEstimator::train(
        &window,
        10,
        0.9,
        RegressorKind::KnnRegressor,
        config.ridge_lambda,
        seed.child(2),
    )
    .unwrap();

    println!("{:>6} {:>12} {:>12}", "x", "rvc_utility", "qbc_utility");
    for i in 0..=12 {
        let x = -3.0 + 0.5 * i as f64;
        let q = Sample::new(vec![x]);
        println!(
            "{x:>6.1} {:>12.4} {:>12.4}",
            rvc.utility(&q).unwrap(),
            qbc.utility(&q).unwrap()
        );
    }
}
