//! Generate the three synthetic drift streams and write them as CSV.
//!
//! Usage: cargo run --example synthetic_stream [out_dir]

use rvc_stream::data::{generate_synthetic, write_csv, DriftKind, SyntheticDriftSpec};

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "synthetic-out".into());
    std::fs::create_dir_all(&out_dir).unwrap();
    for (kind, name) in [
        (DriftKind::Abrupt, "abrupt"),
        (DriftKind::Gradual, "gradual"),
        (DriftKind::HeteroscedasticStatic, "heteroscedastic"),
    ] {
        let spec = SyntheticDriftSpec {
            kind,
            length: 2000,
            dimension: 2,
            drift_position: 1000,
            drift_width: 200,
            noise_scale: 0.1,
            seed: 42,
        };
        let data = generate_synthetic(&spec).unwrap();
        let path = format!("{out_dir}/{name}.csv");
        write_csv(std::path::Path::new(&path), &data).unwrap();
        let mean = data.iter().map(|s| s.target).sum::<f64>() / data.len() as f64;
        println!("{path}: {} samples, mean target {mean:.3}", data.len());
    }
}
