//! Command implementations behind the thin binary: `run`, `offline`, and
//! `synth`. All outputs are plain CSV/JSON and byte-reproducible for a
//! fixed (config, seed).

use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::config::ExperimentConfig;
use crate::data::{generate_synthetic, write_csv, SyntheticDriftSpec};
use crate::error::{Error, Result};
use crate::stream::{run_experiment, run_offline_eval, StreamRunRecord, SummaryTable};

/// Environment variable overriding the configured output directory.
pub const OUT_DIR_ENV: &str = "RVC_STREAM_OUT_DIR";

/// Exit code classification: 1 config, 2 dataset, 3 runtime.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => 1,
        Error::MissingColumn(_)
        | Error::UnparsableValue { .. }
        | Error::EmptyDataset
        | Error::DatasetTooShort { .. }
        | Error::InvalidSpec(_)
        | Error::Csv(_) => 2,
        _ => 3,
    }
}

fn output_dir(config: &ExperimentConfig) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => config.output_dir.clone(),
    }
}

/// Audit-grade float formatting (17 significant digits).
fn raw(v: f64) -> String {
    format!("{v:.16e}")
}

/// Human-grade float formatting (6 significant digits).
fn human(v: f64) -> String {
    format!("{v:.5e}")
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_record_csv(dir: &Path, record: &StreamRunRecord, trial: usize) -> Result<()> {
    let file = dir.join(format!(
        "records_{}_{:.2}_{trial:03}.csv",
        sanitize(&record.strategy),
        record.budget
    ));
    let mut out = std::io::BufWriter::new(std::fs::File::create(file)?);
    writeln!(
        out,
        "step,prediction,groundtruth,abs_error,utility,labeled,theta,spent"
    )?;
    for s in &record.steps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            s.step,
            raw(s.prediction),
            raw(s.groundtruth),
            raw(s.abs_error),
            raw(s.utility),
            u8::from(s.labeled),
            raw(s.theta),
            raw(s.spent)
        )?;
    }
    out.flush()?;
    Ok(())
}

fn write_summary(dir: &Path, summary: &SummaryTable) -> Result<()> {
    let mut csv = String::new();
    csv.push_str("strategy");
    for b in &summary.budgets {
        csv.push_str(&format!(",rmse_b{b:.2}"));
    }
    csv.push_str(",budget_averaged_rmse,rank\n");
    for (si, name) in summary.strategies.iter().enumerate() {
        csv.push_str(name);
        for bi in 0..summary.budgets.len() {
            csv.push(',');
            csv.push_str(&human(summary.mean_rmse[si][bi]));
        }
        csv.push(',');
        csv.push_str(&human(summary.budget_averaged_rmse[si]));
        csv.push_str(&format!(",{}\n", summary.ranks[si]));
    }
    std::fs::write(dir.join("summary.csv"), csv)?;
    let json = serde_json::to_string_pretty(summary)?;
    std::fs::write(dir.join("summary.json"), json)?;
    Ok(())
}

/// Execute the streaming experiment described by the config file.
pub fn cmd_run(config_path: &Path) -> Result<()> {
    let config = ExperimentConfig::from_path(config_path)?;
    // load before touching the filesystem so a bad dataset leaves nothing behind
    let dataset = config.dataset.load()?;
    if dataset.len() < config.plan.segment_length {
        return Err(Error::DatasetTooShort {
            needed: config.plan.segment_length,
            got: dataset.len(),
        });
    }
    let dir = output_dir(&config);
    std::fs::create_dir_all(&dir)?;

    let mut trial_counter: HashMap<(String, String), usize> = HashMap::new();
    let summary = run_experiment(
        &config.plan,
        &dataset,
        &config.dataset.id(),
        &config.strategies,
        &config.budgets,
        config.trials,
        crate::core::RngSeed(config.seed),
        |record| {
            let key = (record.strategy.clone(), format!("{:.2}", record.budget));
            let trial = trial_counter.entry(key).or_insert(0);
            write_record_csv(&dir, record, *trial)?;
            *trial += 1;
            Ok(())
        },
    )?;
    write_summary(&dir, &summary)?;
    Ok(())
}

/// Execute the offline (sequential cross-validation) evaluation.
pub fn cmd_offline(config_path: &Path) -> Result<()> {
    let config = ExperimentConfig::from_path(config_path)?;
    let dataset = config.dataset.load()?;
    let result = run_offline_eval(&dataset, &config.offline, crate::core::RngSeed(config.seed))?;
    let dir = output_dir(&config);
    std::fs::create_dir_all(&dir)?;

    let mut samples = String::from("estimator,index,utility_percentile_rank,abs_error\n");
    let mut binned = String::from("estimator,bin,lo,hi,count,mean,std\n");
    for (name, est) in [("rvc", &result.rvc), ("qbc", &result.qbc)] {
        for (i, (rank, err)) in est.pairs.iter().enumerate() {
            samples.push_str(&format!("{name},{i},{},{}\n", raw(*rank), raw(*err)));
        }
        for (i, b) in est.bins.iter().enumerate() {
            binned.push_str(&format!(
                "{name},{i},{},{},{},{},{}\n",
                human(b.lo),
                human(b.hi),
                b.count,
                human(b.mean),
                human(b.std)
            ));
        }
    }
    std::fs::write(dir.join("offline_samples.csv"), samples)?;
    std::fs::write(dir.join("offline_binned.csv"), binned)?;
    let rho = json!({ "rho_rvc": result.rvc.rho, "rho_qbc": result.qbc.rho });
    std::fs::write(dir.join("offline_rho.json"), serde_json::to_string_pretty(&rho)?)?;
    Ok(())
}

/// Generate a synthetic stream and write it as a dataset CSV.
pub fn cmd_synth(spec: &SyntheticDriftSpec, out: &Path) -> Result<()> {
    let stream = generate_synthetic(spec)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    write_csv(out, &stream)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_class() {
        assert_eq!(exit_code(&Error::Config("x".into())), 1);
        assert_eq!(exit_code(&Error::EmptyDataset), 2);
        assert_eq!(exit_code(&Error::MissingColumn("y".into())), 2);
        assert_eq!(exit_code(&Error::EmptyInput), 3);
    }

    #[test]
    fn float_formats() {
        assert_eq!(raw(1.0), "1.0000000000000000e0");
        assert_eq!(human(0.125), "1.25000e-1");
    }
}
