use std::path::Path;

use freeconv::analytic::BandModel;
use freeconv::rmt::{run, Experiment};

use crate::config::Config;
use crate::error::CliError;

/// Comma- or whitespace-separated numbers, one matrix row per line; `#`
/// starts a comment.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn band_model(kernel: &Path, f: Option<&Path>) -> Result<BandModel, CliError> {
    let kernel = read_matrix(kernel)?;
    let f = match f {
        Some(path) => read_matrix(path)?.into_iter().flatten().collect(),
        None => vec![0.0; kernel.len()],
    };
    BandModel::new(f, kernel).map_err(|e| CliError::usage(e.to_string()))
}

pub fn execute(experiment: Experiment, config: &Config) -> Result<(), CliError> {
    let report = run(experiment, &config.experiment)?;
    let files = report.write(&config.out)?;
    if experiment == Experiment::FreenessDecay {
        for row in report.summary["rows"].as_array().into_iter().flatten() {
            println!(
                "{:<20} N = {:<6} mean |defect| = {:.4e}",
                row["pair"].as_str().unwrap_or(""),
                row["size"],
                row["mean_abs_defect"].as_f64().unwrap_or(f64::NAN)
            );
        }
    }
    if let Some(l1) = report.l1 {
        println!("{experiment}: l1 = {l1:.6} (tolerance {})", report.tolerance);
    }
    println!("{experiment}: {}", if report.pass { "PASS" } else { "FAIL" });
    for file in files {
        println!("wrote {}", file.display());
    }
    Ok(())
}
