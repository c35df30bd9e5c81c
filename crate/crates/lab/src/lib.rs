//! Randomized experiments on Heisenberg and affine groups over F_p.
//!
//! Every scenario produces a [`ScenarioReport`] whose rows are a pure
//! function of the configuration and seed, independent of the number of
//! worker threads.

pub mod checks;
pub mod config;
pub mod report;
pub mod rng;
pub mod scenarios;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use config::{Format, GroupChoice, LabError, Scenario, ScenarioConfig};
pub use report::{Row, ScenarioReport, Value};

/// Runs the configured scenario (or all of them) on the current pool.
pub fn run(cfg: &ScenarioConfig) -> Result<Vec<ScenarioReport>, LabError> {
    cfg.validate()?;
    match cfg.scenario {
        Scenario::All => Scenario::EACH
            .iter()
            .map(|&s| scenarios::run_scenario(cfg, s))
            .collect(),
        s => Ok(vec![scenarios::run_scenario(cfg, s)?]),
    }
}

/// Runs on a dedicated pool of `workers` threads.
pub fn run_with_workers(cfg: &ScenarioConfig, workers: usize) -> Result<Vec<ScenarioReport>, LabError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::config(format!("thread pool: {e}")))?;
    pool.install(|| run(cfg))
}

/// Worker count from `LAB_WORKERS`, if set.
pub fn workers_from_env() -> Result<Option<usize>, LabError> {
    match std::env::var("LAB_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&w| w > 0)
            .map(Some)
            .ok_or_else(|| LabError::config(format!("LAB_WORKERS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

pub fn write_report<W: Write>(r: &ScenarioReport, format: Format, w: W) -> std::io::Result<()> {
    match format {
        Format::Csv => r.write_csv(w),
        Format::Json => r.write_json_lines(w),
    }
}

/// Writes reports to `out` or to `w`. With several reports `out` is a
/// directory holding one file per scenario.
pub fn write_reports<W: Write>(
    reports: &[ScenarioReport],
    format: Format,
    out: Option<&Path>,
    mut w: W,
) -> Result<(), LabError> {
    match out {
        None => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 && format == Format::Csv {
                    w.write_all(b"\n")?;
                }
                write_report(r, format, &mut w)?;
            }
            w.flush()?;
        }
        Some(path) if reports.len() == 1 => {
            let mut f = BufWriter::new(File::create(path)?);
            write_report(&reports[0], format, &mut f)?;
            f.flush()?;
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for r in reports {
                let path = dir.join(format!("{}.{}", r.scenario.name(), format.extension()));
                let mut f = BufWriter::new(File::create(path)?);
                write_report(r, format, &mut f)?;
                f.flush()?;
            }
        }
    }
    Ok(())
}
