use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use num_rational::Ratio;
use sumprod_lab::config::{parse_alpha, parse_brick_sizes, parse_primes, parse_signs};
use sumprod_lab::{
    run_with_workers, workers_from_env, write_reports, Format, GroupChoice, LabError, Scenario, ScenarioConfig,
};

// aliases keep clap from treating these as repeated arguments
type Primes = Vec<u64>;
type Signs = Vec<i8>;

/// Randomized growth and covering experiments on H_n(F_p) and Aff(F_p).
///
/// Exit status: 0 when every checked row passes, 2 when some row fails,
/// 1 on configuration or I/O errors. Set LAB_WORKERS to fix the number
/// of worker threads; results do not depend on it.
#[derive(Debug, Parser)]
#[command(name = "lab", version)]
struct Cli {
    /// commutator_cover, signed_cover, growth_bounds, brick_energy,
    /// coset_cover, freiman, selftest or all
    scenario: Scenario,
    /// Comma-separated primes
    #[arg(long = "p", value_parser = parse_primes)]
    ps: Option<Primes>,
    /// Heisenberg dimension
    #[arg(long)]
    n: Option<usize>,
    /// Trials per configuration (selftest: budget in percent)
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Product length k
    #[arg(long)]
    k: Option<usize>,
    /// Exponent for the Freiman base set, e.g. 2/5
    #[arg(long, value_parser = parse_alpha)]
    alpha: Option<Ratio<u64>>,
    /// Balanced sign vector, e.g. +-+- or 1,-1,1,-1
    #[arg(long, value_parser = parse_signs, allow_hyphen_values = true)]
    signs: Option<Signs>,
    /// Brick factor sizes |X_i|,|Y_i|,|Z|
    #[arg(long, value_parser = parse_brick_sizes)]
    brick_sizes: Option<(usize, usize, usize)>,
    /// h, aff or both
    #[arg(long, default_value = "both")]
    group: GroupChoice,
    /// Output file; a directory for `all`
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json (JSON lines)
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Corrupt one spectrum during the self-test
    #[arg(long)]
    inject_fault: bool,
    /// Flag ratio-only rows below this level
    #[arg(long)]
    advisory_constant: Option<f64>,
}

impl Cli {
    fn into_config(self) -> ScenarioConfig {
        ScenarioConfig {
            scenario: self.scenario,
            ps: self.ps,
            n: self.n,
            trials: self.trials,
            seed: self.seed,
            k: self.k,
            alpha: self.alpha,
            signs: self.signs,
            brick_sizes: self.brick_sizes,
            group: self.group,
            format: self.format,
            out: self.out,
            inject_fault: self.inject_fault,
            advisory_constant: self.advisory_constant,
        }
    }
}

fn execute(cfg: &ScenarioConfig) -> Result<usize, LabError> {
    let workers = workers_from_env()?.unwrap_or_else(rayon::current_num_threads);
    let reports = run_with_workers(cfg, workers)?;
    write_reports(&reports, cfg.format, cfg.out.as_deref(), std::io::stdout().lock())?;
    for r in &reports {
        eprintln!("{}", r.summary());
    }
    Ok(reports.iter().map(|r| r.failures()).sum())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let cfg = cli.into_config();
    match execute(&cfg) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(failures) => {
            eprintln!("{failures} failing rows");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
