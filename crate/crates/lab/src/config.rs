//! Scenario selection and run parameters.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_rational::Ratio;
use sumprod_core::field::PrimeField;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{scenario}: {message}")]
    Compute { scenario: &'static str, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }

    pub(crate) fn compute(scenario: Scenario, e: impl fmt::Display) -> Self {
        LabError::Compute {
            scenario: scenario.name(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    CommutatorCover,
    SignedCover,
    GrowthBounds,
    BrickEnergy,
    CosetCover,
    Freiman,
    Selftest,
    All,
}

impl Scenario {
    /// Every runnable scenario, in the order `all` runs them.
    pub const EACH: [Scenario; 7] = [
        Scenario::Selftest,
        Scenario::CommutatorCover,
        Scenario::SignedCover,
        Scenario::GrowthBounds,
        Scenario::BrickEnergy,
        Scenario::CosetCover,
        Scenario::Freiman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::CommutatorCover => "commutator_cover",
            Scenario::SignedCover => "signed_cover",
            Scenario::GrowthBounds => "growth_bounds",
            Scenario::BrickEnergy => "brick_energy",
            Scenario::CosetCover => "coset_cover",
            Scenario::Freiman => "freiman",
            Scenario::Selftest => "selftest",
            Scenario::All => "all",
        }
    }

    /// Stable id mixed into every random stream.
    pub fn id(self) -> u64 {
        match self {
            Scenario::CommutatorCover => 1,
            Scenario::SignedCover => 2,
            Scenario::GrowthBounds => 3,
            Scenario::BrickEnergy => 4,
            Scenario::CosetCover => 5,
            Scenario::Freiman => 6,
            Scenario::Selftest => 7,
            Scenario::All => 0,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.strip_prefix("run_").unwrap_or(s);
        let key = if key == "freiman_scenario" { "freiman" } else { key };
        Scenario::EACH
            .into_iter()
            .chain([Scenario::All])
            .find(|sc| sc.name() == key)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupChoice {
    Heisenberg,
    Affine,
    #[default]
    Both,
}

impl GroupChoice {
    pub fn heisenberg(self) -> bool {
        self != GroupChoice::Affine
    }

    pub fn affine(self) -> bool {
        self != GroupChoice::Heisenberg
    }
}

impl FromStr for GroupChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "h" | "heisenberg" => Ok(GroupChoice::Heisenberg),
            "aff" | "affine" => Ok(GroupChoice::Affine),
            "both" => Ok(GroupChoice::Both),
            _ => Err(format!("unknown group `{s}` (expected h, aff or both)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" | "jsonl" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// Parameters for one invocation. `None` fields fall back to the
/// scenario's defaults.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub ps: Option<Vec<u64>>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub k: Option<usize>,
    pub alpha: Option<Ratio<u64>>,
    pub signs: Option<Vec<i8>>,
    /// `(|X_i|, |Y_i|, |Z|)` for brick scenarios.
    pub brick_sizes: Option<(usize, usize, usize)>,
    pub group: GroupChoice,
    pub format: Format,
    pub out: Option<PathBuf>,
    /// Corrupt one spectrum in the self-test to exercise detection.
    pub inject_fault: bool,
    /// Soft-warning level for ratio-only rows.
    pub advisory_constant: Option<f64>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            ps: None,
            n: None,
            trials: None,
            seed: 0,
            k: None,
            alpha: None,
            signs: None,
            brick_sizes: None,
            group: GroupChoice::Both,
            format: Format::Csv,
            out: None,
            inject_fault: false,
            advisory_constant: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = Some(trials);
        self
    }

    pub fn with_ps(mut self, ps: &[u64]) -> Self {
        self.ps = Some(ps.to_vec());
        self
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if let Some(ps) = &self.ps {
            if ps.is_empty() {
                return Err(LabError::config("empty prime list"));
            }
            for &p in ps {
                PrimeField::new(p).map_err(|e| LabError::config(e.to_string()))?;
            }
        }
        if self.trials == Some(0) {
            return Err(LabError::config("trial count must be at least 1"));
        }
        if let Some(k) = self.k {
            if k < 2 {
                return Err(LabError::config(format!("k must be at least 2, got {k}")));
            }
        }
        if let Some(a) = self.alpha {
            if *a.numer() == 0 || a >= Ratio::from_integer(1) {
                return Err(LabError::config(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        if let Some(s) = &self.signs {
            check_signs(s)?;
        }
        if let Some((x, y, z)) = self.brick_sizes {
            if x == 0 || y == 0 || z == 0 {
                return Err(LabError::config("brick factor sizes must be positive"));
            }
            if x.max(y) > 2 * x.min(y) {
                return Err(LabError::config(format!(
                    "brick factors {x} and {y} are not of comparable size (ratio above 2)"
                )));
            }
        }
        if let Some(c) = self.advisory_constant {
            if !(c.is_finite() && c > 0.0) {
                return Err(LabError::config("advisory constant must be positive"));
            }
        }
        Ok(())
    }

    pub(crate) fn ps_or(&self, default: &[u64]) -> Vec<u64> {
        self.ps.clone().unwrap_or_else(|| default.to_vec())
    }

    pub(crate) fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

/// Sign vectors must be nonempty, of ±1 entries, and sum to zero.
pub fn check_signs(signs: &[i8]) -> Result<(), LabError> {
    if signs.is_empty() || signs.iter().any(|&s| s != 1 && s != -1) {
        return Err(LabError::config("signs must be a nonempty list of +1/-1"));
    }
    if signs.iter().map(|&s| s as i64).sum::<i64>() != 0 {
        return Err(LabError::config("sign vector is unbalanced"));
    }
    Ok(())
}

/// `3,5,7` → `[3, 5, 7]`.
pub fn parse_primes(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad prime `{t}`: {e}")))
        .collect()
}

/// Accepts `+-+-`, `+,-,+,-` or `1,-1,1,-1`.
pub fn parse_signs(s: &str) -> Result<Vec<i8>, String> {
    let s = s.trim();
    if !s.contains(',') {
        return s
            .chars()
            .map(|c| match c {
                '+' => Ok(1),
                '-' => Ok(-1),
                _ => Err(format!("bad sign `{c}`")),
            })
            .collect();
    }
    s.split(',')
        .map(|t| match t.trim() {
            "+" | "1" | "+1" => Ok(1),
            "-" | "-1" => Ok(-1),
            other => Err(format!("bad sign `{other}`")),
        })
        .collect()
}

/// Accepts `a/b`, an integer, or a terminating decimal such as `0.4`.
pub fn parse_alpha(s: &str) -> Result<Ratio<u64>, String> {
    let s = s.trim();
    let bad = || format!("bad rational `{s}`");
    if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 9 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let den = 10u64.pow(frac.len() as u32);
        let num: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        return Ok(Ratio::new(int * den + num, den));
    }
    s.parse::<u64>().map(Ratio::from_integer).map_err(|_| bad())
}

/// `3,3,2` → `(3, 3, 2)`.
pub fn parse_brick_sizes(s: &str) -> Result<(usize, usize, usize), String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad size `{t}`: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y, z] => Ok((x, y, z)),
        _ => Err("expected three sizes |X_i|,|Y_i|,|Z|".into()),
    }
}
