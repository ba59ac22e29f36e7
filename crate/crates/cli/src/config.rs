//! Experiment configuration: JSON schema, validation, and the canonical
//! hash stamped on every output row.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gapsel::Estimator;

/// Error carrying the process exit code contract: 2 for configuration
/// problems, 3 for estimator-capacity refusals, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Capacity(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capacity(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Capacity(m) => write!(f, "estimator capacity error: {m}"),
            CliError::Runtime(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Repetition,
    Surface,
}

impl CodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeKind::Repetition => "repetition",
            CodeKind::Surface => "surface",
        }
    }
}

impl std::str::FromStr for CodeKind {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "repetition" => Ok(CodeKind::Repetition),
            "surface" => Ok(CodeKind::Surface),
            other => Err(CliError::Config(format!(
                "unknown code '{other}', expected 'repetition' or 'surface'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    /// Hindsight gap of the complete syndrome.
    Logical,
    Exact,
    Greedy,
    Split,
}

impl EstimatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorKind::Logical => "logical",
            EstimatorKind::Exact => "exact",
            EstimatorKind::Greedy => "greedy",
            EstimatorKind::Split => "split",
        }
    }

    pub fn to_estimator(self, split_depth: u32) -> Estimator {
        match self {
            EstimatorKind::Logical => Estimator::Full,
            EstimatorKind::Exact => Estimator::Exact,
            EstimatorKind::Greedy => Estimator::Greedy,
            EstimatorKind::Split => Estimator::Split(split_depth),
        }
    }
}

fn default_split_depth() -> u32 {
    3
}

fn default_calibration_fraction() -> f64 {
    0.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub code: CodeKind,
    pub d_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub shots: u64,
    pub seed: u64,
    pub estimator: EstimatorKind,
    #[serde(default = "default_split_depth")]
    pub split_depth: u32,
    pub r_list: Vec<f64>,
    #[serde(default = "default_calibration_fraction")]
    pub calibration_fraction: f64,
    pub output: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// All schema-level violations, collected into one actionable message.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut problems = Vec::new();
        if self.d_list.is_empty() {
            problems.push("d_list must not be empty".to_string());
        }
        for &d in &self.d_list {
            if d < 3 || d % 2 == 0 || d > 25 {
                problems.push(format!("d={d} unsupported: distances must be odd, 3..=25"));
            }
        }
        if self.p_list.is_empty() {
            problems.push("p_list must not be empty".to_string());
        }
        for &p in &self.p_list {
            if !(p > 0.0 && p < 0.5) {
                problems.push(format!("p={p} outside (0, 0.5)"));
            }
        }
        if self.shots == 0 {
            problems.push("shots must be positive".to_string());
        }
        if self.r_list.is_empty() {
            problems.push("r_list must not be empty".to_string());
        }
        for &r in &self.r_list {
            if !(0.0..1.0).contains(&r) {
                problems.push(format!("r={r} outside [0, 1)"));
            }
        }
        if !(self.calibration_fraction > 0.0 && self.calibration_fraction < 1.0) {
            problems.push(format!(
                "calibration_fraction={} outside (0, 1)",
                self.calibration_fraction
            ));
        }
        if self.split_depth > 8 {
            problems.push(format!(
                "split_depth={} too deep; the search tree grows exponentially (max 8)",
                self.split_depth
            ));
        }
        if self.output.as_os_str().is_empty() {
            problems.push("output directory must not be empty".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(problems.join("; ")))
        }
    }

    /// SHA-256 of the canonical (serde-ordered) JSON serialization of the
    /// effective config — seed overrides included, so the hash identifies
    /// exactly what was run. The output path is where results land, not
    /// part of the experiment's identity, so it is excluded: the same
    /// experiment written to two directories carries one hash.
    pub fn canonical_hash(&self) -> String {
        #[derive(Serialize)]
        struct Canonical<'a> {
            code: CodeKind,
            d_list: &'a [usize],
            p_list: &'a [f64],
            shots: u64,
            seed: u64,
            estimator: EstimatorKind,
            split_depth: u32,
            r_list: &'a [f64],
            calibration_fraction: f64,
        }
        let canonical = Canonical {
            code: self.code,
            d_list: &self.d_list,
            p_list: &self.p_list,
            shots: self.shots,
            seed: self.seed,
            estimator: self.estimator,
            split_depth: self.split_depth,
            r_list: &self.r_list,
            calibration_fraction: self.calibration_fraction,
        };
        let text = serde_json::to_string(&canonical).expect("config serializes");
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        hex_string(&hasher.finalize())
    }
}

fn hex_string(bytes: &[u8]) -> String {
    use fmt::Write;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}
