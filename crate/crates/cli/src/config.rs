//! Run configuration: CLI flags and the JSON config file that mirrors them.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stable_sets::schedule::{build_schedule, BuildParams, Schedule};
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => bail!("unknown format {other:?}, expected csv or json"),
        }
    }
}

/// JSON-file form of a run: one subcommand plus its parameters. Exactly one
/// schedule source (a file or inline build parameters) may be given.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default)]
    pub schedule_file: Option<PathBuf>,
    #[serde(default)]
    pub build: Option<BuildParams>,
    #[serde(default)]
    pub range: Option<(u64, u64)>,
    #[serde(default)]
    pub stride: Option<u64>,
    #[serde(default)]
    pub h_max: Option<u64>,
    #[serde(default)]
    pub format: Option<OutputFormat>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub no_timestamp: bool,
    #[serde(default)]
    pub include_pre_epoch: bool,
    #[serde(default)]
    pub exclude_boundaries: bool,
    #[serde(default)]
    pub lemma: Option<LemmaConfig>,
    #[serde(default)]
    pub n: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub t1: f64,
    pub t2: f64,
    pub m: u64,
    pub n_max: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text).context("parsing config JSON")?;
        if cfg.schedule_file.is_some() && cfg.build.is_some() {
            bail!("config must give exactly one schedule source: schedule_file xor build");
        }
        Ok(cfg)
    }
}

/// Parse "LO..HI" with decimal or scientific endpoints.
pub fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("range must look like LO..HI, got {s:?}"))?;
    Ok((parse_count(a)?, parse_count(b)?))
}

/// Integer, possibly in scientific notation (1e8); scientific values must be
/// exact below 2^53.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("not a count: {s:?}"))?;
    if f.is_nan() || !(0.0..=9.2e18).contains(&f) {
        bail!("count out of range: {s}");
    }
    if f <= 9.007e15 && f.fract() != 0.0 {
        bail!("count {s} is not an integer");
    }
    Ok(f as u64)
}

/// Load a schedule from a file, or build it (with disk caching keyed by a
/// content hash of the build parameters).
pub fn obtain_schedule(
    schedule_file: Option<&Path>,
    build: Option<&BuildParams>,
    cache_dir: &Path,
) -> Result<Schedule> {
    match (schedule_file, build) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading schedule {}", path.display()))?;
            Ok(Schedule::from_json(&text)?)
        }
        (None, Some(params)) => build_cached(params, cache_dir),
        _ => bail!("exactly one schedule source required: --schedule xor inline build flags"),
    }
}

/// Searches dominate the cost of schedule construction, so built schedules
/// are cached under a hash of their parameters and reused.
pub fn build_cached(params: &BuildParams, cache_dir: &Path) -> Result<Schedule> {
    use sha2::{Digest, Sha256};
    let key = serde_json::to_string(params).context("hashing build parameters")?;
    let digest = Sha256::digest(key.as_bytes());
    let mut hex = String::new();
    for b in digest.iter().take(16) {
        hex.push_str(&format!("{b:02x}"));
    }
    let path = cache_dir.join(format!("schedule-{hex}.json"));
    if let Ok(text) = std::fs::read_to_string(&path) {
        if let Ok(s) = Schedule::from_json(&text) {
            return Ok(s);
        }
    }
    let schedule = build_schedule(params)?;
    std::fs::create_dir_all(cache_dir).ok();
    if let Ok(json) = schedule.to_json() {
        std::fs::write(&path, json).ok();
    }
    Ok(schedule)
}
