// Copyright 2026 Zenoprobe Contributors
// SPDX-License-Identifier: Apache-2.0

//! Shared command plumbing: error-to-exit-code mapping, flat key-value
//! config files, value resolution (flag overrides file overrides
//! default), output-directory handling, and run manifests.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "ZENOPROBE_OUT";

/// Fallback output directory when neither flag, file, nor environment
/// names one.
pub const OUT_DEFAULT: &str = "out";

/// Command failure with its process exit code.
///
/// Exit codes: 2 for configuration errors, 3 for numeric or simulation
/// failures (including I/O while writing results), 4 for an outcome
/// record that is impossible under every candidate model.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    Impossible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Impossible(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Impossible(m) => m,
        }
    }
}

impl From<zenoprobe::Error> for CliError {
    fn from(e: zenoprobe::Error) -> Self {
        use zenoprobe::Error as E;
        match e {
            E::ImpossibleRecord { .. } => CliError::Impossible(e.to_string()),
            // Parameter and shape problems originate from user input.
            E::InvalidParameter { .. }
            | E::DimensionMismatch(_)
            | E::ScheduleMismatch { .. }
            | E::InvalidBasis(_)
            | E::InfeasiblePlan(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o failure: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Every key a config file may contain, across all commands. Unknown
/// keys are rejected so typos fail loudly instead of silently using a
/// default.
pub const KNOWN_KEYS: &[&str] = &[
    "out",
    "seed",
    "omega",
    "delta",
    "gamma",
    "gamma_spont",
    "tau",
    "n",
    "samples",
    "mode",
    "tau_min",
    "tau_max",
    "points",
    "gamma_min",
    "gamma_max",
    "gamma_points",
    "total_time",
    "grid_min",
    "grid_max",
    "grid_points",
    "candidates",
    "schedule",
    "hybrid",
    "guess",
    "omega_max",
    "eta",
    "record",
    "rho0",
    "empirical",
    "empirical_tau",
];

/// Parsed flat key-value config file plus resolution helpers.
#[derive(Debug, Default)]
pub struct Ctx {
    file: BTreeMap<String, String>,
}

impl Ctx {
    /// Loads `key = value` lines; `#` starts a comment, blank lines are
    /// skipped, later assignments to the same key win.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut file = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "config {} line {}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "config {} line {}: unknown key `{key}`",
                    path.display(),
                    lineno + 1
                )));
            }
            file.insert(key, value.trim().to_string());
        }
        Ok(Self { file })
    }

    /// Raw file value for `key`, if present.
    pub fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    /// Flag value if given, else the parsed file value, else `None`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &'static str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::Config(format!("config key {key}: cannot parse `{raw}`: {e}"))
            }),
        }
    }

    /// Like [`resolve`](Self::resolve) with a default for the
    /// all-absent case.
    pub fn resolve_or<T>(&self, flag: Option<T>, key: &'static str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.resolve(flag, key)?.unwrap_or(default))
    }

    /// Boolean switch: a bare CLI flag cannot be unset, so `true` wins;
    /// otherwise the file value (`true`/`false`) decides.
    pub fn resolve_switch(&self, flag: bool, key: &'static str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.resolve::<bool>(None, key)?.unwrap_or(false))
    }
}

/// Comma-separated float list, each entry finite.
pub fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|e| CliError::Config(format!("{what}: cannot parse `{part}`: {e}")))?;
        if !v.is_finite() {
            return Err(CliError::Config(format!("{what}: `{part}` is not finite")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("{what}: empty list")));
    }
    Ok(out)
}

/// Schedule specification `tau:count[,tau:count...]`.
pub fn parse_schedule(raw: &str) -> Result<Vec<zenoprobe::measurement::ScheduleSegment>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let Some((tau, count)) = part.split_once(':') else {
            return Err(CliError::Config(format!(
                "schedule: expected `tau:count`, got `{part}`"
            )));
        };
        let tau: f64 = tau.trim().parse().map_err(|e| {
            CliError::Config(format!("schedule: cannot parse interval `{tau}`: {e}"))
        })?;
        let count: usize = count.trim().parse().map_err(|e| {
            CliError::Config(format!("schedule: cannot parse count `{count}`: {e}"))
        })?;
        if !(tau.is_finite() && tau > 0.0) {
            return Err(CliError::Config(format!(
                "schedule: interval must be finite and > 0, got {tau}"
            )));
        }
        if count == 0 {
            return Err(CliError::Config("schedule: count must be >= 1".into()));
        }
        out.push(zenoprobe::measurement::ScheduleSegment { tau, count });
    }
    if out.is_empty() {
        return Err(CliError::Config("schedule: empty specification".into()));
    }
    Ok(out)
}

/// Output directory: flag, then file, then environment, then `out`.
pub fn resolve_out_dir(flag: Option<PathBuf>, ctx: &Ctx) -> PathBuf {
    if let Some(p) = flag {
        return p;
    }
    if let Some(p) = ctx.raw("out") {
        return PathBuf::from(p);
    }
    if let Ok(p) = std::env::var(OUT_ENV) {
        if !p.is_empty() {
            return PathBuf::from(p);
        }
    }
    PathBuf::from(OUT_DEFAULT)
}

/// Writes one output file under `dir`, creating the directory first,
/// and echoes the file name on standard output.
pub fn write_output(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, content.as_bytes())?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Writes `manifest.json`: artifact identity, verbatim command line,
/// seed (when the command draws random numbers), and the fully
/// resolved configuration. The output location is deliberately not
/// part of the configuration — results are location-independent — but
/// the verbatim command line preserves how the run was invoked.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    seed: Option<u64>,
    config: serde_json::Value,
) -> Result<()> {
    let manifest = serde_json::json!({
        "artifact": "zenoprobe",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "command_line": std::env::args().collect::<Vec<_>>(),
        "seed": seed,
        "config": config,
    });
    let text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Numeric(format!("manifest serialization: {e}")))?;
    write_output(dir, "manifest.json", &(text + "\n"))
}

/// Pretty JSON with a trailing newline.
pub fn to_json_text(value: &serde_json::Value) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|t| t + "\n")
        .map_err(|e| CliError::Numeric(format!("json serialization: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn config_file_round_trips_known_keys() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# comment\nomega = 2.5\nseed=9\ntau = 0.5,1.0 # inline").unwrap();
        let ctx = Ctx::load(Some(f.path())).unwrap();
        assert_eq!(ctx.resolve::<f64>(None, "omega").unwrap(), Some(2.5));
        assert_eq!(ctx.resolve::<u64>(None, "seed").unwrap(), Some(9));
        assert_eq!(ctx.raw("tau"), Some("0.5,1.0"));
    }

    #[test]
    fn unknown_config_key_is_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "omeag = 2.5").unwrap();
        let err = Ctx::load(Some(f.path())).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.message().contains("omeag"), "{}", err.message());
    }

    #[test]
    fn flags_override_file_values() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "omega = 2.5").unwrap();
        let ctx = Ctx::load(Some(f.path())).unwrap();
        assert_eq!(ctx.resolve(Some(7.0), "omega").unwrap(), Some(7.0));
    }

    #[test]
    fn schedule_parser_accepts_segments_and_rejects_garbage() {
        let segs = parse_schedule("1.79:12, 4.83:16").unwrap();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].count, 12);
        assert_eq!(segs[1].tau, 4.83);
        assert!(parse_schedule("1.79").is_err());
        assert!(parse_schedule("0:5").is_err());
        assert!(parse_schedule("1.0:0").is_err());
    }

    #[test]
    fn float_list_parser_trims_and_validates() {
        assert_eq!(parse_f64_list("1, 2.5,3", "tau").unwrap(), vec![1.0, 2.5, 3.0]);
        assert!(parse_f64_list("1,nan", "tau").is_err());
        assert!(parse_f64_list(" , ", "tau").is_err());
    }

    #[test]
    fn impossible_record_maps_to_exit_4() {
        let e: CliError = zenoprobe::Error::ImpossibleRecord { step: 3 }.into();
        assert_eq!(e.exit_code(), 4);
        let e: CliError = zenoprobe::Error::InvalidParameter {
            name: "tau",
            reason: "bad".into(),
        }
        .into();
        assert_eq!(e.exit_code(), 2);
        let e: CliError = zenoprobe::Error::NoConvergence {
            what: "solver",
            limit: 10,
        }
        .into();
        assert_eq!(e.exit_code(), 3);
    }
}
