//! Experiment configuration: a TOML file, command-line flags, or both.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Classify,
    CriticalExponent,
    StageScan,
    Ubiquity,
    Schmidt,
    Cf,
    Excursions,
    Loglaw,
    Horoballs,
    Disjointness,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::CriticalExponent => "critical-exponent",
            Command::StageScan => "stage-scan",
            Command::Ubiquity => "ubiquity",
            Command::Schmidt => "schmidt",
            Command::Cf => "cf",
            Command::Excursions => "excursions",
            Command::Loglaw => "loglaw",
            Command::Horoballs => "horoballs",
            Command::Disjointness => "disjointness",
        }
    }

    pub fn parse(name: &str) -> CliResult<Self> {
        <Command as ValueEnum>::from_str(name, false).map_err(|_| CliError::Usage(format!("unknown command `{name}`")))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Rationals,
    Coprime,
    Ford,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    PerPoint,
    Uniform,
}

/// Numeric and functional parameters. Each command reads the subset it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Params {
    /// Series `r^u * (psi)` or `r^u * f(psi)`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    /// Outer dimension function `f`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauge: Option<String>,
    /// Approximating (or ubiquity) function, e.g. `1/4 * r^-1`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    /// Weight exponent `u` in `Σ r^u ψ(r)^s`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    /// Exponent ω of `exp(-r^ω)`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<String>,
    /// Ambient dimension for the `exp(-r^ω)` critical exponent
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemKind>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleKind>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_lo: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_hi: Option<u32>,
    /// Balls as `lo:hi` pairs of fractions, comma separated
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub balls: Option<String>,
    /// Ratio a ball must reach to count as ubiquitous
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    /// Largest denominator N for counting
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// Point in (0, 1): `p/q`, a decimal, `golden`, `sqrt2`, `random`, `planted:POS:VALUE` or `cf:A,B;PERIOD`
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<String>,
    /// Sample index used by `--x random`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<u64>,
    /// Number of partial quotients
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<u64>,
    /// Time horizon T
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    /// Sampling step along the geodesic
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Base window `lo:hi`, half-open
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    /// Radii R, comma separated fractions
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_lo: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_hi: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    /// Largest denominator Q
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_max: Option<i64>,
    /// Work cap for exact enumerations
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
    /// Largest number of denominator groups summed exactly
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_limit: Option<usize>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl Params {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(&mut self, top: &Params) {
        overlay!(self, top; series, gauge, psi, weight, omega, dim, system, rule, k, n_lo, n_hi, balls, target,
            n_max, samples, x, index, depth, k_max, t_max, step, alpha, tau, epsilon, base, radii, r_lo, r_hi,
            lambda, q_max, cap, exact_limit);
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub params: Params,
}

/// Config file layout before the command is known.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<String>,
    seed: Option<u64>,
    #[serde(default)]
    output: FileOutput,
    #[serde(default)]
    params: Params,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileOutput {
    path: Option<PathBuf>,
    format: Option<Format>,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML config file; flags override its values
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (default: `$LIMSUP_OUT_DIR/<command>.<format>`, else stdout)
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also write plot-ready CSV here
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub params: Params,
}

impl Flags {
    /// Merge the config file (if any) with the flags. `command` comes from the subcommand when given,
    /// else from the file.
    pub fn resolve(&self, command: Option<Command>) -> CliResult<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => FileConfig::default(),
        };
        let command = match (command, file.command) {
            (Some(c), _) => c,
            (None, Some(name)) => Command::parse(&name)?,
            (None, None) => {
                return Err(CliError::Usage("no command given on the command line or in the config".into()))
            }
        };
        let mut params = file.params;
        params.overlay(&self.params);
        Ok(ExperimentConfig {
            command,
            seed: self.seed.or(file.seed).unwrap_or(0),
            output: OutputConfig {
                path: self.out.clone().or(file.output.path),
                format: self.format.or(file.output.format).unwrap_or_default(),
            },
            params,
        })
    }
}

fn read_config(path: &Path) -> CliResult<FileConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(
            &path,
            "command = \"stage-scan\"\nseed = 5\n[output]\nformat = \"jsonl\"\n[params]\npsi = \"r^-3\"\nk = 2\nn-hi = 8\n",
        )
        .unwrap();
        let flags =
            Flags { config: Some(path), params: Params { n_hi: Some(4), ..Params::default() }, ..Flags::default() };
        let cfg = flags.resolve(None).unwrap();
        assert_eq!(cfg.command, Command::StageScan);
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.output.format, Format::Jsonl);
        assert_eq!(cfg.params.psi.as_deref(), Some("r^-3"));
        assert_eq!(cfg.params.n_hi, Some(4));
        assert_eq!(cfg.params.k, Some(2));
    }

    #[test]
    fn unknown_keys_and_commands_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "command = \"frobnicate\"\n").unwrap();
        let flags = Flags { config: Some(path.clone()), ..Flags::default() };
        assert!(matches!(flags.resolve(None), Err(CliError::Usage(_))));
        std::fs::write(&path, "command = \"cf\"\n[params]\ncolour = 3\n").unwrap();
        assert!(matches!(flags.resolve(None), Err(CliError::Usage(_))));
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = ExperimentConfig {
            command: Command::Schmidt,
            seed: 9,
            output: OutputConfig::default(),
            params: Params { psi: Some("1/4 * r^-1".into()), n_max: Some(1000), ..Params::default() },
        };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(toml::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }
}
