use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use median_hardy::sharpness::{decade_grid, Family};
use median_hardy::Exponent;
use serde_json::{json, Value};

/// Smallest exponent the CLI accepts; `C_p` blows up as `p -> 1`.
pub const MIN_P: f64 = 1.0 + 1e-6;

#[derive(Parser, Debug)]
#[command(
    name = "median-hardy",
    version,
    about = "Numerical checks of the median Hardy inequality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the discrete inequality and its proof chain on random and file sequences.
    VerifyDiscrete(Options),
    /// Check the continuous inequality, its pointwise bound and Hardy's inequality on step functions.
    VerifyContinuous(Options),
    /// Ratio curve of an extremal family and its extrapolated limit.
    Sharpness(Options),
    /// Prefix statistics or breakpoint tables for one input.
    Eval(Options),
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Exponent p > 1.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Arithmetic backend; exact needs an integer p. Defaults to exact for integer p.
    #[arg(long, value_enum)]
    pub backend: Option<Backend>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Random cases (default 1000 discrete, 100 continuous, 0 with --input).
    #[arg(long)]
    pub trials: Option<usize>,
    /// Maximum sequence length, or maximum segment count for step functions.
    #[arg(long)]
    pub max_n: Option<usize>,
    /// Quadrature tolerance (continuous) or relative comparison slack (discrete, float).
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Sequence file (JSON array or one value per line) or step function JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FamilyArg::Discrete)]
    pub family: FamilyArg,
    /// Comma-separated N values, e.g. 10,100,1e3.
    #[arg(long, value_delimiter = ',', value_parser = parse_n)]
    pub n_grid: Vec<u64>,
    #[arg(long, value_enum, default_value_t = Output::Human)]
    pub output: Output,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Include wall-clock timing in JSON reports (breaks byte-for-byte reproducibility).
    #[arg(long)]
    pub timing: bool,
}

fn parse_n(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 1.0 && x.fract() == 0.0 && x <= 1e15 => Ok(x as u64),
        _ => Err(format!("not a positive integer: {s}")),
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Float => "float",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyArg {
    Discrete,
    Continuous,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Discrete => Family::Discrete,
            FamilyArg::Continuous => Family::Continuous,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Output {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    VerifyDiscrete,
    VerifyContinuous,
    Sharpness,
    Eval,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::VerifyDiscrete => "verify-discrete",
            CommandKind::VerifyContinuous => "verify-continuous",
            CommandKind::Sharpness => "sharpness",
            CommandKind::Eval => "eval",
        }
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub p: Exponent,
    pub backend: Backend,
    pub seed: u64,
    pub trials: usize,
    pub max_n: usize,
    pub tol: f64,
    pub input: Option<PathBuf>,
    pub family: Family,
    pub n_grid: Vec<u64>,
    pub output: Output,
    pub out: Option<PathBuf>,
    pub timing: bool,
}

impl RunConfig {
    pub fn from_command(command: Command) -> Result<Self> {
        let (kind, o) = match command {
            Command::VerifyDiscrete(o) => (CommandKind::VerifyDiscrete, o),
            Command::VerifyContinuous(o) => (CommandKind::VerifyContinuous, o),
            Command::Sharpness(o) => (CommandKind::Sharpness, o),
            Command::Eval(o) => (CommandKind::Eval, o),
        };
        if !o.p.is_finite() || o.p < MIN_P {
            bail!("--p must be at least {MIN_P}, got {}", o.p);
        }
        let p = Exponent::new(o.p)?;
        let integer_p = p.as_integer().is_some();
        let backend = match (kind, o.backend) {
            (CommandKind::Sharpness, Some(Backend::Exact)) => {
                bail!("sharpness runs on the float backend only")
            }
            (CommandKind::Sharpness, None) => Backend::Float,
            (_, Some(Backend::Exact)) if !integer_p => {
                bail!("the exact backend needs an integer p, got {}", o.p)
            }
            (_, Some(b)) => b,
            (_, None) if integer_p => Backend::Exact,
            (_, None) => Backend::Float,
        };
        if !(o.tol.is_finite() && o.tol > 0.0) {
            bail!("--tol must be positive, got {}", o.tol);
        }
        if o.trials == Some(0) {
            bail!("--trials must be at least 1");
        }
        if o.max_n == Some(0) {
            bail!("--max-n must be at least 1");
        }
        let trials = o.trials.unwrap_or(match (kind, &o.input) {
            (_, Some(_)) => 0,
            (CommandKind::VerifyContinuous, None) => 100,
            _ => 1000,
        });
        let max_n = o.max_n.unwrap_or(match kind {
            CommandKind::VerifyContinuous => 20,
            _ => 200,
        });
        let n_grid = if o.n_grid.is_empty() {
            decade_grid(1, 6)
        } else {
            o.n_grid
        };
        if n_grid.contains(&0) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            bail!("--n-grid must be strictly increasing positive integers");
        }
        if kind == CommandKind::Eval && o.input.is_none() {
            bail!("eval needs --input");
        }
        if let Some(path) = &o.input {
            std::fs::metadata(path).with_context(|| format!("cannot read {}", path.display()))?;
        }
        Ok(RunConfig {
            command: kind,
            p,
            backend,
            seed: o.seed,
            trials,
            max_n,
            tol: o.tol,
            input: o.input,
            family: o.family.into(),
            n_grid,
            output: o.output,
            out: o.out,
            timing: o.timing,
        })
    }

    /// The settings that determine the report's content.
    pub fn echo(&self) -> Value {
        let mut v = json!({
            "command": self.command.name(),
            "p": self.p.value(),
            "backend": self.backend.name(),
        });
        let m = v.as_object_mut().expect("object");
        match self.command {
            CommandKind::VerifyDiscrete | CommandKind::VerifyContinuous => {
                m.insert("seed".into(), json!(self.seed));
                m.insert("trials".into(), json!(self.trials));
                m.insert("max_n".into(), json!(self.max_n));
                m.insert("tol".into(), json!(self.tol));
            }
            CommandKind::Sharpness => {
                m.insert("family".into(), json!(self.family));
                m.insert("n_grid".into(), json!(self.n_grid));
                m.insert("tol".into(), json!(self.tol));
            }
            CommandKind::Eval => {
                m.insert("family".into(), json!(self.family));
            }
        }
        if let Some(path) = &self.input {
            m.insert("input".into(), json!(path.display().to_string()));
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(std::iter::once("median-hardy").chain(args.iter().copied()))?;
        RunConfig::from_command(cli.command)
    }

    #[test]
    fn backend_defaults_follow_p() {
        assert_eq!(config(&["verify-discrete"]).unwrap().backend, Backend::Exact);
        assert_eq!(
            config(&["verify-discrete", "--p", "1.5"]).unwrap().backend,
            Backend::Float
        );
        assert_eq!(config(&["sharpness"]).unwrap().backend, Backend::Float);
        assert!(config(&["verify-discrete", "--p", "2.5", "--backend", "exact"]).is_err());
        assert!(config(&["sharpness", "--backend", "exact"]).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(config(&["verify-discrete", "--p", "1"]).is_err());
        assert!(config(&["verify-discrete", "--p", "1.0000001"]).is_err());
        assert!(config(&["verify-discrete", "--trials", "0"]).is_err());
        assert!(config(&["verify-continuous", "--tol", "0"]).is_err());
        assert!(config(&["sharpness", "--n-grid", "100,10"]).is_err());
        assert!(config(&["eval"]).is_err());
    }

    #[test]
    fn n_grid_accepts_scientific_notation() {
        let c = config(&["sharpness", "--n-grid", "10,1e3,1000000"]).unwrap();
        assert_eq!(c.n_grid, vec![10, 1000, 1_000_000]);
        assert_eq!(config(&["sharpness"]).unwrap().n_grid.len(), 6);
    }
}
