//! Command-line arguments and the validated request built from them.

use std::fmt;
use std::io::Read;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Expected entropy of a count vector.
    Entropy,
    /// Expected mutual information of a contingency table.
    Mutinfo,
    /// Robust credible interval for mutual information.
    Credible,
    /// Entropy intervals along a sweep of sample sizes or count ratios.
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Approx,
    Both,
}

impl Mode {
    pub fn exact(self) -> bool {
        matches!(self, Mode::Exact | Mode::Both)
    }

    pub fn approx(self) -> bool {
        matches!(self, Mode::Approx | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(name = "idm", version, about = "Robust interval estimates under the imprecise Dirichlet model")]
pub struct Cli {
    #[arg(value_enum, default_value_t = Command::Entropy)]
    pub command: Command,
    /// Input file with counts or a table; `-` reads stdin.
    pub path: Option<PathBuf>,
    /// Input data given directly, e.g. "3,6" or "5,1\n1,5".
    #[arg(long)]
    pub inline: Option<String>,
    /// Prior strength.
    #[arg(long = "s", default_value_t = 1.0, allow_negative_numbers = true)]
    pub s: f64,
    /// Credible level, required by `credible`.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    /// Cross-check against a lattice of this resolution.
    #[arg(long = "grid-check", value_name = "RES")]
    pub grid_check: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for the Monte-Carlo coverage estimate of `credible`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// `n:<min>:<max>[:<step>]` or `ratio:<n>[:<steps>]`.
    #[arg(long)]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepSpec {
    /// Sample sizes `min, min+step, ..., <= max` at the input's count ratios.
    N { min: f64, max: f64, step: f64 },
    /// Counts `(n1, n - n1)` for `n1/n` from 0 to 1/2.
    Ratio { n: f64, steps: Option<usize> },
}

const MAX_SWEEP_ROWS: f64 = 100_000.0;

impl FromStr for SweepSpec {
    type Err = CliError;

    fn from_str(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::InvalidSweep(text.to_string());
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let num = |p: &str| p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
        match parts.as_slice() {
            ["n", min, max, rest @ ..] if rest.len() <= 1 => {
                let (min, max) = (num(min)?, num(max)?);
                let step = rest.first().map_or(Ok(1.0), |p| num(p))?;
                if !(min > 0.0 && max >= min && step > 0.0) || (max - min) / step > MAX_SWEEP_ROWS {
                    return Err(bad());
                }
                Ok(SweepSpec::N { min, max, step })
            }
            ["ratio", n, rest @ ..] if rest.len() <= 1 => {
                let n = num(n)?;
                let steps = match rest.first() {
                    Some(p) => Some(p.parse::<usize>().ok().filter(|&k| k >= 1 && k as f64 <= MAX_SWEEP_ROWS).ok_or_else(bad)?),
                    None => None,
                };
                if !(n > 0.0 && n <= 2.0 * MAX_SWEEP_ROWS) {
                    return Err(bad());
                }
                Ok(SweepSpec::Ratio { n, steps })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepSpec::N { min, max, step } => write!(f, "n:{min}:{max}:{step}"),
            SweepSpec::Ratio { n, steps: Some(k) } => write!(f, "ratio:{n}:{k}"),
            SweepSpec::Ratio { n, steps: None } => write!(f, "ratio:{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Inline(String),
    Path(PathBuf),
    Stdin,
    None,
}

impl Source {
    pub fn read(&self) -> Result<Option<String>, CliError> {
        match self {
            Source::Inline(text) => Ok(Some(text.clone())),
            Source::Path(path) => std::fs::read_to_string(path)
                .map(Some)
                .map_err(|e| CliError::Io { path: path.display().to_string(), detail: e.to_string() }),
            Source::Stdin => {
                let mut text = String::new();
                std::io::stdin()
                    .read_to_string(&mut text)
                    .map_err(|e| CliError::Io { path: "<stdin>".into(), detail: e.to_string() })?;
                Ok(Some(text))
            }
            Source::None => Ok(None),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRequest {
    pub command: Command,
    pub source: Source,
    pub s: f64,
    pub alpha: Option<f64>,
    pub mode: Mode,
    pub grid_check: Option<usize>,
    pub format: Format,
    pub seed: Option<u64>,
    pub sweep: Option<SweepSpec>,
}

impl RunRequest {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        if !(cli.s > 0.0 && cli.s.is_finite()) {
            return Err(CliError::InvalidStrength(cli.s));
        }
        match (cli.command, cli.alpha) {
            (Command::Credible, None) => return Err(CliError::MissingAlpha),
            (Command::Credible, Some(a)) if !(a > 0.0 && a < 1.0) => return Err(CliError::InvalidAlpha(a)),
            (Command::Credible, Some(_)) | (_, None) => {}
            (_, Some(_)) => return Err(CliError::UnexpectedAlpha),
        }
        let sweep = match (cli.command, cli.sweep) {
            (Command::Sweep, Some(text)) => Some(text.parse()?),
            (Command::Sweep, None) => return Err(CliError::MissingSweep),
            (_, Some(_)) => return Err(CliError::Usage("--sweep is only accepted by the sweep command".into())),
            (_, None) => None,
        };
        if cli.command == Command::Sweep && cli.grid_check.is_some() {
            return Err(CliError::Usage("--grid-check is not accepted by the sweep command".into()));
        }
        if cli.grid_check.is_some_and(|r| r < 2) {
            return Err(CliError::Usage("--grid-check needs a resolution of at least 2".into()));
        }
        let source = match (cli.path, cli.inline) {
            (Some(_), Some(_)) => return Err(CliError::InputSource),
            (Some(p), None) if p.as_os_str() == "-" => Source::Stdin,
            (Some(p), None) => Source::Path(p),
            (None, Some(text)) => Source::Inline(text),
            (None, None) if cli.command == Command::Sweep => Source::None,
            (None, None) => return Err(CliError::InputSource),
        };
        Ok(Self {
            command: cli.command,
            source,
            s: cli.s,
            alpha: cli.alpha,
            mode: cli.mode,
            grid_check: cli.grid_check,
            format: cli.format,
            seed: cli.seed,
            sweep,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunRequest, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("idm").chain(args.iter().copied())).unwrap();
        RunRequest::from_cli(cli)
    }

    #[test]
    fn sweep_specs() {
        assert_eq!("n:8:64".parse::<SweepSpec>().unwrap(), SweepSpec::N { min: 8.0, max: 64.0, step: 1.0 });
        assert_eq!("n:8:64:8".parse::<SweepSpec>().unwrap(), SweepSpec::N { min: 8.0, max: 64.0, step: 8.0 });
        assert_eq!("ratio:9".parse::<SweepSpec>().unwrap(), SweepSpec::Ratio { n: 9.0, steps: None });
        assert_eq!("ratio:9:3".parse::<SweepSpec>().unwrap(), SweepSpec::Ratio { n: 9.0, steps: Some(3) });
        for bad in ["", "n", "n:8", "n:9:8", "n:0:4", "n:1:4:0", "n:1:4:1:1", "ratio:", "ratio:-1", "ratio:9:0", "ratio:9:x", "m:1:2", "n:1:1e9"] {
            assert_eq!(bad.parse::<SweepSpec>().unwrap_err().code(), "INVALID_SWEEP", "{bad}");
        }
        let spec: SweepSpec = "n:2:4:0.5".parse().unwrap();
        assert_eq!(spec.to_string().parse::<SweepSpec>().unwrap(), spec);
    }

    #[test]
    fn request_validation() {
        assert_eq!(parse(&["credible", "--inline", "1,2"]), Err(CliError::MissingAlpha));
        assert_eq!(parse(&["entropy", "--inline", "1,2", "--alpha", "0.9"]), Err(CliError::UnexpectedAlpha));
        assert_eq!(parse(&["credible", "--inline", "1,2", "--alpha", "1.5"]), Err(CliError::InvalidAlpha(1.5)));
        assert_eq!(parse(&["--inline", "1,2", "--s", "-1"]), Err(CliError::InvalidStrength(-1.0)));
        assert_eq!(parse(&["--inline", "1,2", "--s", "0"]), Err(CliError::InvalidStrength(0.0)));
        assert_eq!(parse(&["sweep"]), Err(CliError::MissingSweep));
        assert_eq!(parse(&["entropy"]), Err(CliError::InputSource));
        assert_eq!(parse(&["entropy", "x.csv", "--inline", "1"]), Err(CliError::InputSource));
        assert_eq!(parse(&["--inline", "1", "--grid-check", "1"]).unwrap_err().code(), "USAGE");
        let ok = parse(&["--inline", "3,6", "--s", "1", "--mode", "both", "--format", "json"]).unwrap();
        assert_eq!(ok.command, Command::Entropy);
        assert_eq!(ok.source, Source::Inline("3,6".into()));
        assert_eq!(parse(&["sweep", "--sweep", "ratio:9"]).unwrap().source, Source::None);
        assert_eq!(parse(&["mutinfo", "-"]).unwrap().source, Source::Stdin);
    }
}
