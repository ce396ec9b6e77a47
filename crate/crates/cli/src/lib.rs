//! Command-line front end for robust interval estimates under the imprecise
//! Dirichlet model.
//!
//! ```text
//! idm entropy  --inline "3,6" --s 1 --mode both
//! idm mutinfo  table.csv --grid-check 60
//! idm credible --inline "5,1\n1,5" --alpha 0.95 --seed 7
//! idm sweep    --sweep ratio:9 --format csv
//! ```
//!
//! Results go to stdout as JSON (schema tag [`report::SCHEMA`]) or CSV.
//! Failures print `error[CODE]: message` to stderr and exit with status 2;
//! the codes are listed in [`CliError::CODES`].

pub mod error;
pub mod input;
pub mod report;
pub mod request;
pub mod run;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use error::CliError;
pub use report::RunResult;
pub use request::{Cli, Command, Format, Mode, RunRequest, SweepSpec};
pub use run::run;

/// Exit status for any reported error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(err: &CliError) -> Self {
        Self { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error[{}]: {err}\n", err.code()) }
    }
}

pub fn render(result: &RunResult, format: Format) -> String {
    match format {
        Format::Json => result.to_json() + "\n",
        Format::Csv => result.to_csv(),
    }
}

/// Parses `args` (program name first), runs, and renders.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            return Outcome { code: 0, stdout: e.to_string(), stderr: String::new() };
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return Outcome::failure(&CliError::Usage(first.to_string()));
        }
    };
    let outcome = RunRequest::from_cli(cli).and_then(|req| run(&req).map(|r| render(&r, req.format)));
    match outcome {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => Outcome::failure(&e),
    }
}
