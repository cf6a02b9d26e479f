use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dyndeg::cli::commands::{cmd_degrees, cmd_sequence, cmd_verify_product};
use dyndeg::cli::job::{JobSpec, Overrides};
use dyndeg::cli::report::{Format, Report};
use dyndeg::cli::suite::cmd_suite;
use dyndeg::cli::CliError;
use dyndeg::degrees::Verdict;

#[derive(Parser)]
#[command(name = "dyndeg", version, about = "Dynamical and relative dynamical degrees of monomial and rational maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Degree sequences and estimated dynamical degrees of one map.
    Degrees(Common),
    /// Check the product formula for a map preserving a fibration.
    VerifyProduct(Common),
    /// Raw degree sequences with per-n estimates.
    Sequence(Common),
    /// Seeded randomized checks over block-triangular matrices.
    Suite(Common),
}

#[derive(Args)]
struct Common {
    /// Job file (JSON); read from standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            n_max: self.n_max,
            tolerance: self.tol,
            seed: self.seed,
        }
    }

    fn job_text(&self, required: bool) -> Result<Option<String>, CliError> {
        match &self.input {
            Some(path) => std::fs::read_to_string(path)
                .map(Some)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display()))),
            None if required => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                Ok(Some(s))
            }
            None => Ok(None),
        }
    }
}

fn run(command: &Command) -> Result<(Report, &Common), CliError> {
    let (common, report) = match command {
        Command::Degrees(c) | Command::VerifyProduct(c) | Command::Sequence(c) => {
            let text = c.job_text(true)?.unwrap_or_default();
            let job = JobSpec::parse(&text)?.validate(&c.overrides())?;
            let report = match command {
                Command::Degrees(_) => cmd_degrees(&job)?,
                Command::VerifyProduct(_) => cmd_verify_product(&job)?,
                _ => cmd_sequence(&job)?,
            };
            (c, report)
        }
        Command::Suite(c) => {
            let spec = match c.job_text(false)? {
                Some(text) => JobSpec::parse(&text)?,
                None => JobSpec::default(),
            };
            (c, cmd_suite(&spec.suite(&c.overrides())?))
        }
    };
    Ok((report, common))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(&cli.command).and_then(|(report, common)| {
        let text = report.render(common.format)?;
        match &common.out {
            Some(path) => std::fs::write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(report)
    });
    match result {
        Ok(Report::Suite(s)) if s.verdict == Verdict::Fail => ExitCode::from(3),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
