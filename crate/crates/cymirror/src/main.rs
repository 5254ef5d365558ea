//! Command-line driver: closed-string, open-string, and consistency
//! check pipelines over a TOML job specification.
//!
//! Exit codes: 0 on success, 1 on input or usage errors, 2 when a
//! mathematical inconsistency is detected (for example a non-integral
//! quadratic coefficient in a superpotential decomposition).

use clap::{Args, Parser, Subcommand, ValueEnum};
use cymirror::jobspec::{JobSpec, OutputFormat};
use cymirror::report::{cmd_check, cmd_closed, cmd_open, ResultBundle, RunError};
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_ORDER: i64 = 12;

#[derive(Parser)]
#[command(
    name = "cymirror",
    about = "Exact closed and open mirror symmetry for one-parameter Calabi-Yau threefolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mirror map, Yukawa coupling, instanton numbers, monodromy, and
    /// limiting periods.
    Closed(CommonArgs),
    /// Everything from `closed` plus the open-string potential,
    /// superpotential decompositions, and the extended monodromy.
    Open(CommonArgs),
    /// Flatness, WDVV, and weight filtration consistency reports.
    Check(CommonArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Machine,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> OutputFormat {
        match f {
            FormatArg::Table => OutputFormat::Table,
            FormatArg::Machine => OutputFormat::Machine,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML job specification.
    #[arg(long)]
    spec: PathBuf,
    /// Truncation order in z; overrides the spec file.
    #[arg(long)]
    order: Option<i64>,
    /// Output format; overrides the spec file.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: &CommonArgs, f: fn(&JobSpec, i64) -> Result<ResultBundle, RunError>) -> Result<(), RunError> {
    let text = std::fs::read_to_string(&args.spec).map_err(|e| {
        RunError::Input(format!("cannot read {}: {e}", args.spec.display()))
    })?;
    let spec = JobSpec::from_toml(&text).map_err(|e| RunError::Input(e.to_string()))?;
    // Precedence: flag, then spec file, then environment default.
    let env_order = std::env::var("CYMIRROR_ORDER")
        .ok()
        .map(|v| {
            v.parse::<i64>().map_err(|_| {
                RunError::Input(format!("CYMIRROR_ORDER is not an integer: {v:?}"))
            })
        })
        .transpose()?;
    let order = args
        .order
        .or(spec.order)
        .or(env_order)
        .unwrap_or(DEFAULT_ORDER);
    if order < 2 {
        return Err(RunError::Input("truncation order must be at least 2".into()));
    }
    let format = args
        .format
        .map(OutputFormat::from)
        .or(spec.format)
        .unwrap_or(OutputFormat::Table);
    let bundle = f(&spec, order)?;
    let failed_checks = bundle.check.as_ref().is_some_and(|c| !c.all_ok());
    let rendered = bundle.render(format);
    match &args.out {
        Some(path) => std::fs::write(path, rendered).map_err(|e| {
            RunError::Input(format!("cannot write {}: {e}", path.display()))
        })?,
        None => print!("{rendered}"),
    }
    if failed_checks {
        return Err(RunError::Math("one or more consistency checks failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let result = match &cli.command {
        Command::Closed(args) => run(args, cmd_closed),
        Command::Open(args) => run(args, cmd_open),
        Command::Check(args) => run(args, cmd_check),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(RunError::Math(msg)) => {
            eprintln!("inconsistency: {msg}");
            ExitCode::from(2)
        }
    }
}
