//! `genpoint`: experiment runner over the genpoint library.
//!
//! Every report starts with the resolved settings as `#` lines, so rerunning
//! with the same settings reproduces it byte for byte.

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod spec;

use config::{Format, Params};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Lib(#[from] genpoint::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use genpoint::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Lib(E::Parse(_) | E::InvalidInput(_) | E::CapMismatch(_)) => 2,
            CliError::Lib(E::SupportMismatch(_)) => 4,
            CliError::Lib(E::Numeric(_) | E::BudgetExhausted { .. } | E::StreamExhausted { .. } | E::MassOutOfRange { .. }) => 3,
            CliError::Lib(_) | CliError::Io(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "genpoint", version, about = "Dimension of generic points: pressure, seeds, Cantor sets, continued fractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Truncated Gurevich pressure with its (N, d) trend
    Pressure(Params),
    /// dim_ν G_μ = max{α_ν, β(ν|μ)}
    Dim(Params),
    /// Build a generic point under digit caps and write its digits
    Seed(Params),
    /// d*(Δ_{x,n}, μ) along horizons, for a stream file or a fresh seed
    Verify(Params),
    /// Local-dimension proxies on Y* or F_z samples
    Cantor(Params),
    /// Dimension of the generic points of a measure under the Gauss map
    Cfdim(Params),
}

fn run(cli: Cli) -> Result<(), CliError> {
    type Run = fn(&mut Params) -> Result<commands::Output, CliError>;
    let (name, params, f): (&str, Params, Run) = match cli.command {
        Command::Pressure(p) => ("pressure", p, commands::pressure),
        Command::Dim(p) => ("dim", p, commands::dim),
        Command::Seed(p) => ("seed", p, commands::seed),
        Command::Verify(p) => ("verify", p, commands::verify),
        Command::Cantor(p) => ("cantor", p, commands::cantor),
        Command::Cfdim(p) => ("cfdim", p, commands::cfdim),
    };
    let mut params = params.resolve(name)?;
    let out = f(&mut params)?;

    let body = match params.format.unwrap_or_default() {
        Format::Text => format!("# genpoint {name}\n{}{}", params.echo(), out.text),
        Format::Json => {
            let mut settings = serde_json::to_value(&params).map_err(genpoint::Error::from)?;
            if let Some(m) = settings.as_object_mut() {
                for k in ["workers", "format", "out", "csv"] {
                    m.remove(k);
                }
            }
            let doc = serde_json::json!({ "command": name, "settings": settings, "result": out.json });
            serde_json::to_string_pretty(&doc).map_err(genpoint::Error::from)? + "\n"
        }
    };
    match &params.out {
        Some(path) => write(path, &body)?,
        None => print!("{body}"),
    }
    if let (Some(path), Some(csv)) = (&params.csv, &out.csv) {
        write(path, &format!("# genpoint {name}\n{}{csv}", params.echo()))?;
    }
    Ok(())
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genpoint: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
