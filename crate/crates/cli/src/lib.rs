//! Command-line front end: every command produces a [`Table`] that is written
//! as CSV (with the run configuration in `#` header lines) or JSON.

pub mod commands;
pub mod output;
pub mod ranges;
pub mod validation;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

pub use commands::run;
pub use output::{Cell, Format, Table};

#[derive(Debug, Clone, Parser, Serialize)]
#[command(name = "clonemacro", version, about = "Macroscopicity, distinguishability and metrology of cloned qubit states")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Success probability of identifying the branch from a subgroup of qubits.
    Subgroup(commands::SubgroupArgs),
    /// Effective sizes of the micro-macro state.
    Measures(commands::MeasuresArgs),
    /// Distinguishability under coarse, blurred and noisy readout.
    Distinguish(commands::DistinguishArgs),
    /// Gaussian-POVM outcome distributions.
    PovmProfile(commands::PovmArgs),
    /// Frequency estimation with the noisy Dicke probe.
    Metrology(commands::MetrologyArgs),
    /// Closed forms against the full-register simulator.
    OracleCheck(commands::OracleArgs),
}

impl Cli {
    /// Configuration echoed into every output file.
    pub fn config(&self) -> Value {
        json!({
            "format": self.format,
            "out": self.out,
            "run": self.command,
        })
    }
}

/// Process exit code for a library error: 2 for invalid input, 3 for a
/// failed numerical or consistency check.
pub fn exit_code(err: &clonemacro::Error) -> i32 {
    use clonemacro::Error::*;
    match err {
        UnsupportedInput(_) | Domain(_) | Capacity { .. } => 2,
        InexactSqrt(_) | NumericalHealth(_) | InternalConsistency(_) => 3,
    }
}
