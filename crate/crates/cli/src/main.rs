use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use clonemacro_cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let table = match run(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let config = cli.config();
    let written = match &cli.out {
        Some(path) => std::fs::File::create(path).and_then(|f| {
            let mut w = std::io::BufWriter::new(f);
            table.write(cli.format, &config, &mut w)?;
            w.flush()
        }),
        None => {
            let mut w = std::io::stdout().lock();
            table.write(cli.format, &config, &mut w).and_then(|_| w.flush())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(3);
    }
    if table.failed {
        eprintln!("error: one or more checks failed");
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
