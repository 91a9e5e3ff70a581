mod commands;
mod config;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable holding the worker-thread count.
const THREADS_ENV: &str = "FERMISIM_THREADS";

#[derive(Parser)]
#[command(name = "fermisim", version, about = "Simulate fermionic quantum algorithms on a statevector")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Clone, Debug, Default)]
pub struct GlobalOpts {
    /// Amplitude storage, overriding the config file.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendArg>,
    /// Seed for every sampled observable, overriding the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Run the extra (slow) consistency checks.
    #[arg(long, global = true)]
    pub validation_mode: bool,
    /// Where to write the JSON result; a CSV table is written next to it.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum BackendArg {
    Dense,
    Sparse,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Fermi,
    Bose,
}

#[derive(Subcommand)]
enum Command {
    /// Trotter-evolve an initial configuration and measure observables.
    Evolve {
        #[arg(long, short)]
        config: PathBuf,
    },
    /// Antisymmetrize an ordered label tuple with the reversible circuit.
    Antisym {
        /// Strictly increasing labels, e.g. `1,3,6`.
        #[arg(long, value_delimiter = ',', conflicts_with = "config")]
        labels: Vec<u32>,
        /// Particle count; must match the number of labels when given.
        #[arg(long, short)]
        n: Option<usize>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
    /// Run a self-check suite: antisym, trotter-sq, trotter-fq, crossform or scaling.
    Validate { suite: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version requests are not errors
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = std::panic::catch_unwind(|| match &cli.command {
        Command::Evolve { config } => commands::evolve(config, &cli.global),
        Command::Antisym { labels, n, mode, config } => {
            commands::antisym(labels, *n, *mode, config.as_deref(), &cli.global)
        }
        Command::Validate { suite } => commands::validate(suite, &cli.global),
    });
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
        Err(_) => {
            eprintln!("error: internal failure");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV}={raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
