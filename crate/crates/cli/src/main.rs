use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sgc_cli::demo::Demo;
use sgc_cli::{cmd_bounds, cmd_demo, cmd_synth, cmd_verify, Output};

/// Secure groupcast with combinatorial keys: bounds, scheme synthesis and
/// exact verification.
#[derive(Parser)]
#[command(name = "sgc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print rate and bandwidth bounds for a key configuration as JSON.
    Bounds { config: PathBuf },
    /// Build a verified scheme for a key configuration.
    Synth {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Verify a scheme file and print the report as JSON.
    Verify {
        scheme: PathBuf,
        /// Also run the exhaustive oracle (capped by SGC_ORACLE_CAP).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a worked instance end to end.
    Demo {
        name: Demo,
        /// Print the instance's key configuration as JSON instead.
        #[arg(long)]
        emit_config: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bounds { config } => cmd_bounds(&config),
        Command::Synth { config, output, seed } => cmd_synth(&config, &output, seed),
        Command::Verify { scheme, oracle } => cmd_verify(&scheme, oracle),
        Command::Demo { name, emit_config } => cmd_demo(name, emit_config),
    };
    match result {
        Ok(Output { stdout, warnings, exit }) => {
            // a closed pipe (`sgc ... | head`) is not an error
            let _ = writeln!(io::stdout().lock(), "{}", stdout.trim_end());
            for w in warnings {
                eprintln!("sgc: {w}");
            }
            ExitCode::from(exit.code())
        }
        Err(e) => {
            eprintln!("sgc: {e}");
            ExitCode::from(e.exit.code())
        }
    }
}
