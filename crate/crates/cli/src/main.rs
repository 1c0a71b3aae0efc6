use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use doubling_cli::{run_config_text, run_oracle_suite, RunReport, EXIT_CONFIG};

#[derive(Parser)]
#[command(
    name = "doubling",
    version,
    about = "Doubled free-fermion path experiments"
)]
struct Cli {
    /// Root directory for outputs (overrides the configuration).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON configuration file.
    Run { config: PathBuf },
    /// Compare every implementation against its independent oracle.
    OracleSuite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn report(r: &RunReport) -> ExitCode {
    if let Some(m) = &r.manifest {
        for g in &m.gates {
            println!(
                "{} {}: {}",
                if g.passed { "PASS" } else { "FAIL" },
                g.name,
                g.detail
            );
        }
    }
    if let Some(dir) = &r.directory {
        println!("outputs: {}", dir.display());
    }
    if r.exit_code == 0 {
        println!("{}", r.message);
    } else {
        eprintln!("{}", r.message);
    }
    ExitCode::from(r.exit_code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG as u8 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if n == 0
            || rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .is_err()
        {
            eprintln!("configuration error: invalid thread count {n}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    }
    let out = cli.output.as_deref();
    let r = match &cli.command {
        Command::Run { config } => match std::fs::read_to_string(config) {
            Ok(text) => run_config_text(&text, out),
            Err(e) => {
                eprintln!("configuration error: cannot read {}: {e}", config.display());
                return ExitCode::from(EXIT_CONFIG as u8);
            }
        },
        Command::OracleSuite { seed } => run_oracle_suite(*seed, out),
    };
    report(&r)
}
