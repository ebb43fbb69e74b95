use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use grel_core::Engine;
use grel_shell::{repl, run_script, Mode, SessionConfig};

/// Embedded typed graph-relational database shell.
///
/// With a script path the statements are executed in order; without one an
/// interactive session starts. Besides the SQL dialect (CREATE, CREATE TYPE,
/// MATCH, SET, DELETE) the shell understands DUMP, SCHEMA, GRAPHS, HELP, and
/// EXIT.
#[derive(Parser)]
#[command(name = "grel", version)]
struct Cli {
    /// Script file to execute; omit for an interactive session.
    script: Option<PathBuf>,

    /// Echo each statement before its result.
    #[arg(long)]
    echo: bool,

    /// Stop at the first failed statement (default: on for scripts, off for
    /// the REPL).
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    stop_on_error: Option<bool>,

    /// Print the database dump on exit.
    #[arg(long)]
    dump_after: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.script.is_some() {
        Mode::Script
    } else {
        Mode::Repl
    };
    let mut config = SessionConfig::for_mode(mode);
    config.echo = cli.echo;
    if let Some(stop) = cli.stop_on_error {
        config.stop_on_error = stop;
    }

    let mut engine = Engine::new();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let status = match &cli.script {
        Some(path) => run_script(&mut engine, path, &config, &mut out),
        None => {
            let stdin = io::stdin();
            let mut input = stdin.lock();
            repl(&mut engine, &config, &mut input, &mut out)
        }
    };
    if cli.dump_after {
        let _ = write!(out, "{}", engine.dump());
    }
    ExitCode::from(status as u8)
}
