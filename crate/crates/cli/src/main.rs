mod cli;
mod commands;
mod error;
mod output;
mod settings;
mod svg;
mod values;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind as ClapKind;
use clap::Parser;

use cli::{Cli, Command};
use error::{usage, CliError, CliResult};
use output::{write_outcome, Manifest, ERROR_FILE};
use settings::Settings;

const DEFAULT_OUT: &str = "covdc-out";

/// `oscint decay`, `tarry scan`, ... from the serialized command.
fn command_name(params: &serde_json::Value) -> String {
    [params.get("command"), params.get("action")]
        .into_iter()
        .flatten()
        .filter_map(|v| v.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn emit_error(e: &CliError, out: Option<&Path>) -> u8 {
    let rec = e.record();
    let line = serde_json::to_string(&rec).unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", rec.error));
    eprintln!("{line}");
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = std::fs::write(dir.join(ERROR_FILE), line + "\n");
        }
    }
    rec.exit_code
}

fn replay_source(path: &Path) -> CliResult<(Manifest, Cli)> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read manifest {}: {e}", path.display())))?;
    let m: Manifest = serde_json::from_str(&text).map_err(|e| usage(format!("bad manifest: {e}")))?;
    let argv = std::iter::once("covdc".to_string()).chain(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("manifest argv does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("replay cannot be nested"));
    }
    Ok((m, cli))
}

fn run_parsed(cli: Cli, argv: &[String], out: &Path) -> CliResult<()> {
    let (settings, command, argv) = match &cli.command {
        Command::Replay(r) => {
            let (m, inner) = replay_source(&r.manifest)?;
            let mut s = m.settings.clone();
            s.apply_env()?;
            (s, inner.command, m.argv)
        }
        _ => (
            Settings::load(cli.config.as_deref(), cli.seed, cli.budget, cli.threads)?,
            cli.command,
            argv.to_vec(),
        ),
    };
    let outcome = commands::execute(&command, &settings)?;
    let params = serde_json::to_value(&command)?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command_name(&params),
        params,
        seed: settings.seed,
        budget: settings.budget,
        settings,
        argv,
        outputs: Vec::new(),
    };
    write_outcome(out, &outcome, manifest)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run(argv: Vec<String>) -> u8 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            if matches!(e.kind(), ClapKind::DisplayHelp | ClapKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let _ = e.print();
            return emit_error(&usage(e.kind().to_string()), None);
        }
    };
    let out: PathBuf = cli.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    match run_parsed(cli, &argv[1..], &out) {
        Ok(()) => 0,
        Err(e) => emit_error(&e, Some(&out)),
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args().collect()))
}
