mod counterexample;
mod hensel;
mod hfunc;
mod oscint;
mod psbound;
mod report;
mod sublevel;
mod tarry;

use crate::cli::Command;
use crate::error::{usage, CliResult};
use crate::output::Outcome;
use crate::settings::Settings;

pub fn execute(cmd: &Command, s: &Settings) -> CliResult<Outcome> {
    match cmd {
        Command::Oscint(c) => oscint::run(c, s),
        Command::Hfunc(c) => hfunc::run(c, s),
        Command::Hensel(c) => hensel::run(c, s),
        Command::Sublevel(c) => sublevel::run(c, s),
        Command::Psbound(c) => psbound::run(c, s),
        Command::Tarry(c) => tarry::run(c, s),
        Command::Counterexample(c) => counterexample::run(c, s),
        Command::Report(c) => report::run(c),
        Command::Replay(_) => Err(usage("replay cannot be nested")),
    }
}
