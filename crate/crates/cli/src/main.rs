use std::process::ExitCode;

use clap::Parser;
use conicpath_cli::{dispatch, Cli};

fn main() -> ExitCode {
    dispatch(Cli::parse())
}
