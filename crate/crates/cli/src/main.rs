//! `soliton`: catalog listing, sampling, residual checks, profile ODEs,
//! classification and velocity fitting from the command line.
//!
//! Exit status: 0 when every check passes, 1 when a check exceeds its
//! tolerance, 2 when the input could not be checked at all.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod error;
mod settings;
mod spec_file;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::commands::OdeRequest;
use crate::error::CliError;
use crate::settings::Settings;

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = Settings::load(cli.global)?;
    match &cli.command {
        Command::List { family, json } => commands::list(&settings, family.as_deref(), *json),
        Command::Sample { target, params } => commands::sample(&settings, target, params),
        Command::Residual {
            target,
            params,
            v,
            random_points,
        } => commands::residual(&settings, target, params, v.as_deref(), *random_points),
        Command::SolveOde {
            ode,
            v1,
            v2,
            v3,
            init,
            range,
            ode_tol,
            lift,
        } => commands::solve_ode(
            &settings,
            OdeRequest {
                ode,
                v: [*v1, *v2, *v3],
                init: init.as_deref(),
                range: range.as_deref(),
                ode_tol: *ode_tol,
                lift: *lift,
            },
        ),
        Command::Classify { spec, v, coefficients } => {
            commands::classify_cmd(&settings, spec, v.as_deref(), coefficients.as_deref())
        }
        Command::FitVelocity {
            target,
            params,
            constrain,
        } => commands::fit_velocity(&settings, target, params, constrain),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // a closed downstream pipe (e.g. `| head`) is not a failure
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
