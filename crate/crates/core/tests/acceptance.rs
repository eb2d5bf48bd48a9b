//! Every acceptance criterion at its stated tolerance, one line each.
//! Runs without the libtest harness so the lines are always shown.

use std::process::ExitCode;

use congest_mwis::suite::{run_acceptance, SuiteOptions};

fn main() -> ExitCode {
    let reports = run_acceptance(&SuiteOptions::default(), |r| println!("{}", r.line()));
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} of {} criteria passed", reports.len() - failed, reports.len());
    if failed == 0 && reports.len() == 10 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
