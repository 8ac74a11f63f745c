//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;

use sobolev_groupoid::acceptance::{criterion, AcceptanceConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = AcceptanceConfig::default();
    let mut failed = Vec::new();
    for id in 1..=CRITERIA {
        match criterion(id, &cfg) {
            Ok(r) => {
                println!("{}", r.line());
                if !r.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("FAIL [{id:2}] error: {e}");
                failed.push(id);
            }
        }
    }
    println!("{}/{CRITERIA} criteria passed", CRITERIA - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
