//! Runs every acceptance criterion, one line each; exits nonzero on any failure.

use std::process::ExitCode;

use schurbench::acceptance::{run_all, AcceptanceConfig};

fn main() -> ExitCode {
    let results = run_all(&AcceptanceConfig::default());
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!("acceptance: {}/{} passed", results.len() - failed.len(), results.len());
    if results.len() != 11 || !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
