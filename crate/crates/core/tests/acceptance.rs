//! One line per acceptance criterion, then a single verdict. Runs without
//! the libtest harness so the lines are always printed.

use std::process::ExitCode;

use cyclic_chern::suites::{self, Check, SuiteConfig};

/// Criterion id and its wall-clock budget in seconds, where one is stated.
const BUDGETS: [(&str, f64); 4] = [("1", 60.0), ("2", 120.0), ("6", 300.0), ("8", 600.0)];

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let criteria: [fn(&SuiteConfig) -> Check; 11] = [
        suites::relations,
        suites::closedness,
        suites::witness_without_remainder,
        suites::odd_coefficients,
        suites::homomorphism,
        suites::periodicity,
        suites::chain_map,
        suites::degenerate_vanishing,
        suites::bch_compare,
        suites::growth,
        suites::index_formula,
    ];
    let mut failures = Vec::new();
    for run in criteria {
        let check = run(&cfg);
        println!("{}", check.line());
        if !check.ok() {
            failures.push(format!("{} failed: {}", check.id, check.detail));
        }
        if let Some((_, budget)) = BUDGETS.iter().find(|(id, _)| *id == check.id) {
            if check.seconds > *budget {
                failures.push(format!("{} took {:.1} s, budget {budget} s", check.id, check.seconds));
            }
        }
    }
    if failures.is_empty() {
        println!("acceptance: all criteria met");
        ExitCode::SUCCESS
    } else {
        for f in &failures {
            println!("acceptance: {f}");
        }
        ExitCode::FAILURE
    }
}
