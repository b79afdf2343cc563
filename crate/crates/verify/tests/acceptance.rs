//! Acceptance suite: one line per criterion, details for the failures, and a
//! nonzero exit if any criterion fails. Tolerances are exact (zero residual,
//! set equality) except the runtime limits pinned in `quadfib::verify`.

use std::process::ExitCode;

use quadfib_verify::{VerifyOptions, CHECKS};

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    let mut errors = 0;
    println!("acceptance: witnesses {}", opts.witnesses.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(" | "));
    for (id, check) in CHECKS {
        match check(&opts) {
            Ok(row) => {
                let mark = if row.passed() { "PASS" } else { "FAIL" };
                println!("{id:<4} {mark}  {:>7.1}s  {}", row.elapsed.as_secs_f64(), row.claim);
                if !row.passed() {
                    failed.push(row);
                }
            }
            Err(e) => {
                println!("{id:<4} FAIL  error: {e}");
                errors += 1;
            }
        }
    }
    for row in &failed {
        println!("\n{} observed: {}", row.id, serde_json::to_string(&row.observed).expect("json"));
        println!("{} expected: {}", row.id, serde_json::to_string(&row.expected).expect("json"));
    }
    println!("\n{} of {} criteria pass", CHECKS.len() - failed.len() - errors, CHECKS.len());
    if failed.is_empty() && errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
