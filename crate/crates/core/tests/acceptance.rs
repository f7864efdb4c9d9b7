//! End-to-end acceptance suite. Prints one line per criterion, then fails
//! if any criterion failed.

use std::io::Write;

use perforated::verify::{run_criterion, VerifyOptions, CRITERIA};

/// Written to the stderr handle directly so the lines survive the test
/// harness's output capture.
fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

#[test]
fn acceptance() {
    let opts = VerifyOptions::default();
    let mut failed = Vec::new();
    for &(id, name) in CRITERIA.iter() {
        match run_criterion(id, &opts) {
            Ok(r) => {
                report(&r.line());
                if !r.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                report(&format!("criterion {id:>2} [FAIL] {name}: error: {e}"));
                failed.push(id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
