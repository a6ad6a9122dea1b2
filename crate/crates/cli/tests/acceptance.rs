use std::io::Write;

use setout_cli::accept;

#[test]
fn acceptance_suite() {
    let verdicts = accept::run_all();
    // Written straight to the process stdout so the lines survive capture.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for v in &verdicts {
        writeln!(out, "{}", v.line()).unwrap();
    }
    drop(out);
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
