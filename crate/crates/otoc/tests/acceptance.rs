//! Runs acceptance criteria 1 to 10 at their stated tolerances and prints
//! one PASS/FAIL line per criterion. Exits nonzero if any fails.

use otoc::validate::{validate, ValidateOptions};

fn main() {
    let report = validate(&ValidateOptions {
        full: true,
        ..ValidateOptions::default()
    });
    for c in &report.criteria {
        println!("{}", c.summary());
        for k in &c.checks {
            let mark = if k.passed { "ok" } else { "FAILED" };
            println!("    {mark:6} {} = {:.6e} (need {} {:.3e})", k.name, k.measured, k.relation, k.limit);
        }
    }
    let failed = report.criteria.iter().filter(|c| !c.passed()).count();
    println!("acceptance: {} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
