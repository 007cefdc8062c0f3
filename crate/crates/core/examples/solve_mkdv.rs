//! Run the full pipeline on the coupled MkdV system and print the report.

use twsolve::parser::MKDV_SOURCE;
use twsolve::pipeline::{run_solve, RunConfig};

fn main() {
    let outcome = run_solve(MKDV_SOURCE, &RunConfig::default()).expect("pipeline runs");
    print!("{}", outcome.report);
    println!("exit code {}", outcome.code);
}
