//! Solve a user-written system: the defocusing MkdV equation.

use twsolve::pipeline::{run_solve, RunConfig};
use twsolve::solutions::OutputFormat;

const SOURCE: &str = r#"
system "defocusing_mkdv"
functions u(x,t)
eq: u_t - 6*u^2*u_x + u_xxx = 0
"#;

fn main() {
    let config = RunConfig {
        format: OutputFormat::Json,
        ..RunConfig::default()
    };
    let outcome = run_solve(SOURCE, &config).expect("pipeline runs");
    println!("{}", outcome.report);
}
