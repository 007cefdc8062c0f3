//! Balance the ansatz degrees and print the collected algebraic system.

use twsolve::parser::{parse_system, MKDV_SOURCE};
use twsolve::phi::{balance, make_ansatz, substitute_and_collect};
use twsolve::wave::reduce_to_ode;

fn main() {
    let ode = reduce_to_ode(&parse_system(MKDV_SOURCE).unwrap(), "lambda").unwrap();
    let d = balance(&ode).expect("degrees balance");
    println!("{d:?}");
    let system = substitute_and_collect(&ode, &make_ansatz(1, 2).unwrap()).unwrap();
    for eq in &system.equations {
        println!(
            "eq{} phi^{}: {} = 0",
            eq.ode_index + 1,
            eq.phi_power,
            eq.lhs
        );
    }
}
