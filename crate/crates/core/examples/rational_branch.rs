//! Assemble the k = 0 rational family and check it numerically.

use twsolve::algsolve::{solve_system, Limits};
use twsolve::parser::{parse_system, MKDV_SOURCE};
use twsolve::phi::{make_ansatz, substitute_and_collect};
use twsolve::solutions::{assemble_family, BranchKind};
use twsolve::verify::{verify_numeric, NumericConfig};
use twsolve::wave::reduce_to_ode;

fn main() {
    let pde = parse_system(MKDV_SOURCE).unwrap();
    let ode = reduce_to_ode(&pde, "lambda").unwrap();
    let ansatz = make_ansatz(1, 2).unwrap();
    let system = substitute_and_collect(&ode, &ansatz).unwrap();
    let solved = solve_system(&system, Limits::default()).unwrap();
    for branch in solved.branches.iter().filter(|b| !b.constant) {
        let Ok(family) = assemble_family(
            branch,
            &ansatz,
            &ode.unknowns,
            &ode.wave_speed,
            BranchKind::RationalZeroK,
        ) else {
            continue;
        };
        let report = verify_numeric(&family, &pde, &NumericConfig::default()).unwrap();
        println!("{branch}");
        println!("  u = {}\n  v = {}", family.closed[0], family.closed[1]);
        println!("  {}", report.summary());
    }
}
